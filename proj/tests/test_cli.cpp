#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "matwalk/cli.hpp"

using namespace matwalk;
namespace fs = std::filesystem;
using njson = nlohmann::json;

namespace {

const std::string kU24 = R"({"type":"uniform","n":4,"r":2})";
const std::string kK4 =
    R"({"type":"graphic","vertices":4,"edges":[[0,1],[0,2],[0,3],[1,2],[1,3],[2,3]]})";
const std::string kUniformDist = R"({"type":"uniform_bases","matroid":{"type":"uniform","n":4,"r":2}})";
const std::string kDecomposable =
    R"({"type":"explicit","n":4,"d":2,"terms":[{"set":[0,1],"coef":1},{"set":[2,3],"coef":1}]})";

fs::path scratch() {
    fs::path dir = fs::temp_directory_path() / "matwalk_cli_tests";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) out.push_back(line);
    return out;
}

njson run_json(std::vector<std::string> args, const std::string& name, int expect = 0) {
    fs::path out = scratch() / name;
    args.insert(args.end(), {"--out", out.string()});
    CHECK(run(args) == expect);
    return njson::parse(slurp(out));
}

}  // namespace

TEST_CASE("bad invocations exit 2") {
    CHECK(run({}) == 2);
    CHECK(run({"frobnicate"}) == 2);
    CHECK(run({"sample", "--matroid", kU24, "--count", "1"}) == 2);  // no seed
    CHECK(run({"sample", "--matroid", kU24, "--count", "-1", "--seed", "1"}) == 2);
    CHECK(run({"count-bases", "--matroid", kU24, "--seed", "1", "--bogus"}) == 2);
    CHECK(run({"suite", "--level", "warehouse"}) == 2);
    CHECK(run({"count-bases", "--matroid", "no_such_file.json", "--seed", "1", "--out",
               (scratch() / "never").string()}) == 2);
    CHECK(run({"count-bases", "--matroid", "{\"type\":", "--seed", "1"}) == 2);
    CHECK(run({"sample", "--matroid", kU24, "--dist", kUniformDist, "--count", "1", "--seed", "1"}) == 2);
}

TEST_CASE("help exits 0") {
    CHECK(run({"--help"}) == 0);
    CHECK(run({"sample", "--help"}) == 0);
}

TEST_CASE("sample emits draws then a metadata record") {
    fs::path out = scratch() / "sample.jsonl";
    REQUIRE(run({"sample", "--dist", kUniformDist, "--count", "3", "--seed", "7", "--out",
                 out.string()}) == 0);
    auto lines = lines_of(slurp(out));
    REQUIRE(lines.size() == 4);
    for (int i = 0; i < 3; ++i) {
        njson draw = njson::parse(lines[static_cast<size_t>(i)]);
        REQUIRE(draw.is_array());
        REQUIRE(draw.size() == 2);
        CHECK(draw[0].get<int>() < draw[1].get<int>());
        CHECK(draw[1].get<int>() < 4);
    }
    njson meta = njson::parse(lines.back());
    CHECK(meta["seed"] == 7);
    CHECK(meta["steps_used"].get<long long>() > 0);
    CHECK(meta["oracle_calls"].get<long long>() > 0);
    CHECK(!meta.contains("wall_ms"));

    fs::path timed = scratch() / "sample_timed.jsonl";
    REQUIRE(run({"sample", "--matroid", kU24, "--count", "1", "--seed", "7", "--timings", "--out",
                 timed.string()}) == 0);
    njson tmeta = njson::parse(lines_of(slurp(timed)).back());
    CHECK(tmeta.contains("wall_ms"));

    fs::path empty = scratch() / "sample_empty.jsonl";
    REQUIRE(run({"sample", "--matroid", kU24, "--count", "0", "--seed", "7", "--out",
                 empty.string()}) == 0);
    CHECK(lines_of(slurp(empty)).size() == 1);
}

TEST_CASE("sample reruns are byte identical and draws ignore worker count") {
    std::vector<std::string> base = {"sample", "--dist",  kUniformDist, "--count",
                                     "20",     "--seed",  "99",         "--thinning",
                                     "0",      "--steps", "40"};
    fs::path a = scratch() / "det_a.jsonl", b = scratch() / "det_b.jsonl", c = scratch() / "det_c.jsonl";
    auto with_out = [&](const fs::path& p, std::vector<std::string> extra) {
        std::vector<std::string> args = base;
        args.insert(args.end(), extra.begin(), extra.end());
        args.insert(args.end(), {"--out", p.string()});
        REQUIRE(run(args) == 0);
    };
    with_out(a, {});
    with_out(b, {});
    CHECK(slurp(a) == slurp(b));
    with_out(c, {"--workers", "3"});
    auto la = lines_of(slurp(a)), lc = lines_of(slurp(c));
    REQUIRE(la.size() == lc.size());
    for (size_t i = 0; i + 1 < la.size(); ++i) CHECK(la[i] == lc[i]);
}

TEST_CASE("count-bases report schema and determinism") {
    std::vector<std::string> args = {"count-bases", "--matroid", kU24,  "--eps", "0.3",
                                     "--delta",     "0.2",       "--seed", "5"};
    njson rep = run_json(args, "cb.json");
    CHECK(rep["epsilon"] == 0.3);
    CHECK(rep["delta"] == 0.2);
    CHECK(rep["seed"] == 5);
    double est = rep["estimate"].get<double>();
    CHECK(est > 6.0 * 0.7);
    CHECK(est < 6.0 * 1.3);
    CHECK(rep["samples_used"].get<long long>() > 0);
    CHECK(rep["oracle_calls"].get<long long>() > 0);
    const njson& levels = rep["breakdown"]["levels"];
    REQUIRE(levels.size() == 2);
    CHECK(levels[0]["label"] == "contract pivot");
    CHECK(levels[0]["exact"] == false);
    CHECK(levels[1]["exact"] == true);
    CHECK(rep["breakdown"]["schedule"]["levels"].get<int>() >= 1);

    njson again = run_json(args, "cb2.json");
    CHECK(rep.dump() == again.dump());
    std::vector<std::string> par = args;
    par.insert(par.end(), {"--workers", "2"});
    njson parallel = run_json(par, "cb3.json");
    CHECK(parallel["estimate"] == rep["estimate"]);
}

TEST_CASE("remaining estimators run end to end") {
    njson ci = run_json({"count-indep", "--matroid", kK4, "--k", "2", "--eps", "0.4", "--delta",
                         "0.2", "--seed", "6"},
                        "ci.json");
    CHECK(ci["estimate"].get<double>() == doctest::Approx(15.0).epsilon(0.4));

    njson rl = run_json({"reliability", "--matroid", kU24, "--p", "0.5", "--eps", "0.4", "--delta",
                         "0.2", "--seed", "6"},
                        "rl.json");
    CHECK(rl["estimate"].get<double>() > 0.0);
    CHECK(rl["breakdown"]["terms"].size() == 3);  // k = 0, 1, 2

    njson cl = run_json({"cluster", "--matroid", kK4, "--p", "1.0", "--q", "0.5", "--eps", "0.4",
                         "--delta", "0.2", "--seed", "6"},
                        "cl.json");
    CHECK(cl["estimate"].get<double>() == doctest::Approx(393.0 / 16.0).epsilon(0.4));

    njson tu = run_json({"tutte", "--matroid", kU24, "--x", "2.0", "--y", "2.0", "--eps", "0.4",
                         "--delta", "0.2", "--seed", "6"},
                        "tu.json");
    CHECK(tu["estimate"].get<double>() == doctest::Approx(16.0).epsilon(0.4));

    njson dz = run_json({"dpp-z", "--dist",
                         R"({"type":"dpp_alpha","kernel":[[1,0],[0,1]],"k":1,"alpha":0.5})", "--eps",
                         "0.4", "--delta", "0.2", "--seed", "6"},
                        "dz.json");
    CHECK(dz["estimate"].get<double>() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(dz["samples_used"] == 0);
}

TEST_CASE("verify passing properties exit 0") {
    njson ex = run_json({"verify", "--property", "expander", "--matroid", kU24}, "v_ex.json");
    CHECK(ex["pass"] == true);
    njson sle = run_json({"verify", "--property", "sle", "--matroid", kK4}, "v_sle.json");
    CHECK(sle["pass"] == true);
    njson cnt = run_json({"verify", "--property", "counts", "--matroid", kK4}, "v_cnt.json");
    CHECK(cnt["pass"] == true);
    njson cnt1 = run_json({"verify", "--property", "counts", "--matroid", kK4, "--k", "1"}, "v_cnt1.json");
    CHECK(cnt1["pass"] == true);
    njson loe = run_json({"verify", "--property", "loewner", "--matroid", kU24}, "v_loe.json");
    CHECK(loe["pass"] == true);
    njson exp = run_json({"verify", "--property", "expansion", "--matroid", kU24}, "v_exp.json");
    CHECK(exp["pass"] == true);
    CHECK(exp["worst_value"].get<double>() == doctest::Approx(2.0));
    CHECK(run_json({"verify", "--property", "fact-2r", "--matroid", kK4}, "v_f2r.json")["pass"] == true);
    CHECK(run_json({"verify", "--property", "cheeger", "--matroid", kU24}, "v_ch.json")["pass"] == true);
    njson ec = run_json({"verify", "--property", "exact-count", "--matroid", kU24, "--seed", "11",
                         "--eps", "0.2"},
                        "v_ec.json");
    CHECK(ec["pass"] == true);
}

TEST_CASE("verify failures exit 1 and exact-count needs a seed") {
    njson bad = run_json({"verify", "--property", "sle", "--dist", kDecomposable}, "v_bad.json", 1);
    CHECK(bad["pass"] == false);
    REQUIRE(bad["worst_face"].is_array());
    CHECK(bad["worst_face"].empty());
    CHECK(run({"verify", "--property", "exact-count", "--matroid", kU24}) == 2);
    CHECK(run({"verify", "--property", "unknown", "--matroid", kU24}) == 2);
}

TEST_CASE("spectrum reports both walks and the count table") {
    fs::path csv = scratch() / "walks";
    njson sp = run_json({"spectrum", "--matroid", kU24, "--k", "1", "--csv", csv.string()}, "sp.json");
    CHECK(sp["level"] == 1);
    CHECK(sp["degree"] == 2);
    REQUIRE(sp["lower_eigenvalues"].size() == 4);
    CHECK(sp["lower_eigenvalues"][0].get<double>() == doctest::Approx(1.0));
    REQUIRE(sp["upper_eigenvalues"].size() == 4);
    CHECK(sp["upper_eigenvalues"][0].get<double>() == doctest::Approx(1.0));
    for (int i = 1; i < 4; ++i)
        CHECK(sp["upper_eigenvalues"][static_cast<size_t>(i)].get<double>() ==
              doctest::Approx(1.0 / 3.0).epsilon(1e-9));
    REQUIRE(sp["count_table"].size() == 3);
    CHECK(sp["count_table"][0]["bound"] == 0);
    CHECK(sp["count_table"][1]["bound"] == 1);
    CHECK(sp["count_table"][2]["bound"] == 4);
    CHECK(sp["table_pass"] == true);
    CHECK(sp["residual"].get<double>() < 1e-9);
    for (const char* suffix : {".upper.csv", ".lower.csv"}) {
        auto text = slurp(fs::path(csv.string() + suffix));
        CHECK(text.rfind("row,col,value\n", 0) == 0);
    }

    njson top = run_json({"spectrum", "--matroid", kU24, "--k", "2"}, "sp_top.json");
    CHECK(!top.contains("upper_eigenvalues"));
    CHECK(!top.contains("count_table"));
    CHECK(run({"spectrum", "--matroid", kU24, "--k", "5"}) == 2);
    CHECK(run({"spectrum", "--matroid", kU24, "--k", "0"}) == 2);
}

TEST_CASE("domain errors exit 2") {
    auto code = [&](std::vector<std::string> args) { return run(args); };
    CHECK(code({"tutte", "--matroid", kU24, "--x", "2", "--y", "1", "--seed", "1"}) == 2);
    CHECK(code({"tutte", "--matroid", kU24, "--x", "1", "--y", "2", "--seed", "1"}) == 2);
    CHECK(code({"tutte", "--matroid", kU24, "--x", "4", "--y", "3", "--seed", "1"}) == 2);
    CHECK(code({"cluster", "--matroid", kU24, "--p", "1", "--q", "0", "--seed", "1"}) == 2);
    CHECK(code({"cluster", "--matroid", kU24, "--p", "1", "--q", "2", "--seed", "1"}) == 2);
    CHECK(code({"reliability", "--matroid", kU24, "--p", "1.5", "--seed", "1"}) == 2);
    CHECK(code({"dpp-z", "--dist", kUniformDist, "--seed", "1"}) == 2);
    CHECK(code({"count-indep", "--matroid", kU24, "--k", "9", "--seed", "1"}) == 2);
}

TEST_CASE("dense face cap escalates to the resource exit code") {
    REQUIRE(setenv("MATROID_WALKS_CAP", "2", 1) == 0);
    CHECK(run({"spectrum", "--matroid", kK4, "--k", "1", "--out",
               (scratch() / "never2").string()}) == 3);
    REQUIRE(unsetenv("MATROID_WALKS_CAP") == 0);
}
