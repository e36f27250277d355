#include "matwalk/cli.hpp"

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "matwalk/certify.hpp"
#include "matwalk/complex.hpp"
#include "matwalk/counting.hpp"
#include "matwalk/distribution.hpp"
#include "matwalk/errors.hpp"
#include "matwalk/exact.hpp"
#include "matwalk/matroid_parse.hpp"
#include "matwalk/sampler.hpp"
#include "matwalk/suite.hpp"
#include "matwalk/walks.hpp"

namespace matwalk {

namespace {

using json = nlohmann::ordered_json;

constexpr std::size_t kMaterializeCap = 1u << 20;

// spec arguments accept a file path or inline JSON (leading '{')
std::string load_text(const std::string& arg) {
    if (!arg.empty() && arg.front() == '{') return arg;
    std::ifstream in(arg, std::ios::binary);
    if (!in) throw input_error("cannot open " + arg);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_out(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text << std::flush;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw input_error("cannot write " + path);
    out << text;
}

struct Opts {
    std::string matroid_spec;
    std::string dist_spec;
    std::string out = "-";
    std::string property;
    std::string csv;
    std::string level = "desk";
    std::int64_t count = 0;
    std::int64_t steps = -1;
    std::int64_t thinning = 0;
    int k = -1;
    std::uint64_t seed = 0;
    double sample_eps = 0.01;
    double eps = 0.1;
    double delta = 0.05;
    double p = 0.0;
    double q = 1.0;
    double x = 2.0;
    double y = 2.0;
    int workers = 1;
    bool timings = false;
};

HomogeneousDistribution load_mu(const Opts& o) {
    if (!o.dist_spec.empty() && !o.matroid_spec.empty())
        throw input_error("pass exactly one of --dist and --matroid");
    if (!o.dist_spec.empty()) return parse_distribution(load_text(o.dist_spec));
    if (!o.matroid_spec.empty())
        return HomogeneousDistribution::make_uniform_bases(parse_matroid(load_text(o.matroid_spec)));
    throw input_error("pass one of --dist and --matroid");
}

Matroid load_matroid(const Opts& o) {
    if (!o.matroid_spec.empty()) return parse_matroid(load_text(o.matroid_spec));
    if (!o.dist_spec.empty()) {
        HomogeneousDistribution mu = parse_distribution(load_text(o.dist_spec));
        return mu.matroid();
    }
    throw input_error("pass one of --matroid and --dist");
}

json schedule_json(const AccuracySchedule& s) {
    return json{{"levels", s.levels},
                {"per_level_eps", s.per_level_eps},
                {"per_level_delta", s.per_level_delta},
                {"samples_per_level", s.samples_per_level}};
}

json level_json(const LevelRecord& l) {
    return json{{"label", l.label},   {"element", l.element}, {"marginal", l.marginal},
                {"log_factor", l.log_factor}, {"samples", l.samples}, {"steps", l.steps},
                {"exact", l.exact}};
}

json term_json(const TermRecord& t) {
    json j{{"k", t.k},
           {"log_term", t.log_term},
           {"dropped", t.dropped},
           {"exact", t.exact},
           {"crude_upper", t.crude_upper},
           {"schedule", schedule_json(t.schedule)}};
    json levels = json::array();
    for (const LevelRecord& l : t.levels) levels.push_back(level_json(l));
    j["levels"] = std::move(levels);
    return j;
}

json report_json(const EstimateReport& r) {
    json j;
    j["estimate"] = r.estimate;
    j["log_estimate"] = r.log_estimate;
    j["epsilon"] = r.epsilon;
    j["delta"] = r.delta;
    j["samples_used"] = r.samples_used;
    j["oracle_calls"] = r.oracle_calls;
    j["seed"] = r.seed;
    json breakdown;
    breakdown["schedule"] = schedule_json(r.schedule);
    json levels = json::array();
    for (const LevelRecord& l : r.levels) levels.push_back(level_json(l));
    breakdown["levels"] = std::move(levels);
    json terms = json::array();
    for (const TermRecord& t : r.terms) terms.push_back(term_json(t));
    breakdown["terms"] = std::move(terms);
    j["breakdown"] = std::move(breakdown);
    return j;
}

json check_json(const CheckReport& r) {
    json j;
    j["property"] = r.property;
    j["pass"] = r.pass;
    json wf = json::array();
    if (r.has_worst_face)
        for (int e : r.worst_face.indices()) wf.push_back(e);
    j["worst_face"] = std::move(wf);
    j["worst_value"] = r.worst_value;
    j["tolerance"] = r.tolerance;
    if (!r.detail.empty()) j["detail"] = r.detail;
    return j;
}

int emit_report(const Opts& o, const EstimateReport& rep) {
    write_out(o.out, report_json(rep).dump(2) + "\n");
    return 0;
}

int emit_check(const Opts& o, const CheckReport& rep) {
    write_out(o.out, check_json(rep).dump(2) + "\n");
    return rep.pass ? 0 : 1;
}

int cmd_sample(const Opts& o) {
    HomogeneousDistribution mu = load_mu(o);
    auto t0 = std::chrono::steady_clock::now();
    SamplerConfig cfg{o.seed, o.sample_eps, o.steps, o.thinning};
    std::int64_t steps_used = 0;
    std::vector<Subset> draws = sample(mu, o.count, cfg, o.workers, &steps_used);
    double wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    std::string text;
    text.reserve(static_cast<std::size_t>(draws.size() + 1) * 16);
    for (Subset s : draws) {
        json line = json::array();
        for (int e : s.indices()) line.push_back(e);
        text += line.dump();
        text += '\n';
    }
    json meta{{"seed", o.seed}, {"steps_used", steps_used}, {"oracle_calls", mu.oracle_calls()}};
    if (o.timings) meta["wall_ms"] = wall_ms;
    text += meta.dump();
    text += '\n';
    write_out(o.out, text);
    return 0;
}

CheckReport all_levels_check(const WeightedComplex& x, int k,
                             CheckReport (*f)(const WeightedComplex&, int), const char* name) {
    if (k >= 0) return f(x, k);
    CheckReport combined;
    combined.property = name;
    combined.pass = true;
    combined.worst_value = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (int lvl = 1; lvl < x.d; ++lvl) {
        CheckReport r = f(x, lvl);
        if (!any || r.worst_value > combined.worst_value || (!r.pass && combined.pass)) {
            combined = r;
            combined.detail += " (worst over levels 1.." + std::to_string(x.d - 1) + ")";
        }
        any = true;
        if (!r.pass) break;
    }
    if (!any) {
        combined.worst_value = 0.0;
        combined.detail = "no interior levels to check for d=" + std::to_string(x.d);
    }
    return combined;
}

int cmd_verify(const Opts& o, bool seed_given) {
    if (o.property == "expander" || o.property == "sle" || o.property == "counts" ||
        o.property == "loewner") {
        HomogeneousDistribution mu = load_mu(o);
        ExplicitPolynomial poly = materialize(mu, kMaterializeCap);
        if (o.property == "sle") return emit_check(o, check_strong_log_concavity(poly));
        WeightedComplex x = build_complex(poly);
        if (o.property == "expander") return emit_check(o, check_zero_local_expander(x));
        if (o.property == "counts")
            return emit_check(o, all_levels_check(x, o.k, eigenvalue_count_check, "eigenvalue_count_bound"));
        return emit_check(o, all_levels_check(x, o.k, loewner_domination_check, "loewner_domination"));
    }
    Matroid m = load_matroid(o);
    if (o.property == "expansion") {
        BasesExchangeGraph g = bases_exchange_graph(m);
        double val = exact_expansion(g);
        CheckReport rep;
        rep.property = "bases_exchange_expansion";
        rep.tolerance = 1e-12;
        rep.worst_value = val;
        rep.pass = val >= 1.0 - 1e-12;
        rep.detail = std::to_string(g.bases.size()) + " bases, " + std::to_string(g.edge_count) +
                     " exchange edges, minimum expansion " + std::to_string(val);
        return emit_check(o, rep);
    }
    if (o.property == "fact-2r") return emit_check(o, transition_bound_check(m));
    if (o.property == "cheeger") return emit_check(o, conductance_vs_cheeger(m));
    if (o.property == "exact-count") {
        if (!seed_given) throw input_error("verify --property exact-count needs --seed");
        auto truth = static_cast<double>(enumerate_bases(m).size());
        EstimateReport est = count_bases(m, o.eps, o.delta, o.seed, o.workers);
        CheckReport rep;
        rep.property = "exact_count_agreement";
        rep.tolerance = o.eps;
        rep.worst_value = std::abs(est.estimate / truth - 1.0);
        rep.pass = rep.worst_value <= o.eps;
        char buf[96];
        std::snprintf(buf, sizeof(buf), "estimate %.6g against exact %.0f", est.estimate, truth);
        rep.detail = buf;
        return emit_check(o, rep);
    }
    throw input_error("unknown property " + o.property);
}

std::string face_csv(Subset s) {
    std::string out;
    for (int e : s.indices()) {
        if (!out.empty()) out += ' ';
        out += std::to_string(e);
    }
    return out;
}

void dump_walk_csv(const std::string& path, const WalkMatrix& w) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw input_error("cannot write " + path);
    out << "row,col,value\n";
    char buf[48];
    for (Eigen::Index i = 0; i < w.p.rows(); ++i)
        for (Eigen::Index j = 0; j < w.p.cols(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", w.p(i, j));
            out << '"' << face_csv(w.faces[static_cast<std::size_t>(i)]) << "\",\""
                << face_csv(w.faces[static_cast<std::size_t>(j)]) << "\"," << buf << '\n';
        }
}

int cmd_spectrum(const Opts& o) {
    HomogeneousDistribution mu = load_mu(o);
    WeightedComplex x = build_complex(materialize(mu, kMaterializeCap));
    if (o.k < 1 || o.k > x.d)
        throw input_error("spectrum: --k must be in [1, " + std::to_string(x.d) + "], got " +
                          std::to_string(o.k));
    json j;
    j["level"] = o.k;
    j["degree"] = x.d;
    WalkMatrix lower = lower_walk(x, o.k);
    Spectrum ls = spectrum(lower);
    json lower_ev = json::array();
    for (double v : ls.eigenvalues) lower_ev.push_back(v);
    j["lower_eigenvalues"] = std::move(lower_ev);
    double residual = ls.residual;
    if (o.k < x.d) {
        WalkMatrix upper = upper_walk(x, o.k);
        Spectrum us = spectrum(upper);
        json upper_ev = json::array();
        for (double v : us.eigenvalues) upper_ev.push_back(v);
        j["upper_eigenvalues"] = std::move(upper_ev);
        json table = json::array();
        bool table_pass = true;
        for (int i = -1; i <= o.k; ++i) {
            double threshold = 1.0 - static_cast<double>(i + 1) / (o.k + 1);
            int observed = 0;
            for (double v : us.eigenvalues)
                if (v > threshold + 1e-9) ++observed;
            int bound = i < 0 ? 0 : x.level_size(i);
            bool row_pass = observed <= bound;
            table_pass = table_pass && row_pass;
            table.push_back(json{{"i", i},
                                 {"threshold", threshold},
                                 {"bound", bound},
                                 {"observed", observed},
                                 {"pass", row_pass}});
        }
        j["count_table"] = std::move(table);
        j["table_pass"] = table_pass;
        residual = std::max(residual, us.residual);
        if (!o.csv.empty()) dump_walk_csv(o.csv + ".upper.csv", upper);
    }
    if (!o.csv.empty()) dump_walk_csv(o.csv + ".lower.csv", lower);
    j["residual"] = residual;
    write_out(o.out, j.dump(2) + "\n");
    return 0;
}

int cmd_suite(const Opts& o) {
    std::vector<CriterionResult> results;
    if (o.out.empty() || o.out == "-") {
        results = run_acceptance_suite(std::cout, o.workers);
    } else {
        std::ofstream out(o.out, std::ios::binary | std::ios::trunc);
        if (!out) throw input_error("cannot write " + o.out);
        results = run_acceptance_suite(out, o.workers);
    }
    int passed = 0;
    for (const CriterionResult& r : results)
        if (r.pass) ++passed;
    std::cout << "acceptance: " << passed << "/" << results.size() << " criteria passed\n";
    return all_pass(results) ? 0 : 1;
}

void add_common(CLI::App* sub, Opts& o) {
    sub->add_option("--out", o.out, "output path, - for standard output");
    sub->add_option("--workers", o.workers, "parallel workers")->check(CLI::PositiveNumber);
}

void add_estimator(CLI::App* sub, Opts& o) {
    sub->add_option("--eps", o.eps, "relative accuracy target")->capture_default_str();
    sub->add_option("--delta", o.delta, "failure probability")->capture_default_str();
    sub->add_option("--seed", o.seed, "rng seed")->required();
    add_common(sub, o);
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"down-up walks on matroids: sampling, counting, certification"};
    app.require_subcommand(1);
    Opts o;
    std::function<int()> action;

    CLI::App* s = app.add_subcommand("sample", "draw subsets from a homogeneous distribution");
    s->add_option("--dist", o.dist_spec, "distribution spec, JSON file or inline");
    s->add_option("--matroid", o.matroid_spec, "matroid spec, sampled as uniform random bases");
    s->add_option("--count", o.count, "number of samples")->required()->check(CLI::NonNegativeNumber);
    s->add_option("--seed", o.seed, "rng seed")->required();
    s->add_option("--eps", o.sample_eps, "total variation target for the automatic step count")
        ->capture_default_str();
    s->add_option("--steps", o.steps, "steps per chain, negative selects the mixing bound")
        ->capture_default_str();
    s->add_option("--thinning", o.thinning, "emit every t-th state of one long chain")->capture_default_str();
    s->add_flag("--timings", o.timings, "append wall_ms to the metadata record");
    add_common(s, o);
    s->callback([&] { action = [&] { return cmd_sample(o); }; });

    CLI::App* cb = app.add_subcommand("count-bases", "estimate the number of bases");
    cb->add_option("--matroid", o.matroid_spec, "matroid spec")->required();
    add_estimator(cb, o);
    cb->callback([&] {
        action = [&] {
            return emit_report(o, count_bases(parse_matroid(load_text(o.matroid_spec)), o.eps, o.delta,
                                              o.seed, o.workers));
        };
    });

    CLI::App* ci = app.add_subcommand("count-indep", "estimate the number of independent sets of size k");
    ci->add_option("--matroid", o.matroid_spec, "matroid spec")->required();
    ci->add_option("--k", o.k, "independent-set size")->required();
    add_estimator(ci, o);
    ci->callback([&] {
        action = [&] {
            return emit_report(o, count_independent_sets(parse_matroid(load_text(o.matroid_spec)), o.k,
                                                         o.eps, o.delta, o.seed, o.workers));
        };
    });

    CLI::App* rl = app.add_subcommand("reliability", "estimate the all-terminal reliability");
    rl->add_option("--matroid", o.matroid_spec, "matroid spec")->required();
    rl->add_option("--p", o.p, "independent failure probability per element")->required();
    add_estimator(rl, o);
    rl->callback([&] {
        action = [&] {
            return emit_report(o, reliability(parse_matroid(load_text(o.matroid_spec)), o.p, o.eps,
                                              o.delta, o.seed, o.workers));
        };
    });

    CLI::App* cl = app.add_subcommand("cluster", "estimate the random-cluster partition function");
    cl->add_option("--matroid", o.matroid_spec, "matroid spec")->required();
    cl->add_option("--p", o.p, "edge weight, p >= 0")->required();
    cl->add_option("--q", o.q, "cluster weight, 0 < q <= 1")->required();
    add_estimator(cl, o);
    cl->callback([&] {
        action = [&] {
            return emit_report(o, cluster_partition(parse_matroid(load_text(o.matroid_spec)), o.p, o.q,
                                                    o.eps, o.delta, o.seed, o.workers));
        };
    });

    CLI::App* tu = app.add_subcommand("tutte", "estimate a Tutte polynomial evaluation");
    tu->add_option("--matroid", o.matroid_spec, "matroid spec")->required();
    tu->add_option("--x", o.x, "first coordinate, x > 1")->required();
    tu->add_option("--y", o.y, "second coordinate, y >= 1 with (x-1)(y-1) <= 1")->required();
    add_estimator(tu, o);
    tu->callback([&] {
        action = [&] {
            return emit_report(o, tutte_eval(parse_matroid(load_text(o.matroid_spec)), o.x, o.y, o.eps,
                                             o.delta, o.seed, o.workers));
        };
    });

    CLI::App* dz = app.add_subcommand("dpp-z", "estimate the size-k dpp partition function");
    dz->add_option("--dist", o.dist_spec, "dpp_alpha distribution spec")->required();
    add_estimator(dz, o);
    dz->callback([&] {
        action = [&] {
            HomogeneousDistribution mu = parse_distribution(load_text(o.dist_spec));
            if (mu.kind() != HomogeneousDistribution::Kind::dpp_alpha)
                throw input_error("dpp-z needs a dpp_alpha distribution spec");
            return emit_report(o, dpp_partition(mu.kernel(), mu.degree(), mu.dpp_alpha_value(), o.eps,
                                                o.delta, o.seed, o.workers));
        };
    });

    CLI::App* v = app.add_subcommand("verify", "check a certified property, exit 1 on failure");
    v->add_option("--property", o.property, "one of expander, sle, counts, loewner, expansion, fact-2r, cheeger, exact-count")
        ->required()
        ->check(CLI::IsMember(
            {"expander", "sle", "counts", "loewner", "expansion", "fact-2r", "cheeger", "exact-count"}));
    v->add_option("--dist", o.dist_spec, "distribution spec");
    v->add_option("--matroid", o.matroid_spec, "matroid spec");
    v->add_option("--k", o.k, "level for counts and loewner, default all levels");
    v->add_option("--eps", o.eps, "tolerance for exact-count")->capture_default_str();
    v->add_option("--delta", o.delta, "failure probability for exact-count")->capture_default_str();
    CLI::Option* vseed = v->add_option("--seed", o.seed, "rng seed, needed by exact-count");
    add_common(v, o);
    v->callback([&] { action = [&, vseed] { return cmd_verify(o, vseed->count() > 0); }; });

    CLI::App* sp = app.add_subcommand("spectrum", "eigenvalues of the level-k walks and the count table");
    sp->add_option("--dist", o.dist_spec, "distribution spec");
    sp->add_option("--matroid", o.matroid_spec, "matroid spec");
    sp->add_option("--k", o.k, "level, 1 <= k <= d")->required();
    sp->add_option("--csv", o.csv, "prefix for walk matrix dumps, writes <prefix>.upper.csv and <prefix>.lower.csv");
    add_common(sp, o);
    sp->callback([&] { action = [&] { return cmd_spectrum(o); }; });

    CLI::App* su = app.add_subcommand("suite", "run the acceptance suite, exit 1 on any failure");
    su->add_option("--level", o.level, "suite size")->check(CLI::IsMember({"desk"}))->capture_default_str();
    add_common(su, o);
    su->callback([&] { action = [&] { return cmd_suite(o); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    try {
        return action ? action() : 2;
    } catch (const input_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const resource_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int run(const std::vector<std::string>& args) {
    std::vector<std::string> full;
    full.reserve(args.size() + 1);
    full.push_back("matwalk");
    full.insert(full.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    argv.reserve(full.size());
    for (const std::string& a : full) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace matwalk
