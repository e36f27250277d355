#include "matwalk/matroid_parse.hpp"

#include "json_util.hpp"

namespace matwalk {

namespace detail {

Matroid parse_matroid_json(const json& j, const std::string& path) {
    if (!j.is_object()) throw input_error("matroid spec at " + (path.empty() ? std::string("/") : path) + " must be an object");
    const json& tj = require_field(j, "type", path);
    if (!tj.is_string()) throw input_error("field " + path + "/type must be a string");
    std::string type = tj.get<std::string>();

    if (type == "uniform") {
        return uniform_matroid(require_int(j, "n", path), require_int(j, "r", path));
    }
    if (type == "partition") {
        const json& bj = require_field(j, "blocks", path);
        if (!bj.is_array()) throw input_error("field " + path + "/blocks must be an array");
        std::vector<std::vector<int>> blocks;
        for (size_t i = 0; i < bj.size(); ++i)
            blocks.push_back(require_int_array(bj[i], path + "/blocks/" + std::to_string(i)));
        std::vector<int> caps = require_int_array(require_field(j, "caps", path), path + "/caps");
        return partition_matroid(blocks, caps);
    }
    if (type == "graphic") {
        int vertices = require_int(j, "vertices", path);
        const json& ej = require_field(j, "edges", path);
        if (!ej.is_array()) throw input_error("field " + path + "/edges must be an array");
        std::vector<std::pair<int, int>> edges;
        for (size_t i = 0; i < ej.size(); ++i) {
            std::vector<int> uv = require_int_array(ej[i], path + "/edges/" + std::to_string(i));
            if (uv.size() != 2) throw input_error("field " + path + "/edges/" + std::to_string(i) + " must be a pair [u, v]");
            edges.emplace_back(uv[0], uv[1]);
        }
        return graphic_matroid(vertices, edges);
    }
    if (type == "linear") {
        int field = require_int(j, "field", path);
        const json& mj = require_field(j, "matrix", path);
        if (!mj.is_array()) throw input_error("field " + path + "/matrix must be an array of rows");
        std::vector<std::vector<int>> rows;
        for (size_t i = 0; i < mj.size(); ++i)
            rows.push_back(require_int_array(mj[i], path + "/matrix/" + std::to_string(i)));
        return linear_matroid_gfp(field, rows);
    }
    if (type == "truncation") {
        Matroid inner = parse_matroid_json(require_field(j, "inner", path), path + "/inner");
        return inner.truncate(require_int(j, "k", path));
    }
    if (type == "contract" || type == "delete") {
        Matroid inner = parse_matroid_json(require_field(j, "inner", path), path + "/inner");
        Subset s = require_subset(require_field(j, "set", path), path + "/set");
        if (!Subset::full(inner.size()).contains_all(s))
            throw input_error("field " + path + "/set references elements outside the inner ground set");
        return type == "contract" ? inner.contract(s) : inner.remove(s);
    }
    if (type == "dual") {
        return parse_matroid_json(require_field(j, "inner", path), path + "/inner").dual();
    }
    throw input_error("unknown matroid type \"" + type + "\" at " + (path.empty() ? std::string("/") : path) + "/type");
}

}  // namespace detail

Matroid parse_matroid(std::string_view json_text) {
    return detail::parse_matroid_json(detail::parse_json_text(json_text), "");
}

}  // namespace matwalk
