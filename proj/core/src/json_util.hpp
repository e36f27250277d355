#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "matwalk/errors.hpp"
#include "matwalk/matroid.hpp"

namespace matwalk::detail {

using json = nlohmann::json;

inline json parse_json_text(std::string_view text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw input_error("malformed JSON");
    return j;
}

inline const json& require_field(const json& j, const char* key, const std::string& path) {
    auto it = j.find(key);
    if (it == j.end()) throw input_error("missing field " + path + "/" + key);
    return *it;
}

inline int require_int(const json& j, const char* key, const std::string& path) {
    const json& v = require_field(j, key, path);
    if (!v.is_number_integer()) throw input_error("field " + path + "/" + key + " must be an integer");
    return v.get<int>();
}

inline double require_number(const json& j, const char* key, const std::string& path) {
    const json& v = require_field(j, key, path);
    if (!v.is_number()) throw input_error("field " + path + "/" + key + " must be a number");
    return v.get<double>();
}

inline std::vector<int> require_int_array(const json& v, const std::string& path) {
    if (!v.is_array()) throw input_error("field " + path + " must be an array");
    std::vector<int> out;
    for (size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number_integer())
            throw input_error("field " + path + "/" + std::to_string(i) + " must be an integer");
        out.push_back(v[i].get<int>());
    }
    return out;
}

// strictly increasing element list
inline Subset require_subset(const json& v, const std::string& path) {
    std::vector<int> idx = require_int_array(v, path);
    for (size_t i = 1; i < idx.size(); ++i)
        if (idx[i] <= idx[i - 1])
            throw input_error("field " + path + " must be strictly increasing");
    try {
        return Subset::from_indices(idx);
    } catch (const input_error& e) {
        throw input_error("field " + path + ": " + e.what());
    }
}

Matroid parse_matroid_json(const json& j, const std::string& path);

}  // namespace matwalk::detail
