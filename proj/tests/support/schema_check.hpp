#pragma once

// Subset of JSON Schema used by schemas/*.schema.json:
// type, const, enum, required, properties, items.

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace schemacheck {

using nlohmann::json;

inline bool type_matches(const json& v, const std::string& t) {
    if (t == "object") return v.is_object();
    if (t == "array") return v.is_array();
    if (t == "string") return v.is_string();
    if (t == "boolean") return v.is_boolean();
    if (t == "null") return v.is_null();
    if (t == "integer") return v.is_number_integer();
    if (t == "number") return v.is_number() && !v.is_boolean();
    return false;
}

inline void validate(const json& v, const json& s, const std::string& path, std::vector<std::string>& errors) {
    if (s.contains("type")) {
        bool ok = false;
        if (s["type"].is_array()) {
            for (const auto& t : s["type"]) ok = ok || type_matches(v, t.get<std::string>());
        } else {
            ok = type_matches(v, s["type"].get<std::string>());
        }
        if (!ok) {
            errors.push_back(path + ": expected " + s["type"].dump() + ", got " + v.dump().substr(0, 40));
            return;
        }
    }
    if (s.contains("const") && v != s["const"]) errors.push_back(path + ": expected " + s["const"].dump());
    if (s.contains("enum")) {
        bool found = false;
        for (const auto& e : s["enum"]) found = found || e == v;
        if (!found) errors.push_back(path + ": " + v.dump() + " not in " + s["enum"].dump());
    }
    if (v.is_object()) {
        if (s.contains("required"))
            for (const auto& k : s["required"])
                if (!v.contains(k.get<std::string>())) errors.push_back(path + ": missing '" + k.get<std::string>() + "'");
        if (s.contains("properties"))
            for (const auto& [k, sub] : s["properties"].items())
                if (v.contains(k)) validate(v[k], sub, path + "/" + k, errors);
    }
    if (v.is_array() && s.contains("items"))
        for (std::size_t i = 0; i < v.size(); ++i) validate(v[i], s["items"], path + "/" + std::to_string(i), errors);
}

inline std::vector<std::string> validate(const json& doc, const json& schema) {
    std::vector<std::string> errors;
    validate(doc, schema, "", errors);
    return errors;
}

inline json load(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return json::parse(ss.str());
}

}  // namespace schemacheck
