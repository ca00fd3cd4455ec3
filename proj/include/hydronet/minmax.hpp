#pragma once

#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hydronet/common.hpp"

namespace hydronet {

struct MinMaxEntry {
    std::string name;
    double x_min = 0.0;
    double x_max = 0.0;
    bool degenerate = false;

    friend bool operator==(const MinMaxEntry&, const MinMaxEntry&) = default;
};

// Per-feature Min-Max scaling parameters, persisted alongside trained models
// so training and inference apply the identical transform.
struct MinMaxParams {
    std::vector<MinMaxEntry> features;

    const MinMaxEntry& entry(const std::string& name) const {
        for (const auto& f : features)
            if (f.name == name) return f;
        throw Error("MinMaxParams: no feature '" + name + "'");
    }

    bool has(const std::string& name) const {
        for (const auto& f : features)
            if (f.name == name) return true;
        return false;
    }

    friend bool operator==(const MinMaxParams&, const MinMaxParams&) = default;
};

inline MinMaxEntry fit_minmax(std::span<const double> values, const std::string& name) {
    if (values.empty()) throw Error("fit_minmax('" + name + "'): empty sequence");
    double lo = values[0], hi = values[0];
    for (double v : values) {
        if (v < lo) lo = v;
        if (v > hi) hi = v;
    }
    return {name, lo, hi, lo == hi};
}

// (x - min) / (max - min); 0 for a degenerate (constant) feature. Out-of-range
// inputs are intentionally not clamped.
inline double normalize(double x, const MinMaxEntry& p) {
    if (p.degenerate) return 0.0;
    return (x - p.x_min) / (p.x_max - p.x_min);
}

inline double denormalize(double x_norm, const MinMaxEntry& p) {
    return x_norm * (p.x_max - p.x_min) + p.x_min;
}

inline nlohmann::json to_json(const MinMaxParams& p) {
    nlohmann::json features = nlohmann::json::array();
    for (const auto& f : p.features)
        features.push_back({{"name", f.name},
                            {"x_min", f.x_min},
                            {"x_max", f.x_max},
                            {"degenerate", f.degenerate}});
    return {{"features", features}, {"version", 1}};
}

inline MinMaxParams minmax_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("version") || !j.contains("features"))
        throw Error("minmax params: missing 'version' or 'features'");
    if (j.at("version").get<int>() != 1)
        throw Error("minmax params: unknown version");
    MinMaxParams p;
    for (const auto& f : j.at("features")) {
        for (const char* key : {"name", "x_min", "x_max", "degenerate"})
            if (!f.contains(key))
                throw Error(std::string("minmax params: feature missing '") + key + "'");
        MinMaxEntry e{f.at("name").get<std::string>(), f.at("x_min").get<double>(),
                      f.at("x_max").get<double>(), f.at("degenerate").get<bool>()};
        if (e.x_min > e.x_max)
            throw Error("minmax params: x_min > x_max for '" + e.name + "'");
        if (e.degenerate != (e.x_min == e.x_max))
            throw Error("minmax params: degenerate flag inconsistent for '" + e.name + "'");
        p.features.push_back(std::move(e));
    }
    return p;
}

inline void save_params(const MinMaxParams& p, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("save_params: cannot write " + path);
    out << to_json(p).dump(2) << "\n";
}

inline MinMaxParams load_params(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("load_params: cannot read " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error("load_params: malformed JSON in " + path + ": " + e.what());
    }
    return minmax_from_json(j);
}

}  // namespace hydronet
