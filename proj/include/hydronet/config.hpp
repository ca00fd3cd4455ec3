#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hydronet/detect.hpp"
#include "hydronet/forest.hpp"
#include "hydronet/fusion.hpp"
#include "hydronet/synth.hpp"

namespace hydronet {

namespace detail {

inline void check_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                       const std::string& context) {
    if (!j.is_object()) throw ConfigError(context + ": expected a JSON object");
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok) throw ConfigError(context + ": unknown key '" + key + "'");
    }
}

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T def) {
    if (!j.contains(key)) return def;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(std::string("config key '") + key + "' has the wrong type");
    }
}

}  // namespace detail

// ---- SynthConfig / AnomalySpec ----

inline SynthConfig synth_config_from_json(const nlohmann::json& j) {
    detail::check_keys(j, {"days", "n_points", "noise_std", "seed"}, "synth");
    SynthConfig cfg;
    cfg.days = detail::get_or(j, "days", cfg.days);
    cfg.n_points = detail::get_or(j, "n_points", cfg.n_points);
    cfg.noise_std = detail::get_or(j, "noise_std", cfg.noise_std);
    cfg.seed = detail::get_or(j, "seed", cfg.seed);
    return cfg;
}

inline std::vector<AnomalySpec> anomaly_specs_from_json(const nlohmann::json& arr) {
    if (!arr.is_array()) throw ConfigError("anomalies: expected an array");
    std::vector<AnomalySpec> specs;
    for (const auto& j : arr) {
        detail::check_keys(j, {"sensor_id", "start_index", "duration", "kind", "magnitude"},
                           "anomalies[]");
        AnomalySpec s;
        s.sensor_id = detail::get_or<std::string>(j, "sensor_id", "");
        s.start_index = detail::get_or<std::size_t>(j, "start_index", 0);
        s.duration = detail::get_or<std::size_t>(j, "duration", 0);
        s.kind = anomaly_direction_from_string(detail::get_or<std::string>(j, "kind", "drop"));
        s.magnitude = detail::get_or(j, "magnitude", 0.0);
        specs.push_back(std::move(s));
    }
    return specs;
}

// ---- ForestConfig ----

inline ForestConfig forest_config_from_json(const nlohmann::json& j) {
    detail::check_keys(j, {"n_trees", "max_depth", "min_leaf", "bootstrap", "seed"}, "forest");
    ForestConfig cfg;
    cfg.n_trees = detail::get_or(j, "n_trees", cfg.n_trees);
    cfg.max_depth = detail::get_or(j, "max_depth", cfg.max_depth);
    cfg.min_leaf = detail::get_or(j, "min_leaf", cfg.min_leaf);
    cfg.bootstrap = detail::get_or(j, "bootstrap", cfg.bootstrap);
    cfg.seed = detail::get_or(j, "seed", cfg.seed);
    return cfg;
}

// ---- EmdConfig ----

inline nlohmann::json to_json(const EmdConfig& cfg) {
    return {{"max_imfs", cfg.max_imfs},
            {"sift", {{"max_iter", cfg.sift.max_iter}, {"sd_threshold", cfg.sift.sd_threshold}}}};
}

inline EmdConfig emd_config_from_json(const nlohmann::json& j) {
    detail::check_keys(j, {"max_imfs", "sift"}, "emd");
    EmdConfig cfg;
    cfg.max_imfs = detail::get_or(j, "max_imfs", cfg.max_imfs);
    if (j.contains("sift")) {
        detail::check_keys(j.at("sift"), {"max_iter", "sd_threshold"}, "emd.sift");
        cfg.sift.max_iter = detail::get_or(j.at("sift"), "max_iter", cfg.sift.max_iter);
        cfg.sift.sd_threshold = detail::get_or(j.at("sift"), "sd_threshold", cfg.sift.sd_threshold);
    }
    return cfg;
}

// ---- CnnEmdConfig ----

inline nlohmann::json to_json(const CnnEmdConfig& cfg) {
    return {{"lookback", cfg.lookback},
            {"imf_channels", cfg.imf_channels},
            {"branch_dilations", cfg.branch_dilations},
            {"filters", cfg.filters},
            {"kernel", cfg.kernel},
            {"batch_norm", cfg.batch_norm},
            {"use_time_features", cfg.use_time_features},
            {"train_stride", cfg.train_stride}};
}

inline CnnEmdConfig cnn_emd_config_from_json(const nlohmann::json& j) {
    detail::check_keys(j,
                       {"lookback", "imf_channels", "branch_dilations", "filters", "kernel",
                        "batch_norm", "use_time_features", "train_stride"},
                       "cnn_emd");
    CnnEmdConfig cfg;
    cfg.lookback = detail::get_or(j, "lookback", cfg.lookback);
    cfg.imf_channels = detail::get_or(j, "imf_channels", cfg.imf_channels);
    cfg.branch_dilations = detail::get_or(j, "branch_dilations", cfg.branch_dilations);
    cfg.filters = detail::get_or(j, "filters", cfg.filters);
    cfg.kernel = detail::get_or(j, "kernel", cfg.kernel);
    cfg.batch_norm = detail::get_or(j, "batch_norm", cfg.batch_norm);
    cfg.use_time_features = detail::get_or(j, "use_time_features", cfg.use_time_features);
    cfg.train_stride = detail::get_or(j, "train_stride", cfg.train_stride);
    return cfg;
}

// ---- FusionConfig ----

inline nlohmann::json to_json(const FusionConfig& cfg) {
    return {{"lookback", cfg.lookback},
            {"lstm_units", cfg.lstm_units},
            {"head_units", cfg.head_units},
            {"use_time_features", cfg.use_time_features},
            {"train_stride", cfg.train_stride},
            {"cnn", to_json(cfg.cnn)},
            {"emd", to_json(cfg.emd)}};
}

inline FusionConfig fusion_config_from_json(const nlohmann::json& j, FusionConfig base = {}) {
    detail::check_keys(j,
                       {"lookback", "lstm_units", "head_units", "use_time_features", "train_stride",
                        "cnn", "emd"},
                       "fusion");
    FusionConfig cfg = std::move(base);
    cfg.lookback = detail::get_or(j, "lookback", cfg.lookback);
    cfg.lstm_units = detail::get_or(j, "lstm_units", cfg.lstm_units);
    cfg.head_units = detail::get_or(j, "head_units", cfg.head_units);
    cfg.use_time_features = detail::get_or(j, "use_time_features", cfg.use_time_features);
    cfg.train_stride = detail::get_or(j, "train_stride", cfg.train_stride);
    if (j.contains("cnn")) cfg.cnn = cnn_emd_config_from_json(j.at("cnn"));
    if (j.contains("emd")) cfg.emd = emd_config_from_json(j.at("emd"));
    cfg.cnn.lookback = cfg.lookback;
    return cfg;
}

// ---- TrainConfig ----

inline nlohmann::json to_json(const TrainConfig& cfg) {
    return {{"epochs", cfg.epochs},
            {"batch_size", cfg.batch_size},
            {"learning_rate", cfg.learning_rate},
            {"early_stop_patience", cfg.early_stop_patience},
            {"lr_reduce_patience", cfg.lr_reduce_patience},
            {"lr_reduce_factor", cfg.lr_reduce_factor},
            {"min_lr", cfg.min_lr},
            {"validation_fraction", cfg.validation_fraction},
            {"seed", cfg.seed}};
}

inline TrainConfig train_config_from_json(const nlohmann::json& j) {
    detail::check_keys(j,
                       {"epochs", "batch_size", "learning_rate", "early_stop_patience",
                        "lr_reduce_patience", "lr_reduce_factor", "min_lr", "validation_fraction",
                        "seed"},
                       "train");
    TrainConfig cfg;
    cfg.epochs = detail::get_or(j, "epochs", cfg.epochs);
    cfg.batch_size = detail::get_or(j, "batch_size", cfg.batch_size);
    cfg.learning_rate = detail::get_or(j, "learning_rate", cfg.learning_rate);
    cfg.early_stop_patience = detail::get_or(j, "early_stop_patience", cfg.early_stop_patience);
    cfg.lr_reduce_patience = detail::get_or(j, "lr_reduce_patience", cfg.lr_reduce_patience);
    cfg.lr_reduce_factor = detail::get_or(j, "lr_reduce_factor", cfg.lr_reduce_factor);
    cfg.min_lr = detail::get_or(j, "min_lr", cfg.min_lr);
    cfg.validation_fraction = detail::get_or(j, "validation_fraction", cfg.validation_fraction);
    cfg.seed = detail::get_or(j, "seed", cfg.seed);
    return cfg;
}

// ---- DetectConfig ----

struct DetectConfig {
    double threshold = 3.0;
    std::size_t min_duration = 1;
    std::size_t window = 96;
};

inline DetectConfig detect_config_from_json(const nlohmann::json& j) {
    detail::check_keys(j, {"threshold", "min_duration", "window"}, "detect");
    DetectConfig cfg;
    cfg.threshold = detail::get_or(j, "threshold", cfg.threshold);
    cfg.min_duration = detail::get_or(j, "min_duration", cfg.min_duration);
    cfg.window = detail::get_or(j, "window", cfg.window);
    return cfg;
}

// ---- Bundle directories ----
// A bundle is a directory holding network.nnw, minmax.json, and config.json;
// a fusion bundle nests its inlet forecaster under inlet/.

namespace detail {

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    try {
        nlohmann::json j;
        in >> j;
        return j;
    } catch (const nlohmann::json::exception& e) {
        throw Error("malformed JSON in " + path.string() + ": " + e.what());
    }
}

}  // namespace detail

inline void save_bundle(const ForecasterBundle& bundle, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const nlohmann::json cfg = {{"type", "forecaster"},
                                {"cnn_emd", to_json(bundle.cfg)},
                                {"emd", to_json(bundle.emd)}};
    detail::write_text(dir / "config.json", cfg.dump(2) + "\n");
    save_params(bundle.minmax, (dir / "minmax.json").string());
    save_weights(bundle.network, (dir / "network.nnw").string());
}

inline ForecasterBundle load_forecaster_bundle(const std::filesystem::path& dir) {
    const nlohmann::json cfg = detail::read_json_file(dir / "config.json");
    if (cfg.value("type", "") != "forecaster")
        throw Error("load_forecaster_bundle: " + (dir / "config.json").string() +
                    " is not a forecaster bundle");
    ForecasterBundle bundle;
    bundle.cfg = cnn_emd_config_from_json(cfg.at("cnn_emd"));
    bundle.emd = emd_config_from_json(cfg.at("emd"));
    bundle.minmax = load_params((dir / "minmax.json").string());
    bundle.network = build_cnn_emd(bundle.cfg, 0);
    load_weights(bundle.network, (dir / "network.nnw").string());
    return bundle;
}

inline void save_bundle(const FusionBundle& bundle, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const nlohmann::json cfg = {{"type", "fusion"},
                                {"fusion", to_json(bundle.cfg)},
                                {"pressure_ids", bundle.pressure_ids},
                                {"flow_ids", bundle.flow_ids}};
    detail::write_text(dir / "config.json", cfg.dump(2) + "\n");
    save_params(bundle.minmax, (dir / "minmax.json").string());
    save_weights(bundle.head, (dir / "network.nnw").string());
    save_bundle(bundle.inlet_branch, dir / "inlet");
}

inline FusionBundle load_fusion_bundle(const std::filesystem::path& dir) {
    const nlohmann::json cfg = detail::read_json_file(dir / "config.json");
    if (cfg.value("type", "") != "fusion")
        throw Error("load_fusion_bundle: " + (dir / "config.json").string() + " is not a fusion bundle");
    FusionBundle bundle;
    bundle.cfg = fusion_config_from_json(cfg.at("fusion"));
    bundle.pressure_ids = cfg.at("pressure_ids").get<std::vector<std::string>>();
    bundle.flow_ids = cfg.at("flow_ids").get<std::vector<std::string>>();
    bundle.minmax = load_params((dir / "minmax.json").string());
    bundle.head = build_fusion_head(bundle.cfg, bundle.n_points(), 0);
    load_weights(bundle.head, (dir / "network.nnw").string());
    bundle.inlet_branch = load_forecaster_bundle(dir / "inlet");
    return bundle;
}

inline std::string bundle_type(const std::filesystem::path& dir) {
    return detail::read_json_file(dir / "config.json").value("type", "");
}

}  // namespace hydronet
