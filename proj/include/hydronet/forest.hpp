#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "hydronet/series.hpp"

namespace hydronet {

// Regression tree over the three time features (day_of_month, hour,
// minute_slot), splits chosen greedily by variance reduction.
struct TreeNode {
    // leaf when left == nullptr
    int feature_index = -1;
    double threshold = 0.0;
    double mean_value = 0.0;
    std::unique_ptr<TreeNode> left;
    std::unique_ptr<TreeNode> right;

    bool is_leaf() const { return left == nullptr; }
};

struct ForestConfig {
    int n_trees = 50;
    int max_depth = 8;
    int min_leaf = 5;
    bool bootstrap = true;
    std::uint64_t seed = 0;
};

struct ForestModel {
    std::vector<std::unique_ptr<TreeNode>> trees;
    int n_trees = 0;
    int max_depth = 0;
    int min_leaf = 0;
    std::uint64_t seed = 0;
    std::array<std::string, 3> feature_layout = {"day_of_month", "hour", "minute_slot"};
    SensorKind kind = SensorKind::pressure;
};

namespace detail {

inline std::array<double, 3> forest_features(const Timestamp& ts) {
    const TimeFeatures f = time_features(ts);
    return {static_cast<double>(f.day_of_month), static_cast<double>(f.hour),
            static_cast<double>(f.minute_slot)};
}

struct TreeSample {
    std::array<double, 3> x;
    double y;
};

inline std::unique_ptr<TreeNode> build_tree(std::vector<TreeSample>& samples, std::size_t begin,
                                            std::size_t end, int depth, const ForestConfig& cfg,
                                            Rng& rng) {
    auto node = std::make_unique<TreeNode>();
    const std::size_t n = end - begin;
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
        sum += samples[i].y;
        sum2 += samples[i].y * samples[i].y;
    }
    node->mean_value = sum / static_cast<double>(n);
    const double parent_sse = sum2 - sum * sum / static_cast<double>(n);
    if (depth >= cfg.max_depth || n < 2 * static_cast<std::size_t>(cfg.min_leaf) ||
        parent_sse <= 0.0)
        return node;

    // 2 of the 3 candidate features, drawn per node.
    const std::size_t first = rng.uniform_int(3);
    std::size_t second = rng.uniform_int(2);
    if (second >= first) ++second;
    const std::array<std::size_t, 2> candidates = {first, second};

    double best_gain = 0.0;
    int best_feature = -1;
    double best_threshold = 0.0;
    for (const std::size_t f : candidates) {
        // Sorted distinct values present at this node; thresholds at midpoints.
        std::vector<std::pair<double, double>> pairs;  // (feature value, target)
        pairs.reserve(n);
        for (std::size_t i = begin; i < end; ++i) pairs.emplace_back(samples[i].x[f], samples[i].y);
        std::sort(pairs.begin(), pairs.end());
        double left_sum = 0.0;
        std::size_t left_n = 0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            left_sum += pairs[i].second;
            ++left_n;
            if (pairs[i].first == pairs[i + 1].first) continue;
            if (left_n < static_cast<std::size_t>(cfg.min_leaf) ||
                n - left_n < static_cast<std::size_t>(cfg.min_leaf))
                continue;
            const double right_sum = sum - left_sum;
            const double gain = left_sum * left_sum / static_cast<double>(left_n) +
                                right_sum * right_sum / static_cast<double>(n - left_n) -
                                sum * sum / static_cast<double>(n);
            if (gain > best_gain) {
                best_gain = gain;
                best_feature = static_cast<int>(f);
                best_threshold = (pairs[i].first + pairs[i + 1].first) / 2.0;
            }
        }
    }
    if (best_feature < 0) return node;

    node->feature_index = best_feature;
    node->threshold = best_threshold;
    const auto mid = std::partition(samples.begin() + static_cast<std::ptrdiff_t>(begin),
                                    samples.begin() + static_cast<std::ptrdiff_t>(end),
                                    [&](const TreeSample& s) {
                                        return s.x[static_cast<std::size_t>(best_feature)] <
                                               best_threshold;
                                    });
    const std::size_t split = static_cast<std::size_t>(mid - samples.begin());
    node->left = build_tree(samples, begin, split, depth + 1, cfg, rng);
    node->right = build_tree(samples, split, end, depth + 1, cfg, rng);
    return node;
}

}  // namespace detail

// Fits one tree per bootstrap resample of the valid samples. Deterministic:
// per-tree seeds derive from (seed, tree_index).
inline ForestModel fit_forest(const SensorSeries& series, const ForestConfig& cfg = {}) {
    if (cfg.n_trees < 1) throw Error("fit_forest: n_trees must be >= 1");
    series.check_consistent();
    std::vector<detail::TreeSample> base;
    for (std::size_t i = 0; i < series.size(); ++i)
        if (series.valid[i]) base.push_back({detail::forest_features(series.timestamp_at(i)),
                                             series.values[i]});
    if (base.size() < 2 * static_cast<std::size_t>(cfg.min_leaf))
        throw Error("fit_forest('" + series.sensor_id + "'): only " + std::to_string(base.size()) +
                    " valid samples, need at least " + std::to_string(2 * cfg.min_leaf));

    ForestModel model;
    model.n_trees = cfg.n_trees;
    model.max_depth = cfg.max_depth;
    model.min_leaf = cfg.min_leaf;
    model.seed = cfg.seed;
    model.kind = series.kind;
    for (int t = 0; t < cfg.n_trees; ++t) {
        Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(t)));
        std::vector<detail::TreeSample> resample;
        if (cfg.bootstrap) {
            resample.reserve(base.size());
            for (std::size_t i = 0; i < base.size(); ++i)
                resample.push_back(base[rng.uniform_int(base.size())]);
        } else {
            resample = base;
        }
        model.trees.push_back(detail::build_tree(resample, 0, resample.size(), 0, cfg, rng));
    }
    return model;
}

inline double predict_tree(const TreeNode& node, const std::array<double, 3>& x) {
    const TreeNode* cur = &node;
    while (!cur->is_leaf())
        cur = x[static_cast<std::size_t>(cur->feature_index)] < cur->threshold ? cur->left.get()
                                                                               : cur->right.get();
    return cur->mean_value;
}

inline double predict_pressure(const ForestModel& model, const Timestamp& ts) {
    if (model.trees.empty()) throw Error("predict_pressure: model not fitted");
    const auto x = detail::forest_features(ts);
    double sum = 0.0;
    for (const auto& tree : model.trees) sum += predict_tree(*tree, x);
    return sum / static_cast<double>(model.trees.size());
}

// Replaces every invalid sample with the forest prediction at its timestamp;
// valid samples are untouched bit for bit.
inline SensorSeries impute_series(const SensorSeries& series, const ForestModel& model) {
    SensorSeries out = series;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!out.valid[i]) {
            out.values[i] = predict_pressure(model, out.timestamp_at(i));
            out.valid[i] = 1;
        }
    }
    return out;
}

// --- JSON serialization (CLI `impute --save-model`) ---

inline nlohmann::json tree_to_json(const TreeNode& node) {
    if (node.is_leaf()) return {{"mean_value", node.mean_value}};
    return {{"feature_index", node.feature_index},
            {"threshold", node.threshold},
            {"left", tree_to_json(*node.left)},
            {"right", tree_to_json(*node.right)}};
}

inline std::unique_ptr<TreeNode> tree_from_json(const nlohmann::json& j) {
    auto node = std::make_unique<TreeNode>();
    if (j.contains("mean_value")) {
        node->mean_value = j.at("mean_value").get<double>();
        return node;
    }
    for (const char* key : {"feature_index", "threshold", "left", "right"})
        if (!j.contains(key)) throw Error(std::string("forest json: node missing '") + key + "'");
    node->feature_index = j.at("feature_index").get<int>();
    if (node->feature_index < 0 || node->feature_index > 2)
        throw Error("forest json: feature_index out of range");
    node->threshold = j.at("threshold").get<double>();
    node->left = tree_from_json(j.at("left"));
    node->right = tree_from_json(j.at("right"));
    return node;
}

inline nlohmann::json to_json(const ForestModel& m) {
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& t : m.trees) trees.push_back(tree_to_json(*t));
    return {{"n_trees", m.n_trees},
            {"max_depth", m.max_depth},
            {"min_leaf", m.min_leaf},
            {"seed", m.seed},
            {"feature_layout", m.feature_layout},
            {"kind", m.kind == SensorKind::flow ? "flow"
                     : m.kind == SensorKind::inlet_pressure ? "inlet_pressure" : "pressure"},
            {"trees", std::move(trees)}};
}

inline ForestModel forest_from_json(const nlohmann::json& j) {
    ForestModel m;
    for (const char* key : {"n_trees", "max_depth", "min_leaf", "seed", "feature_layout", "trees"})
        if (!j.contains(key)) throw Error(std::string("forest json: missing '") + key + "'");
    m.n_trees = j.at("n_trees").get<int>();
    m.max_depth = j.at("max_depth").get<int>();
    m.min_leaf = j.at("min_leaf").get<int>();
    m.seed = j.at("seed").get<std::uint64_t>();
    const std::string kind = j.value("kind", "pressure");
    m.kind = kind == "flow" ? SensorKind::flow
             : kind == "inlet_pressure" ? SensorKind::inlet_pressure : SensorKind::pressure;
    for (const auto& t : j.at("trees")) m.trees.push_back(tree_from_json(t));
    if (m.trees.empty() || static_cast<int>(m.trees.size()) != m.n_trees)
        throw Error("forest json: tree count does not match n_trees");
    return m;
}

inline void save_forest(const ForestModel& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("save_forest: cannot write " + path);
    out << to_json(m).dump(2) << "\n";
}

inline ForestModel load_forest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("load_forest: cannot read " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error("load_forest: malformed JSON in " + path + ": " + e.what());
    }
    return forest_from_json(j);
}

}  // namespace hydronet
