#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>

#include "hydronet/forest.hpp"
#include "hydronet/synth.hpp"

using namespace hydronet;

namespace {

SensorSeries hour_step_series(int days, double lo, double hi) {
    SensorSeries s;
    s.sensor_id = "step";
    s.kind = SensorKind::pressure;
    s.start = Timestamp::from_civil(2024, 1, 1, 0, 0);
    s.cadence_minutes = 15;
    const std::size_t n = static_cast<std::size_t>(days) * 96;
    for (std::size_t i = 0; i < n; ++i) {
        s.values.push_back(s.timestamp_at(i).hour() < 12 ? lo : hi);
        s.valid.push_back(1);
    }
    return s;
}

}  // namespace

TEST(Forest, LearnsHourStepFunction) {
    const SensorSeries s = hour_step_series(20, 2.0, 3.0);
    ForestConfig cfg;
    cfg.seed = 5;
    const ForestModel model = fit_forest(s, cfg);
    // Held-out grid: every hour on a day not equal to any training value is
    // irrelevant; the forest only sees time features, so probe the hour axis.
    EXPECT_NEAR(predict_pressure(model, Timestamp::from_civil(2024, 1, 10, 3, 0)), 2.0, 0.01);
    EXPECT_NEAR(predict_pressure(model, Timestamp::from_civil(2024, 1, 10, 20, 15)), 3.0, 0.01);
}

TEST(Forest, ConstantTargetsGiveConstantPrediction) {
    SensorSeries s = hour_step_series(5, 5.0, 5.0);
    const ForestModel model = fit_forest(s, {});
    EXPECT_DOUBLE_EQ(predict_pressure(model, Timestamp::from_civil(2024, 6, 15, 9, 30)), 5.0);
}

TEST(Forest, TooFewValidSamplesIsAnError) {
    SensorSeries s = hour_step_series(1, 2.0, 3.0);
    for (std::size_t i = 3; i < s.size(); ++i) s.valid[i] = 0;
    ForestConfig cfg;
    cfg.min_leaf = 5;
    EXPECT_THROW(fit_forest(s, cfg), Error);
}

TEST(Forest, SingleLeafAndTwoTreeAveraging) {
    TreeNode leaf;
    leaf.mean_value = 4.2;
    EXPECT_DOUBLE_EQ(predict_tree(leaf, {1, 2, 3}), 4.2);

    ForestModel m;
    m.n_trees = 2;
    auto t1 = std::make_unique<TreeNode>();
    t1->mean_value = 4.0;
    auto t2 = std::make_unique<TreeNode>();
    t2->mean_value = 5.0;
    m.trees.push_back(std::move(t1));
    m.trees.push_back(std::move(t2));
    EXPECT_DOUBLE_EQ(predict_pressure(m, Timestamp::from_civil(2024, 1, 1, 0, 0)), 4.5);
}

TEST(Forest, FixedSeedBitIdentical) {
    const SensorSeries s = hour_step_series(10, 2.0, 3.0);
    ForestConfig cfg;
    cfg.seed = 77;
    const auto a = to_json(fit_forest(s, cfg)).dump();
    const auto b = to_json(fit_forest(s, cfg)).dump();
    EXPECT_EQ(a, b);
}

TEST(Forest, PredictionsWithinTargetRange) {
    SynthConfig cfg;
    cfg.days = 10;
    cfg.seed = 3;
    const Dataset ds = generate_network(cfg);
    const auto& s = *ds.inlet;
    const ForestModel model = fit_forest(s, {});
    double lo = s.values[0], hi = s.values[0];
    for (double v : s.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    for (std::size_t i = 0; i < s.size(); i += 7) {
        const double p = predict_pressure(model, s.timestamp_at(i));
        ASSERT_GE(p, lo);
        ASSERT_LE(p, hi);
    }
}

TEST(Impute, NoInvalidSamplesIsIdentity) {
    const SensorSeries s = hour_step_series(5, 2.0, 3.0);
    const ForestModel model = fit_forest(s, {});
    EXPECT_EQ(impute_series(s, model), s);
}

TEST(Impute, SingleLeafFillsInvalid) {
    SensorSeries s = hour_step_series(2, 2.0, 3.0);
    s.valid[24] = 0;
    s.values[24] = 0.0;
    ForestModel m;
    m.n_trees = 1;
    auto leaf = std::make_unique<TreeNode>();
    leaf->mean_value = 4.2;
    m.trees.push_back(std::move(leaf));
    const SensorSeries out = impute_series(s, m);
    EXPECT_DOUBLE_EQ(out.values[24], 4.2);
    EXPECT_EQ(out.valid[24], 1);
    for (std::size_t i = 0; i < s.size(); ++i)
        if (i != 24) ASSERT_EQ(out.values[i], s.values[i]);
}

TEST(Impute, RmseAgainstGroundTruthWithinNoiseBudget) {
    SynthConfig cfg;
    cfg.days = 60;
    cfg.n_points = 1;
    cfg.noise_std = 0.05;
    cfg.seed = 21;
    const Dataset clean = generate_network(cfg);
    const Dataset holey = inject_missing(clean, 0.10, 99);
    const auto& original = *clean.inlet;
    const auto& damaged = *holey.inlet;
    ForestConfig fc;
    fc.seed = 1;
    const SensorSeries repaired = impute_series(damaged, fit_forest(damaged, fc));
    EXPECT_TRUE(repaired.all_valid());
    double sse = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < damaged.size(); ++i) {
        if (damaged.valid[i]) {
            ASSERT_EQ(repaired.values[i], original.values[i]);  // untouched bit-for-bit
        } else {
            sse += (repaired.values[i] - original.values[i]) * (repaired.values[i] - original.values[i]);
            ++n;
        }
    }
    ASSERT_GT(n, 0u);
    EXPECT_LE(std::sqrt(sse / static_cast<double>(n)), 2.0 * cfg.noise_std);
}

TEST(ForestJson, SaveLoadSaveByteIdentical) {
    const SensorSeries s = hour_step_series(6, 2.0, 3.0);
    ForestConfig cfg;
    cfg.n_trees = 7;
    cfg.seed = 13;
    const ForestModel model = fit_forest(s, cfg);
    const auto dir = std::filesystem::temp_directory_path() / "hydronet_forest_test";
    std::filesystem::create_directories(dir);
    const std::string p1 = (dir / "f1.json").string();
    const std::string p2 = (dir / "f2.json").string();
    save_forest(model, p1);
    const ForestModel loaded = load_forest(p1);
    save_forest(loaded, p2);
    std::ifstream a(p1), b(p2);
    const std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    const std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    EXPECT_EQ(sa, sb);
    // loaded model predicts identically
    for (int h = 0; h < 24; ++h)
        EXPECT_EQ(predict_pressure(model, Timestamp::from_civil(2024, 2, 5, h, 0)),
                  predict_pressure(loaded, Timestamp::from_civil(2024, 2, 5, h, 0)));
}

TEST(ForestJson, RejectsMalformed) {
    EXPECT_THROW(forest_from_json(nlohmann::json{{"n_trees", 1}}), Error);
    nlohmann::json bad = {{"n_trees", 1}, {"max_depth", 8}, {"min_leaf", 5},
                          {"seed", 0},    {"feature_layout", {"day_of_month", "hour", "minute_slot"}},
                          {"trees", nlohmann::json::array({{{"feature_index", 9}}})}};
    EXPECT_THROW(forest_from_json(bad), Error);
}
