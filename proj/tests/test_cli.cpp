#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "hydronet/cli.hpp"

using namespace hydronet;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    EXPECT_TRUE(in.good()) << p;
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

std::size_t line_count(const std::string& text) {
    std::size_t n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "hydronet_cli_test" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

}  // namespace

TEST(Cli, SimulateProducesExpectedLineCount) {
    const fs::path dir = fresh_dir("simulate");
    const CommandResult r = run({"simulate", "--days", "60", "--points", "5", "--seed", "42",
                                 "--out", dir.string()});
    ASSERT_EQ(r.exit_code, 0) << r.summary;
    const std::string data = slurp(dir / "data.csv");
    EXPECT_EQ(line_count(data), 5761u);  // header + 60*96 rows
    EXPECT_FALSE(fs::exists(dir / "labels.json"));
}

TEST(Cli, SimulateIsByteDeterministicPerSeed) {
    const fs::path d1 = fresh_dir("det1");
    const fs::path d2 = fresh_dir("det2");
    ASSERT_EQ(run({"simulate", "--days", "5", "--seed", "7", "--out", d1.string()}).exit_code, 0);
    ASSERT_EQ(run({"simulate", "--days", "5", "--seed", "7", "--out", d2.string()}).exit_code, 0);
    EXPECT_EQ(slurp(d1 / "data.csv"), slurp(d2 / "data.csv"));
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run({"frobnicate"}).exit_code, 2);            // unknown subcommand
    EXPECT_EQ(run({}).exit_code, 2);                        // no subcommand
    EXPECT_EQ(run({"acf", "--in", "/nonexistent/x.csv", "--sensor", "inlet_pressure"}).exit_code, 1);
    const fs::path dir = fresh_dir("badcfg");
    write_file(dir / "bad.json", "{not json");
    EXPECT_EQ(run({"simulate", "--config", (dir / "bad.json").string(), "--out", dir.string()}).exit_code,
              2);
    write_file(dir / "unknown.json", R"({"synth": {"dayz": 3}})");
    EXPECT_EQ(run({"simulate", "--config", (dir / "unknown.json").string(), "--out", dir.string()})
                  .exit_code,
              2);
}

TEST(Cli, SimulateWithAnomaliesAndMissingThenImpute) {
    const fs::path dir = fresh_dir("pipeline_head");
    write_file(dir / "cfg.json", R"({
        "synth": {"days": 6, "n_points": 2, "noise_std": 0.02, "seed": 3},
        "anomalies": [
            {"sensor_id": "p1", "start_index": 200, "duration": 20, "kind": "drop", "magnitude": 0.5}
        ],
        "missing_rate": 0.05
    })");
    const CommandResult sim = run({"simulate", "--config", (dir / "cfg.json").string(), "--out",
                                   dir.string()});
    ASSERT_EQ(sim.exit_code, 0) << sim.summary;
    EXPECT_TRUE(fs::exists(dir / "labels.json"));
    const Dataset holey = parse_csv(slurp(dir / "data.csv"));
    EXPECT_GT(holey.inlet->invalid_count(), 0u);

    const CommandResult imp = run({"impute", "--in", (dir / "data.csv").string(), "--seed", "5",
                                   "--save-model", "--out", dir.string()});
    ASSERT_EQ(imp.exit_code, 0) << imp.summary;
    const Dataset repaired = parse_csv(slurp(dir / "imputed.csv"));
    for (const auto* s : repaired.all_series()) EXPECT_TRUE(s->all_valid());
    EXPECT_TRUE(fs::exists(dir / "inlet_pressure_forest.json"));

    // originally-valid samples survive bit-for-bit
    for (std::size_t i = 0; i < holey.inlet->size(); ++i)
        if (holey.inlet->valid[i])
            ASSERT_EQ(repaired.inlet->values[i], holey.inlet->values[i]);
}

TEST(Cli, AcfDecomposeHht) {
    const fs::path dir = fresh_dir("analysis");
    ASSERT_EQ(run({"simulate", "--days", "6", "--seed", "2", "--out", dir.string()}).exit_code, 0);
    const std::string data = (dir / "data.csv").string();

    const CommandResult a = run({"acf", "--in", data, "--sensor", "inlet_pressure", "--max-lag",
                                 "120", "--out", dir.string()});
    ASSERT_EQ(a.exit_code, 0) << a.summary;
    EXPECT_EQ(line_count(slurp(dir / "acf.csv")), 122u);  // header + lags 0..120

    const CommandResult d = run({"decompose", "--in", data, "--sensor", "inlet_pressure", "--out",
                                 dir.string()});
    ASSERT_EQ(d.exit_code, 0) << d.summary;

    // channel sums reconstruct the input column
    const Dataset ds = parse_csv(slurp(dir / "data.csv"));
    const std::string imfs_text = slurp(dir / "imfs.csv");
    std::istringstream lines(imfs_text);
    std::string line;
    std::getline(lines, line);  // header
    std::size_t t = 0;
    double worst = 0.0;
    while (std::getline(lines, line)) {
        const auto cells = detail::split_csv_line(line);
        double sum = 0.0;
        for (std::size_t c = 1; c < cells.size(); ++c) sum += parse_double(cells[c], "imfs");
        worst = std::max(worst, std::abs(sum - ds.inlet->values[t]));
        ++t;
    }
    EXPECT_EQ(t, ds.inlet->size());
    EXPECT_LT(worst, 1e-9);

    const CommandResult h = run({"hht", "--in", data, "--sensor", "inlet_pressure", "--out",
                                 dir.string()});
    ASSERT_EQ(h.exit_code, 0) << h.summary;
    EXPECT_TRUE(fs::exists(dir / "hht.svg"));

    // SVG output is deterministic
    const std::string svg1 = slurp(dir / "imfs.svg");
    ASSERT_EQ(run({"decompose", "--in", data, "--sensor", "inlet_pressure", "--out", dir.string()})
                  .exit_code,
              0);
    EXPECT_EQ(slurp(dir / "imfs.svg"), svg1);
}

TEST(Cli, SvgPanelAndPolylineCounts) {
    std::vector<PlotPanel> one = {{"flat", {{"x", std::vector<double>(10, 1.0)}}}};
    const std::string svg = render_line_svg(one);
    std::size_t polylines = 0, pos = 0;
    while ((pos = svg.find("<polyline", pos)) != std::string::npos) {
        ++polylines;
        pos += 9;
    }
    EXPECT_EQ(polylines, 1u);

    std::vector<PlotPanel> five;
    for (int i = 0; i < 5; ++i) five.push_back({"p", {{"x", std::vector<double>(8, 0.5)}}});
    const std::string svg5 = render_line_svg(five);
    std::size_t panels = 0;
    pos = 0;
    while ((pos = svg5.find("<g class=\"panel\"", pos)) != std::string::npos) {
        ++panels;
        pos += 10;
    }
    EXPECT_EQ(panels, 5u);
}

TEST(Cli, ForecastPredictDetectEvalChain) {
    const fs::path dir = fresh_dir("chain");
    write_file(dir / "cfg.json", R"({
        "synth": {"days": 8, "n_points": 1, "noise_std": 0.01, "seed": 21},
        "anomalies": [
            {"sensor_id": "p1", "start_index": 500, "duration": 24, "kind": "drop", "magnitude": 0.6}
        ],
        "cnn_emd": {"filters": 4, "branch_dilations": [1, 4], "train_stride": 2},
        "train": {"epochs": 3, "batch_size": 64, "seed": 9},
        "detect": {"threshold": 4.0, "min_duration": 1}
    })");
    const std::string cfg = (dir / "cfg.json").string();
    ASSERT_EQ(run({"simulate", "--config", cfg, "--out", dir.string()}).exit_code, 0);
    const std::string data = (dir / "data.csv").string();

    const CommandResult t = run({"train-forecaster", "--in", data, "--sensor", "p1_pressure",
                                 "--config", cfg, "--out", (dir / "model").string()});
    ASSERT_EQ(t.exit_code, 0) << t.summary;
    EXPECT_TRUE(fs::exists(dir / "model" / "network.nnw"));
    EXPECT_TRUE(fs::exists(dir / "model" / "minmax.json"));
    EXPECT_TRUE(fs::exists(dir / "model" / "config.json"));
    EXPECT_TRUE(fs::exists(dir / "model" / "history.csv"));

    const CommandResult p = run({"predict", "--in", data, "--model", (dir / "model").string(),
                                 "--sensor", "p1_pressure", "--out", dir.string()});
    ASSERT_EQ(p.exit_code, 0) << p.summary;
    const std::string preds = (dir / "predictions.csv").string();

    const CommandResult det = run({"detect", "--in", preds, "--config", cfg, "--sensor", "p1",
                                   "--out", dir.string()});
    ASSERT_EQ(det.exit_code, 0) << det.summary;
    EXPECT_TRUE(fs::exists(dir / "events.json"));

    const CommandResult ev = run({"eval", "--in", preds, "--labels", (dir / "labels.json").string(),
                                  "--config", cfg, "--sensor", "p1", "--out", dir.string()});
    ASSERT_EQ(ev.exit_code, 0) << ev.summary;
    const auto metrics = nlohmann::json::parse(slurp(dir / "metrics.json"));
    EXPECT_TRUE(metrics.contains("accuracy"));
    EXPECT_TRUE(metrics.contains("f1"));
    EXPECT_TRUE(fs::exists(dir / "report.md"));
}

TEST(Cli, EvalWithoutLabelsOmitsDetectionMetrics) {
    const fs::path dir = fresh_dir("eval_nolabels");
    std::string preds = "t,actual,predicted\n";
    for (int t = 0; t < 200; ++t)
        preds += std::to_string(t) + ",3.0,3.0\n";
    write_file(dir / "predictions.csv", preds);
    const CommandResult ev = run({"eval", "--in", (dir / "predictions.csv").string(), "--out",
                                  dir.string()});
    ASSERT_EQ(ev.exit_code, 0) << ev.summary;
    const auto metrics = nlohmann::json::parse(slurp(dir / "metrics.json"));
    EXPECT_FALSE(metrics.contains("precision"));
    EXPECT_DOUBLE_EQ(metrics.at("accuracy").get<double>(), 100.0);
}

TEST(Cli, IdenticalPredictionFilesGivePerfectAccuracy) {
    const fs::path dir = fresh_dir("eval_perfect");
    std::string preds = "t,actual,predicted\n";
    Rng rng(4);
    for (int t = 0; t < 150; ++t) {
        const double v = 3.0 + 0.5 * rng.uniform();
        preds += std::to_string(t) + "," + format_double(v) + "," + format_double(v) + "\n";
    }
    write_file(dir / "predictions.csv", preds);
    const CommandResult ev = run({"eval", "--in", (dir / "predictions.csv").string(), "--out",
                                  dir.string()});
    ASSERT_EQ(ev.exit_code, 0) << ev.summary;
    const auto metrics = nlohmann::json::parse(slurp(dir / "metrics.json"));
    EXPECT_DOUBLE_EQ(metrics.at("accuracy").get<double>(), 100.0);
}

TEST(Cli, ArtifactsListedExistAndInputsUntouched) {
    const fs::path dir = fresh_dir("artifacts");
    const CommandResult sim = run({"simulate", "--days", "4", "--seed", "1", "--out", dir.string()});
    ASSERT_EQ(sim.exit_code, 0);
    for (const auto& a : sim.artifacts) EXPECT_TRUE(fs::exists(a)) << a;
    const std::string before = slurp(dir / "data.csv");
    ASSERT_EQ(run({"acf", "--in", (dir / "data.csv").string(), "--sensor", "inlet_pressure",
                   "--out", (dir / "sub").string()})
                  .exit_code,
              0);
    EXPECT_EQ(slurp(dir / "data.csv"), before);  // inputs never mutated
}
