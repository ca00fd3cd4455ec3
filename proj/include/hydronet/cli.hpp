#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hydronet/config.hpp"
#include "hydronet/csv.hpp"
#include "hydronet/hilbert.hpp"
#include "hydronet/stats.hpp"
#include "hydronet/svg.hpp"

namespace hydronet {

// Exit codes: 0 success, 1 pipeline failure, 2 usage/config failure.
struct CommandResult {
    int exit_code = 0;
    std::vector<std::string> artifacts;
    std::string summary;
};

namespace cli_detail {

namespace fs = std::filesystem;

struct Context {
    std::string in_path;
    std::string out_dir = ".";
    std::string config_path;
    std::string sensor;
    std::string model_dir;
    std::string labels_path;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int days = 0;
    int points = 0;
    double rate = -1.0;
    double threshold = 0.0;
    bool threshold_given = false;
    int max_lag = 192;
    bool save_model = false;

    nlohmann::json config = nlohmann::json::object();
    CommandResult result;

    nlohmann::json section(const char* key) const {
        return config.contains(key) ? config.at(key) : nlohmann::json::object();
    }

    fs::path out_path(const std::string& name) const { return fs::path(out_dir) / name; }

    void emit(const fs::path& path, const std::string& text) {
        fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error("cannot write " + path.string());
        out << text;
        if (!out) throw Error("write failed for " + path.string());
        result.artifacts.push_back(path.string());
    }
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline Dataset load_dataset(const std::string& path) {
    if (path.empty()) throw ConfigError("--in is required");
    return parse_csv(read_file(path));
}

inline const SensorSeries& select_series(const Dataset& ds, const std::string& sensor) {
    if (sensor.empty()) throw ConfigError("--sensor is required");
    const SensorSeries* s = ds.find_column(sensor);
    if (!s) throw Error("no column '" + sensor + "' in the input dataset");
    return *s;
}

inline std::string predictions_csv(const std::vector<double>& actual,
                                   const std::vector<double>& predicted) {
    std::string out = "t,actual,predicted\n";
    for (std::size_t t = 0; t < actual.size(); ++t)
        out += std::to_string(t) + "," + format_double(actual[t]) + "," +
               format_double(predicted[t]) + "\n";
    return out;
}

struct Predictions {
    std::vector<double> actual;
    std::vector<double> predicted;
};

inline Predictions read_predictions(const std::string& path) {
    const std::string text = read_file(path);
    Predictions p;
    std::size_t begin = 0;
    bool header = true;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == '\n') {
            std::string line = text.substr(begin, i - begin);
            begin = i + 1;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            if (header) {
                if (line != "t,actual,predicted")
                    throw Error("predictions file must have header t,actual,predicted");
                header = false;
                continue;
            }
            const auto cells = detail::split_csv_line(line);
            if (cells.size() != 3) throw Error("predictions file: malformed row '" + line + "'");
            p.actual.push_back(parse_double(cells[1], "predictions"));
            p.predicted.push_back(parse_double(cells[2], "predictions"));
        }
    }
    if (p.actual.empty()) throw Error("predictions file has no rows");
    return p;
}

inline std::string history_csv(const History& h) {
    std::string out = "epoch,train_mse,val_mse,lr\n";
    for (const auto& e : h.epochs)
        out += std::to_string(e.epoch) + "," + format_double(e.train_mse) + "," +
               format_double(e.val_mse) + "," + format_double(e.lr) + "\n";
    return out;
}

// ---- subcommand bodies ----

inline void cmd_simulate(Context& ctx) {
    SynthConfig cfg = synth_config_from_json(ctx.section("synth"));
    if (ctx.days > 0) cfg.days = ctx.days;
    if (ctx.points > 0) cfg.n_points = ctx.points;
    if (ctx.seed_given) cfg.seed = ctx.seed;
    Dataset ds = generate_network(cfg);
    if (ctx.config.contains("anomalies"))
        ds = inject_anomalies(ds, anomaly_specs_from_json(ctx.config.at("anomalies")));
    double rate = ctx.rate >= 0.0 ? ctx.rate : detail::get_or(ctx.config, "missing_rate", 0.0);
    if (rate > 0.0) ds = inject_missing(ds, rate, cfg.seed);
    ctx.emit(ctx.out_path("data.csv"), write_csv(ds));
    if (!ds.labels.empty())
        ctx.emit(ctx.out_path("labels.json"), events_to_json(ds.labels).dump(2) + "\n");
    ctx.result.summary = "Simulated " + std::to_string(cfg.days) + " days (" +
                         std::to_string(ds.length()) + " samples) for " +
                         std::to_string(cfg.n_points) + " distribution points with " +
                         std::to_string(ds.labels.size()) + " injected anomalies; " +
                         std::to_string(rate * 100.0) + "% of samples marked missing.";
}

inline void cmd_impute(Context& ctx) {
    Dataset ds = load_dataset(ctx.in_path);
    ForestConfig base = forest_config_from_json(ctx.section("forest"));
    if (ctx.seed_given) base.seed = ctx.seed;
    std::size_t repaired = 0, fitted = 0;
    auto series_list = ds.all_series();
    for (std::size_t i = 0; i < series_list.size(); ++i) {
        SensorSeries* s = series_list[i];
        const std::string column =
            s->kind == SensorKind::inlet_pressure
                ? "inlet_pressure"
                : s->sensor_id + (s->kind == SensorKind::flow ? "_flow" : "_pressure");
        if (!ctx.sensor.empty() && column != ctx.sensor) continue;
        if (s->all_valid()) continue;
        ForestConfig cfg = base;
        cfg.seed = derive_seed(base.seed, i);
        const ForestModel model = fit_forest(*s, cfg);
        repaired += s->invalid_count();
        *s = impute_series(*s, model);
        ++fitted;
        if (ctx.save_model)
            ctx.emit(ctx.out_path(column + "_forest.json"), to_json(model).dump(2) + "\n");
    }
    ctx.emit(ctx.out_path("imputed.csv"), write_csv(ds));
    ctx.result.summary = "Imputed " + std::to_string(repaired) + " missing samples across " +
                         std::to_string(fitted) + " series with random-forest time-feature models.";
}

inline void cmd_acf(Context& ctx) {
    const Dataset ds = load_dataset(ctx.in_path);
    const SensorSeries& s = select_series(ds, ctx.sensor);
    const auto lag = static_cast<std::size_t>(ctx.max_lag);
    const auto rho = acf(s.values, lag);
    const auto phi = pacf(s.values, lag);
    std::string csv = "lag,acf,pacf\n0,1,\n";
    for (std::size_t k = 1; k <= lag; ++k)
        csv += std::to_string(k) + "," + format_double(rho[k]) + "," + format_double(phi[k - 1]) + "\n";
    ctx.emit(ctx.out_path("acf.csv"), csv);
    PlotPanel acf_panel{"ACF " + ctx.sensor, {{"acf", rho}}};
    PlotPanel pacf_panel{"PACF " + ctx.sensor, {{"pacf", phi}}};
    ctx.emit(ctx.out_path("acf.svg"), render_line_svg({acf_panel, pacf_panel}));
    ctx.result.summary = "Computed ACF/PACF of " + ctx.sensor + " to lag " + std::to_string(lag) +
                         "; lag-96 autocorrelation " + format_double(rho[std::min<std::size_t>(96, lag)]) + ".";
}

inline const SensorSeries& complete_series(const Dataset& ds, Context& ctx) {
    const SensorSeries& s = select_series(ds, ctx.sensor);
    if (!s.all_valid())
        throw Error("series '" + ctx.sensor + "' has missing samples; run impute first");
    return s;
}

inline void cmd_decompose(Context& ctx) {
    const Dataset ds = load_dataset(ctx.in_path);
    const SensorSeries& s = complete_series(ds, ctx);
    const EmdConfig cfg = emd_config_from_json(ctx.section("emd"));
    const ImfSet set = decompose(s.values, cfg);
    std::string csv = "t";
    for (std::size_t i = 1; i <= set.count(); ++i) csv += ",imf_" + std::to_string(i);
    csv += ",residual\n";
    for (std::size_t t = 0; t < s.size(); ++t) {
        csv += std::to_string(t);
        for (const auto& imf : set.imfs) csv += "," + format_double(imf[t]);
        csv += "," + format_double(set.residual[t]) + "\n";
    }
    ctx.emit(ctx.out_path("imfs.csv"), csv);
    std::vector<PlotPanel> panels;
    for (std::size_t i = 0; i < set.count(); ++i)
        panels.push_back({"imf_" + std::to_string(i + 1), {{"imf", set.imfs[i]}}});
    panels.push_back({"residual", {{"residual", set.residual}}});
    ctx.emit(ctx.out_path("imfs.svg"), render_line_svg(panels));
    ctx.result.summary = "Decomposed " + ctx.sensor + " (" + std::to_string(s.size()) +
                         " samples) into " + std::to_string(set.count()) + " IMFs plus residual.";
}

inline void cmd_hht(Context& ctx) {
    const Dataset ds = load_dataset(ctx.in_path);
    const SensorSeries& s = complete_series(ds, ctx);
    const EmdConfig cfg = emd_config_from_json(ctx.section("emd"));
    const ImfSet set = decompose(s.values, cfg);
    if (set.count() == 0) throw Error("hht: decomposition produced no IMFs");
    const HhtFrame frame = hht_frame(set);
    std::string csv = "t";
    for (std::size_t i = 1; i <= set.count(); ++i)
        csv += ",amplitude_" + std::to_string(i) + ",frequency_" + std::to_string(i);
    csv += "\n";
    for (std::size_t t = 0; t < s.size(); ++t) {
        csv += std::to_string(t);
        for (const auto& row : frame.rows)
            csv += "," + format_double(row.amplitude[t]) + "," + format_double(row.frequency[t]);
        csv += "\n";
    }
    ctx.emit(ctx.out_path("hht.csv"), csv);
    std::vector<ScatterPoint> points;
    const std::size_t stride = std::max<std::size_t>(1, s.size() / 2000);
    for (const auto& row : frame.rows)
        for (std::size_t t = 0; t < s.size(); t += stride)
            points.push_back({static_cast<double>(t), row.frequency[t], row.amplitude[t]});
    ctx.emit(ctx.out_path("hht.svg"),
             render_scatter_svg(points, "instantaneous frequency " + ctx.sensor));
    ctx.result.summary = "Computed instantaneous amplitude/frequency for " +
                         std::to_string(set.count()) + " IMFs of " + ctx.sensor + ".";
}

inline void cmd_train_forecaster(Context& ctx) {
    const Dataset ds = load_dataset(ctx.in_path);
    const SensorSeries& s = complete_series(ds, ctx);
    const CnnEmdConfig cnn = cnn_emd_config_from_json(ctx.section("cnn_emd"));
    const EmdConfig emd = emd_config_from_json(ctx.section("emd"));
    TrainConfig train_cfg = train_config_from_json(ctx.section("train"));
    if (ctx.seed_given) train_cfg.seed = ctx.seed;
    auto result = train_forecaster(s, cnn, emd, train_cfg);
    save_bundle(result.bundle, ctx.out_dir);
    for (const char* name : {"config.json", "minmax.json", "network.nnw"})
        ctx.result.artifacts.push_back(ctx.out_path(name).string());
    ctx.emit(ctx.out_path("history.csv"), history_csv(result.history));
    ctx.result.summary = "Trained CNN-EMD forecaster on " + ctx.sensor + " for " +
                         std::to_string(result.history.epochs.size()) + " epochs; best validation MSE " +
                         format_double(result.history.best_val_mse) + " at epoch " +
                         std::to_string(result.history.best_epoch) + ".";
}

inline void cmd_train_fusion(Context& ctx) {
    const Dataset ds = load_dataset(ctx.in_path);
    FusionConfig base;
    if (ctx.config.contains("cnn_emd")) base.cnn = cnn_emd_config_from_json(ctx.config.at("cnn_emd"));
    if (ctx.config.contains("emd")) base.emd = emd_config_from_json(ctx.config.at("emd"));
    const FusionConfig cfg = fusion_config_from_json(ctx.section("fusion"), base);
    TrainConfig train_cfg = train_config_from_json(ctx.section("train"));
    if (ctx.seed_given) train_cfg.seed = ctx.seed;
    auto result = train_fusion(ds, cfg, train_cfg);
    save_bundle(result.bundle, ctx.out_dir);
    for (const char* name : {"config.json", "minmax.json", "network.nnw"})
        ctx.result.artifacts.push_back(ctx.out_path(name).string());
    ctx.emit(ctx.out_path("history.csv"), history_csv(result.history));
    ctx.emit(ctx.out_path("inlet_history.csv"), history_csv(result.inlet_history));
    ctx.result.summary = "Trained fusion model over " + std::to_string(result.bundle.n_points()) +
                         " distribution points; best head validation MSE " +
                         format_double(result.history.best_val_mse) + ".";
}

inline void cmd_predict(Context& ctx) {
    if (ctx.model_dir.empty()) throw ConfigError("--model is required");
    const Dataset ds = load_dataset(ctx.in_path);
    const std::string type = bundle_type(ctx.model_dir);
    std::vector<double> actual, predicted;
    std::string target;
    if (type == "forecaster") {
        const SensorSeries& s = complete_series(ds, ctx);
        const ForecasterBundle bundle = load_forecaster_bundle(ctx.model_dir);
        predicted = forecast_series(bundle, s);
        actual = s.values;
        target = ctx.sensor;
    } else if (type == "fusion") {
        if (!ds.inlet) throw Error("predict: fusion model needs an inlet_pressure column");
        const FusionBundle bundle = load_fusion_bundle(ctx.model_dir);
        predicted = predict_inlet_series(bundle, ds);
        actual = ds.inlet->values;
        target = "inlet_pressure";
    } else {
        throw Error("predict: unknown bundle type '" + type + "' in " + ctx.model_dir);
    }
    ctx.emit(ctx.out_path("predictions.csv"), predictions_csv(actual, predicted));
    ctx.result.summary = "Predicted " + target + " one step ahead over " +
                         std::to_string(actual.size()) + " samples with the " + type + " bundle.";
}

inline void cmd_detect(Context& ctx) {
    const Predictions p = read_predictions(ctx.in_path);
    DetectConfig cfg = detect_config_from_json(ctx.section("detect"));
    if (ctx.threshold_given) cfg.threshold = ctx.threshold;
    const auto scores = residual_scores(p.predicted, p.actual, cfg.window);
    const auto events = detect(scores, cfg.threshold, cfg.min_duration, ctx.sensor);
    std::string csv = "t,score\n";
    for (std::size_t t = 0; t < scores.size(); ++t)
        csv += std::to_string(t) + "," + format_double(scores[t]) + "\n";
    ctx.emit(ctx.out_path("scores.csv"), csv);
    ctx.emit(ctx.out_path("events.json"), events_to_json(events).dump(2) + "\n");
    ctx.result.summary = "Scored " + std::to_string(scores.size()) + " residuals; " +
                         std::to_string(events.size()) + " anomaly events at threshold " +
                         format_double(cfg.threshold) + ".";
}

inline void cmd_eval(Context& ctx) {
    const Predictions p = read_predictions(ctx.in_path);
    DetectConfig cfg = detect_config_from_json(ctx.section("detect"));
    if (ctx.threshold_given) cfg.threshold = ctx.threshold;

    // Forecast metrics skip the warm-up prefix where predictions mirror the
    // observations.
    if (p.actual.size() <= cfg.window) throw Error("eval: too few samples for window");
    const std::span<const double> act(p.actual.data() + cfg.window, p.actual.size() - cfg.window);
    const std::span<const double> prd(p.predicted.data() + cfg.window, p.predicted.size() - cfg.window);

    Metrics metrics;
    metrics.mape = mape(prd, act);
    metrics.accuracy = 100.0 * (1.0 - metrics.mape);
    metrics.has_forecast = true;

    std::vector<AnomalyEvent> labels;
    if (!ctx.labels_path.empty()) {
        nlohmann::json lj;
        try {
            lj = nlohmann::json::parse(read_file(ctx.labels_path));
        } catch (const nlohmann::json::exception& e) {
            throw Error(std::string("eval: malformed labels JSON: ") + e.what());
        }
        labels = events_from_json(lj);
    }
    if (!labels.empty()) {
        const auto scores = residual_scores(p.predicted, p.actual, cfg.window);
        const auto events = detect(scores, cfg.threshold, cfg.min_duration, ctx.sensor);
        const Metrics det = evaluate(events, labels);
        metrics.precision = det.precision;
        metrics.recall = det.recall;
        metrics.f1 = det.f1;
        metrics.has_detection = true;
    }
    ctx.emit(ctx.out_path("metrics.json"), to_json(metrics).dump(2) + "\n");

    std::string report = "# Evaluation report\n\n| metric | value |\n| --- | --- |\n";
    report += "| mape | " + format_double(metrics.mape) + " |\n";
    report += "| accuracy | " + format_double(metrics.accuracy) + " |\n";
    if (metrics.has_detection) {
        report += "| precision | " + format_double(metrics.precision) + " |\n";
        report += "| recall | " + format_double(metrics.recall) + " |\n";
        report += "| f1 | " + format_double(metrics.f1) + " |\n";
    }
    ctx.emit(ctx.out_path("report.md"), report);
    ctx.result.summary = "Forecast accuracy " + format_double(metrics.accuracy) + "%" +
                         (metrics.has_detection ? "; detection f1 " + format_double(metrics.f1) : "") + ".";
}

}  // namespace cli_detail

// Runs one CLI invocation (argv without the program name) and reports the
// written artifacts plus a one-paragraph summary.
inline CommandResult run(const std::vector<std::string>& args) {
    using namespace cli_detail;
    Context ctx;

    CLI::App app{"water-distribution pressure analytics"};
    app.require_subcommand(1);
    auto add_common = [&](CLI::App* sub, bool needs_in) {
        if (needs_in) sub->add_option("--in", ctx.in_path, "input file");
        sub->add_option("--out", ctx.out_dir, "output directory");
        sub->add_option("--config", ctx.config_path, "JSON config file");
        sub->add_option("--seed", ctx.seed, "random seed")->each([&](const std::string&) {
            ctx.seed_given = true;
        });
    };

    CLI::App* simulate = app.add_subcommand("simulate", "generate a synthetic SCADA dataset");
    add_common(simulate, false);
    simulate->add_option("--days", ctx.days, "number of days");
    simulate->add_option("--points", ctx.points, "number of distribution points");
    simulate->add_option("--rate", ctx.rate, "missing-sample rate");

    CLI::App* impute = app.add_subcommand("impute", "fill missing samples with a random forest");
    add_common(impute, true);
    impute->add_option("--sensor", ctx.sensor, "only impute this column");
    impute->add_flag("--save-model", ctx.save_model, "write fitted forests as JSON");

    CLI::App* acf_cmd = app.add_subcommand("acf", "autocorrelation analysis");
    add_common(acf_cmd, true);
    acf_cmd->add_option("--sensor", ctx.sensor, "column to analyze");
    acf_cmd->add_option("--max-lag", ctx.max_lag, "maximum lag");

    CLI::App* dec = app.add_subcommand("decompose", "empirical mode decomposition");
    add_common(dec, true);
    dec->add_option("--sensor", ctx.sensor, "column to decompose");

    CLI::App* hht_cmd = app.add_subcommand("hht", "instantaneous frequency analysis");
    add_common(hht_cmd, true);
    hht_cmd->add_option("--sensor", ctx.sensor, "column to analyze");

    CLI::App* tf = app.add_subcommand("train-forecaster", "train the CNN-EMD point forecaster");
    add_common(tf, true);
    tf->add_option("--sensor", ctx.sensor, "target column");

    CLI::App* tfu = app.add_subcommand("train-fusion", "train the inlet fusion model");
    add_common(tfu, true);

    CLI::App* pred = app.add_subcommand("predict", "one-step predictions from a trained bundle");
    add_common(pred, true);
    pred->add_option("--model", ctx.model_dir, "bundle directory");
    pred->add_option("--sensor", ctx.sensor, "target column (forecaster bundles)");

    CLI::App* det = app.add_subcommand("detect", "flag anomalies from prediction residuals");
    add_common(det, true);
    det->add_option("--sensor", ctx.sensor, "sensor id for reported events");
    det->add_option("--threshold", ctx.threshold, "score threshold")->each([&](const std::string&) {
        ctx.threshold_given = true;
    });

    CLI::App* ev = app.add_subcommand("eval", "metrics report from predictions and labels");
    add_common(ev, true);
    ev->add_option("--labels", ctx.labels_path, "ground-truth labels JSON");
    ev->add_option("--sensor", ctx.sensor, "sensor id for detection");
    ev->add_option("--threshold", ctx.threshold, "score threshold")->each([&](const std::string&) {
        ctx.threshold_given = true;
    });

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        ctx.result.exit_code = 0;
        ctx.result.summary = app.help();
        return ctx.result;
    } catch (const CLI::ParseError& e) {
        ctx.result.exit_code = 2;
        ctx.result.summary = std::string("usage error: ") + e.what();
        return ctx.result;
    }

    try {
        if (!ctx.config_path.empty()) {
            try {
                ctx.config = nlohmann::json::parse(read_file(ctx.config_path));
            } catch (const nlohmann::json::exception& e) {
                throw ConfigError(std::string("invalid config JSON: ") + e.what());
            }
            if (!ctx.config.is_object()) throw ConfigError("config root must be a JSON object");
        }
        if (simulate->parsed()) cmd_simulate(ctx);
        else if (impute->parsed()) cmd_impute(ctx);
        else if (acf_cmd->parsed()) cmd_acf(ctx);
        else if (dec->parsed()) cmd_decompose(ctx);
        else if (hht_cmd->parsed()) cmd_hht(ctx);
        else if (tf->parsed()) cmd_train_forecaster(ctx);
        else if (tfu->parsed()) cmd_train_fusion(ctx);
        else if (pred->parsed()) cmd_predict(ctx);
        else if (det->parsed()) cmd_detect(ctx);
        else if (ev->parsed()) cmd_eval(ctx);
    } catch (const ConfigError& e) {
        ctx.result.exit_code = 2;
        ctx.result.summary = std::string("config error: ") + e.what();
    } catch (const std::exception& e) {
        ctx.result.exit_code = 1;
        ctx.result.summary = std::string("error: ") + e.what();
    }
    return ctx.result;
}

}  // namespace hydronet
