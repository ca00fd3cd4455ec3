#pragma once

#include <string>
#include <vector>

#include "hydronet/forecaster.hpp"

namespace hydronet {

// Inlet-pressure fusion model: LSTM branches over distribution pressures and
// flows, a CNN-EMD branch forecasting the inlet, and a dense head over the
// concatenated branch features.
struct FusionConfig {
    int lookback = 96;
    int lstm_units = 64;
    int head_units = 32;
    bool use_time_features = true;
    int train_stride = 1;
    CnnEmdConfig cnn;
    EmdConfig emd;

    void check() const {
        if (lookback < 1 || lstm_units < 1 || head_units < 1 || train_stride < 1)
            throw Error("FusionConfig: invalid value");
        if (cnn.lookback != lookback)
            throw Error("FusionConfig: cnn lookback must match fusion lookback");
    }
};

inline Network build_fusion_head(const FusionConfig& cfg, std::size_t n_points, std::uint64_t seed) {
    cfg.check();
    if (n_points < 1) throw Error("build_fusion_head: n_points must be >= 1");
    const std::size_t branch_channels = n_points + (cfg.use_time_features ? kOneHotDim : 0);
    Network net;
    net.add_input("pressure_window", branch_channels, 3);
    net.add_input("flow_window", branch_channels, 3);
    net.add_input("inlet_feat", 1, 2);
    net.add("lstm_p", LstmSpec{cfg.lstm_units, false}, {"pressure_window"});
    net.add("lstm_f", LstmSpec{cfg.lstm_units, false}, {"flow_window"});
    net.add("fuse", ConcatSpec{}, {"lstm_p", "lstm_f", "inlet_feat"});
    net.add("head", DenseSpec{cfg.head_units, Activation::relu}, {"fuse"});
    net.add("out", DenseSpec{1, Activation::linear}, {"head"});
    net.set_output("out");
    net.init_weights(seed);
    return net;
}

struct FusionBundle {
    Network head;
    ForecasterBundle inlet_branch;
    MinMaxParams minmax;
    FusionConfig cfg;
    std::vector<std::string> pressure_ids;
    std::vector<std::string> flow_ids;

    std::size_t n_points() const { return pressure_ids.size(); }
};

namespace detail {

inline std::string pressure_feature(const std::string& id) { return "p_" + id; }
inline std::string flow_feature(const std::string& id) { return "q_" + id; }

struct FusionChannels {
    std::vector<std::vector<double>> pressure;  // n (+59) channels
    std::vector<std::vector<double>> flow;
};

inline FusionChannels fusion_channels(const Dataset& ds, const FusionBundle& bundle) {
    FusionChannels ch;
    for (const auto& id : bundle.pressure_ids) {
        const SensorSeries* s = ds.find_column(id + "_pressure");
        if (!s) throw Error("fusion: dataset lacks pressure sensor '" + id + "'");
        require_complete(*s, "fusion");
        const auto& e = bundle.minmax.entry(pressure_feature(id));
        std::vector<double> v(s->size());
        for (std::size_t t = 0; t < v.size(); ++t) v[t] = normalize(s->values[t], e);
        ch.pressure.push_back(std::move(v));
    }
    for (const auto& id : bundle.flow_ids) {
        const SensorSeries* s = ds.find_column(id + "_flow");
        if (!s) throw Error("fusion: dataset lacks flow sensor '" + id + "'");
        require_complete(*s, "fusion");
        const auto& e = bundle.minmax.entry(flow_feature(id));
        std::vector<double> v(s->size());
        for (std::size_t t = 0; t < v.size(); ++t) v[t] = normalize(s->values[t], e);
        ch.flow.push_back(std::move(v));
    }
    if (bundle.cfg.use_time_features && ds.inlet) {
        auto oh = one_hot_channels(*ds.inlet);
        for (auto& c : oh) {
            ch.pressure.push_back(c);
            ch.flow.push_back(std::move(c));
        }
    }
    return ch;
}

}  // namespace detail

struct FusionTrainResult {
    FusionBundle bundle;
    History history;          // head training
    History inlet_history;    // CNN branch training
};

// Trains the inlet CNN-EMD branch, precomputes its predictions as the third
// input feature, and trains the LSTM/dense head on lagged windows.
inline FusionTrainResult train_fusion(const Dataset& ds, const FusionConfig& cfg,
                                      const TrainConfig& train_cfg) {
    cfg.check();
    ds.check_invariants();
    if (!ds.inlet) throw Error("train_fusion: dataset has no inlet series");
    if (ds.pressure.empty() || ds.pressure.size() != ds.flow.size())
        throw Error("train_fusion: dataset needs matched pressure and flow series");
    detail::require_complete(*ds.inlet, "train_fusion");
    const std::size_t W = static_cast<std::size_t>(cfg.lookback);
    const std::size_t L = ds.length();
    if (L < W + 9) throw Error("train_fusion: dataset too short for lookback");

    FusionTrainResult result;
    FusionBundle& bundle = result.bundle;
    bundle.cfg = cfg;
    for (const auto& s : ds.pressure) bundle.pressure_ids.push_back(s.sensor_id);
    for (const auto& s : ds.flow) bundle.flow_ids.push_back(s.sensor_id);
    for (const auto& s : ds.pressure) {
        detail::require_complete(s, "train_fusion");
        bundle.minmax.features.push_back(fit_minmax(s.values, detail::pressure_feature(s.sensor_id)));
    }
    for (const auto& s : ds.flow) {
        detail::require_complete(s, "train_fusion");
        bundle.minmax.features.push_back(fit_minmax(s.values, detail::flow_feature(s.sensor_id)));
    }
    bundle.minmax.features.push_back(fit_minmax(ds.inlet->values, "inlet"));

    auto inlet_result = train_forecaster(*ds.inlet, cfg.cnn, cfg.emd, train_cfg);
    bundle.inlet_branch = std::move(inlet_result.bundle);
    result.inlet_history = std::move(inlet_result.history);

    // CNN branch predictions for every window, as a normalized scalar feature.
    const std::vector<double> inlet_pred = forecast_series(bundle.inlet_branch, *ds.inlet);
    const auto& inlet_entry = bundle.minmax.entry("inlet");

    const auto channels = detail::fusion_channels(ds, bundle);
    std::vector<std::size_t> offsets;
    for (std::size_t s = 0; s + W < L; s += static_cast<std::size_t>(cfg.train_stride))
        offsets.push_back(s);

    Tensor feat({offsets.size(), 1});
    Tensor targets({offsets.size(), 1});
    for (std::size_t b = 0; b < offsets.size(); ++b) {
        feat.at(b, 0) = normalize(inlet_pred[offsets[b] + W], inlet_entry);
        targets.at(b, 0) = normalize(ds.inlet->values[offsets[b] + W], inlet_entry);
    }

    bundle.head = build_fusion_head(cfg, bundle.n_points(), train_cfg.seed);
    NamedData data;
    data.emplace_back("pressure_window", detail::window_batch(channels.pressure, offsets, W));
    data.emplace_back("flow_window", detail::window_batch(channels.flow, offsets, W));
    data.emplace_back("inlet_feat", std::move(feat));
    result.history = train(bundle.head, data, targets, train_cfg);
    return result;
}

// Next-step inlet pressure from explicit 96-row windows plus the inlet
// history needed by the CNN branch.
inline double predict_inlet(const FusionBundle& bundle,
                            const std::vector<std::vector<double>>& pressures,
                            const std::vector<std::vector<double>>& flows,
                            const SensorSeries& inlet_history) {
    const std::size_t W = static_cast<std::size_t>(bundle.cfg.lookback);
    const std::size_t n = bundle.n_points();
    if (pressures.size() != W || flows.size() != W)
        throw Error("predict_inlet: windows must have exactly " + std::to_string(W) + " rows");
    for (const auto& row : pressures)
        if (row.size() != n) throw Error("predict_inlet: pressure window has wrong point count");
    for (const auto& row : flows)
        if (row.size() != n) throw Error("predict_inlet: flow window has wrong point count");
    if (inlet_history.size() < W)
        throw Error("predict_inlet: inlet history shorter than lookback");

    const std::size_t channels = n + (bundle.cfg.use_time_features ? kOneHotDim : 0);
    Tensor pw({1, W, channels}), fw({1, W, channels});
    for (std::size_t w = 0; w < W; ++w) {
        for (std::size_t i = 0; i < n; ++i) {
            pw.at(0, w, i) = normalize(pressures[w][i], bundle.minmax.entry(detail::pressure_feature(bundle.pressure_ids[i])));
            fw.at(0, w, i) = normalize(flows[w][i], bundle.minmax.entry(detail::flow_feature(bundle.flow_ids[i])));
        }
        if (bundle.cfg.use_time_features) {
            const std::size_t t = inlet_history.size() - W + w;
            const auto oh = one_hot_time(time_features(inlet_history.timestamp_at(t),
                                                       inlet_history.cadence_minutes));
            for (std::size_t c = 0; c < kOneHotDim; ++c) {
                pw.at(0, w, n + c) = oh[c];
                fw.at(0, w, n + c) = oh[c];
            }
        }
    }
    Tensor feat({1, 1});
    feat.at(0, 0) = normalize(forecast_pressure(bundle.inlet_branch, inlet_history),
                              bundle.minmax.entry("inlet"));
    const Tensor out = bundle.head.predict(
        {{"pressure_window", pw}, {"flow_window", fw}, {"inlet_feat", feat}});
    return denormalize(out.at(0, 0), bundle.minmax.entry("inlet"));
}

// Batched one-step inlet predictions over a whole dataset; pred[t] for t in
// [lookback, L), earlier entries carry the observed inlet value.
inline std::vector<double> predict_inlet_series(const FusionBundle& bundle, const Dataset& ds,
                                                std::size_t batch = 256) {
    ds.check_invariants();
    if (!ds.inlet) throw Error("predict_inlet_series: dataset has no inlet series");
    detail::require_complete(*ds.inlet, "predict_inlet_series");
    const std::size_t W = static_cast<std::size_t>(bundle.cfg.lookback);
    const std::size_t L = ds.length();
    if (L < W + 9) throw Error("predict_inlet_series: dataset too short");

    const std::vector<double> inlet_pred = forecast_series(bundle.inlet_branch, *ds.inlet);
    const auto& inlet_entry = bundle.minmax.entry("inlet");
    const auto channels = detail::fusion_channels(ds, bundle);

    std::vector<double> pred(ds.inlet->values.begin(), ds.inlet->values.end());
    std::vector<std::size_t> offsets;
    for (std::size_t s = 0; s + W < L; ++s) {
        offsets.push_back(s);
        if (offsets.size() == batch || s + W == L - 1) {
            Tensor feat({offsets.size(), 1});
            for (std::size_t b = 0; b < offsets.size(); ++b)
                feat.at(b, 0) = normalize(inlet_pred[offsets[b] + W], inlet_entry);
            const Tensor out = bundle.head.predict(
                {{"pressure_window", detail::window_batch(channels.pressure, offsets, W)},
                 {"flow_window", detail::window_batch(channels.flow, offsets, W)},
                 {"inlet_feat", std::move(feat)}});
            for (std::size_t b = 0; b < offsets.size(); ++b)
                pred[offsets[b] + W] = denormalize(out.at(b, 0), inlet_entry);
            offsets.clear();
        }
    }
    return pred;
}

}  // namespace hydronet
