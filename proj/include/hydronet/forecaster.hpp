#pragma once

#include <string>
#include <vector>

#include "hydronet/encode.hpp"
#include "hydronet/imf_matrix.hpp"
#include "hydronet/nn_io.hpp"
#include "hydronet/nn_train.hpp"
#include "hydronet/series.hpp"
#include "hydronet/supervised.hpp"

namespace hydronet {

// Point-pressure forecaster: parallel dilated causal convolutions over the
// normalized IMF channels, merged by a 1x1 convolution, read out at the final
// time step.
struct CnnEmdConfig {
    int lookback = 96;  // 24 h at 15-minute cadence
    int imf_channels = 8;
    std::vector<int> branch_dilations = {1, 2, 4, 8};
    int filters = 32;
    int kernel = 3;
    bool batch_norm = false;
    bool use_time_features = false;
    int train_stride = 1;

    std::size_t input_channels() const {
        return static_cast<std::size_t>(imf_channels) + (use_time_features ? kOneHotDim : 0);
    }

    void check() const {
        if (lookback < 1 || imf_channels < 2 || filters < 1 || kernel < 1 || train_stride < 1)
            throw Error("CnnEmdConfig: invalid value");
        if (branch_dilations.empty()) throw Error("CnnEmdConfig: need at least one dilation");
        for (int d : branch_dilations)
            if (d < 1) throw Error("CnnEmdConfig: dilation must be >= 1");
    }
};

inline Network build_cnn_emd(const CnnEmdConfig& cfg, std::uint64_t seed) {
    cfg.check();
    Network net;
    net.add_input("imf_window", cfg.input_channels(), 3);
    std::vector<std::string> branches;
    for (std::size_t i = 0; i < cfg.branch_dilations.size(); ++i) {
        const std::string name = "branch_" + std::to_string(i + 1);
        net.add(name, Conv1DSpec{cfg.filters, cfg.kernel, cfg.branch_dilations[i], Activation::relu},
                {"imf_window"});
        branches.push_back(name);
    }
    std::string merged = "merge";
    net.add("merge", ConcatSpec{}, branches);
    if (cfg.batch_norm) {
        net.add("norm", BatchNormSpec{}, {"merge"});
        merged = "norm";
    }
    net.add("mix", Conv1DSpec{cfg.filters, 1, 1, Activation::relu}, {merged});
    net.add("last", LastStepSpec{}, {"mix"});
    net.add("out", DenseSpec{1, Activation::linear}, {"last"});
    net.set_output("out");
    net.init_weights(seed);
    return net;
}

struct ForecasterBundle {
    Network network;
    MinMaxParams minmax;
    EmdConfig emd;
    CnnEmdConfig cfg;
};

namespace detail {

// Windowed inputs for sample offsets s: inputs[b][w][c] = channels[c][s+w].
inline Tensor window_batch(const std::vector<std::vector<double>>& channels,
                           const std::vector<std::size_t>& offsets, std::size_t lookback) {
    const std::size_t C = channels.size();
    Tensor t({offsets.size(), lookback, C});
    for (std::size_t b = 0; b < offsets.size(); ++b)
        for (std::size_t w = 0; w < lookback; ++w)
            for (std::size_t c = 0; c < C; ++c) t.at(b, w, c) = channels[c][offsets[b] + w];
    return t;
}

inline std::vector<std::vector<double>> one_hot_channels(const SensorSeries& series) {
    std::vector<std::vector<double>> channels(kOneHotDim, std::vector<double>(series.size()));
    for (std::size_t t = 0; t < series.size(); ++t) {
        const auto v = one_hot_time(time_features(series.timestamp_at(t), series.cadence_minutes));
        for (std::size_t c = 0; c < kOneHotDim; ++c) channels[c][t] = v[c];
    }
    return channels;
}

inline void require_complete(const SensorSeries& series, const char* op) {
    series.check_consistent();
    if (!series.all_valid())
        throw Error(std::string(op) + ": series '" + series.sensor_id +
                    "' has invalid samples; impute first");
}

}  // namespace detail

struct ForecasterTrainResult {
    ForecasterBundle bundle;
    History history;
};

// Decomposes the series, normalizes the IMF channels and target, and trains
// the network on lagged windows.
inline ForecasterTrainResult train_forecaster(const SensorSeries& series, const CnnEmdConfig& cfg,
                                              const EmdConfig& emd_cfg, const TrainConfig& train_cfg) {
    cfg.check();
    detail::require_complete(series, "train_forecaster");
    const std::size_t W = static_cast<std::size_t>(cfg.lookback);
    if (series.size() < W + 9)
        throw Error("train_forecaster: series too short for lookback " + std::to_string(cfg.lookback));

    const ImfSet imfs = decompose(series.values, emd_cfg);
    MinMaxParams params = fit_imf_minmax(imfs, static_cast<std::size_t>(cfg.imf_channels));
    params.features.push_back(fit_minmax(series.values, "target"));

    const ImfMatrix matrix = prepare_imf_matrix(imfs, params, static_cast<std::size_t>(cfg.imf_channels));
    std::vector<std::vector<double>> channels;
    for (std::size_t c = 0; c < matrix.channel_count; ++c)
        channels.emplace_back(matrix.data.begin() + static_cast<std::ptrdiff_t>(c * matrix.length),
                              matrix.data.begin() + static_cast<std::ptrdiff_t>((c + 1) * matrix.length));
    if (cfg.use_time_features)
        for (auto& ch : detail::one_hot_channels(series)) channels.push_back(std::move(ch));

    const auto& target_entry = params.entry("target");
    const std::size_t L = series.size();
    std::vector<std::size_t> offsets;
    for (std::size_t s = 0; s + W < L; s += static_cast<std::size_t>(cfg.train_stride))
        offsets.push_back(s);

    Tensor inputs = detail::window_batch(channels, offsets, W);
    Tensor targets({offsets.size(), 1});
    for (std::size_t b = 0; b < offsets.size(); ++b)
        targets.at(b, 0) = normalize(series.values[offsets[b] + W], target_entry);

    ForecasterTrainResult result;
    result.bundle.network = build_cnn_emd(cfg, train_cfg.seed);
    result.bundle.minmax = std::move(params);
    result.bundle.emd = emd_cfg;
    result.bundle.cfg = cfg;
    result.history = train(result.bundle.network, {{"imf_window", std::move(inputs)}}, targets, train_cfg);
    return result;
}

// One-step forecast from a complete history: decompose, normalize with the
// bundle's stored parameters, run the last window through the network,
// denormalize back to bar.
inline double forecast_pressure(const ForecasterBundle& bundle, const SensorSeries& history) {
    detail::require_complete(history, "forecast_pressure");
    const std::size_t W = static_cast<std::size_t>(bundle.cfg.lookback);
    if (history.size() < std::max<std::size_t>(W, 8))
        throw Error("forecast_pressure: history shorter than lookback window");

    const ImfSet imfs = decompose(history.values, bundle.emd);
    const ImfMatrix matrix =
        prepare_imf_matrix(imfs, bundle.minmax, static_cast<std::size_t>(bundle.cfg.imf_channels));
    std::vector<std::vector<double>> channels;
    for (std::size_t c = 0; c < matrix.channel_count; ++c)
        channels.emplace_back(matrix.data.begin() + static_cast<std::ptrdiff_t>(c * matrix.length),
                              matrix.data.begin() + static_cast<std::ptrdiff_t>((c + 1) * matrix.length));
    if (bundle.cfg.use_time_features)
        for (auto& ch : detail::one_hot_channels(history)) channels.push_back(std::move(ch));

    const Tensor window = detail::window_batch(channels, {history.size() - W}, W);
    const Tensor out = bundle.network.predict({{"imf_window", window}});
    return denormalize(out.at(0, 0), bundle.minmax.entry("target"));
}

// Batched one-step predictions over a full series. The series is decomposed
// once (as in training); pred[t] for t in [lookback, L) comes from the window
// ending at t-1, earlier entries carry the observed value.
inline std::vector<double> forecast_series(const ForecasterBundle& bundle, const SensorSeries& series,
                                           std::size_t batch = 256) {
    detail::require_complete(series, "forecast_series");
    const std::size_t W = static_cast<std::size_t>(bundle.cfg.lookback);
    const std::size_t L = series.size();
    if (L < W + 9) throw Error("forecast_series: series too short");

    const ImfSet imfs = decompose(series.values, bundle.emd);
    const ImfMatrix matrix =
        prepare_imf_matrix(imfs, bundle.minmax, static_cast<std::size_t>(bundle.cfg.imf_channels));
    std::vector<std::vector<double>> channels;
    for (std::size_t c = 0; c < matrix.channel_count; ++c)
        channels.emplace_back(matrix.data.begin() + static_cast<std::ptrdiff_t>(c * matrix.length),
                              matrix.data.begin() + static_cast<std::ptrdiff_t>((c + 1) * matrix.length));
    if (bundle.cfg.use_time_features)
        for (auto& ch : detail::one_hot_channels(series)) channels.push_back(std::move(ch));

    const auto& target_entry = bundle.minmax.entry("target");
    std::vector<double> pred(series.values.begin(), series.values.end());
    const Network& net = bundle.network;
    std::vector<std::size_t> offsets;
    for (std::size_t s = 0; s + W < L; ++s) {
        offsets.push_back(s);
        if (offsets.size() == batch || s + W == L - 1) {
            const Tensor out = net.predict({{"imf_window", detail::window_batch(channels, offsets, W)}});
            for (std::size_t b = 0; b < offsets.size(); ++b)
                pred[offsets[b] + W] = denormalize(out.at(b, 0), target_entry);
            offsets.clear();
        }
    }
    return pred;
}

}  // namespace hydronet
