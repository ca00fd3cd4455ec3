#pragma once

#include <vector>

#include "hydronet/tensor.hpp"

namespace hydronet {

// Lagged training pairs: inputs[s][w][c] holds channel c at absolute time
// index s+w, targets[s] the target channel at s+W+H-1.
struct SupervisedSet {
    Tensor inputs;   // [sample, lag, channel]
    Tensor targets;  // [sample, 1]
    int lookback = 0;
    int horizon = 1;

    std::size_t samples() const { return inputs.shape.empty() ? 0 : inputs.shape[0]; }
};

inline SupervisedSet series_to_supervised(const std::vector<std::vector<double>>& channels,
                                          int lookback, int horizon, std::size_t target_channel) {
    if (channels.empty()) throw Error("series_to_supervised: no channels");
    if (lookback < 1 || horizon < 1)
        throw Error("series_to_supervised: lookback and horizon must be >= 1");
    if (target_channel >= channels.size())
        throw Error("series_to_supervised: target channel out of range");
    const std::size_t length = channels[0].size();
    for (const auto& ch : channels)
        if (ch.size() != length) throw Error("series_to_supervised: channel lengths differ");
    const std::size_t window = static_cast<std::size_t>(lookback) + static_cast<std::size_t>(horizon);
    if (length < window)
        throw Error("series_to_supervised: series length " + std::to_string(length) +
                    " < lookback + horizon = " + std::to_string(window));

    const std::size_t n_samples = length - window + 1;
    const std::size_t n_channels = channels.size();
    SupervisedSet out;
    out.lookback = lookback;
    out.horizon = horizon;
    out.inputs = Tensor({n_samples, static_cast<std::size_t>(lookback), n_channels});
    out.targets = Tensor({n_samples, 1});
    for (std::size_t s = 0; s < n_samples; ++s) {
        for (std::size_t w = 0; w < static_cast<std::size_t>(lookback); ++w)
            for (std::size_t c = 0; c < n_channels; ++c)
                out.inputs.at(s, w, c) = channels[c][s + w];
        out.targets.at(s, 0) = channels[target_channel][s + window - 1];
    }
    return out;
}

}  // namespace hydronet
