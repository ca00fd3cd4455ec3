#pragma once

#include <string>
#include <vector>

#include "hydronet/emd.hpp"
#include "hydronet/minmax.hpp"

namespace hydronet {

// Fixed-channel normalized IMF matrix [C, L]: rows 1..C-1 hold imf_1..imf_{C-1}
// (zero-padded when EMD produced fewer, tail-merged when it produced more),
// row C always holds the residual.
struct ImfMatrix {
    std::size_t channel_count = 0;
    std::size_t length = 0;
    std::vector<double> data;  // row-major [channel][time]

    struct PaddingReport {
        std::vector<std::size_t> padded_channels;  // 1-based imf channel numbers
        std::size_t merged_tail_imfs = 0;          // count of imfs summed into the last imf row
    };
    PaddingReport report;

    double& at(std::size_t c, std::size_t t) { return data[c * length + t]; }
    double at(std::size_t c, std::size_t t) const { return data[c * length + t]; }
};

inline std::string imf_channel_name(std::size_t row, std::size_t channel_count) {
    return row + 1 == channel_count ? "residual" : "imf_" + std::to_string(row + 1);
}

namespace detail {

struct RawChannels {
    std::vector<std::vector<double>> rows;  // C rows of length L
    ImfMatrix::PaddingReport report;
};

inline RawChannels imf_raw_channels(const ImfSet& set, std::size_t channel_count) {
    if (channel_count < 2) throw Error("prepare_imf_matrix: channel count must be >= 2");
    const std::size_t L = set.source_length;
    if (set.residual.size() != L) throw Error("prepare_imf_matrix: inconsistent ImfSet");
    RawChannels rc;
    const std::size_t imf_rows = channel_count - 1;
    const std::size_t n = set.count();
    for (std::size_t r = 0; r < imf_rows; ++r) {
        if (r < n) {
            rc.rows.push_back(set.imfs[r]);
        } else {
            rc.rows.emplace_back(L, 0.0);
            rc.report.padded_channels.push_back(r + 1);
        }
    }
    if (n > imf_rows) {
        // surplus slow IMFs are summed into the last imf row, preserving mass
        auto& last = rc.rows[imf_rows - 1];
        for (std::size_t r = imf_rows; r < n; ++r)
            for (std::size_t t = 0; t < L; ++t) last[t] += set.imfs[r][t];
        rc.report.merged_tail_imfs = n - imf_rows + 1;
    }
    rc.rows.push_back(set.residual);
    return rc;
}

}  // namespace detail

// Per-channel Min-Max parameters fitted on the raw (merged/padded) channels.
inline MinMaxParams fit_imf_minmax(const ImfSet& set, std::size_t channel_count = 8) {
    const auto rc = detail::imf_raw_channels(set, channel_count);
    MinMaxParams params;
    for (std::size_t r = 0; r < rc.rows.size(); ++r)
        params.features.push_back(fit_minmax(rc.rows[r], imf_channel_name(r, channel_count)));
    return params;
}

inline ImfMatrix prepare_imf_matrix(const ImfSet& set, const MinMaxParams& params,
                                    std::size_t channel_count = 8) {
    auto rc = detail::imf_raw_channels(set, channel_count);
    ImfMatrix m;
    m.channel_count = channel_count;
    m.length = set.source_length;
    m.report = rc.report;
    m.data.resize(channel_count * m.length);
    for (std::size_t r = 0; r < channel_count; ++r) {
        const auto& entry = params.entry(imf_channel_name(r, channel_count));
        for (std::size_t t = 0; t < m.length; ++t) m.at(r, t) = normalize(rc.rows[r][t], entry);
    }
    return m;
}

// Denormalizes every channel and sums them; equals the original series up to
// floating-point error regardless of padding or merging.
inline std::vector<double> reconstruct_from_matrix(const ImfMatrix& m, const MinMaxParams& params) {
    std::vector<double> out(m.length, 0.0);
    for (std::size_t r = 0; r < m.channel_count; ++r) {
        const auto& entry = params.entry(imf_channel_name(r, m.channel_count));
        for (std::size_t t = 0; t < m.length; ++t) out[t] += denormalize(m.at(r, t), entry);
    }
    return out;
}

}  // namespace hydronet
