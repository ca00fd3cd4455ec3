#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include <json.hpp>

#include "hydronet/events.hpp"

namespace hydronet {

// Rolling-z-score residual standardization: e_t = actual - predicted,
// s_t = (e_t - mu_t)/sigma_t over the trailing `window` residuals excluding
// t, sigma floored at 1e-6. The first `window` samples score 0.
inline std::vector<double> residual_scores(std::span<const double> predicted,
                                           std::span<const double> actual, std::size_t window = 96) {
    const std::size_t n = actual.size();
    if (predicted.size() != n) throw Error("residual_scores: length mismatch");
    if (window < 2 || n < window) throw Error("residual_scores: need at least `window` samples");
    std::vector<double> e(n);
    for (std::size_t t = 0; t < n; ++t) e[t] = actual[t] - predicted[t];
    std::vector<double> scores(n, 0.0);
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t t = 0; t < window; ++t) {
        sum += e[t];
        sum2 += e[t] * e[t];
    }
    const double w = static_cast<double>(window);
    for (std::size_t t = window; t < n; ++t) {
        const double mu = sum / w;
        const double var = std::max(0.0, sum2 / w - mu * mu);
        const double sigma = std::max(1e-6, std::sqrt(var));
        scores[t] = (e[t] - mu) / sigma;
        sum += e[t] - e[t - window];
        sum2 += e[t] * e[t] - e[t - window] * e[t - window];
    }
    return scores;
}

// Maximal runs of |s_t| >= threshold lasting >= min_duration become events;
// direction follows the mean standardized residual in the run.
inline std::vector<AnomalyEvent> detect(std::span<const double> scores, double threshold = 3.0,
                                        std::size_t min_duration = 1,
                                        const std::string& sensor_id = "") {
    if (threshold <= 0.0) throw Error("detect: threshold must be positive");
    if (min_duration < 1) throw Error("detect: min_duration must be >= 1");
    std::vector<AnomalyEvent> events;
    std::size_t t = 0;
    const std::size_t n = scores.size();
    while (t < n) {
        if (std::abs(scores[t]) < threshold) {
            ++t;
            continue;
        }
        std::size_t end = t;
        double peak = 0.0, mean = 0.0;
        while (end < n && std::abs(scores[end]) >= threshold) {
            peak = std::max(peak, std::abs(scores[end]));
            mean += scores[end];
            ++end;
        }
        if (end - t >= min_duration)
            events.push_back({sensor_id, t, end - 1, peak,
                              mean > 0.0 ? AnomalyDirection::spike : AnomalyDirection::drop});
        t = end;
    }
    return events;
}

struct Metrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double mape = 0.0;      // fraction
    double accuracy = 0.0;  // percent, 100*(1 - mape)
    bool has_detection = false;
    bool has_forecast = false;
};

// Event-level matching: an event matches a label when their intervals overlap
// after dilating the label by `tolerance` samples; events are matched
// one-to-one greedily in decreasing peak-score order.
inline Metrics evaluate(const std::vector<AnomalyEvent>& events,
                        const std::vector<AnomalyEvent>& labels, std::size_t tolerance = 2) {
    Metrics m;
    m.has_detection = true;
    std::vector<std::size_t> order(events.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return events[a].peak_score > events[b].peak_score;
    });
    std::vector<bool> label_used(labels.size(), false);
    std::size_t matched = 0;
    for (const std::size_t ei : order) {
        const auto& ev = events[ei];
        for (std::size_t li = 0; li < labels.size(); ++li) {
            if (label_used[li]) continue;
            const auto& lb = labels[li];
            if (!lb.sensor_id.empty() && !ev.sensor_id.empty() && lb.sensor_id != ev.sensor_id)
                continue;
            const std::size_t lo = lb.start_index > tolerance ? lb.start_index - tolerance : 0;
            const std::size_t hi = lb.end_index + tolerance;
            if (ev.start_index <= hi && lo <= ev.end_index) {
                label_used[li] = true;
                ++matched;
                break;
            }
        }
    }
    m.precision = events.empty() ? 0.0 : static_cast<double>(matched) / static_cast<double>(events.size());
    m.recall = labels.empty() ? 0.0 : static_cast<double>(matched) / static_cast<double>(labels.size());
    m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    return m;
}

// Mean absolute percentage error as a fraction; samples with |actual| below
// 1e-12 are skipped.
inline double mape(std::span<const double> predicted, std::span<const double> actual) {
    if (predicted.size() != actual.size()) throw Error("mape: length mismatch");
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t t = 0; t < actual.size(); ++t) {
        if (std::abs(actual[t]) < 1e-12) continue;
        sum += std::abs(actual[t] - predicted[t]) / std::abs(actual[t]);
        ++count;
    }
    if (count == 0) throw Error("mape: no usable samples");
    return sum / static_cast<double>(count);
}

inline Metrics evaluate_full(const std::vector<AnomalyEvent>& events,
                             const std::vector<AnomalyEvent>& labels,
                             std::span<const double> predicted, std::span<const double> actual,
                             std::size_t tolerance = 2) {
    Metrics m = evaluate(events, labels, tolerance);
    m.mape = mape(predicted, actual);
    m.accuracy = 100.0 * (1.0 - m.mape);
    m.has_forecast = true;
    return m;
}

// ---- JSON ----

inline nlohmann::json to_json(const AnomalyEvent& e) {
    return {{"sensor_id", e.sensor_id},
            {"start_index", e.start_index},
            {"end_index", e.end_index},
            {"peak_score", e.peak_score},
            {"direction", to_string(e.direction)}};
}

inline nlohmann::json events_to_json(const std::vector<AnomalyEvent>& events) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : events) arr.push_back(to_json(e));
    return arr;
}

inline AnomalyEvent event_from_json(const nlohmann::json& j) {
    for (const char* key : {"sensor_id", "start_index", "end_index", "peak_score", "direction"})
        if (!j.contains(key)) throw Error(std::string("anomaly event json: missing '") + key + "'");
    AnomalyEvent e;
    e.sensor_id = j.at("sensor_id").get<std::string>();
    e.start_index = j.at("start_index").get<std::size_t>();
    e.end_index = j.at("end_index").get<std::size_t>();
    e.peak_score = j.at("peak_score").get<double>();
    e.direction = anomaly_direction_from_string(j.at("direction").get<std::string>());
    if (e.start_index > e.end_index) throw Error("anomaly event json: start_index > end_index");
    return e;
}

inline std::vector<AnomalyEvent> events_from_json(const nlohmann::json& arr) {
    if (!arr.is_array()) throw Error("anomaly events json: expected an array");
    std::vector<AnomalyEvent> out;
    for (const auto& j : arr) out.push_back(event_from_json(j));
    return out;
}

inline nlohmann::json to_json(const Metrics& m) {
    nlohmann::json j;
    if (m.has_detection) {
        j["precision"] = m.precision;
        j["recall"] = m.recall;
        j["f1"] = m.f1;
    }
    if (m.has_forecast) {
        j["mape"] = m.mape;
        j["accuracy"] = m.accuracy;
    }
    return j;
}

}  // namespace hydronet
