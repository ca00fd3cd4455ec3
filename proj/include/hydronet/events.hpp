#pragma once

#include <cstddef>
#include <string>

#include "hydronet/common.hpp"

namespace hydronet {

enum class AnomalyDirection { drop, spike };

inline const char* to_string(AnomalyDirection d) {
    return d == AnomalyDirection::drop ? "drop" : "spike";
}

inline AnomalyDirection anomaly_direction_from_string(const std::string& s) {
    if (s == "drop") return AnomalyDirection::drop;
    if (s == "spike") return AnomalyDirection::spike;
    throw Error("anomaly direction must be 'drop' or 'spike', got '" + s + "'");
}

// A detected (or injected ground-truth) anomalous interval on one sensor.
// Indices are sample positions into that sensor's series, end inclusive.
struct AnomalyEvent {
    std::string sensor_id;
    std::size_t start_index = 0;
    std::size_t end_index = 0;
    double peak_score = 0.0;
    AnomalyDirection direction = AnomalyDirection::drop;

    friend bool operator==(const AnomalyEvent&, const AnomalyEvent&) = default;
};

}  // namespace hydronet
