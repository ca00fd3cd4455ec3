#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hydronet/common.hpp"
#include "hydronet/events.hpp"
#include "hydronet/timestamp.hpp"

namespace hydronet {

enum class SensorKind { pressure, flow, inlet_pressure };

// Physical validity bounds. Readings outside these are treated as sensor
// faults and flagged invalid.
inline constexpr double kPressureMinBar = 0.0;
inline constexpr double kPressureMaxBar = 16.0;

inline bool in_physical_bounds(SensorKind kind, double v) {
    if (kind == SensorKind::flow) return v >= 0.0;
    return v >= kPressureMinBar && v <= kPressureMaxBar;
}

// A fixed-cadence sequence of readings for one sensor. Missing samples carry
// placeholder value 0.0 with valid=false; the validity flag is the single
// source of truth.
struct SensorSeries {
    std::string sensor_id;
    SensorKind kind = SensorKind::pressure;
    Timestamp start;
    int cadence_minutes = 15;
    std::vector<double> values;
    std::vector<std::uint8_t> valid;

    std::size_t size() const { return values.size(); }

    Timestamp timestamp_at(std::size_t i) const {
        return start.plus_minutes(static_cast<std::int64_t>(i) * cadence_minutes);
    }

    bool all_valid() const {
        for (auto v : valid)
            if (!v) return false;
        return true;
    }

    std::size_t invalid_count() const {
        std::size_t n = 0;
        for (auto v : valid) n += v ? 0 : 1;
        return n;
    }

    void check_consistent() const {
        if (values.size() != valid.size())
            throw Error("SensorSeries '" + sensor_id + "': values/valid length mismatch");
    }

    friend bool operator==(const SensorSeries&, const SensorSeries&) = default;
};

// One SCADA-style dataset: optional inlet series plus matched lists of
// distribution pressure and flow series, all on a shared time grid.
struct Dataset {
    std::optional<SensorSeries> inlet;
    std::vector<SensorSeries> pressure;
    std::vector<SensorSeries> flow;
    std::vector<AnomalyEvent> labels;

    std::size_t length() const {
        if (inlet) return inlet->size();
        if (!pressure.empty()) return pressure.front().size();
        if (!flow.empty()) return flow.front().size();
        return 0;
    }

    std::vector<const SensorSeries*> all_series() const {
        std::vector<const SensorSeries*> out;
        for (const auto& s : pressure) out.push_back(&s);
        for (const auto& s : flow) out.push_back(&s);
        if (inlet) out.push_back(&*inlet);
        return out;
    }

    std::vector<SensorSeries*> all_series() {
        std::vector<SensorSeries*> out;
        for (auto& s : pressure) out.push_back(&s);
        for (auto& s : flow) out.push_back(&s);
        if (inlet) out.push_back(&*inlet);
        return out;
    }

    // Looks a series up by its CSV column name (`<id>_pressure`, `<id>_flow`,
    // or `inlet_pressure`).
    const SensorSeries* find_column(const std::string& column) const {
        if (column == "inlet_pressure") return inlet ? &*inlet : nullptr;
        for (const auto& s : pressure)
            if (s.sensor_id + "_pressure" == column) return &s;
        for (const auto& s : flow)
            if (s.sensor_id + "_flow" == column) return &s;
        return nullptr;
    }

    SensorSeries* find_column(const std::string& column) {
        return const_cast<SensorSeries*>(static_cast<const Dataset*>(this)->find_column(column));
    }

    // Every series must share start, cadence, and length; pressure/flow lists
    // must carry matching sensor ids when both are present.
    void check_invariants() const {
        const auto series = all_series();
        if (series.empty()) return;
        const auto& first = *series.front();
        for (const auto* s : series) {
            s->check_consistent();
            if (s->start != first.start || s->cadence_minutes != first.cadence_minutes ||
                s->size() != first.size())
                throw Error("Dataset: series '" + s->sensor_id + "' does not share the common time grid");
        }
        if (!pressure.empty() && !flow.empty()) {
            if (pressure.size() != flow.size())
                throw Error("Dataset: pressure and flow sensor lists differ in size");
            for (std::size_t i = 0; i < pressure.size(); ++i)
                if (pressure[i].sensor_id != flow[i].sensor_id)
                    throw Error("Dataset: pressure/flow sensor ids do not match at position " +
                                std::to_string(i));
        }
    }

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

}  // namespace hydronet
