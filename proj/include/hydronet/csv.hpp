#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hydronet/series.hpp"

namespace hydronet {

namespace detail {

inline std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> cells;
    std::size_t begin = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            cells.emplace_back(line.substr(begin, i - begin));
            begin = i + 1;
        }
    }
    return cells;
}

}  // namespace detail

// Parses a SCADA CSV document. Header: DateTime,<id>_pressure,...,<id>_flow,
// ...,inlet_pressure. Empty/non-numeric cells and readings outside physical
// bounds become valid=false with placeholder 0.0; gaps in the time grid are
// filled with invalid samples.
inline Dataset parse_csv(std::string_view text, int cadence_minutes = 15) {
    std::vector<std::string_view> lines;
    std::size_t begin = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == '\n') {
            std::string_view line = text.substr(begin, i - begin);
            if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
            if (!line.empty()) lines.push_back(line);
            begin = i + 1;
        }
    }
    if (lines.empty()) throw Error("parse_csv: empty document");

    const auto header = detail::split_csv_line(lines[0]);
    if (header.empty() || header[0] != "DateTime")
        throw Error("parse_csv: first header column must be DateTime");

    Dataset ds;
    struct ColumnRef { SensorKind kind; std::size_t list_index; };
    std::vector<ColumnRef> columns;
    for (std::size_t c = 1; c < header.size(); ++c) {
        const std::string& name = header[c];
        if (ds.find_column(name) != nullptr)
            throw Error("parse_csv: duplicate column '" + name + "'");
        SensorSeries s;
        s.cadence_minutes = cadence_minutes;
        if (name == "inlet_pressure") {
            s.sensor_id = "inlet";
            s.kind = SensorKind::inlet_pressure;
            ds.inlet = std::move(s);
            columns.push_back({SensorKind::inlet_pressure, 0});
        } else if (name.size() > 9 && name.ends_with("_pressure")) {
            s.sensor_id = name.substr(0, name.size() - 9);
            s.kind = SensorKind::pressure;
            ds.pressure.push_back(std::move(s));
            columns.push_back({SensorKind::pressure, ds.pressure.size() - 1});
        } else if (name.size() > 5 && name.ends_with("_flow")) {
            s.sensor_id = name.substr(0, name.size() - 5);
            s.kind = SensorKind::flow;
            ds.flow.push_back(std::move(s));
            columns.push_back({SensorKind::flow, ds.flow.size() - 1});
        } else {
            throw Error("parse_csv: unknown column-kind suffix in '" + name + "'");
        }
    }

    auto series_for = [&](std::size_t c) -> SensorSeries& {
        const auto& ref = columns[c];
        if (ref.kind == SensorKind::inlet_pressure) return *ds.inlet;
        if (ref.kind == SensorKind::pressure) return ds.pressure[ref.list_index];
        return ds.flow[ref.list_index];
    };

    Timestamp start;
    std::int64_t prev_slot = -1;
    auto append_invalid_row = [&] {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            auto& s = series_for(c);
            s.values.push_back(0.0);
            s.valid.push_back(0);
        }
    };

    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto cells = detail::split_csv_line(lines[r]);
        if (cells.size() != header.size())
            throw Error("parse_csv: row " + std::to_string(r) + " has " + std::to_string(cells.size()) +
                        " cells, expected " + std::to_string(header.size()));
        const Timestamp ts = Timestamp::parse(cells[0]);
        std::int64_t slot;
        if (r == 1) {
            start = ts;
            slot = 0;
        } else {
            const std::int64_t delta = ts.minutes - start.minutes;
            if (delta % cadence_minutes != 0)
                throw Error("parse_csv: timestamp " + cells[0] + " is not on the " +
                            std::to_string(cadence_minutes) + "-minute cadence grid (cadence not constant)");
            slot = delta / cadence_minutes;
            if (slot == prev_slot) throw Error("parse_csv: duplicate timestamp " + cells[0]);
            if (slot < prev_slot) throw Error("parse_csv: non-monotonic timestamp " + cells[0]);
            while (prev_slot + 1 < slot) {
                append_invalid_row();
                ++prev_slot;
            }
        }
        prev_slot = slot;
        for (std::size_t c = 0; c < columns.size(); ++c) {
            auto& s = series_for(c);
            const std::string& cell = cells[c + 1];
            double v = 0.0;
            bool ok = false;
            if (!cell.empty()) {
                try {
                    v = parse_double(cell, "parse_csv");
                    ok = in_physical_bounds(s.kind, v);
                } catch (const Error&) {
                    ok = false;
                }
            }
            s.values.push_back(ok ? v : 0.0);
            s.valid.push_back(ok ? 1 : 0);
        }
    }

    for (auto* s : ds.all_series()) s->start = start;
    ds.check_invariants();
    return ds;
}

// Serializes a Dataset back to the CSV format parse_csv reads. Invalid
// samples become empty cells. LF line endings, shortest round-trip floats.
inline std::string write_csv(const Dataset& ds) {
    ds.check_invariants();
    std::string out = "DateTime";
    for (const auto& s : ds.pressure) out += "," + s.sensor_id + "_pressure";
    for (const auto& s : ds.flow) out += "," + s.sensor_id + "_flow";
    if (ds.inlet) out += ",inlet_pressure";
    out += "\n";

    const auto series = ds.all_series();
    const std::size_t n = ds.length();
    const auto* ref = series.empty() ? nullptr : series.front();
    for (std::size_t i = 0; i < n; ++i) {
        out += ref->timestamp_at(i).to_string();
        for (const auto* s : series) {
            out += ",";
            if (s->valid[i]) out += format_double(s->values[i]);
        }
        out += "\n";
    }
    return out;
}

}  // namespace hydronet
