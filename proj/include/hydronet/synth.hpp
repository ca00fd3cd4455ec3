#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "hydronet/series.hpp"

namespace hydronet {

// Synthetic SCADA network generator. Stands in for a live utility feed:
// the inlet carries daily and weekly cycles, each distribution point's
// pressure is an affine function of the inlet minus a point-specific demand
// cycle, and flows follow the demand cycles.
struct SynthConfig {
    int days = 60;
    int n_points = 5;
    double noise_std = 0.02;
    std::uint64_t seed = 0;
};

struct AnomalySpec {
    std::string sensor_id;
    std::size_t start_index = 0;
    std::size_t duration = 0;
    AnomalyDirection kind = AnomalyDirection::drop;
    double magnitude = 0.0;
};

namespace detail {

inline constexpr int kSamplesPerDay = 96;
inline constexpr int kSamplesPerWeek = 672;
inline constexpr double kTwoPi = 6.283185307179586476925286766559;

struct PointParams {
    double alpha;        // inlet coupling slope
    double offset;       // pressure offset [bar]
    double demand_amp;   // demand cycle amplitude
    double phase;        // demand cycle phase [rad]
    double harm_phase;   // second-harmonic phase [rad]
    double flow_scale;   // demand -> flow [m3/h]
};

// All cyclic terms are functions of t mod 672, so a noiseless network is
// exactly periodic with period one week.
inline double inlet_clean(std::int64_t t) {
    const double tau_d = static_cast<double>(t % kSamplesPerDay);
    const double tau_w = static_cast<double>(t % kSamplesPerWeek);
    return 4.0 + 0.5 * std::sin(kTwoPi * tau_d / kSamplesPerDay) +
           0.12 * std::sin(2.0 * kTwoPi * tau_d / kSamplesPerDay + 0.7) +
           0.03 * std::sin(kTwoPi * tau_w / kSamplesPerWeek);
}

inline double demand_cycle(std::int64_t t, const PointParams& p) {
    const double tau_d = static_cast<double>(t % kSamplesPerDay);
    return p.demand_amp * (1.0 + std::sin(kTwoPi * tau_d / kSamplesPerDay + p.phase) +
                           0.3 * std::sin(2.0 * kTwoPi * tau_d / kSamplesPerDay + p.harm_phase));
}

}  // namespace detail

inline Dataset generate_network(const SynthConfig& cfg) {
    if (cfg.days < 2) throw Error("generate_network: days must be >= 2");
    if (cfg.n_points < 1) throw Error("generate_network: n_points must be >= 1");
    if (cfg.noise_std < 0.0) throw Error("generate_network: noise_std must be >= 0");

    const std::size_t n = static_cast<std::size_t>(cfg.days) * detail::kSamplesPerDay;
    const Timestamp start = Timestamp::from_civil(2024, 1, 1, 0, 0);

    Rng param_rng(derive_seed(cfg.seed, 0));
    std::vector<detail::PointParams> points(static_cast<std::size_t>(cfg.n_points));
    for (auto& p : points) {
        p.alpha = param_rng.uniform(0.70, 0.95);
        p.offset = param_rng.uniform(0.3, 0.8);
        p.demand_amp = param_rng.uniform(0.10, 0.25);
        p.phase = param_rng.uniform(0.0, detail::kTwoPi);
        p.harm_phase = param_rng.uniform(0.0, detail::kTwoPi);
        p.flow_scale = param_rng.uniform(8.0, 14.0);
    }

    auto make_series = [&](const std::string& id, SensorKind kind) {
        SensorSeries s;
        s.sensor_id = id;
        s.kind = kind;
        s.start = start;
        s.cadence_minutes = 15;
        s.values.assign(n, 0.0);
        s.valid.assign(n, 1);
        return s;
    };

    Dataset ds;
    ds.inlet = make_series("inlet", SensorKind::inlet_pressure);
    Rng inlet_rng(derive_seed(cfg.seed, 1));
    for (std::size_t t = 0; t < n; ++t)
        ds.inlet->values[t] = detail::inlet_clean(static_cast<std::int64_t>(t)) +
                              inlet_rng.normal(0.0, cfg.noise_std);

    for (int i = 0; i < cfg.n_points; ++i) {
        const auto& p = points[static_cast<std::size_t>(i)];
        const std::string id = "p" + std::to_string(i + 1);
        auto pres = make_series(id, SensorKind::pressure);
        auto flow = make_series(id, SensorKind::flow);
        Rng pres_rng(derive_seed(cfg.seed, 100 + static_cast<std::uint64_t>(i)));
        Rng flow_rng(derive_seed(cfg.seed, 200 + static_cast<std::uint64_t>(i)));
        for (std::size_t t = 0; t < n; ++t) {
            const auto tt = static_cast<std::int64_t>(t);
            const double demand = detail::demand_cycle(tt, p);
            pres.values[t] = p.alpha * ds.inlet->values[t] + p.offset - 0.4 * demand +
                             pres_rng.normal(0.0, cfg.noise_std);
            flow.values[t] = 5.0 + p.flow_scale * demand +
                             flow_rng.normal(0.0, 5.0 * cfg.noise_std);
        }
        ds.pressure.push_back(std::move(pres));
        ds.flow.push_back(std::move(flow));
    }

    ds.check_invariants();
    return ds;
}

// Superimposes drop/spike anomalies with 2-sample linear edge ramps and
// appends matching ground-truth labels.
inline Dataset inject_anomalies(const Dataset& ds, const std::vector<AnomalySpec>& specs) {
    Dataset out = ds;
    for (std::size_t a = 0; a < specs.size(); ++a) {
        const auto& spec = specs[a];
        if (spec.magnitude <= 0.0)
            throw Error("inject_anomalies: magnitude must be positive");
        SensorSeries* target = nullptr;
        for (auto* s : out.all_series())
            if (s->sensor_id == spec.sensor_id && s->kind != SensorKind::flow) target = s;
        if (target == nullptr)
            throw Error("inject_anomalies: no pressure sensor '" + spec.sensor_id + "'");
        if (spec.duration == 0 || spec.start_index + spec.duration > target->size())
            throw Error("inject_anomalies: interval out of range on '" + spec.sensor_id + "'");
        for (std::size_t b = 0; b < a; ++b) {
            const auto& other = specs[b];
            if (other.sensor_id != spec.sensor_id) continue;
            if (spec.start_index < other.start_index + other.duration &&
                other.start_index < spec.start_index + spec.duration)
                throw Error("inject_anomalies: overlapping specs on '" + spec.sensor_id + "'");
        }
        const double sign = spec.kind == AnomalyDirection::spike ? 1.0 : -1.0;
        for (std::size_t j = 0; j < spec.duration; ++j) {
            const double ramp_in = (static_cast<double>(j) + 1.0) / 3.0;
            const double ramp_out = static_cast<double>(spec.duration - j) / 3.0;
            const double w = std::min({1.0, ramp_in, ramp_out});
            target->values[spec.start_index + j] += sign * spec.magnitude * w;
        }
        out.labels.push_back({spec.sensor_id, spec.start_index, spec.start_index + spec.duration - 1,
                              spec.magnitude, spec.kind});
    }
    return out;
}

// Flips valid -> false on an i.i.d. Bernoulli(rate) subset of samples across
// all series. Deterministic per seed.
inline Dataset inject_missing(const Dataset& ds, double rate, std::uint64_t seed) {
    if (rate < 0.0 || rate >= 1.0) throw Error("inject_missing: rate must be in [0, 1)");
    Dataset out = ds;
    Rng rng(derive_seed(seed, 7));
    for (auto* s : out.all_series()) {
        for (std::size_t i = 0; i < s->size(); ++i) {
            if (rng.bernoulli(rate)) {
                s->valid[i] = 0;
                s->values[i] = 0.0;
            }
        }
    }
    return out;
}

}  // namespace hydronet
