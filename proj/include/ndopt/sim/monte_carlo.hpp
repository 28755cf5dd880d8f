#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "ndopt/sim/discovery.hpp"
#include "ndopt/sim/rng.hpp"
#include "ndopt/sim/schedule.hpp"
#include "ndopt/time.hpp"

namespace ndopt::sim {

enum class SimMode {
    OneWay, ///< one advertising-only and one scanning-only device
    TwoWay  ///< every device advertises and scans (blocking compensation applies)
};

struct ScenarioConfig {
    SchedParamsNs params;
    std::vector<SchedParamsNs> per_device; ///< optional heterogeneous override
    HardwareProfile hw;
    SimMode mode = SimMode::TwoWay;
    int n_devices = 2;
    int64_t timeout_ns = 35'000'000'000; ///< per-trial cap on the simulated horizon
    long trials = 1000;
    uint64_t master_seed = 1;
    ClockModel clock = ClockModel::ideal();
    int64_t dm_predicted_ns = 0; ///< analytic worst case; 0 derives it from params
    std::optional<int64_t> ble_random_delay_ns; ///< per-interval delay cap (ideal clock only)

    const SchedParamsNs& device_params(int i) const {
        return per_device.empty() ? params
                                  : per_device[static_cast<size_t>(i) % per_device.size()];
    }
};

struct TrialOutcome {
    long trial = 0;
    uint64_t seed = 0;
    std::optional<int64_t> latency_ab; ///< device 0 discovers device 1
    std::optional<int64_t> latency_ba;
    bool failed_ab = false;
    bool failed_ba = false;
};

struct MonteCarloResult {
    std::vector<TrialOutcome> outcomes;
    int64_t dm_predicted_ns = 0;
    long discovery_count = 0; ///< one-way discoveries evaluated (trials, or 2x for two-way)
    long failures = 0;
    double failure_rate = 0.0;
    double mean_latency_s = 0.0;    ///< mean over completed one-way discoveries
    double mean_twoway_s = 0.0;     ///< mean over per-trial max of both directions
    double p50 = 0.0, p95 = 0.0, p99 = 0.0;
    std::vector<double> cdf_latencies_s; ///< sorted; per-direction (one-way) or per-trial max
};

namespace detail {

inline std::vector<int64_t> delayed_beacons(const SchedParamsNs& q, int64_t phase,
                                            int64_t horizon, int64_t delay_max,
                                            uint64_t seed, uint64_t trial, uint64_t draw0) {
    // BLE-style advertising: each interval stretches by a uniform random
    // delay, quantized to the protocol's 625 us step.
    constexpr int64_t step = 625000;
    const int64_t levels = delay_max / step + 1;
    std::vector<int64_t> out;
    int64_t t = phase;
    uint64_t k = 0;
    while (t <= horizon) {
        out.push_back(t);
        t += q.ta + step * keyed_below(seed, trial, draw0 + k, levels);
        ++k;
    }
    return out;
}

} // namespace detail

inline int64_t default_horizon(int64_t timeout_ns, int64_t dm_pred, int64_t ts) {
    const double soft = 1.2 * static_cast<double>(dm_pred) + static_cast<double>(ts);
    return std::min<int64_t>(timeout_ns, static_cast<int64_t>(soft));
}

/// Seeded trials with uniformly random per-device phases. Deterministic:
/// outcome i depends only on (master_seed, i) and the configuration.
inline MonteCarloResult monte_carlo(const ScenarioConfig& cfg) {
    if (cfg.trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (cfg.n_devices < 2) throw std::invalid_argument("need at least two devices");
    const SchedParamsNs& q = cfg.params;
    const int64_t dm_pred = cfg.dm_predicted_ns > 0 ? cfg.dm_predicted_ns : predicted_dm_ns(q);
    if (cfg.timeout_ns <= dm_pred)
        throw std::invalid_argument("timeout must exceed the predicted worst case");
    const int64_t horizon = default_horizon(cfg.timeout_ns, dm_pred, q.ts);
    const int64_t fail_above = dm_pred + dm_pred / 100;

    MonteCarloResult res;
    res.dm_predicted_ns = dm_pred;
    res.outcomes.reserve(cfg.trials);

    std::vector<DeviceSchedule> devs(cfg.n_devices);
    std::vector<const DeviceSchedule*> ptrs(cfg.n_devices);

    std::vector<double> pooled;     // per-direction latencies (completed)
    std::vector<double> per_trial;  // max of both directions (two-way)

    for (long trial = 0; trial < cfg.trials; ++trial) {
        for (int i = 0; i < cfg.n_devices; ++i) {
            const SchedParamsNs& qi = cfg.device_params(i);
            const int64_t pa = keyed_below(cfg.master_seed, trial, 4 * i, qi.ta);
            const int64_t ps = keyed_below(cfg.master_seed, trial, 4 * i + 1, qi.ts);
            ScheduleRoles roles;
            if (cfg.mode == SimMode::OneWay) roles = i == 0 ? ScheduleRoles{true, false}
                                                            : ScheduleRoles{false, true};
            devs[i] = gen_schedule(qi, cfg.clock, pa, ps, horizon, roles);
            if (cfg.ble_random_delay_ns && roles.advertise)
                devs[i].beacons = detail::delayed_beacons(qi, pa, horizon, *cfg.ble_random_delay_ns,
                                                          cfg.master_seed, trial,
                                                          1000 + 100000ULL * i);
            if (cfg.mode == SimMode::TwoWay && qi.bc_enabled)
                devs[i] = apply_bc(devs[i], cfg.hw);
            ptrs[i] = &devs[i];
        }

        TrialOutcome o;
        o.trial = trial;
        o.seed = keyed_u64(cfg.master_seed, trial, 0);

        const auto first_of = [&](int rx, int tx) -> std::optional<int64_t> {
            std::vector<const DeviceSchedule*> others;
            for (int i = 0; i < cfg.n_devices; ++i)
                if (i != rx) others.push_back(ptrs[i]);
            const auto found = detect_discovery(devs[rx], others, cfg.hw);
            for (size_t i = 0; i < others.size(); ++i)
                if (others[i] == ptrs[tx]) return found[i];
            return std::nullopt;
        };

        // latency_ab: device 0 discovers device 1; latency_ba: the reverse.
        // In one-way mode device 0 only advertises, so only ba applies.
        o.latency_ba = first_of(1, 0);
        o.failed_ba = !o.latency_ba || *o.latency_ba > fail_above;
        if (o.latency_ba) pooled.push_back(ns_to_seconds({*o.latency_ba}));
        if (cfg.mode == SimMode::TwoWay) {
            o.latency_ab = first_of(0, 1);
            o.failed_ab = !o.latency_ab || *o.latency_ab > fail_above;
            if (o.latency_ab) pooled.push_back(ns_to_seconds({*o.latency_ab}));
            if (o.latency_ab && o.latency_ba)
                per_trial.push_back(ns_to_seconds({std::max(*o.latency_ab, *o.latency_ba)}));
            res.failures += (o.failed_ab ? 1 : 0) + (o.failed_ba ? 1 : 0);
            res.discovery_count += 2;
        } else {
            res.failures += o.failed_ba ? 1 : 0;
            res.discovery_count += 1;
        }
        res.outcomes.push_back(o);
    }

    res.failure_rate = static_cast<double>(res.failures) / static_cast<double>(res.discovery_count);
    const auto mean = [](const std::vector<double>& v) {
        if (v.empty()) return 0.0;
        double a = 0.0;
        for (double x : v) a += x;
        return a / static_cast<double>(v.size());
    };
    res.mean_latency_s = mean(pooled);
    res.mean_twoway_s = mean(per_trial);

    res.cdf_latencies_s = cfg.mode == SimMode::TwoWay && !per_trial.empty() ? per_trial : pooled;
    std::sort(res.cdf_latencies_s.begin(), res.cdf_latencies_s.end());
    const auto quantile = [&](double p) {
        if (res.cdf_latencies_s.empty()) return 0.0;
        const size_t i = static_cast<size_t>(p * (res.cdf_latencies_s.size() - 1));
        return res.cdf_latencies_s[i];
    };
    res.p50 = quantile(0.50);
    res.p95 = quantile(0.95);
    res.p99 = quantile(0.99);
    return res;
}

/// Probability that a device's discovery procedure is spoiled by beacons of
/// further devices in range: 1 - exp(-2(n-1)(da/Ta + 2 da/Ts)). The 2/Ts
/// term accounts for the two compensation beacons per scan interval.
inline double collision_prob(int n_devices, const PiParams& p, const HardwareProfile& hw) {
    (void)hw;
    if (n_devices < 3)
        throw std::invalid_argument("collision model applies from 3 devices up");
    const double rate = p.da / p.ta + 2.0 * p.da / p.ts;
    return 1.0 - std::exp(-2.0 * (n_devices - 1) * rate);
}

struct CollisionMcResult {
    long trials = 0;
    long hits = 0;
    double p_hat = 0.0;
};

/// Passive collision counting: place one probe beacon at a uniformly random
/// position and test whether any beacon of n-1 independently phased
/// blocking-compensated devices overlaps it.
inline CollisionMcResult collision_prob_mc(const SchedParamsNs& q, const HardwareProfile& hw,
                                           int n_devices, long trials, uint64_t seed) {
    if (n_devices < 3)
        throw std::invalid_argument("collision model applies from 3 devices up");
    CollisionMcResult r;
    r.trials = trials;
    const int64_t base = 2 * q.ts;
    const int64_t horizon = 3 * q.ts + 4 * q.ta;
    for (long trial = 0; trial < trials; ++trial) {
        const int64_t tag = base + keyed_below(seed, trial, 0, q.ta);
        bool hit = false;
        for (int i = 1; i < n_devices && !hit; ++i) {
            const int64_t pa = keyed_below(seed, trial, 4 * i, q.ta);
            const int64_t ps = keyed_below(seed, trial, 4 * i + 1, q.ts);
            DeviceSchedule d = gen_schedule(q, ClockModel::ideal(), pa, ps, horizon);
            d = apply_bc(d, hw);
            hit = detail::collides(d.beacons, tag, q.da, d.da);
        }
        if (hit) ++r.hits;
    }
    r.p_hat = static_cast<double>(r.hits) / static_cast<double>(trials);
    return r;
}

} // namespace ndopt::sim
