#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "ndopt/time.hpp"

namespace ndopt::sim {

/// Exact integer-nanosecond protocol parameters for the simulator.
///
/// Built from closed-form (double seconds) output by quantize_params(),
/// which rounds the effective window ds - da once and reconstructs the
/// other values from the scheme identities, so that
///   SingleInt:  ta == ds - da, ts == (m+1) * ta
///   MultiInt:   k_c * ta == ts + (ds - da)
/// hold exactly in nanoseconds as well.
struct SchedParamsNs {
    int64_t ta = 0;
    int64_t ts = 0;
    int64_t ds = 0;
    int64_t da = 0;
    Scheme scheme = Scheme::SingleInt;
    int m = 0;
    int k_c = 0;
    bool bc_enabled = false;
};

inline SchedParamsNs quantize_params(const PiParams& p, bool ts_safety_margin = false,
                                     double f_clk = 32768.0) {
    p.validate();
    SchedParamsNs q;
    q.da = seconds_to_ns(p.da).ns;
    const int64_t x = seconds_to_ns(p.ds - p.da).ns;
    q.ds = q.da + x;
    q.scheme = p.scheme;
    q.m = p.m;
    q.k_c = p.k_c;
    q.bc_enabled = p.bc_enabled;
    int64_t mult_ta = 1, mult_ts = p.m + 1;
    if (p.scheme == Scheme::SingleInt) {
        q.ta = x;
        q.ts = (p.m + 1) * x;
    } else {
        mult_ta = p.m + 1;
        mult_ts = static_cast<int64_t>(p.k_c) * (p.m + 1) - 1;
        q.ta = mult_ta * x;
        q.ts = mult_ts * x;
    }
    // The reconstruction is only valid for solver output; reject parameter
    // sets that do not carry the scheme structure. The slack covers the
    // single sub-nanosecond rounding of x scaled by each multiplier.
    if (std::abs(q.ta - seconds_to_ns(p.ta).ns) > mult_ta / 2 + 1 ||
        std::abs(q.ts - seconds_to_ns(p.ts).ns) > mult_ts / 2 + 1)
        throw std::invalid_argument("parameters do not satisfy the scheme identities");
    if (ts_safety_margin) q.ts -= tick_quantize({seconds_to_ns(1.0 / f_clk).ns}, f_clk).ns;
    return q;
}

/// Analytic worst-case latency of the quantized parameters (ideal clock),
/// exact in nanoseconds.
inline int64_t predicted_dm_ns(const SchedParamsNs& q) {
    const int64_t x = q.ds - q.da;
    if (q.scheme == Scheme::SingleInt) return (q.m + 1) * x + q.da;
    if (q.k_c == 1) return static_cast<int64_t>(q.m) * (q.m + 1) * x + q.da;
    return (q.m + 1) * q.ts + q.da;
}

struct ClockModel {
    enum class Kind { Ideal, Quantized } kind = Kind::Ideal;
    double f_clk = 32768.0;
    bool q_correction = true;
    int ds_extension_ticks = 5;

    static ClockModel ideal() { return {}; }
    static ClockModel quantized(double f, bool corr = true, int ext = 5) {
        return {Kind::Quantized, f, corr, ext};
    }
};

/// Reception interval [start, start + len).
struct Window {
    int64_t start = 0;
    int64_t len = 0;
};

struct DeviceSchedule {
    std::vector<int64_t> beacons; ///< transmission start times, strictly increasing
    std::vector<Window> windows;  ///< non-overlapping, increasing
    int64_t da = 0;
    int64_t phase_adv = 0;
    int64_t phase_scan = 0;
};

namespace detail {

/// Event times of a periodic interval under a tick-quantized sleep clock.
///
/// Exact bookkeeping in units of (tick * 1e9) vs (interval index * T * f):
/// both are integers, so the accumulated error Q is tracked without any
/// rounding. With correction on, whenever |Q| exceeds half a tick the next
/// interval gains or loses one tick, keeping the cumulative deviation under
/// one tick. With correction off, every interval is independently rounded
/// and the error grows linearly.
inline std::vector<int64_t> quantized_times(int64_t interval_ns, int64_t f, int64_t phase,
                                            int64_t horizon, bool correction) {
    std::vector<int64_t> out;
    const int64_t base_ticks = (interval_ns * f + 500000000) / 1000000000;
    const int64_t half_tick_scaled = 500000000; // (T_clk/2) * f, in ns*f units
    int64_t ticks_cum = 0;   // realized time of the upcoming event, in ticks
    int64_t completed = 0;   // intervals summed into ticks_cum
    while (true) {
        const int64_t t = phase + (ticks_cum * 1000000000 + f / 2) / f;
        if (t > horizon) break;
        out.push_back(t);
        int64_t next = base_ticks;
        if (correction) {
            // Q at this wake-up: realized minus nominal elapsed time,
            // scaled by f so both sides stay integer.
            const int64_t q_scaled = ticks_cum * 1000000000 - completed * interval_ns * f;
            if (q_scaled > half_tick_scaled)
                next = base_ticks - 1;
            else if (q_scaled < -half_tick_scaled)
                next = base_ticks + 1;
        }
        ticks_cum += next;
        ++completed;
        if (completed > (1 << 26)) throw std::runtime_error("schedule horizon too long");
    }
    return out;
}

} // namespace detail

struct ScheduleRoles {
    bool advertise = true;
    bool scan = true;
};

/// Periodic beacon/window schedule of one device from time 0 to horizon.
///
/// Beacons start at phase_adv (transmissions before coming into range are
/// not modeled), but the window straddling time 0 is included: the scanner
/// has been running, so the tail of its previous window is still listening.
inline DeviceSchedule gen_schedule(const SchedParamsNs& q, const ClockModel& clock,
                                   int64_t phase_adv, int64_t phase_scan, int64_t horizon,
                                   ScheduleRoles roles = {}) {
    DeviceSchedule d;
    d.da = q.da;
    d.phase_adv = phase_adv;
    d.phase_scan = phase_scan;
    if (clock.kind == ClockModel::Kind::Ideal) {
        if (roles.advertise)
            for (int64_t t = phase_adv; t <= horizon; t += q.ta) d.beacons.push_back(t);
        if (roles.scan) {
            d.windows.push_back({phase_scan - q.ts, q.ds});
            for (int64_t t = phase_scan; t <= horizon; t += q.ts)
                d.windows.push_back({t, q.ds});
        }
    } else {
        const auto f = static_cast<int64_t>(clock.f_clk);
        const int64_t ds_ticks = (q.ds * f + 500000000) / 1000000000 + clock.ds_extension_ticks;
        const int64_t ds_len = (ds_ticks * 1000000000 + f / 2) / f;
        if (roles.advertise)
            d.beacons = detail::quantized_times(q.ta, f, phase_adv, horizon, clock.q_correction);
        if (roles.scan) {
            d.windows.push_back({phase_scan - q.ts, ds_len});
            for (int64_t t : detail::quantized_times(q.ts, f, phase_scan, horizon, clock.q_correction))
                d.windows.push_back({t, ds_len});
        }
    }
    return d;
}

/// Blocking compensation: drop every regular beacon whose transmission
/// would intersect a widened own window [w - dtr, w_end + drt], and bracket
/// each window with one beacon ending dtr before it starts and one starting
/// drt after it ends. Compensation beacons that would overlap a surviving
/// regular beacon (or fall before time 0) are skipped.
inline DeviceSchedule apply_bc(const DeviceSchedule& in, const HardwareProfile& hw) {
    const int64_t da = in.da;
    const int64_t drt = seconds_to_ns(hw.drt).ns;
    const int64_t dtr = seconds_to_ns(hw.dtr).ns;

    std::vector<int64_t> window_starts;
    window_starts.reserve(in.windows.size());
    for (const Window& w : in.windows) window_starts.push_back(w.start);

    const auto suppressed = [&](int64_t t) {
        // Only the window straddling or immediately following t can hit.
        auto it = std::upper_bound(window_starts.begin(), window_starts.end(), t);
        const size_t hi = static_cast<size_t>(it - window_starts.begin());
        for (size_t i = hi > 0 ? hi - 1 : 0; i < in.windows.size() && i <= hi; ++i) {
            const Window& w = in.windows[i];
            if (t > w.start - dtr - da && t < w.start + w.len + drt) return true;
        }
        return false;
    };

    DeviceSchedule out = in;
    out.beacons.clear();
    for (int64_t t : in.beacons)
        if (!suppressed(t)) out.beacons.push_back(t);

    std::vector<int64_t> comp;
    for (const Window& w : in.windows) {
        comp.push_back(w.start - dtr - da);
        comp.push_back(w.start + w.len + drt);
    }
    for (int64_t t : comp) {
        if (t < 0) continue;
        const auto it = std::lower_bound(out.beacons.begin(), out.beacons.end(), t - da + 1);
        if (it != out.beacons.end() && *it < t + da) continue; // would overlap a survivor
        out.beacons.push_back(t);
    }
    std::sort(out.beacons.begin(), out.beacons.end());
    out.beacons.erase(std::unique(out.beacons.begin(), out.beacons.end()), out.beacons.end());
    return out;
}

/// Plain duty-cycle of a blocking-compensated configuration, from exact
/// schedule accounting over one hyperperiod (capped at 1e4 scan intervals
/// with proportional averaging).
inline double bc_exact_duty_cycle(const PiParams& p, const HardwareProfile& hw) {
    const SchedParamsNs q = quantize_params(p);
    const int64_t g = std::gcd(q.ta, q.ts);
    const __int128 lcm = static_cast<__int128>(q.ta) / g * q.ts;
    const __int128 cap = static_cast<__int128>(q.ts) * 10000;
    const int64_t horizon = static_cast<int64_t>(lcm < cap ? lcm : cap);

    // Count inside [Ts, Ts + horizon) so the clipped compensation beacon of
    // the very first window does not skew the steady-state average.
    DeviceSchedule sched = gen_schedule(q, ClockModel::ideal(), 0, 0, q.ts + horizon);
    sched = apply_bc(sched, hw);
    double n_beacons = 0, n_windows = 0;
    for (int64_t t : sched.beacons)
        if (t >= q.ts && t < q.ts + horizon) ++n_beacons;
    for (const Window& w : sched.windows)
        if (w.start >= q.ts && w.start < q.ts + horizon) ++n_windows;
    const double h = static_cast<double>(horizon);
    return (n_beacons * static_cast<double>(q.da) + n_windows * static_cast<double>(q.ds)) / h;
}

} // namespace ndopt::sim
