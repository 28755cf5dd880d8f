#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "ndopt/sim/discovery.hpp"
#include "ndopt/sim/schedule.hpp"
#include "ndopt/time.hpp"

namespace ndopt::sim {

struct SweepResult {
    bool bounded = true;
    int64_t worst_latency = 0; ///< max over offsets of packet-to-packet latency, plus Ta
    int64_t worst_offset = 0;  ///< an offset attaining the maximum
    int64_t unbounded_offset = 0; ///< witness when bounded == false
    bool has_mean = false;
    double mean_dstar_s = 0.0; ///< mean over offsets of (success end - first beacon)
    size_t probes = 0;
};

namespace detail {

/// Time from the first beacon (sent at offset phi after the scan phase
/// origin) to the end of the first beacon fully inside a window; nullopt if
/// none within the horizon.
inline std::optional<int64_t> dstar_at(const std::vector<Window>& windows,
                                       const std::vector<int64_t>& base_beacons, int64_t da,
                                       int64_t phi) {
    for (const Window& w : windows) {
        auto it = std::lower_bound(base_beacons.begin(), base_beacons.end(), w.start - phi);
        if (it == base_beacons.end()) return std::nullopt;
        if (phi + *it + da <= w.start + w.len) return *it + da;
    }
    return std::nullopt;
}

} // namespace ndopt::sim::detail

/// Exhaustive worst-case check over the initial offset.
///
/// The one-way discovery latency is piecewise constant in the offset of the
/// first beacon against the scan grid; its discontinuities sit where some
/// beacon aligns with a window edge (start, or effective end). All such
/// alignment offsets are enumerated from the generated schedules, probed
/// plus/minus one nanosecond, and the worst observed latency is returned
/// together with the offset-averaged mean (ideal clocks only).
///
/// The result is `bounded == false` if any probed offset fails to discover
/// within the horizon, which the caller should set to a multiple (e.g. 4x)
/// of the analytically expected worst case.
inline SweepResult offset_sweep_oracle(const SchedParamsNs& scan_side,
                                       const SchedParamsNs& adv_side,
                                       const ClockModel& clock, int64_t horizon) {
    DeviceSchedule scanner = gen_schedule(scan_side, clock, 0, 0, horizon, {false, true});
    scanner.windows = merged_windows(scanner);
    const DeviceSchedule advertiser =
        gen_schedule(adv_side, clock, 0, 0, horizon, {true, false});
    const int64_t da = adv_side.da;
    const int64_t ts = scan_side.ts;

    // Alignment offsets. With an ideal clock the windows are exact multiples
    // of Ts, so (window_edge - beacon) mod Ts depends on the beacon index
    // only; with a quantized clock each (window, beacon) pair is probed.
    std::vector<int64_t> edges;
    if (clock.kind == ClockModel::Kind::Ideal) {
        const int64_t x = scan_side.ds - da;
        edges.reserve(2 * advertiser.beacons.size());
        for (int64_t b : advertiser.beacons) {
            edges.push_back(((0 - b) % ts + ts) % ts);
            edges.push_back(((x - b) % ts + ts) % ts);
        }
    } else {
        for (const Window& w : scanner.windows) {
            const int64_t x_end = w.start + w.len - da;
            for (int64_t b : advertiser.beacons) {
                const int64_t v1 = w.start - b;
                const int64_t v2 = x_end - b;
                if (v1 >= 0 && v1 < ts) edges.push_back(v1);
                if (v2 >= 0 && v2 < ts) edges.push_back(v2);
            }
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    SweepResult r;
    if (edges.empty()) {
        r.bounded = false;
        return r;
    }
    int64_t worst_dstar = -1;
    for (int64_t e : edges) {
        for (int64_t phi : {e - 1, e, e + 1}) {
            if (phi < 0 || phi >= ts) continue;
            ++r.probes;
            const auto d = detail::dstar_at(scanner.windows, advertiser.beacons, da, phi);
            if (!d) {
                r.bounded = false;
                r.unbounded_offset = phi;
                return r;
            }
            if (*d > worst_dstar) {
                worst_dstar = *d;
                r.worst_offset = phi;
            }
        }
    }
    r.worst_latency = worst_dstar + adv_side.ta;

    if (clock.kind == ClockModel::Kind::Ideal) {
        // Piecewise-constant integration over the offset: evaluate once per
        // segment between consecutive alignment edges.
        double acc = 0.0;
        for (size_t i = 0; i < edges.size(); ++i) {
            const int64_t a = edges[i];
            const int64_t b = i + 1 < edges.size() ? edges[i + 1] : edges[0] + ts;
            if (b <= a) continue;
            const int64_t mid = a + (b - a) / 2;
            const auto d =
                detail::dstar_at(scanner.windows, advertiser.beacons, da, mid % ts);
            if (!d) {
                r.bounded = false;
                r.unbounded_offset = mid % ts;
                return r;
            }
            acc += static_cast<double>(*d) * static_cast<double>(b - a);
        }
        r.mean_dstar_s = acc / static_cast<double>(ts) * 1e-9;
        r.has_mean = true;
    }
    return r;
}

} // namespace ndopt::sim
