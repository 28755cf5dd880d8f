#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "ndopt/sim/schedule.hpp"
#include "ndopt/time.hpp"

namespace ndopt::sim {

/// Reception intervals with touching/overlapping windows merged. A beacon
/// landing across two back-to-back windows is still received (the radio
/// never stopped listening), which matters for the continuous-scan case.
inline std::vector<Window> merged_windows(const DeviceSchedule& d) {
    std::vector<Window> m;
    for (const Window& w : d.windows) {
        if (!m.empty() && w.start <= m.back().start + m.back().len) {
            m.back().len = std::max(m.back().len, w.start + w.len - m.back().start);
        } else {
            m.push_back(w);
        }
    }
    return m;
}

namespace detail {

/// True if [t, t+da) overlaps the receiver's own-transmission blackout
/// (tau - drt, tau + da_own + dtr) around any own beacon tau. The blackout
/// bounds are open: a beacon that merely touches the boundary is received.
inline bool in_own_blackout(const std::vector<int64_t>& own, int64_t da_own, int64_t t,
                            int64_t da, int64_t drt, int64_t dtr) {
    if (own.empty()) return false;
    // Overlap condition: tau - drt < t + da && t < tau + da_own + dtr,
    // i.e. tau in (t - da_own - dtr, t + da + drt).
    auto it = std::upper_bound(own.begin(), own.end(), t - da_own - dtr);
    for (; it != own.end() && *it < t + da + drt; ++it) return true;
    return false;
}

/// True if any beacon of another schedule overlaps [t, t+da) in time.
inline bool collides(const std::vector<int64_t>& other, int64_t t, int64_t da,
                     int64_t da_other) {
    auto it = std::upper_bound(other.begin(), other.end(), t - da_other);
    return it != other.end() && *it < t + da;
}

} // namespace detail

/// First successful reception time (end of the received beacon) for each
/// transmitter in tx_all, at receiver rx. A beacon is received iff it lies
/// entirely inside a reception window, does not meet the receiver's own
/// turnaround/transmission blackout, and no transmission from any other
/// device overlaps it in time (any overlap destroys both, no capture).
inline std::vector<std::optional<int64_t>> detect_discovery(
    const DeviceSchedule& rx, const std::vector<const DeviceSchedule*>& tx_all,
    const HardwareProfile& hw) {
    const int64_t drt = seconds_to_ns(hw.drt).ns;
    const int64_t dtr = seconds_to_ns(hw.dtr).ns;
    const std::vector<Window> windows = merged_windows(rx);

    std::vector<std::optional<int64_t>> result(tx_all.size());
    for (size_t ti = 0; ti < tx_all.size(); ++ti) {
        const DeviceSchedule& tx = *tx_all[ti];
        if (&tx == &rx) continue;
        const int64_t da = tx.da;
        std::optional<int64_t> success;
        for (const Window& w : windows) {
            auto it = std::lower_bound(tx.beacons.begin(), tx.beacons.end(), w.start);
            for (; it != tx.beacons.end() && *it + da <= w.start + w.len; ++it) {
                const int64_t t = *it;
                if (detail::in_own_blackout(rx.beacons, rx.da, t, da, drt, dtr)) continue;
                bool destroyed = false;
                for (size_t oi = 0; oi < tx_all.size() && !destroyed; ++oi) {
                    if (oi == ti || tx_all[oi] == &rx) continue;
                    destroyed = detail::collides(tx_all[oi]->beacons, t, da, tx_all[oi]->da);
                }
                if (!destroyed) {
                    success = t + da;
                    break;
                }
            }
            if (success) break;
        }
        result[ti] = success;
    }
    return result;
}

} // namespace ndopt::sim
