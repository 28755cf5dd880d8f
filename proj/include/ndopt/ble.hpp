#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "ndopt/singleint.hpp"
#include "ndopt/time.hpp"

namespace ndopt {

/// Measured per-interval overheads of the BLE advertising/scanning machine.
/// o_s is the scan-window extension that absorbs the random delay plus the
/// 3-channel burst span d_e, so o_s = random_delay_max + d_e must hold.
struct BleOverheads {
    double random_delay_max = 10e-3;
    double d_e = 1e-3;     ///< burst span beyond the first beacon
    double o_a = 619e-6;   ///< per-interval transmit-side overhead
    double o_a2 = 143e-6;  ///< per-beacon response-listen overhead (bidirectional)
    double o_s = 11e-3;    ///< scan-window extension, random_delay_max + d_e
    int payload_bytes = 30;
    double bitrate = 1e6;

    double beacon_air_time() const { return payload_bytes * 8.0 / bitrate; }

    void validate() const {
        if (std::abs(o_s - (random_delay_max + d_e)) > 1e-12)
            throw std::invalid_argument("o_s must equal random_delay_max + d_e");
        if (o_a < 0 || o_a2 < 0 || random_delay_max < 0 || d_e < 0)
            throw std::invalid_argument("overheads must be non-negative");
    }
};

enum class BleMode { NonConnectableUnidir, ConnectableBidir };

struct BleSolution {
    PiParams params;          ///< core values; params.ds is the unextended window
    int m = 0;
    BleMode mode = BleMode::NonConnectableUnidir;
    double ds_configured = 0.0; ///< window actually configured: core + o_s
    double dm = 0.0;            ///< worst-case latency including the random delay
    double eta_joint = 0.0;
};

/// Overhead-inclusive joint duty-cycle of a pair: the scanner pays for the
/// extended window, the advertiser for the burst overhead (and the response
/// listening in bidirectional modes). params.ds is the core window.
inline double ble_duty_cycle(const PiParams& p, const BleOverheads& oh, BleMode mode) {
    p.validate();
    oh.validate();
    const double tx_extra = oh.o_a + (mode == BleMode::ConnectableBidir ? oh.o_a2 : 0.0);
    return (p.ds + oh.o_s) / p.ts + (p.da + tx_extra) / p.ta;
}

/// Parametrize BLE for a target joint duty-cycle.
///
/// For each candidate order the SingleInt structure Ta = ds - da,
/// Ts = (M+1)*Ta is solved against the overhead-inclusive duty-cycle (a
/// linear equation in the core window), and the order minimizing the
/// worst-case latency (M+1)*Ta + da + random_delay_max wins. The duty-cycle
/// range is limited to [2.15%, 10%] unless allow_outside is set.
inline BleSolution ble_solve(double eta_joint, const BleOverheads& oh, BleMode mode,
                             const HardwareProfile& hw, bool allow_outside = false) {
    oh.validate();
    if (!(eta_joint > 0.0 && eta_joint < 1.0))
        throw std::invalid_argument("joint duty-cycle must lie in (0, 1)");
    if (!allow_outside && (eta_joint < 0.0215 || eta_joint > 0.10))
        throw infeasible_error("joint duty-cycle outside the supported [2.15%, 10%] range (pass the force flag to widen)");

    const double da = oh.beacon_air_time();
    const double tx_extra = oh.o_a + (mode == BleMode::ConnectableBidir ? oh.o_a2 : 0.0);
    const double c = da + tx_extra + eta_joint * da;

    // Continuous minimizer of u*(o_s + u*c)/(eta*u - 1); candidates around it.
    const double u_star =
        (1.0 + std::sqrt(1.0 + eta_joint * (oh.o_s > 0 ? oh.o_s : 0.0) / c)) / eta_joint;
    const long u_hi = std::max<long>(8, static_cast<long>(2.0 * u_star) + 8);

    BleSolution best;
    bool found = false;
    for (long u = 2; u <= u_hi; ++u) {
        const double denom = eta_joint * u - 1.0;
        if (denom <= 0.0) continue;
        const double ds_core = (oh.o_s + u * c) / denom;
        const double ta = ds_core - da;
        if (ta <= da) continue;
        if (ds_core < hw.ds_min) continue;
        const double dm = u * ta + da + oh.random_delay_max;
        if (!found || dm < best.dm) {
            found = true;
            best.m = static_cast<int>(u - 1);
            best.mode = mode;
            best.params.ds = ds_core;
            best.params.da = da;
            best.params.ta = ta;
            best.params.ts = static_cast<double>(u) * ta;
            best.params.scheme = Scheme::SingleInt;
            best.params.m = best.m;
            best.ds_configured = ds_core + oh.o_s;
            best.dm = dm;
            best.eta_joint = eta_joint;
        }
    }
    if (!found)
        throw infeasible_error("no order yields a positive core window of at least ds_min");
    return best;
}

struct BleCompliance {
    bool ok = true;
    std::vector<std::string> violations;
};

/// Lint the emitted values against the ranges accepted by stock BLE stacks:
/// Ta in [20 ms, 10.24 s], Ts and ds in [2.5 ms, 10.24 s].
inline BleCompliance ble_compliance(const BleSolution& s) {
    BleCompliance c;
    const auto fail = [&](const std::string& msg) {
        c.ok = false;
        c.violations.push_back(msg);
    };
    if (s.params.ta < 20e-3 || s.params.ta > 10.24) fail("advInterval outside [20 ms, 10.24 s]");
    if (s.params.ts < 2.5e-3 || s.params.ts > 10.24) fail("scanInterval outside [2.5 ms, 10.24 s]");
    if (s.ds_configured < 2.5e-3 || s.ds_configured > 10.24) fail("scanWindow outside [2.5 ms, 10.24 s]");
    return c;
}

/// Snap to the 0.625 ms protocol granularity, keeping the latency guarantee
/// conservative: intervals round down, the window rounds up.
inline BleSolution ble_round_to_grid(const BleSolution& s) {
    constexpr double grid = 0.625e-3;
    BleSolution r = s;
    r.params.ta = std::floor(s.params.ta / grid) * grid;
    r.params.ts = std::floor(s.params.ts / grid) * grid;
    r.ds_configured = std::ceil(s.ds_configured / grid) * grid;
    r.params.ds = r.ds_configured - 0.0; // configured value is what the stack takes
    return r;
}

/// What running a multi-interval parametrization over the standard radio
/// would require. The random delay accumulates over the ceil(Ts/Ta)
/// advertising intervals between offset steps, so its per-interval cap must
/// shrink by that factor and the scan window must absorb one full delay
/// budget plus the burst span. Stacks that cannot change the delay cap
/// cannot run this: the report is informational and flagged non-compliant.
struct MultiIntBleReport {
    int intervals_per_step = 0;    ///< ceil(Ts/Ta)
    double max_random_delay = 0.0; ///< required per-interval delay cap
    double extended_ds = 0.0;      ///< window absorbing delays and burst span
    bool standard_compliant = false;
};

inline MultiIntBleReport multiint_ble_hook(const PiParams& p, const BleOverheads& oh) {
    p.validate();
    if (p.scheme != Scheme::MultiInt)
        throw std::invalid_argument("hook applies to multi-interval parametrizations");
    MultiIntBleReport r;
    r.intervals_per_step = static_cast<int>(std::ceil(p.ts / p.ta - 1e-12));
    r.max_random_delay = oh.random_delay_max / r.intervals_per_step;
    r.extended_ds = p.ds + oh.random_delay_max + oh.d_e;
    r.standard_compliant = false;
    return r;
}

/// Mean latency penalty of configuring BLE versus a periodic-interval
/// protocol with no BLE overheads at the same resource budget. The ideal
/// unidirectional reference runs at the full joint duty-cycle; the
/// bidirectional one at half of it (each peer funds one direction).
inline double ble_vs_ideal_ratio(const std::vector<double>& eta_grid, const BleOverheads& oh,
                                 BleMode mode, const HardwareProfile& hw) {
    oh.validate();
    HardwareProfile ideal_hw = hw;
    ideal_hw.da = oh.beacon_air_time();
    double acc = 0.0;
    for (double e : eta_grid) {
        const BleSolution ble = ble_solve(e, oh, mode, hw, true);
        const double eta_ideal = mode == BleMode::ConnectableBidir ? e / 2.0 : e;
        const SingleIntSolution ideal = singleint_solve({eta_ideal}, ideal_hw);
        acc += ble.dm / ideal.dm;
    }
    return acc / static_cast<double>(eta_grid.size());
}

} // namespace ndopt
