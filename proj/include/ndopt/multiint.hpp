#pragma once

#include <cmath>
#include <limits>

#include "ndopt/singleint.hpp"
#include "ndopt/time.hpp"

namespace ndopt {

class no_convergence_error : public std::runtime_error {
public:
    explicit no_convergence_error(const std::string& what)
        : std::runtime_error(what) {}
};

struct MultiIntBounds {
    double k_min = 0.0; ///< strict lower bound on k_c
    double k_max = std::numeric_limits<double>::infinity();
    bool feasible = true;
};

/// Duty-cycle cost charged for the two compensation beacons per scan
/// interval when blocking compensation is on.
///
/// TwoBeacons charges the bare transmissions (2*da). TwoBeaconsPlusTurnaround
/// additionally charges one turnaround per window (2*da + dtr), i.e. the
/// radio-active time of re-arming around the window; the comparison tables
/// against slotted protocols are calibrated with this variant.
enum class BcDutyModel { TwoBeacons, TwoBeaconsPlusTurnaround };

struct MultiIntSolution {
    PiParams params;
    int m = 0;
    int k_c = 0;
    double gamma = 0.0;  ///< per-scan-interval offset step, equals ds - da
    double dm = 0.0;     ///< worst-case latency
    double p_blk = 0.0;  ///< two-device failure probability (0 for one-way)
    bool clamped = false;
    double eta_solved = 0.0;       ///< plain duty-cycle realized by params
    double bc_dm_increase = 0.0;   ///< relative dm increase vs uncompensated solve
};

/// Real-valued k_c minimizing the MultiInt latency for a given order M.
inline double multiint_k_opt(DutyCycle eta, int m) {
    eta.validate();
    if (m < 1) throw std::invalid_argument("MultiInt requires M >= 1");
    const double e = eta.eta;
    const double u = m + 1.0;
    return 1.0 / u + (std::sqrt(e + m * e + 1.0) + 1.0) / (e * u);
}

/// Conservative duty-cycle limit for M = 1 and M = 2 (closed forms); other
/// orders fall back to the exact integer-range check in multiint_solve.
inline double multiint_eta_max(int m, const HardwareProfile& hw) {
    const double root = std::sqrt(hw.da * (hw.da + 8.0 * hw.ds_min));
    return (3.0 * hw.da + root) / (4.0 * (m + 1.0) * (hw.ds_min - hw.da));
}

/// Admissible k_c interval. The lower bound keeps the scan window positive;
/// the upper bound enforces ds >= ds_min and only binds for duty-cycles
/// above da/((M+1)(ds_min - da)); at that threshold no window constraint
/// applies in either direction.
inline MultiIntBounds multiint_k_bounds(DutyCycle eta, int m, const HardwareProfile& hw) {
    eta.validate();
    if (m < 1) throw std::invalid_argument("MultiInt requires M >= 1");
    const double e = eta.eta;
    const double u = m + 1.0;
    MultiIntBounds b;
    b.k_min = (1.0 + e) / (e * u);
    const double a = e * u + 1.0; // eta + M*eta + 1
    // At the exact threshold duty-cycle the window constraint vanishes; the
    // 1e-12 s guard keeps rounding noise from turning it into a huge finite
    // bound there.
    if (hw.ds_min * e * u - hw.da * a > 1e-12) {
        // eta above the threshold: ds(k) sinks below ds_min for large k.
        b.k_max = hw.ds_min / (hw.ds_min * e * u - hw.da * a) + 1.0 / u;
    }
    const double lo = detail::floor_tol(b.k_min) == b.k_min ? b.k_min + 1.0
                                                            : std::ceil(b.k_min);
    b.feasible = lo <= detail::floor_tol(b.k_max);
    return b;
}

namespace detail {

/// Scan window from the duty-cycle relation, for integer k and M.
inline double multiint_ds(double e, double k, double m, double da) {
    const double u = m + 1.0;
    const double c = k * u - 1.0;
    return da * (e * u + 1.0) * c / ((e * c - 1.0) * u);
}

} // namespace detail

/// Translate a target duty-cycle into MultiInt parameters for order M.
///
/// Emitted values satisfy k_c*Ta = Ts + (ds - da) exactly (the growing-case
/// branch): Ta = (M+1)*(ds - da) and Ts = (k_c(M+1) - 1)*(ds - da).
inline MultiIntSolution multiint_solve(DutyCycle eta, int m, const HardwareProfile& hw,
                                       bool force = false) {
    eta.validate();
    hw.validate();
    if (m < 1) throw std::invalid_argument("MultiInt requires M >= 1");
    const double e = eta.eta;
    // The conservative limit is derived from the window upper bound, which
    // only exists above the threshold duty-cycle.
    const bool window_binds = e > hw.da / ((m + 1.0) * (hw.ds_min - hw.da));
    if (!force && window_binds && (m == 1 || m == 2) && e > multiint_eta_max(m, hw))
        throw infeasible_error("duty-cycle exceeds the MultiInt conservative maximum for this M and ds_min");

    const MultiIntBounds b = multiint_k_bounds(eta, m, hw);
    if (!b.feasible)
        throw infeasible_error("no integer k_c satisfies the MultiInt window constraints (k_min..k_max empty)");

    const double lo = detail::floor_tol(b.k_min) == b.k_min ? b.k_min + 1.0
                                                            : std::ceil(b.k_min);
    const double hi = detail::floor_tol(b.k_max);

    double k = detail::round_half_up(multiint_k_opt(eta, m));
    bool clamped = false;
    if (k < lo) {
        k = lo;
        clamped = true;
    }
    if (k > hi) {
        k = hi;
        clamped = true;
    }

    const double u = m + 1.0;
    const double ds = detail::multiint_ds(e, k, m, hw.da);
    const double x = ds - hw.da;

    MultiIntSolution s;
    s.m = m;
    s.k_c = static_cast<int>(k);
    s.clamped = clamped;
    s.gamma = x;
    PiParams p;
    p.ds = ds;
    p.da = hw.da;
    p.ta = u * x;
    p.ts = (k * u - 1.0) * x;
    p.scheme = Scheme::MultiInt;
    p.m = m;
    p.k_c = s.k_c;
    s.params = p;
    s.dm = s.k_c == 1 ? m * u * x + hw.da : u * x * (k * u - 1.0) + hw.da;
    s.p_blk = 0.0;
    s.eta_solved = duty_cycle(p, hw).eta;
    return s;
}

namespace detail {

inline double multiint_gamma_checked(const PiParams& p, double k, double kta_minus_ts) {
    const double x = p.ds - p.da;
    const double gamma = std::abs(kta_minus_ts);
    if (gamma <= 0.0 || k < 1.0)
        throw std::invalid_argument("offset step gamma is zero: no bounded latency");
    if (gamma > x * (1.0 + 1e-9))
        throw std::invalid_argument("gamma exceeds ds - da: multi-period analysis not supported");
    return gamma;
}

} // namespace detail

/// Worst-case latency of the shrinking case (k_f = floor(Ts/Ta)), evaluated
/// exactly as printed: floor(Ts/Ta)Ta + ceil((Ta-(ds-da))/gamma)*floor(Ts/Ta)Ta + Ta + da.
inline TimeNs multiint_dm_caseb(const PiParams& p) {
    p.validate();
    const double kf = detail::floor_tol(p.ts / p.ta);
    const double gamma = detail::multiint_gamma_checked(p, kf, kf * p.ta - p.ts);
    if (p.ts - kf * p.ta > p.ta / 2.0 * (1.0 + 1e-9))
        throw std::invalid_argument("not a shrinking-case configuration (Ts - kf*Ta >= Ta/2)");
    const double steps = detail::ceil_tol((p.ta - (p.ds - p.da)) / gamma);
    return seconds_to_ns(kf * p.ta + steps * kf * p.ta + p.ta + p.da);
}

/// Worst-case latency of the growing case (k_c = ceil(Ts/Ta)), evaluated
/// exactly as printed: ceil(Ts/Ta)Ta + ceil((Ta-(ds-da))/gamma)*ceil(Ts/Ta)Ta + da.
/// Note this printed form is conservative: on solver output it exceeds the
/// tight bound (M+1)*Ts + da by exactly one advertising interval.
inline TimeNs multiint_dm_casec(const PiParams& p) {
    p.validate();
    const double kc = detail::ceil_tol(p.ts / p.ta);
    const double gamma = detail::multiint_gamma_checked(p, kc, kc * p.ta - p.ts);
    if (kc * p.ta - p.ts > p.ta / 2.0 * (1.0 + 1e-9))
        throw std::invalid_argument("not a growing-case configuration (kc*Ta - Ts > Ta/2)");
    const double steps = detail::ceil_tol((p.ta - (p.ds - p.da)) / gamma);
    return seconds_to_ns(kc * p.ta + steps * kc * p.ta + p.da);
}

/// Residual failure probability of a blocking-compensated symmetric pair:
/// collision of the compensation edges plus the blackout strip around each
/// scan window.
inline double bc_failure_prob(const PiParams& p, const HardwareProfile& hw) {
    p.validate();
    const double t1 = (hw.dtr + p.da) * (hw.dtr + p.da) / (p.ta * p.ts);
    const double t2 = (hw.drt + p.da) * (hw.drt + p.da) / (p.ta * p.ts);
    const double t3 = (hw.drt + hw.dtr + 2.0 * p.da) / p.ts;
    return 0.5 * (t1 + t2) + t3;
}

inline double bc_duty_surcharge(const HardwareProfile& hw, BcDutyModel model) {
    return model == BcDutyModel::TwoBeacons ? 2.0 * hw.da : 2.0 * hw.da + hw.dtr;
}

/// Solve MultiInt (M = 2) such that the duty-cycle including the two
/// compensation beacons per scan interval meets the target. Fixed-point
/// iteration on the underlying duty-cycle; the latency penalty relative to
/// the uncompensated solution is reported in bc_dm_increase.
inline MultiIntSolution bc_adjust(DutyCycle eta_target, const HardwareProfile& hw,
                                  BcDutyModel model = BcDutyModel::TwoBeacons) {
    eta_target.validate();
    const double surcharge = bc_duty_surcharge(hw, model);
    const MultiIntSolution plain = multiint_solve(eta_target, 2, hw);

    double e = eta_target.eta;
    MultiIntSolution s = plain;
    bool converged = false;
    for (int i = 0; i < 32; ++i) {
        const double next = eta_target.eta - surcharge / s.params.ts;
        if (!(next > 0.0))
            throw no_convergence_error("compensation overhead exceeds the duty-cycle budget");
        s = multiint_solve({next}, 2, hw);
        const double achieved = next + surcharge / s.params.ts;
        e = next;
        if (std::abs(achieved - eta_target.eta) < 1e-9) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw no_convergence_error("blocking-compensation duty adjustment did not converge in 32 iterations");

    s.params.bc_enabled = true;
    s.p_blk = bc_failure_prob(s.params, hw);
    s.eta_solved = e;
    s.bc_dm_increase = s.dm / plain.dm - 1.0;
    return s;
}

} // namespace ndopt
