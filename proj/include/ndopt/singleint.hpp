#pragma once

#include <cmath>
#include <limits>
#include <optional>

#include "ndopt/time.hpp"

namespace ndopt {

/// How the scheme order M is selected.
///
/// RoundedOpt rounds the real-valued optimum of the latency expression and
/// clamps it into the feasible integer range. BoundOptimal picks the
/// neighbor of 2/eta - 1 that minimizes the relaxed-assumption latency
/// (beacon duration excluded from latency, included in the duty-cycle);
/// this is the variant that attains the theoretical optimum.
enum class SingleIntMode { RoundedOpt, BoundOptimal };

struct SingleIntBounds {
    double m_min = 0.0;                                  ///< strict lower bound on M
    double m_max = std::numeric_limits<double>::infinity();
    bool feasible = true;                                ///< integer M exists in range
};

struct SingleIntSolution {
    PiParams params;
    int m = 0;
    double dm = 0.0;         ///< worst-case latency from coming into range
    double dm_star = 0.0;    ///< packet-to-packet worst-case latency
    double dm_relaxed = 0.0; ///< latency under the relaxed convention (da = 0 on the latency side)
    bool clamped = false;    ///< M was moved to satisfy the constraints
};

/// Real-valued M minimizing the SingleInt latency: (sqrt(1+eta) + 1)/eta - 1.
inline double singleint_m_opt(DutyCycle eta) {
    eta.validate();
    return (std::sqrt(1.0 + eta.eta) + 1.0) / eta.eta - 1.0;
}

/// Conservative upper duty-cycle limit of the SingleInt scheme for a given
/// minimum scan window.
inline double singleint_eta_max(const HardwareProfile& hw) {
    return (3.0 * hw.da + std::sqrt(hw.da * (hw.da + 8.0 * hw.ds_min))) /
           (4.0 * (hw.ds_min - hw.da));
}

/// Admissible range for the integer order M. The lower bound M > 1/eta - 1
/// keeps the scan-window expression positive; the upper bound enforces
/// ds >= ds_min and only binds when eta > da/(ds_min - da).
inline SingleIntBounds singleint_m_bounds(DutyCycle eta, const HardwareProfile& hw) {
    eta.validate();
    const double e = eta.eta;
    SingleIntBounds b;
    b.m_min = 1.0 / e - 1.0;
    if (e > hw.da / (hw.ds_min - hw.da)) {
        b.m_max = (hw.ds_min * (e - 1.0) - hw.da * (e + 1.0)) /
                  (hw.da * (e + 1.0) - e * hw.ds_min);
    }
    // Smallest integer strictly above m_min.
    const double lo = detail::floor_tol(b.m_min) == b.m_min
                          ? b.m_min + 1.0
                          : std::ceil(b.m_min);
    b.feasible = lo <= detail::floor_tol(b.m_max);
    return b;
}

namespace detail {

/// Latency as a function of the (integer) order, before rounding: expands
/// dm = (M+1)*Ta + da with Ta eliminated through the duty-cycle relation.
inline double singleint_dm_of_m(double eta, double m, double da) {
    const double u = m + 1.0;
    return u * (da * u * (eta + 1.0) / (eta * u - 1.0) - da) + da;
}

inline double singleint_dm_relaxed_of_m(double eta, double m, double da) {
    const double u = m + 1.0;
    return da * u * u / (eta * u - 1.0);
}

inline double round_half_up(double x) { return std::floor(x + 0.5); }

} // namespace detail

/// Translate a target duty-cycle into SingleInt parameters.
///
/// The emitted values satisfy Ta = ds - da and Ts = (M+1)*Ta bit-exactly
/// (constructed from those expressions), and duty_cycle() inverts back to
/// eta up to floating-point rounding.
///
/// With force = true the conservative duty-cycle limit is skipped and only
/// the exact integer-range check decides feasibility.
inline SingleIntSolution singleint_solve(DutyCycle eta, const HardwareProfile& hw,
                                         SingleIntMode mode = SingleIntMode::RoundedOpt,
                                         bool force = false) {
    eta.validate();
    hw.validate();
    const double e = eta.eta;
    // The conservative limit only applies where the minimum-window bound on
    // M exists at all.
    const bool window_binds = e > hw.da / (hw.ds_min - hw.da);
    if (!force && window_binds && e > singleint_eta_max(hw))
        throw infeasible_error("duty-cycle exceeds the SingleInt conservative maximum (eta_max) for ds_min");

    const SingleIntBounds b = singleint_m_bounds(eta, hw);
    if (!b.feasible)
        throw infeasible_error("no integer M satisfies the SingleInt window constraints (M_min..M_max empty)");

    const double lo = detail::floor_tol(b.m_min) == b.m_min ? b.m_min + 1.0
                                                            : std::ceil(b.m_min);
    const double hi = detail::floor_tol(b.m_max);

    double m_real;
    bool clamped = false;
    if (mode == SingleIntMode::RoundedOpt) {
        m_real = detail::round_half_up(singleint_m_opt(eta));
    } else {
        const double mo = 2.0 / e - 1.0;
        const double ml = detail::floor_tol(mo);
        const double mr = detail::ceil_tol(mo);
        m_real = detail::singleint_dm_relaxed_of_m(e, ml, hw.da) <=
                         detail::singleint_dm_relaxed_of_m(e, mr, hw.da)
                     ? ml
                     : mr;
    }
    if (m_real < lo) {
        m_real = lo;
        clamped = true;
    }
    if (m_real > hi) {
        m_real = hi;
        clamped = true;
    }

    SingleIntSolution s;
    s.m = static_cast<int>(m_real);
    s.clamped = clamped;

    const double u = m_real + 1.0;
    const double ds = u * (1.0 + e) * hw.da / (e * u - 1.0);
    PiParams p;
    p.ds = ds;
    p.da = hw.da;
    p.ta = ds - hw.da;
    p.ts = u * p.ta;
    p.scheme = Scheme::SingleInt;
    p.m = s.m;
    p.k_c = 0;
    s.params = p;
    s.dm = u * p.ta + hw.da;
    s.dm_star = s.dm - p.ta;
    s.dm_relaxed = detail::singleint_dm_relaxed_of_m(e, m_real, hw.da);
    return s;
}

/// Packet-to-packet worst-case latency of an arbitrary configuration with
/// Ta <= ds - da: ceil((Ts - (ds - da))/Ta) * Ta + da.
inline TimeNs singleint_dm_star(const PiParams& p) {
    p.validate();
    const double x = p.ds - p.da;
    if (p.ta > x * (1.0 + 1e-9))
        throw std::invalid_argument("singleint_dm_star requires Ta <= ds - da");
    const double steps = detail::ceil_tol((p.ts - x) / p.ta);
    return seconds_to_ns(steps * p.ta + p.da);
}

/// Mean blockage probability of a symmetric two-way SingleInt deployment:
/// the own-transmission blackout (d_rt + d_a + d_tr) falls inside every scan
/// window, erasing that slice of the effective window.
inline double singleint_blocking(const PiParams& p, const HardwareProfile& hw) {
    p.validate();
    return (hw.drt + p.da + hw.dtr) / (p.ds - p.da);
}

} // namespace ndopt
