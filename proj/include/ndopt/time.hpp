#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace ndopt {

/// Simulation time as a signed nanosecond count.
///
/// Every schedule computation in the simulator is closed over TimeNs, so two
/// runs with the same inputs produce bit-identical event times. Conversion
/// to/from double-precision seconds happens only at the boundary to the
/// closed-form layer, via seconds_to_ns()/ns_to_seconds().
struct TimeNs {
    int64_t ns = 0;

    constexpr auto operator<=>(const TimeNs&) const = default;

    constexpr TimeNs operator+(TimeNs rhs) const { return {ns + rhs.ns}; }
    constexpr TimeNs operator-(TimeNs rhs) const { return {ns - rhs.ns}; }
    constexpr TimeNs& operator+=(TimeNs rhs) {
        ns += rhs.ns;
        return *this;
    }
    constexpr TimeNs operator*(int64_t k) const { return {ns * k}; }
};

/// Round a duration in seconds to the nearest nanosecond.
constexpr TimeNs seconds_to_ns(double s) {
    return {static_cast<int64_t>(s * 1e9 + (s >= 0.0 ? 0.5 : -0.5))};
}

constexpr double ns_to_seconds(TimeNs t) {
    return static_cast<double>(t.ns) * 1e-9;
}

/// Thrown when a requested duty-cycle cannot be realized by a scheme; the
/// message names the violated constraint.
class infeasible_error : public std::runtime_error {
public:
    explicit infeasible_error(const std::string& what)
        : std::runtime_error(what) {}
};

/// Radio constants shared by the closed-form layer and the simulator.
/// Times are double seconds here; the simulator quantizes on entry.
struct HardwareProfile {
    double da = 32e-6;      ///< beacon transmission duration
    double ds_min = 1e-3;   ///< smallest realizable scan window
    double drt = 140e-6;    ///< reception-to-transmission turnaround
    double dtr = 140e-6;    ///< transmission-to-reception turnaround
    double f_clk = 32768.0; ///< sleep-oscillator frequency [Hz]
    double alpha = 1.0;     ///< transmit/receive energy balance factor

    constexpr double t_clk() const { return 1.0 / f_clk; }

    void validate() const {
        if (da <= 0) throw std::invalid_argument("da must be positive");
        if (ds_min <= da) throw std::invalid_argument("ds_min must exceed da");
        if (drt < 0 || dtr < 0) throw std::invalid_argument("turnarounds must be non-negative");
        if (f_clk <= 0) throw std::invalid_argument("f_clk must be positive");
        if (alpha <= 0) throw std::invalid_argument("alpha must be positive");
    }
};

/// Fraction of time a device's radio is active. Always in (0, 1).
struct DutyCycle {
    double eta = 0.0;

    void validate() const {
        if (!(eta > 0.0 && eta < 1.0))
            throw std::invalid_argument("duty-cycle must lie in (0, 1)");
    }
};

enum class Scheme { SingleInt, MultiInt };

/// One periodic-interval protocol configuration plus the scheme metadata
/// that produced it. Times are double seconds (closed-form layer). The
/// structural identities below are established by the solvers:
///
///   SingleInt:  ta == ds - da,  ts == (m + 1) * ta
///   MultiInt:   k_c * ta == ts + (ds - da)
struct PiParams {
    double ta = 0.0; ///< advertising interval
    double ts = 0.0; ///< scan interval
    double ds = 0.0; ///< scan window
    double da = 0.0; ///< beacon duration
    Scheme scheme = Scheme::SingleInt;
    int m = 0;             ///< scheme order
    int k_c = 0;           ///< interval multiple (MultiInt only, 0 otherwise)
    bool bc_enabled = false;

    void validate() const {
        if (!(ta > da)) throw std::invalid_argument("require Ta > da");
        if (!(ts >= ds)) throw std::invalid_argument("require Ts >= ds");
        if (!(ds > da)) throw std::invalid_argument("require ds > da");
    }
};

/// Energy metric of a PI configuration: ds/Ts + alpha*da/Ta.
/// For blocking-compensated schedules see sim::bc_exact_duty_cycle, which
/// accounts for suppressed and compensation beacons over a hyperperiod.
inline DutyCycle duty_cycle(const PiParams& p, const HardwareProfile& hw) {
    p.validate();
    return {p.ds / p.ts + hw.alpha * p.da / p.ta};
}

/// Snap a time to the sleep-clock grid: nearest multiple of 1/f_clk,
/// half-up tie break, result rounded to whole nanoseconds.
inline TimeNs tick_quantize(TimeNs t, double f_clk) {
    if (t.ns < 0) throw std::invalid_argument("tick_quantize requires t >= 0");
    const auto f = static_cast<int64_t>(f_clk);
    // ticks = round(t * f / 1e9), then back to ns. Integer arithmetic via
    // 128-bit intermediates keeps the result exact for any reachable t.
    const __int128 num = static_cast<__int128>(t.ns) * f + 500000000;
    const int64_t ticks = static_cast<int64_t>(num / 1000000000);
    const __int128 back = static_cast<__int128>(ticks) * 1000000000 + f / 2;
    return {static_cast<int64_t>(back / f)};
}

namespace detail {

/// Floor/ceil with a relative tolerance around integers. The closed-form
/// expressions feed exact step functions (e.g. ceil((Ts - (ds-da))/Ta))
/// whose arguments are integers up to floating-point noise; a raw floor of
/// 499.99999999999994 would silently change the protocol structure.
inline double floor_tol(double x, double rel = 1e-9) {
    const double r = std::nearbyint(x);
    if (std::abs(x - r) <= rel * std::max(1.0, std::abs(x))) return r;
    return std::floor(x);
}

inline double ceil_tol(double x, double rel = 1e-9) {
    const double r = std::nearbyint(x);
    if (std::abs(x - r) <= rel * std::max(1.0, std::abs(x))) return r;
    return std::ceil(x);
}

} // namespace detail

} // namespace ndopt
