#pragma once

#include <algorithm>
#include <cmath>

#include "ndopt/time.hpp"

namespace ndopt {

/// Resource split of a sender/receiver pair for the latency bounds.
struct BoundInputs {
    double rho = 0.0;    ///< reception duty-cycle
    double beta = 0.0;   ///< transmission duty-cycle
    double da = 0.0;     ///< beacon duration
    double eta() const { return rho + beta; }
    double lambda() const { return da / beta; } ///< mean beacon spacing
    long n_beacons() const {                    ///< minimum beacons until guaranteed hit
        return static_cast<long>(detail::ceil_tol(1.0 / rho));
    }
};

/// Lowest worst-case latency any discovery protocol can guarantee for one
/// receiver (duty rho) discovering one sender (duty beta):
/// ceil(1/rho) * da / beta.
inline double unidir_bound(double rho, double beta, double da) {
    if (!(rho > 0.0 && rho < 1.0 && beta > 0.0 && beta < 1.0))
        throw std::invalid_argument("duty-cycle splits must lie in (0, 1)");
    return detail::ceil_tol(1.0 / rho) * da / beta;
}

/// The same bound optimized over the rho/beta split for a joint duty-cycle
/// eta: only the two integer reception rates around 2/eta can be optimal.
inline double sym_bound(double eta, double da) {
    if (!(eta > 0.0 && eta < 1.0))
        throw std::invalid_argument("duty-cycle must lie in (0, 1)");
    const double kl = detail::floor_tol(2.0 / eta);
    const double kr = detail::ceil_tol(2.0 / eta);
    const auto value = [&](double k) { return k * k * da / (eta * k - 1.0); };
    return std::min(value(kl), value(kr));
}

struct OptimalityReport {
    double bound = 0.0;                ///< sym_bound(eta)
    double singleint_relaxed_dm = 0.0; ///< best SingleInt latency, relaxed convention
    bool equal = false;                ///< match within 1e-9 relative
};

/// Machine check that the SingleInt scheme attains the symmetric bound.
///
/// The SingleInt side is evaluated under the relaxed convention (beacon
/// duration excluded from the latency, still charged to the duty-cycle),
/// symbolically as da*(M+1)^2/(eta*(M+1) - 1) over the two integer orders
/// around 2/eta - 1. The two routes are computed independently and compared.
inline OptimalityReport check_singleint_optimal(double eta, double da) {
    OptimalityReport r;
    r.bound = sym_bound(eta, da);

    const double mo = 2.0 / eta - 1.0;
    const auto relaxed = [&](double m) {
        const double u = m + 1.0;
        return da * u * u / (eta * u - 1.0);
    };
    r.singleint_relaxed_dm =
        std::min(relaxed(detail::floor_tol(mo)), relaxed(detail::ceil_tol(mo)));

    r.equal = std::abs(r.singleint_relaxed_dm - r.bound) <= 1e-9 * r.bound;
    return r;
}

} // namespace ndopt
