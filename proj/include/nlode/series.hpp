#pragma once

#include <complex>
#include <string>
#include <vector>

#include "nlode/expr.hpp"

namespace nlode {

/// Analyticity region for a symbol: the union of the disc |s| < R and
/// the half plane Re(s) > omega, with omega < R so the two overlap.
struct GammaRegion {
    double R = 1.0;
    double omega = 0.0;

    GammaRegion() = default;
    GammaRegion(double R_, double omega_) : R(R_), omega(omega_) {
        if (!(R > 0.0)) throw DomainError("series", "region radius must be positive");
        if (!(omega < R))
            throw DomainError("series",
                              "region abscissa must lie strictly below the radius");
    }
};

struct RegionCheck {
    bool ok = true;
    std::string message;
};

/// Advisory sampling of the declared region: evaluates on the circle
/// |s| = 0.9 R and on a vertical line just right of Re(s) = omega.
/// Evaluation failures mark the check failed; they do not throw.
[[nodiscard]] RegionCheck spot_check_region(const AnalyticExpr& f,
                                            const GammaRegion& region);

/// Taylor coefficients of `expr` about 0, orders 0..n_max.
///
/// Differentiates symbolically while the shared tree stays within
/// `node_budget` distinct nodes, then switches to Cauchy-circle
/// quadrature of radius `radius` for the whole run. The two routes
/// agree to ~1e-10 relative on expressions analytic past the circle.
[[nodiscard]] std::vector<std::complex<double>> taylor_coeffs(
    const AnalyticExpr& expr, int n_max, double radius = 1.0,
    std::size_t node_budget = 10000);

/// Newton iteration from `seed`. Succeeds only when both the residual
/// |f(z)| <= tol and the final step are small; a tiny residual alone
/// is not accepted, since flat tails (like exp far left) fake zeros.
[[nodiscard]] std::complex<double> find_zero(const AnalyticExpr& f,
                                             std::complex<double> seed,
                                             double tol = 1e-12);

}  // namespace nlode
