#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "nlode/expr.hpp"
#include "nlode/grid.hpp"

namespace nlode {

/// A pole location with its order. Locations must lie strictly left of
/// whatever contour the surrounding computation uses; that relation is
/// checked where the contour is known.
struct PoleSpec {
    std::complex<double> location;
    int order = 1;

    PoleSpec() = default;
    PoleSpec(std::complex<double> location_, int order_)
        : location(location_), order(order_) {
        if (order < 1) throw DomainError("residue", "pole order must be at least 1");
    }
};

/// The polynomial part of one residue contribution. With Laurent data
/// a_1..a_r at the pole, P(t) = sum a_k t^(k-1)/(k-1)!, so that
/// P(0) = a_1 and the m-th derivative at zero is a_(m+1).
struct ResiduePolynomial {
    PoleSpec pole;
    std::vector<std::complex<double>> coeffs;

    /// P(t).
    [[nodiscard]] std::complex<double> polynomial_at(double t) const;

    /// P(t) e^(location t), the full contribution of this pole.
    [[nodiscard]] std::complex<double> term_at(double t) const;

    /// m-th derivative of P at zero; zero beyond the stored order.
    [[nodiscard]] std::complex<double> derivative_at_zero(int m) const;
};

/// Validating constructor: the coefficient count must equal the order.
[[nodiscard]] ResiduePolynomial residue_polynomial(
    const PoleSpec& pole, std::vector<std::complex<double>> coeffs);

/// Half the distance from `pole` to the nearest of the other poles and
/// the contour line Re(s) = abscissa.
[[nodiscard]] double default_laurent_radius(const PoleSpec& pole,
                                            const std::vector<PoleSpec>& others,
                                            double abscissa);

/// Principal-part coefficients a_1..a_order of r/f at the pole, by
/// contour moments on a circle of the given radius.
///
/// A second pass on the half-radius circle re-derives the same
/// coefficients and checks that the moment one order past the declared
/// order vanishes; disagreement raises IllConditioned, which catches
/// both understated pole orders and circles that leak past another
/// singularity.
[[nodiscard]] std::vector<std::complex<double>> laurent_coeffs(
    const AnalyticExpr& r, const AnalyticExpr& f, const PoleSpec& pole, double radius,
    std::size_t nodes = 256, double residual_tol = 1e-8);

/// Sum of the pole contributions on the grid.
[[nodiscard]] GridFunction residue_sum(const std::vector<ResiduePolynomial>& parts,
                                       const std::vector<double>& times);

/// A countable pole family enumerated in nondecreasing modulus.
struct PoleFamily {
    std::function<ResiduePolynomial(int)> generator;
};

struct TruncationReport {
    /// Sup over the grid of |last included term|, the usual tail gauge.
    double last_term_inf = 0.0;
    std::string caveat;
};

struct TruncatedPoleSum {
    GridFunction grid;
    TruncationReport report;
};

/// Partial sum of the first `count` family members on the grid. The
/// report carries the size of the last term and a standing caveat: the
/// series limit need not be differentiable, and convergence of the
/// partial sums is assumed, not proven here.
[[nodiscard]] TruncatedPoleSum truncated_pole_sum(const PoleFamily& family, int count,
                                                  const std::vector<double>& times);

}  // namespace nlode
