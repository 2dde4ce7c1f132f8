#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "nlode/expr.hpp"
#include "nlode/grid.hpp"

namespace nlode {

/// Vertical Bromwich contour Re(s) = abscissa, truncated at
/// Im(s) = +-half_height and discretized with the given step.
struct ContourParams {
    double abscissa = 0.5;
    double half_height = 200.0;
    double step = 0.05;

    ContourParams() = default;
    ContourParams(double abscissa_, double half_height_, double step_)
        : abscissa(abscissa_), half_height(half_height_), step(step_) {
        if (!(half_height > 0.0))
            throw DomainError("laplace", "contour half height must be positive");
        if (!(step > 0.0) || !(step < half_height))
            throw DomainError("laplace",
                              "contour step must be positive and below the half height");
    }

    /// Number of nodes on the discrete contour, always odd.
    [[nodiscard]] std::size_t node_count() const {
        auto k = static_cast<std::size_t>(std::ceil(half_height / step - 1e-12));
        return 2 * k + 1;
    }
};

/// Right-hand side of the equation. Either a closed-form expression in
/// t, or sampled data with a declared exponential growth bound.
class ForcingTerm {
public:
    /// One term of the closed-form transform table:
    /// coef * t^power * e^(rate*t) * {1 | sin(freq t) | cos(freq t)}.
    struct TableTerm {
        std::complex<double> coef;
        int power = 0;
        double rate = 0.0;
        double freq = 0.0;
        enum class Trig { None, Sin, Cos } trig = Trig::None;
    };

    /// Closed form with unknown growth. The transform falls back to
    /// adaptive quadrature when the expression is not table shaped.
    [[nodiscard]] static ForcingTerm closed_form(AnalyticExpr expr_in_t);

    /// Closed form with a caller-declared growth bound, used to police
    /// the transform's domain when quadrature is needed.
    [[nodiscard]] static ForcingTerm closed_form(AnalyticExpr expr_in_t, double growth);

    /// Sampled data on a grid, with declared |J(t)| <= C e^(growth t).
    [[nodiscard]] static ForcingTerm sampled(GridFunction data, double growth);

    /// The identically zero forcing term.
    [[nodiscard]] static ForcingTerm zero();

    [[nodiscard]] bool is_zero() const noexcept { return zero_; }
    [[nodiscard]] bool is_closed_form() const noexcept { return closed_; }
    [[nodiscard]] bool table_matched() const noexcept { return !table_.empty() || zero_; }

    /// Growth bound: declared, or derived from the table. NaN when unknown.
    [[nodiscard]] double growth_bound() const noexcept { return growth_; }

    /// The defining expression. Unsupported for sampled data.
    [[nodiscard]] const AnalyticExpr& expr() const;

    /// The sample grid. Unsupported for closed forms.
    [[nodiscard]] const GridFunction& grid() const;

    [[nodiscard]] const std::vector<TableTerm>& table() const noexcept { return table_; }

    /// J(t). Sampled data is interpolated linearly inside its grid.
    [[nodiscard]] std::complex<double> value_at(double t) const;

private:
    ForcingTerm() = default;

    bool zero_ = false;
    bool closed_ = false;
    AnalyticExpr expr_;
    GridFunction grid_;
    double growth_ = 0.0;
    std::vector<TableTerm> table_;
};

/// L(J)(s). Uses the exact transform table when the expression matches
/// t^k e^(at) with optional sin/cos factors, Simpson summation for
/// sampled data, and adaptive quadrature otherwise. Raises DomainError
/// for Re(s) at or below the growth bound and QuadratureFailure when
/// the adaptive integral cannot settle.
[[nodiscard]] std::complex<double> laplace_forward(const ForcingTerm& J,
                                                   std::complex<double> s);

struct BromwichOptions {
    /// Re-run on the contour with doubled height and halved step and
    /// compare, reporting the gap.
    bool self_check = true;
    double check_tolerance = 1e-3;
};

struct InversionResult {
    GridFunction grid;
    /// Largest |Im| of the raw sums; the grid keeps full complex values.
    double max_imag = 0.0;
    /// Largest pointwise gap against the refined contour. Zero when the
    /// self check is disabled.
    double refinement_gap = 0.0;
    bool converged = true;
    std::vector<std::string> warnings;
};

/// Discretized Bromwich integral of G along the contour, evaluated at
/// the given times (all nonnegative). Trapezoid weights; nodes are
/// summed in a fixed order so results are bit reproducible.
[[nodiscard]] InversionResult bromwich_invert(
    const std::function<std::complex<double>(std::complex<double>)>& G,
    const ContourParams& contour, const std::vector<double>& times,
    const BromwichOptions& options = {});

struct DecayEstimate {
    /// Fitted algebraic decay rate of |G| along the contour, snapped to
    /// the nearest integer when within 0.05.
    double p_hat = 0.0;
    /// Largest derivative order the decay certifies, floor(p_hat) - 1.
    int certified_order = 0;
    /// Set when p_hat < 0.5, meaning the symbol provides no smoothing.
    bool no_smoothing = false;
};

/// Least-squares fit of log|G| against log|Im s| on the contour tail
/// [half_height, 10 half_height].
[[nodiscard]] DecayEstimate estimate_decay(
    const std::function<std::complex<double>(std::complex<double>)>& G,
    const ContourParams& contour);

struct WidderReport {
    bool passed = true;
    /// sup over sampled orders and points of |(s-omega)^(n+1) G^(n)(s)| / n!.
    double worst_ratio = 0.0;
    int worst_order = 0;
    double worst_point = 0.0;
    double bound = 0.0;
    std::string message;
};

/// Heuristic membership test for the Widder class over Re(s) > omega.
/// Derivatives come from Cauchy-circle quadrature of radius
/// (s - omega)/2, which stays accurate at high order where finite
/// differences would not.
[[nodiscard]] WidderReport widder_heuristic(
    const std::function<std::complex<double>(std::complex<double>)>& G, double omega,
    int n_max = 10, const std::vector<double>& s_values = {}, double bound = 1e3);

}  // namespace nlode
