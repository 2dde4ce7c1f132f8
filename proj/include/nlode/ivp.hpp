#pragma once

#include <complex>
#include <string>
#include <vector>

#include "nlode/expr.hpp"
#include "nlode/grid.hpp"
#include "nlode/laplace.hpp"
#include "nlode/residue.hpp"
#include "nlode/series.hpp"

namespace nlode {

/// Numerical gates used across the solve pipeline. Values are the
/// working defaults; problems may override them per instance.
struct Tolerances {
    /// Laurent moment cross check in laurent_coeffs.
    double laurent_residual = 1e-8;
    /// Relative rank threshold for the interpolation system.
    double rank = 1e-10;
    /// Allowed gap between the working and refined Bromwich contours.
    double inversion_check = 1e-3;
    /// Allowed gap when the rebuilt r0 is cross checked against the
    /// residue data it came from.
    double identity_check = 1e-8;
    /// Widder ratio bound for the membership heuristic.
    double widder_bound = 1e3;
};

/// Generalized initial condition: a remainder function r(s) taking the
/// place of pointwise data.
struct GeneralizedIC {
    AnalyticExpr r;
};

/// A classical initial value problem f(d/dt) phi = J with pointwise
/// data phi^(n)(0) = initial_values[n] and a declared finite pole set
/// for the solution's transform.
struct IVPProblem {
    AnalyticExpr f;
    GammaRegion region;
    ForcingTerm forcing = ForcingTerm::zero();
    std::vector<PoleSpec> poles;
    std::vector<std::complex<double>> initial_values;
    ContourParams contour;
    Tolerances tolerances;
};

struct Diagnostics {
    /// Fitted decay rate of the forcing transform over the symbol;
    /// infinity when the forcing vanishes.
    double p_hat = 0.0;
    /// Largest trace order the decay certifies.
    int certified_order = 0;
    double condition = 1.0;
    double refinement_gap = 0.0;
    double r0_identity_gap = 0.0;
    WidderReport widder;
    std::vector<std::string> warnings;
};

struct IVPSolution {
    GridFunction bromwich_part;
    std::vector<ResiduePolynomial> residue_parts;
    AnalyticExpr r0;
    std::vector<std::complex<double>> initial_values;
    std::vector<std::complex<double>> derivative_trace;
    Diagnostics diagnostics;

    /// bromwich_part plus the residue sum on the same grid.
    [[nodiscard]] GridFunction total() const;
};

struct GeneralizedSolution {
    GridFunction grid;
    WidderReport widder;
    double refinement_gap = 0.0;
    bool converged = true;
    std::vector<std::string> warnings;
};

/// Inverts (L(J) + r)/f along the contour. The Widder heuristic runs
/// on r; failure is recorded as a warning, not an error, since
/// non-membership only forfeits the classical-solution guarantee.
[[nodiscard]] GeneralizedSolution solve_generalized(
    const AnalyticExpr& f, const GammaRegion& region, const ForcingTerm& J,
    const GeneralizedIC& ic, const ContourParams& contour,
    const std::vector<double>& times, const Tolerances& tolerances = {});

/// Derivatives at zero of the particular part L^-1(L(J)/f), orders
/// 0..n_max, by principal-value contour moments with Richardson
/// removal of the 1/T truncation term. An order whose moment is not
/// absolutely convergent under the measured decay raises
/// InsufficientDecay, even when the principal value would exist.
[[nodiscard]] std::vector<std::complex<double>> compute_Ln(const AnalyticExpr& f,
                                                           const ForcingTerm& J,
                                                           const ContourParams& contour,
                                                           int n_max);

struct IVPSystem {
    std::vector<std::vector<std::complex<double>>> A;
    std::vector<std::complex<double>> b;
};

/// Rows n = 0..K-1 of the interpolation conditions: the unknown
/// Laurent coefficients, ordered pole major and derivative-order
/// minor, weighted by binomial(n,m) omega^(n-m); right side
/// initial_values[n] - L[n].
[[nodiscard]] IVPSystem assemble_ivp_system(
    const std::vector<PoleSpec>& poles, const std::vector<std::complex<double>>& L,
    const std::vector<std::complex<double>>& initial_values);

struct SystemSolution {
    std::vector<std::complex<double>> coeffs;
    double condition = 1.0;
};

/// Dense solve with full pivoting. Rank deficiency at the relative
/// threshold raises GenericityFailure; the one-norm condition number
/// is reported either way.
[[nodiscard]] SystemSolution solve_ivp_system(const IVPSystem& system,
                                              double rank_tol = 1e-10);

struct R0Result {
    AnalyticExpr r0;
    /// Gap in the round-trip check: Laurent data is re-extracted from
    /// the built expression and the residue sums compared.
    double identity_gap = 0.0;
    std::vector<std::string> warnings;
};

/// Builds r0 = f * sum of principal parts as a closed-form expression.
/// When f does not vanish to the pole's order at a pole, r0 is not
/// entire there and a warning is attached.
[[nodiscard]] R0Result construct_r0(const AnalyticExpr& f,
                                    const std::vector<ResiduePolynomial>& parts,
                                    double identity_tol = 1e-8);

/// Full classical pipeline: moments, interpolation system, residue
/// polynomials, r0, Bromwich part, derivative trace, diagnostics.
[[nodiscard]] IVPSolution solve_classical_ivp(const IVPProblem& problem,
                                              const std::vector<double>& times);

/// Derivatives phi^(n)(0) for n = 0..n_max. Orders below the imposed
/// data count are returned exactly as imposed; higher orders combine
/// the moment values with the residue polynomials. Orders beyond what
/// the decay certifies raise InsufficientDecay.
[[nodiscard]] std::vector<std::complex<double>> derivative_trace(
    const IVPSolution& solution, const AnalyticExpr& f, const ForcingTerm& J,
    const ContourParams& contour, int n_max);

}  // namespace nlode
