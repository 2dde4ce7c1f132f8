#include "nlode/ivp.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace nlode {

namespace {

using Complex = std::complex<double>;

constexpr double kPi = std::numbers::pi;

Complex ipow(Complex z, int n) {
    Complex acc = 1.0;
    for (int k = 0; k < n; ++k) acc *= z;
    return acc;
}

/// Pascal rows up to n inclusive, in double precision.
std::vector<std::vector<double>> binomial_rows(int n) {
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(n) + 1);
    for (int r = 0; r <= n; ++r) {
        auto& row = rows[static_cast<std::size_t>(r)];
        row.assign(static_cast<std::size_t>(r) + 1, 1.0);
        for (int c = 1; c < r; ++c)
            row[static_cast<std::size_t>(c)] =
                rows[static_cast<std::size_t>(r - 1)][static_cast<std::size_t>(c - 1)] +
                rows[static_cast<std::size_t>(r - 1)][static_cast<std::size_t>(c)];
    }
    return rows;
}

/// Principal-value moments (1/2pi) integral of s^n G over the contour,
/// Richardson extrapolated: the plain truncated integral carries a
/// c1/T error term with an odd-power tail, so 2 I(2T) - I(T) removes
/// the leading term using one shared set of samples.
std::vector<Complex> pv_moments(const std::function<Complex(Complex)>& G,
                                const ContourParams& contour, int n_max) {
    const double a = contour.abscissa;
    const double h = contour.step;
    const long K = static_cast<long>(std::ceil(contour.half_height / h - 1e-12));
    const long K2 =
        static_cast<long>(std::ceil(2.0 * contour.half_height / h - 1e-12));

    std::vector<Complex> samples(static_cast<std::size_t>(2 * K2 + 1));
    std::vector<Complex> powers(samples.size(), Complex(1.0));
    for (long k = -K2; k <= K2; ++k)
        samples[static_cast<std::size_t>(k + K2)] = G(Complex(a, k * h));

    std::vector<Complex> out(static_cast<std::size_t>(n_max) + 1);
    for (int n = 0; n <= n_max; ++n) {
        Complex inner = 0.0;
        Complex outer = 0.0;
        for (long k = -K2; k <= K2; ++k) {
            auto idx = static_cast<std::size_t>(k + K2);
            Complex term = powers[idx] * samples[idx];
            double w_outer = (k == -K2 || k == K2) ? 0.5 : 1.0;
            outer += w_outer * term;
            if (k >= -K && k <= K) {
                double w_inner = (k == -K || k == K) ? 0.5 : 1.0;
                inner += w_inner * term;
            }
        }
        out[static_cast<std::size_t>(n)] =
            (2.0 * outer - inner) * h / (2.0 * kPi);
        for (long k = -K2; k <= K2; ++k)
            powers[static_cast<std::size_t>(k + K2)] *= Complex(a, k * h);
    }
    return out;
}

struct DecayPlan {
    double p_hat = std::numeric_limits<double>::infinity();
    int certified = std::numeric_limits<int>::max() / 2;

    [[nodiscard]] bool strictly_admissible(int n) const {
        return static_cast<double>(n) < p_hat - 1.0 - 1e-9;
    }
};

/// Moment values with the admissibility policy applied per order.
///
/// Interior orders use the plain principal value. The boundary order
/// (exactly the last one the decay certifies) is not absolutely
/// convergent; its symmetric principal value recovers half of the
/// one-sided derivative, so the value is doubled there. Callers that
/// must refuse boundary orders outright pass allow_boundary = false.
std::vector<Complex> moment_values(const std::function<Complex(Complex)>& G,
                                   const ContourParams& contour, int n_max,
                                   const DecayPlan& plan, bool allow_boundary) {
    for (int n = 0; n <= n_max; ++n) {
        if (plan.strictly_admissible(n)) continue;
        if (allow_boundary && n <= plan.certified) continue;
        throw InsufficientDecay(n, plan.p_hat);
    }
    std::vector<Complex> values = pv_moments(G, contour, n_max);
    for (int n = 0; n <= n_max; ++n)
        if (!plan.strictly_admissible(n))
            values[static_cast<std::size_t>(n)] *= 2.0;
    return values;
}

std::function<Complex(Complex)> particular_transform(const AnalyticExpr& f,
                                                     const ForcingTerm& J) {
    return [&f, &J](Complex s) -> Complex {
        Complex den = eval_expr(f, s);
        if (den == 0.0)
            throw EvalError(EvalError::Kind::DivisionByZero, s,
                            "symbol vanishes on the contour");
        return laplace_forward(J, s) / den;
    };
}

GridFunction zero_grid(const std::vector<double>& times) {
    return GridFunction(times, std::vector<Complex>(times.size(), Complex(0.0)));
}

void validate_poles(const std::vector<PoleSpec>& poles, double abscissa) {
    for (std::size_t i = 0; i < poles.size(); ++i) {
        if (!(poles[i].location.real() < abscissa))
            throw DomainError("ivp",
                              "every pole must lie strictly left of the contour");
        for (std::size_t j = i + 1; j < poles.size(); ++j)
            if (poles[i].location == poles[j].location)
                throw DomainError("ivp", "pole locations must be distinct");
    }
}

/// phi^(n)(0) of the residue part, by Leibniz on P(t) e^(omega t).
Complex residue_derivative(const std::vector<ResiduePolynomial>& parts, int n,
                           const std::vector<std::vector<double>>& binom) {
    Complex acc = 0.0;
    for (const auto& part : parts) {
        int top = std::min(n, static_cast<int>(part.coeffs.size()) - 1);
        for (int k = 0; k <= top; ++k)
            acc += binom[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)] *
                   part.coeffs[static_cast<std::size_t>(k)] *
                   ipow(part.pole.location, n - k);
    }
    return acc;
}

}  // namespace

GridFunction IVPSolution::total() const {
    GridFunction residue = residue_sum(residue_parts, bromwich_part.times);
    std::vector<Complex> values(bromwich_part.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        values[i] = bromwich_part.values[i] + residue.values[i];
    return GridFunction(bromwich_part.times, std::move(values));
}

GeneralizedSolution solve_generalized(const AnalyticExpr& f, const GammaRegion& region,
                                      const ForcingTerm& J, const GeneralizedIC& ic,
                                      const ContourParams& contour,
                                      const std::vector<double>& times,
                                      const Tolerances& tolerances) {
    if (!(contour.abscissa >= region.omega))
        throw DomainError("ivp",
                          "contour abscissa must not lie left of the region abscissa");

    GeneralizedSolution out;
    out.widder = widder_heuristic(
        [&ic](Complex s) { return eval_expr(ic.r, s); }, region.omega, 10, {},
        tolerances.widder_bound);
    if (!out.widder.passed)
        out.warnings.push_back(
            "remainder fails the Widder heuristic; the inverse need not be a "
            "classical bounded solution (" + out.widder.message + ")");

    auto G = [&](Complex s) -> Complex {
        Complex den = eval_expr(f, s);
        if (den == 0.0)
            throw EvalError(EvalError::Kind::DivisionByZero, s,
                            "symbol vanishes on the contour");
        return (laplace_forward(J, s) + eval_expr(ic.r, s)) / den;
    };
    BromwichOptions options;
    options.check_tolerance = tolerances.inversion_check;
    InversionResult inverted = bromwich_invert(G, contour, times, options);
    out.grid = std::move(inverted.grid);
    out.refinement_gap = inverted.refinement_gap;
    out.converged = inverted.converged;
    for (auto& w : inverted.warnings) out.warnings.push_back(std::move(w));
    return out;
}

std::vector<std::complex<double>> compute_Ln(const AnalyticExpr& f,
                                             const ForcingTerm& J,
                                             const ContourParams& contour, int n_max) {
    if (n_max < 0) throw DomainError("ivp", "moment order must be nonnegative");
    if (J.is_zero())
        return std::vector<Complex>(static_cast<std::size_t>(n_max) + 1, Complex(0.0));
    auto G = particular_transform(f, J);
    DecayEstimate decay = estimate_decay(G, contour);
    DecayPlan plan{decay.p_hat, decay.certified_order};
    return moment_values(G, contour, n_max, plan, /*allow_boundary=*/false);
}

IVPSystem assemble_ivp_system(const std::vector<PoleSpec>& poles,
                              const std::vector<std::complex<double>>& L,
                              const std::vector<std::complex<double>>& initial_values) {
    const std::size_t K = initial_values.size();
    std::size_t total_order = 0;
    for (const auto& pole : poles) total_order += static_cast<std::size_t>(pole.order);
    if (total_order != K)
        throw ShapeMismatch("ivp", "pole orders sum to " + std::to_string(total_order) +
                                       " but " + std::to_string(K) +
                                       " initial values were given");
    if (L.size() < K)
        throw ShapeMismatch("ivp", "need moment values through order K-1");

    IVPSystem sys;
    sys.A.assign(K, std::vector<Complex>(K, Complex(0.0)));
    sys.b.resize(K);
    auto binom = binomial_rows(static_cast<int>(K));
    for (std::size_t n = 0; n < K; ++n) {
        std::size_t col = 0;
        for (const auto& pole : poles) {
            for (int m = 0; m < pole.order; ++m, ++col) {
                if (m > static_cast<int>(n)) continue;
                sys.A[n][col] = binom[n][static_cast<std::size_t>(m)] *
                                ipow(pole.location, static_cast<int>(n) - m);
            }
        }
        sys.b[n] = initial_values[n] - L[n];
    }
    return sys;
}

SystemSolution solve_ivp_system(const IVPSystem& system, double rank_tol) {
    const std::size_t K = system.b.size();
    if (system.A.size() != K)
        throw ShapeMismatch("ivp", "system matrix and right side disagree");
    if (K == 0) return {};

    Eigen::MatrixXcd A(K, K);
    Eigen::VectorXcd b(K);
    for (std::size_t r = 0; r < K; ++r) {
        if (system.A[r].size() != K)
            throw ShapeMismatch("ivp", "system matrix must be square");
        for (std::size_t c = 0; c < K; ++c) A(r, c) = system.A[r][c];
        b(r) = system.b[r];
    }

    Eigen::FullPivLU<Eigen::MatrixXcd> lu(A);
    lu.setThreshold(rank_tol);
    const auto rank = static_cast<std::size_t>(lu.rank());
    if (rank < K) {
        std::ostringstream os;
        os << "interpolation system has rank " << rank << " of " << K
           << "; this pole set cannot match the initial data";
        throw GenericityFailure(os.str());
    }
    Eigen::VectorXcd x = lu.solve(b);
    Eigen::MatrixXcd inv = lu.inverse();
    double norm_a = A.cwiseAbs().colwise().sum().maxCoeff();
    double norm_inv = inv.cwiseAbs().colwise().sum().maxCoeff();

    SystemSolution out;
    out.coeffs.assign(x.data(), x.data() + x.size());
    out.condition = norm_a * norm_inv;
    return out;
}

R0Result construct_r0(const AnalyticExpr& f,
                      const std::vector<ResiduePolynomial>& parts,
                      double identity_tol) {
    if (parts.empty())
        throw DomainError("ivp", "r0 construction needs at least one residue part");

    AnalyticExpr s = make_variable(f.variable());
    AnalyticExpr sum = make_constant(0.0, f.variable());
    for (const auto& part : parts) {
        AnalyticExpr shifted = s - make_constant(part.pole.location, f.variable());
        for (std::size_t k = 0; k < part.coeffs.size(); ++k)
            sum = sum + make_constant(part.coeffs[k], f.variable()) /
                            pow_int(shifted, static_cast<int>(k) + 1);
    }

    R0Result out;
    out.r0 = f * sum;

    // Entirety: f must vanish at each pole to at least the pole order,
    // otherwise r0 keeps a genuine singularity there.
    for (const auto& part : parts) {
        AnalyticExpr der = f;
        double worst = 0.0;
        for (int j = 0; j < part.pole.order; ++j) {
            worst = std::max(worst, std::abs(eval_expr(der, part.pole.location)));
            der = diff_expr(der);
        }
        double scale = 1.0 + std::abs(eval_expr(der, part.pole.location));
        if (worst > 1e-8 * scale) {
            std::ostringstream os;
            os << "symbol does not vanish to order " << part.pole.order
               << " at pole " << part.pole.location << "; r0 is not entire there";
            out.warnings.push_back(os.str());
        }
    }

    // Round trip: re-extract Laurent data from the built expression
    // and compare residue sums on a short grid.
    std::vector<PoleSpec> poles;
    poles.reserve(parts.size());
    for (const auto& part : parts) poles.push_back(part.pole);
    std::vector<ResiduePolynomial> rebuilt;
    try {
        for (const auto& part : parts) {
            double radius;
            if (parts.size() > 1) {
                double nearest = std::numeric_limits<double>::infinity();
                for (const auto& other : poles) {
                    double d = std::abs(other.location - part.pole.location);
                    if (d > 0.0) nearest = std::min(nearest, d);
                }
                radius = 0.5 * nearest;
            } else {
                radius = 0.5 * (1.0 + std::abs(part.pole.location));
            }
            rebuilt.push_back(residue_polynomial(
                part.pole, laurent_coeffs(out.r0, f, part.pole, radius)));
        }
        std::vector<double> probe_times;
        for (int i = 0; i < 20; ++i) probe_times.push_back(0.1 * (i + 1));
        GridFunction original = residue_sum(parts, probe_times);
        GridFunction recovered = residue_sum(rebuilt, probe_times);
        double gap = 0.0;
        for (std::size_t i = 0; i < probe_times.size(); ++i)
            gap = std::max(gap, std::abs(original.values[i] - recovered.values[i]));
        out.identity_gap = gap;
        if (gap > identity_tol * (1.0 + original.max_abs())) {
            std::ostringstream os;
            os << "r0 round trip drifted by " << gap
               << "; the built expression does not reproduce its residue data";
            out.warnings.push_back(os.str());
        }
    } catch (const Error& e) {
        out.identity_gap = std::numeric_limits<double>::infinity();
        out.warnings.push_back(std::string("r0 round trip failed: ") + e.what());
    }
    return out;
}

IVPSolution solve_classical_ivp(const IVPProblem& problem,
                                const std::vector<double>& times) {
    const std::size_t K = problem.initial_values.size();
    if (!(problem.contour.abscissa >= problem.region.omega))
        throw DomainError("ivp",
                          "contour abscissa must not lie left of the region abscissa");
    validate_poles(problem.poles, problem.contour.abscissa);

    IVPSolution out;
    out.initial_values = problem.initial_values;
    RegionCheck region_check = spot_check_region(problem.f, problem.region);
    if (!region_check.ok)
        out.diagnostics.warnings.push_back("region spot check: " +
                                           region_check.message);

    // Moments of the particular part.
    DecayPlan plan;
    std::vector<Complex> L(std::max<std::size_t>(K, 1), Complex(0.0));
    const bool has_forcing = !problem.forcing.is_zero();
    std::function<Complex(Complex)> G;
    if (has_forcing) {
        G = particular_transform(problem.f, problem.forcing);
        DecayEstimate decay = estimate_decay(G, problem.contour);
        plan = DecayPlan{decay.p_hat, decay.certified_order};
        out.diagnostics.p_hat = decay.p_hat;
        out.diagnostics.certified_order = decay.certified_order;
        if (decay.no_smoothing)
            out.diagnostics.warnings.push_back(
                "transform decay below 1/2: the symbol provides no smoothing");
        if (K > 0)
            L = moment_values(G, problem.contour, static_cast<int>(K) - 1, plan,
                              /*allow_boundary=*/true);
    } else {
        out.diagnostics.p_hat = std::numeric_limits<double>::infinity();
        out.diagnostics.certified_order = std::numeric_limits<int>::max() / 2;
    }

    // Interpolation system and residue data.
    IVPSystem system = assemble_ivp_system(problem.poles, L, problem.initial_values);
    SystemSolution coeffs = solve_ivp_system(system, problem.tolerances.rank);
    out.diagnostics.condition = coeffs.condition;
    std::size_t offset = 0;
    for (const auto& pole : problem.poles) {
        std::vector<Complex> slice(
            coeffs.coeffs.begin() + static_cast<std::ptrdiff_t>(offset),
            coeffs.coeffs.begin() +
                static_cast<std::ptrdiff_t>(offset + static_cast<std::size_t>(pole.order)));
        out.residue_parts.push_back(residue_polynomial(pole, std::move(slice)));
        offset += static_cast<std::size_t>(pole.order);
    }

    // Remainder expression and its self checks.
    if (!out.residue_parts.empty()) {
        R0Result r0 = construct_r0(problem.f, out.residue_parts,
                                   problem.tolerances.identity_check);
        out.r0 = std::move(r0.r0);
        out.diagnostics.r0_identity_gap = r0.identity_gap;
        for (auto& w : r0.warnings) out.diagnostics.warnings.push_back(std::move(w));
    } else {
        out.r0 = make_constant(0.0, problem.f.variable());
    }

    // Particular part on the requested grid.
    if (has_forcing) {
        BromwichOptions options;
        options.check_tolerance = problem.tolerances.inversion_check;
        InversionResult inverted = bromwich_invert(G, problem.contour, times, options);
        out.bromwich_part = std::move(inverted.grid);
        out.diagnostics.refinement_gap = inverted.refinement_gap;
        for (auto& w : inverted.warnings)
            out.diagnostics.warnings.push_back(std::move(w));
    } else {
        out.bromwich_part = zero_grid(times);
    }

    // Membership heuristic on the full candidate transform.
    {
        const AnalyticExpr& f = problem.f;
        const AnalyticExpr& r0 = out.r0;
        const ForcingTerm& J = problem.forcing;
        auto transform = [&f, &r0, &J](Complex s) -> Complex {
            Complex den = eval_expr(f, s);
            if (den == 0.0)
                throw EvalError(EvalError::Kind::DivisionByZero, s,
                                "symbol vanishes on the contour");
            Complex num = eval_expr(r0, s);
            if (!J.is_zero()) num += laplace_forward(J, s);
            return num / den;
        };
        out.diagnostics.widder =
            widder_heuristic(transform, problem.region.omega, 10, {},
                             problem.tolerances.widder_bound);
        if (!out.diagnostics.widder.passed)
            out.diagnostics.warnings.push_back(
                "solution transform fails the Widder heuristic: " +
                out.diagnostics.widder.message);
    }

    // Derivative trace: imposed data first, then two extra orders when
    // the decay supports them.
    {
        int top = static_cast<int>(K) + 1;
        if (has_forcing)
            top = std::min(top, std::max(static_cast<int>(K) - 1, plan.certified));
        auto binom = binomial_rows(std::max(top, 0));
        std::vector<Complex> trace;
        std::vector<Complex> moments;
        if (top >= static_cast<int>(K)) {
            if (has_forcing)
                moments = moment_values(G, problem.contour, top, plan,
                                        /*allow_boundary=*/true);
            else
                moments.assign(static_cast<std::size_t>(top) + 1, Complex(0.0));
        }
        for (int n = 0; n <= top; ++n) {
            if (n < static_cast<int>(K)) {
                trace.push_back(problem.initial_values[static_cast<std::size_t>(n)]);
            } else {
                trace.push_back(moments[static_cast<std::size_t>(n)] +
                                residue_derivative(out.residue_parts, n, binom));
            }
        }
        out.derivative_trace = std::move(trace);
    }
    return out;
}

std::vector<std::complex<double>> derivative_trace(const IVPSolution& solution,
                                                   const AnalyticExpr& f,
                                                   const ForcingTerm& J,
                                                   const ContourParams& contour,
                                                   int n_max) {
    if (n_max < 0) throw DomainError("ivp", "trace order must be nonnegative");
    const auto K = static_cast<int>(solution.initial_values.size());

    std::vector<Complex> moments(static_cast<std::size_t>(n_max) + 1, Complex(0.0));
    if (!J.is_zero() && n_max >= K) {
        auto G = particular_transform(f, J);
        DecayEstimate decay = estimate_decay(G, contour);
        DecayPlan plan{decay.p_hat, decay.certified_order};
        for (int n = K; n <= n_max; ++n)
            if (!plan.strictly_admissible(n) && n > plan.certified)
                throw InsufficientDecay(n, plan.p_hat);
        moments = moment_values(G, contour, n_max, plan, /*allow_boundary=*/true);
    }

    auto binom = binomial_rows(n_max);
    std::vector<Complex> out;
    out.reserve(static_cast<std::size_t>(n_max) + 1);
    for (int n = 0; n <= n_max; ++n) {
        if (n < K)
            out.push_back(solution.initial_values[static_cast<std::size_t>(n)]);
        else
            out.push_back(moments[static_cast<std::size_t>(n)] +
                          residue_derivative(solution.residue_parts, n, binom));
    }
    return out;
}

}  // namespace nlode
