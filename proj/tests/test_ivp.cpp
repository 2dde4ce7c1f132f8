#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "nlode/ivp.hpp"
#include "oracles.hpp"

using namespace nlode;
using cd = std::complex<double>;

namespace {

bool close(cd a, cd b, double tol) { return std::abs(a - b) <= tol; }

ForcingTerm unit_forcing() { return ForcingTerm::closed_form(parse_expr("1", "t")); }

}  // namespace

TEST_CASE("moment derivatives of the particular part") {
    // f = (s-1)(s+2), J = 1: the particular transform 1/(s f) inverts
    // to -1/2 + e^t/3 + e^(-2t)/6, whose value and slope at zero both
    // vanish.
    AnalyticExpr f = parse_expr("(s - 1)*(s + 2)");
    ContourParams contour(1.5, 300.0, 0.05);
    auto L = compute_Ln(f, unit_forcing(), contour, 1);
    REQUIRE(L.size() == 2);
    CHECK(close(L[0], 0.0, 1e-5));
    CHECK(close(L[1], 0.0, 1e-5));
}

TEST_CASE("moments refuse orders past absolute convergence") {
    // f = s - 1, J = 1: the transform 1/(s(s-1)) decays second order,
    // so the order one moment is only conditionally convergent and must
    // be refused even though its principal value exists.
    AnalyticExpr f = parse_expr("s - 1");
    ContourParams contour(1.5, 300.0, 0.05);
    try {
        (void)compute_Ln(f, unit_forcing(), contour, 1);
        FAIL("expected InsufficientDecay");
    } catch (const InsufficientDecay& e) {
        CHECK(e.order() == 1);
        CHECK(e.decay_rate() == doctest::Approx(2.0).epsilon(0.05));
    }

    // The order zero moment is fine: e^t - 1 vanishes at zero.
    auto L = compute_Ln(f, unit_forcing(), contour, 0);
    REQUIRE(L.size() == 1);
    CHECK(close(L[0], 0.0, 1e-5));
}

TEST_CASE("moments of zero forcing are zero") {
    auto L = compute_Ln(parse_expr("s^2 + 1"), ForcingTerm::zero(),
                        ContourParams(), 3);
    REQUIRE(L.size() == 4);
    for (const auto& v : L) CHECK(close(v, 0.0, 0.0));
}

TEST_CASE("interpolation system for two simple poles") {
    std::vector<PoleSpec> poles = {PoleSpec(cd(1.0), 1), PoleSpec(cd(-2.0), 1)};
    std::vector<cd> L = {cd(0.25), cd(-0.5)};
    std::vector<cd> data = {cd(1.0), cd(2.0)};
    IVPSystem sys = assemble_ivp_system(poles, L, data);
    REQUIRE(sys.A.size() == 2);
    CHECK(close(sys.A[0][0], 1.0, 0.0));
    CHECK(close(sys.A[0][1], 1.0, 0.0));
    CHECK(close(sys.A[1][0], 1.0, 0.0));
    CHECK(close(sys.A[1][1], -2.0, 0.0));
    CHECK(close(sys.b[0], 0.75, 0.0));
    CHECK(close(sys.b[1], 2.5, 0.0));
}

TEST_CASE("interpolation system for one double pole") {
    // Unknowns a_1, a_2 at omega = -1. Row n = 1 carries the Leibniz
    // weights binom(1,0) omega a_1 + binom(1,1) a_2.
    std::vector<PoleSpec> poles = {PoleSpec(cd(-1.0), 2)};
    IVPSystem sys = assemble_ivp_system(poles, {cd(0.0), cd(0.0)},
                                        {cd(3.0), cd(5.0)});
    CHECK(close(sys.A[0][0], 1.0, 0.0));
    CHECK(close(sys.A[0][1], 0.0, 0.0));
    CHECK(close(sys.A[1][0], -1.0, 0.0));
    CHECK(close(sys.A[1][1], 1.0, 0.0));
    CHECK(close(sys.b[0], 3.0, 0.0));
    CHECK(close(sys.b[1], 5.0, 0.0));
}

TEST_CASE("system shape must match the declared pole orders") {
    std::vector<PoleSpec> poles = {PoleSpec(cd(1.0), 2)};
    CHECK_THROWS_AS(
        (void)assemble_ivp_system(poles, {cd(0.0)}, {cd(1.0)}), ShapeMismatch);
}

TEST_CASE("dense solve reports conditioning and rank failure") {
    IVPSystem good;
    good.A = {{cd(1.0), cd(1.0)}, {cd(1.0), cd(-2.0)}};
    good.b = {cd(0.0), cd(3.0)};
    SystemSolution sol = solve_ivp_system(good);
    CHECK(close(sol.coeffs[0], 1.0, 1e-14));
    CHECK(close(sol.coeffs[1], -1.0, 1e-14));
    CHECK(sol.condition >= 1.0);

    IVPSystem bad;
    bad.A = {{cd(1.0), cd(1.0)}, {cd(2.0), cd(2.0)}};
    bad.b = {cd(1.0), cd(1.0)};
    CHECK_THROWS_AS((void)solve_ivp_system(bad), GenericityFailure);
}

TEST_CASE("r0 reconstruction for the cosine data is the identity s") {
    AnalyticExpr f = parse_expr("s^2 + 1");
    std::vector<ResiduePolynomial> parts = {
        residue_polynomial(PoleSpec(cd(0.0, 1.0), 1), {cd(0.5)}),
        residue_polynomial(PoleSpec(cd(0.0, -1.0), 1), {cd(0.5)})};
    R0Result r0 = construct_r0(f, parts);
    CHECK(r0.identity_gap <= 1e-8);
    CHECK(r0.warnings.empty());
    for (cd s : {cd(0.3, 0.2), cd(2.0, -1.0), cd(-0.5, 0.4)})
        CHECK(close(eval_expr(r0.r0, s), s, 1e-10));
}

TEST_CASE("r0 warns when the symbol does not vanish at a declared pole") {
    AnalyticExpr f = parse_expr("s - 1");
    std::vector<ResiduePolynomial> parts = {
        residue_polynomial(PoleSpec(cd(-2.0), 1), {cd(1.0)})};
    R0Result r0 = construct_r0(f, parts);
    CHECK_FALSE(r0.warnings.empty());

    CHECK_THROWS_AS((void)construct_r0(f, {}), DomainError);
}

TEST_CASE("classical solve reproduces cosine exactly") {
    IVPProblem problem;
    problem.f = parse_expr("s^2 + 1");
    problem.region = GammaRegion(10.0, 0.0);
    problem.poles = {PoleSpec(cd(0.0, 1.0), 1), PoleSpec(cd(0.0, -1.0), 1)};
    problem.initial_values = {cd(1.0), cd(0.0)};

    auto times = make_times(0.0, 2.0 * M_PI, 101);
    IVPSolution sol = solve_classical_ivp(problem, times);

    // No forcing, so the quadrature part is identically zero and the
    // residue pair carries everything.
    CHECK(sol.bromwich_part.max_abs() == 0.0);
    REQUIRE(sol.residue_parts.size() == 2);
    CHECK(close(sol.residue_parts[0].coeffs[0], 0.5, 1e-10));
    CHECK(close(sol.residue_parts[1].coeffs[0], 0.5, 1e-10));

    GridFunction total = sol.total();
    for (std::size_t k = 0; k < times.size(); ++k)
        CHECK(close(total.values[k], std::cos(times[k]), 1e-12));

    REQUIRE(sol.derivative_trace.size() == 4);
    CHECK(close(sol.derivative_trace[0], 1.0, 1e-10));
    CHECK(close(sol.derivative_trace[1], 0.0, 1e-10));
    CHECK(close(sol.derivative_trace[2], -1.0, 1e-10));
    CHECK(close(sol.derivative_trace[3], 0.0, 1e-10));

    for (cd s : {cd(1.0, 0.5), cd(-0.3, 2.0)})
        CHECK(close(eval_expr(sol.r0, s), s, 1e-10));

    CHECK(std::isinf(sol.diagnostics.p_hat));
    CHECK(sol.diagnostics.condition == doctest::Approx(2.0));
    CHECK(sol.diagnostics.r0_identity_gap <= 1e-8);
    CHECK(sol.diagnostics.widder.passed);
    CHECK(sol.diagnostics.warnings.empty());
}

TEST_CASE("classical solve with forcing matches the closed form") {
    IVPProblem problem;
    problem.f = parse_expr("(s - 1)*(s + 2)");
    problem.region = GammaRegion(10.0, 0.0);
    problem.forcing = unit_forcing();
    problem.poles = {PoleSpec(cd(1.0), 1), PoleSpec(cd(-2.0), 1)};
    problem.initial_values = {cd(0.0), cd(0.0)};
    problem.contour = ContourParams(1.5, 300.0, 0.05);

    auto times = make_times(0.0, 3.0, 31);
    IVPSolution sol = solve_classical_ivp(problem, times);
    GridFunction total = sol.total();
    for (std::size_t k = 0; k < times.size(); ++k) {
        double want = -0.5 + std::exp(times[k]) / 3.0 + std::exp(-2.0 * times[k]) / 6.0;
        CHECK(close(total.values[k], want, 1e-4));
    }
    CHECK(sol.diagnostics.p_hat == doctest::Approx(3.0).epsilon(0.02));
}

TEST_CASE("trace of a triple pole problem crosses into the boundary order") {
    // (d/dt + 1)^3 phi = 1 with zero data: differentiating the
    // equation shows phi'''(0) = 1. The transform decays fourth order,
    // so order three sits exactly on the absolute convergence boundary
    // and is recovered through the jump midpoint correction.
    IVPProblem problem;
    problem.f = parse_expr("(s + 1)^3");
    problem.region = GammaRegion(10.0, 0.0);
    problem.forcing = unit_forcing();
    problem.poles = {PoleSpec(cd(-1.0), 3)};
    problem.initial_values = {cd(0.0), cd(0.0), cd(0.0)};
    problem.contour = ContourParams(0.5, 300.0, 0.05);

    auto times = make_times(0.0, 2.0, 21);
    IVPSolution sol = solve_classical_ivp(problem, times);

    REQUIRE(sol.derivative_trace.size() == 4);
    CHECK(close(sol.derivative_trace[0], 0.0, 1e-6));
    CHECK(close(sol.derivative_trace[1], 0.0, 1e-6));
    CHECK(close(sol.derivative_trace[2], 0.0, 1e-6));
    CHECK(close(sol.derivative_trace[3], 1.0, 1e-4));

    // Exact solution 1 - (1 + t + t^2/2) e^-t.
    GridFunction total = sol.total();
    for (std::size_t k = 0; k < times.size(); ++k) {
        double t = times[k];
        double want = 1.0 - (1.0 + t + 0.5 * t * t) * std::exp(-t);
        CHECK(close(total.values[k], want, 1e-5));
    }
}

TEST_CASE("standalone trace extends the solution and respects decay") {
    IVPProblem problem;
    problem.f = parse_expr("s^2 + 1");
    problem.region = GammaRegion(10.0, 0.0);
    problem.poles = {PoleSpec(cd(0.0, 1.0), 1), PoleSpec(cd(0.0, -1.0), 1)};
    problem.initial_values = {cd(1.0), cd(0.0)};
    auto times = make_times(0.0, 1.0, 11);
    IVPSolution sol = solve_classical_ivp(problem, times);

    // Homogeneous problem: every order is available and follows the
    // cosine pattern 1, 0, -1, 0, 1, ...
    auto trace = derivative_trace(sol, problem.f, ForcingTerm::zero(),
                                  problem.contour, 6);
    REQUIRE(trace.size() == 7);
    double pattern[] = {1.0, 0.0, -1.0, 0.0, 1.0, 0.0, -1.0};
    for (int n = 0; n <= 6; ++n) CHECK(close(trace[n], pattern[n], 1e-9));

    // With forcing the decay certificate caps the reach: for
    // f = (s-1)(s+2), J = 1 the transform decays third order, so order
    // three is past the certified range.
    IVPProblem forced;
    forced.f = parse_expr("(s - 1)*(s + 2)");
    forced.region = GammaRegion(10.0, 0.0);
    forced.forcing = unit_forcing();
    forced.poles = {PoleSpec(cd(1.0), 1), PoleSpec(cd(-2.0), 1)};
    forced.initial_values = {cd(0.0), cd(0.0)};
    forced.contour = ContourParams(1.5, 300.0, 0.05);
    IVPSolution fsol = solve_classical_ivp(forced, times);

    auto ftrace = derivative_trace(fsol, forced.f, forced.forcing,
                                   forced.contour, 2);
    REQUIRE(ftrace.size() == 3);
    CHECK(close(ftrace[0], 0.0, 0.0));
    CHECK(close(ftrace[1], 0.0, 0.0));
    CHECK(close(ftrace[2], 1.0, 1e-4));
    CHECK_THROWS_AS((void)derivative_trace(fsol, forced.f, forced.forcing,
                                           forced.contour, 3),
                    InsufficientDecay);
}

TEST_CASE("generalized solve inverts the combined transform") {
    // f = s with r = 1 gives phi identically one. The constant r is not
    // in the Widder class near its abscissa, which surfaces as a
    // warning rather than an error.
    GeneralizedIC ic{parse_expr("1")};
    auto times = make_times(0.5, 4.0, 36);
    GeneralizedSolution sol =
        solve_generalized(parse_expr("s"), GammaRegion(10.0, 0.0),
                          ForcingTerm::zero(), ic, ContourParams(), times);
    for (std::size_t k = 0; k < times.size(); ++k)
        CHECK(close(sol.grid.values[k], 1.0, 2e-2));
    CHECK_FALSE(sol.widder.passed);
    CHECK_FALSE(sol.warnings.empty());
}

TEST_CASE("generalized contour must respect the region abscissa") {
    GeneralizedIC ic{parse_expr("1")};
    CHECK_THROWS_AS(
        (void)solve_generalized(parse_expr("s"), GammaRegion(10.0, 0.5),
                                ForcingTerm::zero(), ic,
                                ContourParams(0.3, 100.0, 0.1),
                                make_times(0.0, 1.0, 5)),
        DomainError);
}

TEST_CASE("no declared poles agrees with a vanishing remainder") {
    // With no poles the classical problem has K = 0 data and r0 = 0;
    // the solution must coincide with the generalized solve at r = 0.
    AnalyticExpr f = parse_expr("s^2 + 3");
    ForcingTerm j = ForcingTerm::closed_form(parse_expr("exp(-t)", "t"));
    ContourParams contour(0.5, 100.0, 0.1);
    auto times = make_times(0.0, 2.0, 21);

    IVPProblem problem;
    problem.f = f;
    problem.region = GammaRegion(10.0, 0.0);
    problem.forcing = j;
    problem.contour = contour;
    IVPSolution classical = solve_classical_ivp(problem, times);
    CHECK(classical.residue_parts.empty());
    for (cd s : {cd(1.0, 0.5), cd(2.0, -1.0)})
        CHECK(close(eval_expr(classical.r0, s), 0.0, 0.0));

    GeneralizedSolution general =
        solve_generalized(f, GammaRegion(10.0, 0.0), j,
                          GeneralizedIC{parse_expr("0")}, contour, times);
    GridFunction total = classical.total();
    for (std::size_t k = 0; k < times.size(); ++k)
        CHECK(close(total.values[k], general.grid.values[k], 1e-13));
}

TEST_CASE("classical solve validates poles against the contour") {
    IVPProblem problem;
    problem.f = parse_expr("s - 2");
    problem.region = GammaRegion(10.0, 0.0);
    problem.poles = {PoleSpec(cd(2.0), 1)};
    problem.initial_values = {cd(1.0)};
    // Default abscissa 0.5 lies left of the declared pole.
    CHECK_THROWS_AS((void)solve_classical_ivp(problem, make_times(0.0, 1.0, 5)),
                    DomainError);

    IVPProblem dup;
    dup.f = parse_expr("(s - 0.1)^2");
    dup.region = GammaRegion(10.0, 0.0);
    dup.poles = {PoleSpec(cd(0.1), 1), PoleSpec(cd(0.1), 1)};
    dup.initial_values = {cd(0.0), cd(0.0)};
    CHECK_THROWS_AS((void)solve_classical_ivp(dup, make_times(0.0, 1.0, 5)),
                    DomainError);
}
