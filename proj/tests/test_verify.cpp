#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "nlode/ivp.hpp"
#include "nlode/verify.hpp"

using namespace nlode;
using cd = std::complex<double>;

namespace {

bool close(cd a, cd b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace

TEST_CASE("derivative data must honour its growth certificate") {
    CHECK_NOTHROW((void)remainder_series({cd(1.0), cd(0.5), cd(0.25)}, 1.0, 0.5));
    CHECK_THROWS_AS((void)remainder_series({cd(1.0), cd(2.0)}, 1.0, 0.5),
                    DomainError);
    CHECK_THROWS_AS((void)remainder_series({cd(1.0)}, -1.0, 0.5), DomainError);
    CHECK(remainder_series({cd(1.0)}, 1.0, 0.5).guaranteed());
    CHECK_FALSE(remainder_series({cd(1.0)}, 1.0, 2.0).guaranteed());
}

TEST_CASE("monomial symbols give a finite exact remainder sum") {
    // For f = s^N only the c_N block survives, and it equals the
    // polynomial d_0 s^(N-1) + ... + d_(N-1) by the recursion
    // w_n = s w_(n-1) + d_(n-1).
    RemainderSeries data = remainder_series({cd(1.0), cd(2.0), cd(1.0), cd(3.0)},
                                            3.0, 2.0);
    SeriesValue v4 = build_remainder_series(parse_expr("s^4"), data, cd(2.0), 40);
    CHECK(v4.converged);
    CHECK(close(v4.value, 8.0 + 8.0 + 2.0 + 3.0, 1e-12));

    SeriesValue v2 = build_remainder_series(parse_expr("s^2"), data, cd(2.0), 40);
    CHECK(close(v2.value, 1.0 * 2.0 + 2.0, 1e-12));

    SeriesValue v1 = build_remainder_series(parse_expr("s"), data, cd(-3.5), 40);
    CHECK(close(v1.value, 1.0, 1e-13));

    // A constant symbol has no n >= 1 blocks at all.
    SeriesValue v0 = build_remainder_series(parse_expr("7"), data, cd(2.0), 40);
    CHECK(close(v0.value, 0.0, 0.0));
}

TEST_CASE("exponential symbol sums match a long double reference") {
    // f = e^s, d_j = 2^-j, s = 1:
    //   sum over n >= 1 of (1/n!) sum over j < n of 2^-j.
    std::vector<cd> d;
    for (int j = 0; j < 40; ++j) d.emplace_back(std::pow(2.0, -j));
    RemainderSeries data = remainder_series(d, 1.0, 1.0);

    long double reference = 0.0L;
    long double factorial = 1.0L;
    for (int n = 1; n <= 60; ++n) {
        factorial *= n;
        long double inner = 0.0L;
        for (int j = 0; j < n && j < 40; ++j) inner += std::pow(0.5L, j);
        reference += inner / factorial;
    }

    SeriesValue v = build_remainder_series(parse_expr("exp(s)"), data, cd(1.0), 50);
    CHECK(v.converged);
    CHECK(std::abs(v.value - cd(static_cast<double>(reference))) <= 1e-10);
}

TEST_CASE("runaway derivative data is reported as divergence") {
    // (j!)^2 growth cannot satisfy any geometric certificate, so the
    // certificate is bypassed and the series watch must catch the blow
    // up at evaluation time.
    RemainderSeries data;
    double factorial = 1.0;
    for (int j = 0; j < 30; ++j) {
        if (j > 0) factorial *= j;
        data.d.emplace_back(factorial * factorial);
    }
    data.C = 1.0;
    data.R = 1.0;
    CHECK_THROWS_AS(
        (void)build_remainder_series(parse_expr("exp(s)"), data, cd(2.0), 30),
        DivergenceDetected);
}

TEST_CASE("smooth vectors differentiate on demand and pin the variable") {
    SmoothVector phi(parse_expr("t^3", "t"));
    CHECK(close(eval_expr(phi.derivative(2), cd(2.0)), 12.0, 1e-13));
    CHECK(close(eval_expr(phi.derivative(0), cd(2.0)), 8.0, 1e-13));
    CHECK_THROWS_AS(SmoothVector(parse_expr("s^2", "s")), DomainError);
}

TEST_CASE("the exponential symbol acts as a unit shift on polynomials") {
    // e^(d/dt) t^2 = (t+1)^2, and the series terminates after the
    // second derivative.
    SmoothVector phi(parse_expr("t^2", "t"));
    auto times = make_times(0.0, 2.0, 21);
    ApplyResult out = apply_symbol(parse_expr("exp(s)"), phi, times);
    CHECK_FALSE(out.tail_warning);
    for (std::size_t k = 0; k < times.size(); ++k) {
        double t = times[k];
        CHECK(close(out.grid.values[k], (t + 1.0) * (t + 1.0), 1e-10));
    }
}

TEST_CASE("polynomial symbols annihilate their kernels exactly") {
    SmoothVector cosine(parse_expr("cos(t)", "t"));
    auto times = make_times(0.0, 6.0, 25);
    ApplyResult out = apply_symbol(parse_expr("s^2 + 1"), cosine, times);
    for (std::size_t k = 0; k < times.size(); ++k)
        CHECK(close(out.grid.values[k], 0.0, 1e-13));
}

TEST_CASE("a slowly converging application trips the tail gauge") {
    // phi = e^(5t) under f = e^s needs terms 5^n/n! that are still
    // large at order 15.
    SmoothVector phi(parse_expr("exp(5*t)", "t"));
    ApplyResult out =
        apply_symbol(parse_expr("exp(s)"), phi, make_times(0.0, 1.0, 5), 15);
    CHECK(out.tail_warning);
    CHECK(out.tail > 1e-3);
}

TEST_CASE("eigenfunction relation for entire symbols") {
    // f(d/dt) e^(omega t) = f(omega) e^(omega t).
    auto run = [](const std::string& f_text, cd omega, double tol) {
        AnalyticExpr f = parse_expr(f_text);
        AnalyticExpr omega_t =
            make_constant(omega, "t") * make_variable("t");
        SmoothVector phi(exp_of(omega_t));
        auto times = make_times(0.0, 2.0, 9);
        ApplyResult out = apply_symbol(f, phi, times);
        cd factor = eval_expr(f, omega);
        for (std::size_t k = 0; k < times.size(); ++k) {
            cd want = factor * std::exp(omega * times[k]);
            CHECK(std::abs(out.grid.values[k] - want) <=
                  tol * (1.0 + std::abs(want)));
        }
    };
    run("exp(s)", cd(0.5), 1e-8);
    run("exp(s)", cd(-1.0), 1e-8);
    run("exp(s)", cd(0.3, 1.0), 1e-8);
    run("s^3 - 2*s + 1", cd(2.0, -0.5), 1e-8);
    run("exp(2*s^2)*(s^2 - 1) + 2", cd(0.5, 0.5), 1e-8);
}

TEST_CASE("residual of a closed form candidate") {
    SmoothVector cosine(parse_expr("cos(t)", "t"));
    ResidualReport hom = residual_norm(parse_expr("s^2 + 1"), cosine,
                                       ForcingTerm::zero(),
                                       make_times(0.0, 6.0, 25));
    CHECK(hom.residual <= 1e-12);

    SmoothVector quad(parse_expr("t^2", "t"));
    ResidualReport forced =
        residual_norm(parse_expr("s^2 + 1"), quad,
                      ForcingTerm::closed_form(parse_expr("2 + t^2", "t")),
                      make_times(0.0, 3.0, 13));
    CHECK(forced.residual <= 1e-12);

    // A wrong candidate leaves a visible residual.
    ResidualReport wrong = residual_norm(parse_expr("s^2 + 1"), quad,
                                         ForcingTerm::zero(),
                                         make_times(0.0, 3.0, 13));
    CHECK(wrong.residual >= 2.0);
}

TEST_CASE("residual of a solved problem needs a closed form solution") {
    IVPProblem problem;
    problem.f = parse_expr("s^2 + 1");
    problem.region = GammaRegion(10.0, 0.0);
    problem.poles = {PoleSpec(cd(0.0, 1.0), 1), PoleSpec(cd(0.0, -1.0), 1)};
    problem.initial_values = {cd(1.0), cd(0.0)};
    auto times = make_times(0.0, 5.0, 26);
    IVPSolution sol = solve_classical_ivp(problem, times);

    ResidualReport rep =
        residual_norm(problem.f, sol, ForcingTerm::zero(), times);
    CHECK(rep.residual <= 1e-10);

    IVPProblem forced;
    forced.f = parse_expr("(s - 1)*(s + 2)");
    forced.region = GammaRegion(10.0, 0.0);
    forced.forcing = ForcingTerm::closed_form(parse_expr("1", "t"));
    forced.poles = {PoleSpec(cd(1.0), 1), PoleSpec(cd(-2.0), 1)};
    forced.initial_values = {cd(0.0), cd(0.0)};
    forced.contour = ContourParams(1.5, 300.0, 0.05);
    IVPSolution fsol = solve_classical_ivp(forced, times);
    CHECK_THROWS_AS(
        (void)residual_norm(forced.f, fsol, forced.forcing, times), Unsupported);
}
