#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "nlode/grid.hpp"
#include "nlode/laplace.hpp"

using namespace nlode;
using cd = std::complex<double>;

namespace {

bool close(cd a, cd b, double tol = 1e-12) { return std::abs(a - b) <= tol; }

ForcingTerm from_text(const std::string& text) {
    return ForcingTerm::closed_form(parse_expr(text, "t"));
}

}  // namespace

TEST_CASE("contour parameters are validated and counted") {
    CHECK_THROWS_AS(ContourParams(0.5, -1.0, 0.1), DomainError);
    CHECK_THROWS_AS(ContourParams(0.5, 10.0, 0.0), DomainError);
    CHECK_THROWS_AS(ContourParams(0.5, 10.0, 20.0), DomainError);
    CHECK(ContourParams(0.5, 200.0, 0.05).node_count() == 8001);
    CHECK(ContourParams(0.0, 1.0, 0.3).node_count() == 9);
}

TEST_CASE("transform table covers polynomial exponential and trig shapes") {
    CHECK(from_text("1").table_matched());
    CHECK(close(laplace_forward(from_text("1"), 2.0), 0.5));

    CHECK(close(laplace_forward(from_text("t^2"), 2.0), 2.0 / 8.0));
    CHECK(close(laplace_forward(from_text("3*t*exp(-2*t)"), 1.0), 3.0 / 9.0));
    CHECK(close(laplace_forward(from_text("sin(2*t)"), 3.0), 2.0 / 13.0));

    // L(e^t cos 3t) = (s-1)/((s-1)^2 + 9).
    CHECK(close(laplace_forward(from_text("exp(t)*cos(3*t)"), 2.0), 1.0 / 10.0));

    // sin(2t) at a complex point: 2/(s^2+4).
    cd s(1.0, 1.0);
    CHECK(close(laplace_forward(from_text("sin(2*t)"), s), 2.0 / (s * s + 4.0)));

    // Sums of table terms transform term by term.
    CHECK(close(laplace_forward(from_text("2 - t + t^3"), 2.0),
                1.0 - 0.25 + 6.0 / 16.0));
}

TEST_CASE("growth bound polices the transform domain") {
    ForcingTerm j = from_text("exp(2*t)");
    CHECK(j.growth_bound() == 2.0);
    CHECK_THROWS_AS((void)laplace_forward(j, cd(1.5)), DomainError);
    CHECK_THROWS_AS((void)laplace_forward(j, cd(2.0)), DomainError);
    CHECK(close(laplace_forward(j, 2.5), 2.0));

    ForcingTerm mixed = from_text("exp(3*t)*t");
    CHECK(mixed.growth_bound() == 3.0);
    CHECK_THROWS_AS((void)laplace_forward(mixed, cd(3.0)), DomainError);
}

TEST_CASE("non table shapes fall back to adaptive quadrature") {
    ForcingTerm j = ForcingTerm::closed_form(parse_expr("sin(t)*sin(t)", "t"), 0.0);
    CHECK_FALSE(j.table_matched());
    // L(sin^2 t) = 1/(2s) - s/(2(s^2+4)).
    cd got = laplace_forward(j, 3.0);
    cd want = 1.0 / 6.0 - 3.0 / 26.0;
    CHECK(close(got, want, 1e-10));

    cd s(2.0, 1.0);
    cd want_c = 0.5 / s - s / (2.0 * (s * s + 4.0));
    CHECK(close(laplace_forward(j, s), want_c, 1e-10));
}

TEST_CASE("quadrature refuses a divergent integrand") {
    ForcingTerm j = ForcingTerm::closed_form(parse_expr("exp(t^2)", "t"), 0.0);
    CHECK_THROWS_AS((void)laplace_forward(j, cd(5.0)), QuadratureFailure);
}

TEST_CASE("sampled forcing integrates with Simpson weights") {
    auto times = make_times(0.0, 30.0, 3001);
    std::vector<cd> values;
    values.reserve(times.size());
    for (double t : times) values.emplace_back(std::exp(-t));
    ForcingTerm j = ForcingTerm::sampled(GridFunction(times, values), 0.0);

    CHECK(close(laplace_forward(j, 1.0), 0.5, 1e-8));
    CHECK(close(laplace_forward(j, cd(1.0, 1.0)), 1.0 / cd(2.0, 1.0), 1e-8));
    CHECK_THROWS_AS((void)laplace_forward(j, cd(-0.5)), DomainError);

    CHECK(close(j.value_at(0.005), 0.5 * (1.0 + std::exp(-0.01)), 1e-6));
    CHECK(close(j.value_at(100.0), 0.0));
}

TEST_CASE("forcing values and the zero term") {
    CHECK(close(from_text("t^2").value_at(3.0), 9.0));
    ForcingTerm z = ForcingTerm::zero();
    CHECK(z.is_zero());
    CHECK(close(z.value_at(2.0), 0.0));
    CHECK(close(laplace_forward(z, cd(0.1, 5.0)), 0.0));
}

TEST_CASE("bromwich inversion reproduces smooth second order transforms") {
    ContourParams contour;
    auto times = make_times(0.1, 5.0, 50);

    auto gte = [](cd s) { return 1.0 / ((s + 1.0) * (s + 1.0)); };
    InversionResult r = bromwich_invert(gte, contour, times);
    CHECK(r.converged);
    CHECK(r.max_imag <= 1e-12);
    CHECK(r.refinement_gap <= 1e-3);
    for (std::size_t k = 0; k < times.size(); ++k)
        CHECK(std::abs(r.grid.values[k] - times[k] * std::exp(-times[k])) <= 1e-3);

    auto gsin = [](cd s) { return 1.0 / (s * s + 1.0); };
    InversionResult rs = bromwich_invert(gsin, contour, times);
    CHECK(rs.converged);
    for (std::size_t k = 0; k < times.size(); ++k)
        CHECK(std::abs(rs.grid.values[k] - std::sin(times[k])) <= 1e-3);
}

TEST_CASE("a slowly decaying transform trips the self check") {
    // 1/(s+1) decays only first order along the contour; truncation at
    // the default half height leaves a visible error near t = 0 and the
    // refined contour moves the answer, which must be reported.
    ContourParams contour;
    auto g = [](cd s) { return 1.0 / (s + 1.0); };
    auto times = make_times(0.1, 5.0, 50);
    InversionResult r = bromwich_invert(g, contour, times);
    CHECK_FALSE(r.converged);
    CHECK(r.refinement_gap > 1e-3);
    CHECK_FALSE(r.warnings.empty());
    for (std::size_t k = 0; k < times.size(); ++k) {
        double err = std::abs(r.grid.values[k] - std::exp(-times[k]));
        CHECK(err <= 2e-2);
        if (times[k] >= 1.0) CHECK(err <= 5e-3);
    }
}

TEST_CASE("inversion is linear at machine precision") {
    ContourParams contour(0.5, 50.0, 0.05);
    BromwichOptions options;
    options.self_check = false;
    auto times = make_times(0.2, 3.0, 29);

    auto g1 = [](cd s) { return 1.0 / (s * s + 1.0); };
    auto g2 = [](cd s) { return 1.0 / ((s + 1.0) * (s + 2.0)); };
    const cd alpha(2.0, 0.0), beta(-0.7, 0.0);
    auto combo = [&](cd s) { return alpha * g1(s) + beta * g2(s); };

    auto r1 = bromwich_invert(g1, contour, times, options);
    auto r2 = bromwich_invert(g2, contour, times, options);
    auto rc = bromwich_invert(combo, contour, times, options);
    for (std::size_t k = 0; k < times.size(); ++k) {
        cd want = alpha * r1.grid.values[k] + beta * r2.grid.values[k];
        CHECK(std::abs(rc.grid.values[k] - want) <= 1e-13);
    }
}

TEST_CASE("inversion rejects negative times") {
    auto g = [](cd s) { return 1.0 / (s * s); };
    CHECK_THROWS_AS(
        (void)bromwich_invert(g, ContourParams(), std::vector<double>{-1.0, 0.0}),
        DomainError);
}

TEST_CASE("decay estimation snaps clean algebraic rates") {
    ContourParams contour;

    DecayEstimate one = estimate_decay([](cd s) { return 1.0 / (s + 1.0); }, contour);
    CHECK(one.p_hat == 1.0);
    CHECK(one.certified_order == 0);
    CHECK_FALSE(one.no_smoothing);

    DecayEstimate two = estimate_decay([](cd s) { return 1.0 / (s * s); }, contour);
    CHECK(two.p_hat == 2.0);
    CHECK(two.certified_order == 1);

    DecayEstimate three = estimate_decay(
        [](cd s) { return 1.0 / (s * (s + 1.0) * (s + 2.0)); }, contour);
    CHECK(three.p_hat == 3.0);
    CHECK(three.certified_order == 2);

    DecayEstimate flat = estimate_decay([](cd s) { return s / (s + 1.0); }, contour);
    CHECK(flat.no_smoothing);
    CHECK(flat.certified_order == 0);
}

TEST_CASE("widder heuristic accepts true transforms near their abscissa") {
    // 1/(s-1) = L(e^t): the ratio is identically 1 over Re(s) > 1.
    WidderReport good =
        widder_heuristic([](cd s) { return 1.0 / (s - 1.0); }, 1.0);
    CHECK(good.passed);
    CHECK(good.worst_ratio > 0.9);
    CHECK(good.worst_ratio < 1.1);

    // 1/(s+1) = L(e^-t) checked over the larger region Re(s) > 0: the
    // ratio (s/(s+1))^(n+1) stays below 1.
    WidderReport shifted =
        widder_heuristic([](cd s) { return 1.0 / (s + 1.0); }, 0.0);
    CHECK(shifted.passed);
    CHECK(shifted.worst_ratio <= 1.0 + 1e-9);
}

TEST_CASE("widder heuristic rejects unbounded derivative growth") {
    // 1/s^2 = L(t): the ratio (n+1)/s blows up as s approaches the
    // abscissa, so membership near omega = 0 must fail.
    WidderReport bad = widder_heuristic([](cd s) { return 1.0 / (s * s); }, 0.0);
    CHECK_FALSE(bad.passed);
    CHECK(bad.worst_ratio > 1e3);
}
