#include "nlode/series.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace nlode {

namespace {

using Complex = std::complex<double>;

std::string describe_point(Complex s) {
    std::ostringstream os;
    os.precision(6);
    os << s.real();
    if (s.imag() != 0.0) os << (s.imag() < 0 ? " - " : " + ") << std::abs(s.imag()) << "i";
    return os.str();
}

std::vector<Complex> coeffs_by_quadrature(const AnalyticExpr& expr, int n_max,
                                          double radius) {
    const std::size_t N = std::max<std::size_t>(64, 4 * static_cast<std::size_t>(n_max));
    std::vector<Complex> samples(N);
    for (std::size_t j = 0; j < N; ++j) {
        double theta = 2.0 * std::numbers::pi * static_cast<double>(j) /
                       static_cast<double>(N);
        samples[j] = eval_expr(expr, Complex(radius * std::cos(theta),
                                             radius * std::sin(theta)));
    }
    std::vector<Complex> out(static_cast<std::size_t>(n_max) + 1);
    double rho_n = 1.0;
    for (int n = 0; n <= n_max; ++n) {
        Complex acc = 0.0;
        for (std::size_t j = 0; j < N; ++j) {
            double phase = -2.0 * std::numbers::pi * static_cast<double>(n) *
                           static_cast<double>(j) / static_cast<double>(N);
            acc += samples[j] * Complex(std::cos(phase), std::sin(phase));
        }
        out[static_cast<std::size_t>(n)] = acc / (static_cast<double>(N) * rho_n);
        rho_n *= radius;
    }
    return out;
}

}  // namespace

RegionCheck spot_check_region(const AnalyticExpr& f, const GammaRegion& region) {
    auto probe = [&](Complex s) -> RegionCheck {
        try {
            (void)eval_expr(f, s);
        } catch (const EvalError& e) {
            return {false, std::string("symbol evaluation failed at s = ") +
                               describe_point(s) + ": " + e.what()};
        }
        return {};
    };

    const double circle_radius = 0.9 * region.R;
    for (int j = 0; j < 32; ++j) {
        double theta = 2.0 * std::numbers::pi * j / 32.0;
        RegionCheck c = probe(Complex(circle_radius * std::cos(theta),
                                      circle_radius * std::sin(theta)));
        if (!c.ok) return c;
    }

    const double x = region.omega + 0.05 * (region.R - region.omega);
    const double span = 2.0 * std::max(region.R, std::abs(region.omega) + 1.0);
    for (int j = 0; j <= 32; ++j) {
        double y = -span + 2.0 * span * j / 32.0;
        RegionCheck c = probe(Complex(x, y));
        if (!c.ok) return c;
    }
    return {};
}

std::vector<std::complex<double>> taylor_coeffs(const AnalyticExpr& expr, int n_max,
                                                double radius,
                                                std::size_t node_budget) {
    if (n_max < 0) throw DomainError("series", "coefficient order must be nonnegative");
    if (!(radius > 0.0)) throw DomainError("series", "circle radius must be positive");

    // Symbolic route first. Two things push us to quadrature: the
    // derivative graph outgrowing the budget, and expressions whose
    // written form cannot be evaluated at the center.
    try {
        std::vector<Complex> out;
        out.reserve(static_cast<std::size_t>(n_max) + 1);
        AnalyticExpr der = expr;
        double factorial = 1.0;
        for (int n = 0; n <= n_max; ++n) {
            if (n > 0) {
                der = diff_expr(der);
                factorial *= n;
                if (der.node_count() > node_budget)
                    return coeffs_by_quadrature(expr, n_max, radius);
            }
            out.push_back(eval_expr(der, Complex(0.0)) / factorial);
        }
        return out;
    } catch (const EvalError&) {
        return coeffs_by_quadrature(expr, n_max, radius);
    }
}

std::complex<double> find_zero(const AnalyticExpr& f, std::complex<double> seed,
                               double tol) {
    if (!(tol > 0.0)) throw DomainError("series", "tolerance must be positive");
    const AnalyticExpr fp = diff_expr(f);
    const int max_iterations = 100;
    const double step_scale = std::max(1e-8, std::sqrt(tol));

    Complex z = seed;
    for (int k = 0; k < max_iterations; ++k) {
        Complex value, slope;
        try {
            value = eval_expr(f, z);
            slope = eval_expr(fp, z);
        } catch (const EvalError&) {
            throw NoConvergence(z, k);
        }
        if (slope == 0.0) throw NoConvergence(z, k);
        Complex step = value / slope;
        z -= step;
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw NoConvergence(z, k);
        double residual;
        try {
            residual = std::abs(eval_expr(f, z));
        } catch (const EvalError&) {
            throw NoConvergence(z, k);
        }
        if (residual <= tol && std::abs(step) <= step_scale * (1.0 + std::abs(z)))
            return z;
    }
    throw NoConvergence(z, max_iterations);
}

}  // namespace nlode
