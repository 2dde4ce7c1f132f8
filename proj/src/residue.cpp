#include "nlode/residue.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace nlode {

namespace {

using Complex = std::complex<double>;

constexpr double kPi = std::numbers::pi;

/// Moments m_k = radius^k * mean_j g(pole + radius e^(i theta_j)) e^(i k theta_j),
/// which equal the Laurent coefficients a_k of the principal part.
std::vector<Complex> circle_moments(const AnalyticExpr& r, const AnalyticExpr& f,
                                    Complex pole, double radius, std::size_t nodes,
                                    int k_max) {
    std::vector<Complex> g(nodes);
    for (std::size_t j = 0; j < nodes; ++j) {
        double theta = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(nodes);
        Complex z = pole + Complex(radius * std::cos(theta), radius * std::sin(theta));
        Complex den = eval_expr(f, z);
        if (den == 0.0)
            throw EvalError(EvalError::Kind::DivisionByZero, z,
                            "symbol vanishes on the Laurent circle");
        g[j] = eval_expr(r, z) / den;
    }
    std::vector<Complex> out(static_cast<std::size_t>(k_max) + 1);
    double rk = 1.0;
    for (int k = 0; k <= k_max; ++k) {
        Complex acc = 0.0;
        for (std::size_t j = 0; j < nodes; ++j) {
            double phase = 2.0 * kPi * static_cast<double>(k) *
                           static_cast<double>(j) / static_cast<double>(nodes);
            acc += g[j] * Complex(std::cos(phase), std::sin(phase));
        }
        out[static_cast<std::size_t>(k)] = acc * rk / static_cast<double>(nodes);
        rk *= radius;
    }
    return out;
}

}  // namespace

std::complex<double> ResiduePolynomial::polynomial_at(double t) const {
    Complex acc = 0.0;
    double weight = 1.0;  // t^(k-1)/(k-1)!
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        acc += coeffs[k] * weight;
        weight *= t / static_cast<double>(k + 1);
    }
    return acc;
}

std::complex<double> ResiduePolynomial::term_at(double t) const {
    return polynomial_at(t) * std::exp(pole.location * t);
}

std::complex<double> ResiduePolynomial::derivative_at_zero(int m) const {
    if (m < 0) throw DomainError("residue", "derivative order must be nonnegative");
    if (static_cast<std::size_t>(m) >= coeffs.size()) return 0.0;
    return coeffs[static_cast<std::size_t>(m)];
}

ResiduePolynomial residue_polynomial(const PoleSpec& pole,
                                     std::vector<std::complex<double>> coeffs) {
    if (coeffs.size() != static_cast<std::size_t>(pole.order))
        throw ShapeMismatch("residue",
                            "coefficient count must equal the pole order");
    return ResiduePolynomial{pole, std::move(coeffs)};
}

double default_laurent_radius(const PoleSpec& pole, const std::vector<PoleSpec>& others,
                              double abscissa) {
    double line = abscissa - pole.location.real();
    if (!(line > 0.0))
        throw DomainError("residue", "pole must lie strictly left of the contour");
    double nearest = line;
    for (const auto& other : others) {
        double d = std::abs(other.location - pole.location);
        if (d == 0.0) continue;
        nearest = std::min(nearest, d);
    }
    return 0.5 * nearest;
}

std::vector<std::complex<double>> laurent_coeffs(const AnalyticExpr& r,
                                                 const AnalyticExpr& f,
                                                 const PoleSpec& pole, double radius,
                                                 std::size_t nodes,
                                                 double residual_tol) {
    if (!(radius > 0.0)) throw DomainError("residue", "radius must be positive");
    if (nodes < 256) nodes = 256;

    const int probe = pole.order + 1;
    std::vector<Complex> full =
        circle_moments(r, f, pole.location, radius, nodes, probe);
    std::vector<Complex> half =
        circle_moments(r, f, pole.location, 0.5 * radius, nodes, probe);

    double scale = 1.0;
    for (int k = 1; k <= pole.order; ++k)
        scale = std::max(scale, std::abs(full[static_cast<std::size_t>(k)]));

    double residual = 0.0;
    for (int k = 1; k <= probe; ++k) {
        Complex expected = k <= pole.order ? full[static_cast<std::size_t>(k)]
                                           : Complex(0.0);
        residual = std::max(residual,
                            std::abs(half[static_cast<std::size_t>(k)] - expected));
    }
    if (residual > residual_tol * scale) {
        std::ostringstream os;
        os << "Laurent moments disagree between radii (residual " << residual
           << "); the declared order or the circle radius is wrong";
        throw IllConditioned(residual, os.str());
    }

    std::vector<Complex> out(static_cast<std::size_t>(pole.order));
    for (int k = 1; k <= pole.order; ++k)
        out[static_cast<std::size_t>(k - 1)] = full[static_cast<std::size_t>(k)];
    return out;
}

GridFunction residue_sum(const std::vector<ResiduePolynomial>& parts,
                         const std::vector<double>& times) {
    for (std::size_t i = 0; i < parts.size(); ++i)
        for (std::size_t j = i + 1; j < parts.size(); ++j)
            if (parts[i].pole.location == parts[j].pole.location)
                throw DomainError("residue", "pole locations must be distinct");
    std::vector<Complex> values(times.size(), Complex(0.0));
    for (const auto& part : parts)
        for (std::size_t i = 0; i < times.size(); ++i)
            values[i] += part.term_at(times[i]);
    return GridFunction(times, std::move(values));
}

TruncatedPoleSum truncated_pole_sum(const PoleFamily& family, int count,
                                    const std::vector<double>& times) {
    if (count < 1) throw DomainError("residue", "term count must be at least 1");
    if (!family.generator) throw DomainError("residue", "family has no generator");

    std::vector<Complex> values(times.size(), Complex(0.0));
    std::vector<Complex> last(times.size(), Complex(0.0));
    double prev_modulus = 0.0;
    for (int n = 0; n < count; ++n) {
        ResiduePolynomial part = family.generator(n);
        double modulus = std::abs(part.pole.location);
        if (n > 0 && modulus < prev_modulus - 1e-9 * (1.0 + prev_modulus))
            throw DomainError(
                "residue", "pole family must be enumerated in nondecreasing modulus");
        prev_modulus = modulus;
        for (std::size_t i = 0; i < times.size(); ++i) {
            last[i] = part.term_at(times[i]);
            values[i] += last[i];
        }
    }
    double tail = 0.0;
    for (const auto& v : last) tail = std::max(tail, std::abs(v));

    TruncatedPoleSum out;
    out.grid = GridFunction(times, std::move(values));
    out.report.last_term_inf = tail;
    out.report.caveat =
        "partial residue sum: assumes the arc contributions vanish and the "
        "series converges; the limit may fail to be differentiable, so this "
        "is a formal solution candidate";
    return out;
}

}  // namespace nlode
