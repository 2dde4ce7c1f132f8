#include "nlode/verify.hpp"

#include <cmath>
#include <sstream>

namespace nlode {

namespace {

using Complex = std::complex<double>;

/// Closed-form expression for the residue part of a solution,
/// sum over poles of P(t) e^(omega t).
AnalyticExpr residue_expression(const std::vector<ResiduePolynomial>& parts) {
    AnalyticExpr t = make_variable("t");
    AnalyticExpr total = make_constant(0.0, "t");
    for (const auto& part : parts) {
        AnalyticExpr poly = make_constant(0.0, "t");
        double factorial = 1.0;
        for (std::size_t k = 0; k < part.coeffs.size(); ++k) {
            if (k > 0) factorial *= static_cast<double>(k);
            poly = poly + make_constant(part.coeffs[k] / factorial, "t") *
                              pow_int(t, static_cast<int>(k));
        }
        total = total + poly * exp_of(make_constant(part.pole.location, "t") * t);
    }
    return total;
}

}  // namespace

RemainderSeries remainder_series(std::vector<std::complex<double>> d, double C,
                                 double R) {
    if (!(C > 0.0) || !(R > 0.0))
        throw DomainError("verify", "growth certificate constants must be positive");
    double bound = C;
    for (std::size_t j = 0; j < d.size(); ++j) {
        if (std::abs(d[j]) > bound * (1.0 + 1e-12))
            throw DomainError("verify",
                              "derivative data violates the declared growth "
                              "certificate at index " + std::to_string(j));
        bound *= R;
    }
    return RemainderSeries{std::move(d), C, R};
}

SeriesValue build_remainder_series(const AnalyticExpr& f, const RemainderSeries& data,
                                   std::complex<double> s, int n_trunc,
                                   double taylor_radius) {
    if (n_trunc < 1) throw DomainError("verify", "series needs at least one term");
    std::vector<Complex> c = taylor_coeffs(f, n_trunc, taylor_radius);

    SeriesValue out;
    Complex sum = 0.0;
    // Inner weights w_n = sum_j d_(j-1) s^(n-j) obey w_n = s w_(n-1) + d_(n-1).
    Complex w = 0.0;
    int quiet = 0;
    int growing = 0;
    double prev_increment = 0.0;
    for (int n = 1; n <= n_trunc; ++n) {
        Complex d_prev = static_cast<std::size_t>(n - 1) < data.d.size()
                             ? data.d[static_cast<std::size_t>(n - 1)]
                             : Complex(0.0);
        w = s * w + d_prev;
        Complex block = c[static_cast<std::size_t>(n)] * w;
        // Growth is judged against the sum before this block lands;
        // otherwise a dominating block hides inside its own total.
        double before = std::abs(sum);
        sum += block;
        out.terms_used = n;
        double increment = std::abs(block);
        out.last_increment = increment;

        if (increment <= 1e-12 * (1.0 + std::abs(sum)))
            ++quiet;
        else
            quiet = 0;
        if (n > 1 && increment > prev_increment && increment > 1.0 + before) {
            if (++growing >= 10)
                throw DivergenceDetected(
                    "remainder series grew for ten consecutive orders; the "
                    "derivative data is outside the symbol's reach");
        } else {
            growing = 0;
        }
        prev_increment = increment;
        if (!std::isfinite(sum.real()) || !std::isfinite(sum.imag()))
            throw DivergenceDetected("remainder series overflowed");
    }
    out.converged = quiet >= 3;
    out.value = sum;
    return out;
}

SmoothVector::SmoothVector(AnalyticExpr expr_in_t) : expr_(std::move(expr_in_t)) {
    if (expr_.variable() != "t")
        throw DomainError("verify", "candidate solutions use the variable 't'");
    derivatives_.push_back(expr_);
}

const AnalyticExpr& SmoothVector::derivative(int n) const {
    if (n < 0) throw DomainError("verify", "derivative order must be nonnegative");
    while (derivatives_.size() <= static_cast<std::size_t>(n))
        derivatives_.push_back(diff_expr(derivatives_.back()));
    return derivatives_[static_cast<std::size_t>(n)];
}

ApplyResult apply_symbol(const AnalyticExpr& f, const SmoothVector& phi,
                         const std::vector<double>& times, int n_trunc,
                         double taylor_radius) {
    if (n_trunc < 0) throw DomainError("verify", "truncation order must be nonnegative");
    std::vector<Complex> c = taylor_coeffs(f, n_trunc, taylor_radius);

    std::vector<Complex> values(times.size(), Complex(0.0));
    ApplyResult out;
    for (int n = 0; n <= n_trunc; ++n) {
        Complex cn = c[static_cast<std::size_t>(n)];
        double order_sup = 0.0;
        const AnalyticExpr& der = phi.derivative(n);
        for (std::size_t i = 0; i < times.size(); ++i) {
            Complex term = cn * eval_expr(der, Complex(times[i]));
            values[i] += term;
            order_sup = std::max(order_sup, std::abs(term));
        }
        if (n > n_trunc - 3) out.tail = std::max(out.tail, order_sup);
    }
    out.tail_warning = out.tail > 1e-12;
    out.grid = GridFunction(times, std::move(values));
    return out;
}

ResidualReport residual_norm(const AnalyticExpr& f, const SmoothVector& phi,
                             const ForcingTerm& J, const std::vector<double>& times,
                             int n_trunc) {
    ApplyResult applied = apply_symbol(f, phi, times, n_trunc);
    ResidualReport out;
    out.n_trunc = n_trunc;
    out.tail = applied.tail;
    out.tail_warning = applied.tail_warning;
    if (applied.tail_warning) {
        std::ostringstream os;
        os << "truncation tail " << applied.tail
           << " has not vanished at order " << n_trunc;
        out.warnings.push_back(os.str());
    }
    for (std::size_t i = 0; i < times.size(); ++i)
        out.residual = std::max(out.residual, std::abs(applied.grid.values[i] -
                                                       J.value_at(times[i])));
    return out;
}

ResidualReport residual_norm(const AnalyticExpr& f, const IVPSolution& solution,
                             const ForcingTerm& J, const std::vector<double>& times,
                             int n_trunc) {
    if (solution.bromwich_part.max_abs() > 1e-12)
        throw Unsupported("verify",
                          "solution carries a nonvanishing quadrature part; the "
                          "symbolic residual needs a fully closed-form solution");
    SmoothVector phi(residue_expression(solution.residue_parts));
    return residual_norm(f, phi, J, times, n_trunc);
}

}  // namespace nlode
