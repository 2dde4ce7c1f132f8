#pragma once

#include <complex>
#include <string>
#include <vector>

#include "nlode/expr.hpp"
#include "nlode/grid.hpp"
#include "nlode/ivp.hpp"
#include "nlode/laplace.hpp"

namespace nlode {

/// Derivative data d_j = phi^(j)(0) with a growth certificate
/// |d_j| <= C R^j. R < 1 guarantees the remainder series converges for
/// every symbol in the class; larger R still works whenever the series
/// terminates or the symbol's coefficients decay fast enough.
struct RemainderSeries {
    std::vector<std::complex<double>> d;
    double C = 1.0;
    double R = 1.0;

    [[nodiscard]] bool guaranteed() const noexcept { return R < 1.0; }
};

/// Validating constructor: the certificate must hold on the prefix.
[[nodiscard]] RemainderSeries remainder_series(std::vector<std::complex<double>> d,
                                               double C, double R);

struct SeriesValue {
    std::complex<double> value;
    bool converged = false;
    int terms_used = 0;
    double last_increment = 0.0;
};

/// Evaluates r_d(s) = sum over n >= 1 of c_n sum over j = 1..n of
/// d_(j-1) s^(n-j), with c_n the Taylor coefficients of f at zero.
/// Derivative data beyond the stored prefix is treated as zero.
/// Sustained growth of the partial sums raises DivergenceDetected.
[[nodiscard]] SeriesValue build_remainder_series(const AnalyticExpr& f,
                                                 const RemainderSeries& data,
                                                 std::complex<double> s, int n_trunc,
                                                 double taylor_radius = 1.0);

/// A smooth closed-form candidate solution phi(t) whose derivatives
/// are taken symbolically on demand.
class SmoothVector {
public:
    explicit SmoothVector(AnalyticExpr expr_in_t);

    [[nodiscard]] const AnalyticExpr& expr() const noexcept { return expr_; }

    /// d^n phi / dt^n, cached across calls.
    [[nodiscard]] const AnalyticExpr& derivative(int n) const;

private:
    AnalyticExpr expr_;
    mutable std::vector<AnalyticExpr> derivatives_;
};

struct ApplyResult {
    GridFunction grid;
    /// Sup over the grid of |c_n phi^(n)(t)| at the last three orders.
    double tail = 0.0;
    bool tail_warning = false;
};

/// f(d/dt) phi truncated at n_trunc: sum of c_n phi^(n)(t). The tail
/// gauge watches the last three retained orders; exceeding 1e-12 sets
/// the warning flag.
[[nodiscard]] ApplyResult apply_symbol(const AnalyticExpr& f, const SmoothVector& phi,
                                       const std::vector<double>& times,
                                       int n_trunc = 40, double taylor_radius = 1.0);

struct ResidualReport {
    /// Sup over the grid of |f(d/dt) phi - J|.
    double residual = 0.0;
    int n_trunc = 0;
    double tail = 0.0;
    bool tail_warning = false;
    std::vector<std::string> warnings;
};

/// Residual of a closed-form candidate against the forcing term.
[[nodiscard]] ResidualReport residual_norm(const AnalyticExpr& f,
                                           const SmoothVector& phi,
                                           const ForcingTerm& J,
                                           const std::vector<double>& times,
                                           int n_trunc = 40);

/// Residual of a solved problem. Works only when the solution is fully
/// closed form, meaning its quadrature part vanishes; otherwise raises
/// Unsupported.
[[nodiscard]] ResidualReport residual_norm(const AnalyticExpr& f,
                                           const IVPSolution& solution,
                                           const ForcingTerm& J,
                                           const std::vector<double>& times,
                                           int n_trunc = 40);

}  // namespace nlode
