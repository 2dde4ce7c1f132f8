#pragma once

// Reference implementations used only by the tests. Everything here is
// deliberately independent of the library under test: plain Runge-Kutta
// time stepping, Taylor recursion straight from the ODE, and closed
// forms, so that agreement between the two sides means something.

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracle {

/// Solves c[N] phi^(N) + ... + c[1] phi' + c[0] phi = J(t) as a first
/// order companion system with classic fourth order Runge-Kutta.
/// `init` holds phi(0)..phi^(N-1)(0). Values are reported at `times`,
/// which must start at 0 and increase; each interval is integrated with
/// `substeps` equal steps, so the grid points are hit exactly.
inline std::vector<double> rk4_linear_ode(const std::vector<double>& c,
                                          const std::function<double(double)>& J,
                                          const std::vector<double>& init,
                                          const std::vector<double>& times,
                                          int substeps) {
    const std::size_t N = init.size();
    if (c.size() != N + 1 || c[N] == 0.0)
        throw std::invalid_argument("rk4_linear_ode: bad coefficient list");
    if (times.empty() || times.front() != 0.0)
        throw std::invalid_argument("rk4_linear_ode: times must start at 0");

    auto deriv = [&](double t, const std::vector<double>& y) {
        std::vector<double> dy(N);
        for (std::size_t k = 0; k + 1 < N; ++k) dy[k] = y[k + 1];
        double top = J(t);
        for (std::size_t k = 0; k < N; ++k) top -= c[k] * y[k];
        dy[N - 1] = top / c[N];
        return dy;
    };

    std::vector<double> y = init;
    std::vector<double> out;
    out.reserve(times.size());
    out.push_back(y[0]);
    for (std::size_t i = 0; i + 1 < times.size(); ++i) {
        const double h = (times[i + 1] - times[i]) / substeps;
        double t = times[i];
        for (int step = 0; step < substeps; ++step) {
            auto k1 = deriv(t, y);
            std::vector<double> y2(N), y3(N), y4(N);
            for (std::size_t k = 0; k < N; ++k) y2[k] = y[k] + 0.5 * h * k1[k];
            auto k2 = deriv(t + 0.5 * h, y2);
            for (std::size_t k = 0; k < N; ++k) y3[k] = y[k] + 0.5 * h * k2[k];
            auto k3 = deriv(t + 0.5 * h, y3);
            for (std::size_t k = 0; k < N; ++k) y4[k] = y[k] + h * k3[k];
            auto k4 = deriv(t + h, y4);
            for (std::size_t k = 0; k < N; ++k)
                y[k] += h / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
            t = times[i] + (step + 1) * h;
        }
        out.push_back(y[0]);
    }
    return out;
}

/// Taylor recursion for the same ODE: differentiating the equation j
/// times and evaluating at 0 gives
///   phi^(N+j)(0) = (J^(j)(0) - sum_{k<N} c[k] phi^(k+j)(0)) / c[N].
/// `j_derivs` holds J(0), J'(0), ...; entries beyond it are zero.
/// Returns phi^(n)(0) for n = 0..n_max.
inline std::vector<std::complex<double>> taylor_trace(
    const std::vector<double>& c, const std::vector<std::complex<double>>& j_derivs,
    const std::vector<std::complex<double>>& init, int n_max) {
    const std::size_t N = init.size();
    if (c.size() != N + 1 || c[N] == 0.0)
        throw std::invalid_argument("taylor_trace: bad coefficient list");
    std::vector<std::complex<double>> phi = init;
    for (std::size_t j = 0; phi.size() <= static_cast<std::size_t>(n_max); ++j) {
        std::complex<double> top =
            j < j_derivs.size() ? j_derivs[j] : std::complex<double>(0.0);
        for (std::size_t k = 0; k < N; ++k) top -= c[k] * phi[k + j];
        phi.push_back(top / c[N]);
    }
    phi.resize(static_cast<std::size_t>(n_max) + 1);
    return phi;
}

/// The square wave L^-1(2 / (s (1 + e^s))): zero on [2n, 2n+1) and two
/// on [2n+1, 2n+2).
inline double square_wave(double t) {
    return static_cast<long long>(std::floor(t)) % 2 != 0 ? 2.0 : 0.0;
}

/// Distance from t to the nearest integer, where the wave jumps.
inline double jump_distance(double t) {
    return std::abs(t - std::round(t));
}

}  // namespace oracle
