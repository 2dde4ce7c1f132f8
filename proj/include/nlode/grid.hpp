#pragma once

#include <complex>
#include <iosfwd>
#include <vector>

#include "nlode/errors.hpp"

namespace nlode {

/// A complex-valued function sampled on a strictly increasing grid of
/// nonnegative times.
struct GridFunction {
    std::vector<double> times;
    std::vector<std::complex<double>> values;

    GridFunction() = default;
    GridFunction(std::vector<double> t, std::vector<std::complex<double>> v);

    [[nodiscard]] std::size_t size() const noexcept { return times.size(); }

    /// Largest |value| over the grid.
    [[nodiscard]] double max_abs() const;

    /// Largest |Im value| over the grid.
    [[nodiscard]] double max_imag() const;
};

/// `n` equally spaced times covering [t_start, t_end].
[[nodiscard]] std::vector<double> make_times(double t_start, double t_end,
                                             std::size_t n);

/// Writes rows "t,re,im" with a header line. Numbers round-trip.
void write_csv(const GridFunction& grid, std::ostream& out);

/// Reads the format produced by write_csv. A missing header is
/// tolerated; malformed rows raise DomainError.
[[nodiscard]] GridFunction read_csv(std::istream& in);

}  // namespace nlode
