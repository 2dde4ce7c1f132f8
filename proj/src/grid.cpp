#include "nlode/grid.hpp"

#include <cmath>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "nlode/detail/format.hpp"

namespace nlode {

namespace detail {

std::string format_double(double v) {
    for (int prec = 15; prec <= 17; ++prec) {
        std::ostringstream os;
        os.precision(prec);
        os << v;
        if (std::strtod(os.str().c_str(), nullptr) == v) return os.str();
    }
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace detail

GridFunction::GridFunction(std::vector<double> t, std::vector<std::complex<double>> v)
    : times(std::move(t)), values(std::move(v)) {
    if (times.size() != values.size())
        throw ShapeMismatch("grid", "times and values differ in length");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!std::isfinite(times[i]) || times[i] < 0.0)
            throw DomainError("grid", "times must be finite and nonnegative");
        if (i > 0 && !(times[i] > times[i - 1]))
            throw DomainError("grid", "times must be strictly increasing");
        if (!std::isfinite(values[i].real()) || !std::isfinite(values[i].imag()))
            throw DomainError("grid", "values must be finite");
    }
}

double GridFunction::max_abs() const {
    double m = 0.0;
    for (const auto& v : values) m = std::max(m, std::abs(v));
    return m;
}

double GridFunction::max_imag() const {
    double m = 0.0;
    for (const auto& v : values) m = std::max(m, std::abs(v.imag()));
    return m;
}

std::vector<double> make_times(double t_start, double t_end, std::size_t n) {
    if (n < 2) throw DomainError("grid", "a grid needs at least two points");
    if (!(t_end > t_start))
        throw DomainError("grid", "grid end must exceed grid start");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = t_start + (t_end - t_start) * static_cast<double>(i) /
                               static_cast<double>(n - 1);
    return out;
}

void write_csv(const GridFunction& grid, std::ostream& out) {
    out << "t,re,im\n";
    for (std::size_t i = 0; i < grid.size(); ++i)
        out << detail::format_double(grid.times[i]) << ','
            << detail::format_double(grid.values[i].real()) << ','
            << detail::format_double(grid.values[i].imag()) << '\n';
}

GridFunction read_csv(std::istream& in) {
    std::vector<double> times;
    std::vector<std::complex<double>> values;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (lineno == 1 && line.rfind("t,", 0) == 0) continue;
        std::istringstream row(line);
        std::string cell;
        double fields[3];
        for (int k = 0; k < 3; ++k) {
            if (!std::getline(row, cell, ','))
                throw DomainError("grid", "row " + std::to_string(lineno) +
                                              " has fewer than three columns");
            char* end = nullptr;
            fields[k] = std::strtod(cell.c_str(), &end);
            while (end && *end == ' ') ++end;
            if (!end || *end != '\0')
                throw DomainError("grid", "row " + std::to_string(lineno) +
                                              " holds a malformed number");
        }
        times.push_back(fields[0]);
        values.emplace_back(fields[1], fields[2]);
    }
    return GridFunction(std::move(times), std::move(values));
}

}  // namespace nlode
