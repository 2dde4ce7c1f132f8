#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nlode/errors.hpp"
#include "nlode/ivp.hpp"

namespace nlode {

/// One [[pole]] record from a run configuration.
struct PoleConfig {
    double re = 0.0;
    double im = 0.0;
    int order = 0;
};

/// Parsed run configuration. See docs/config-format.md for the file
/// syntax and the meaning of every field.
struct RunConfig {
    enum class Kind { Classical, Generalized, Invert };

    Kind kind = Kind::Classical;

    // [symbol]
    std::string symbol_text;
    double region_R = 10.0;
    double region_omega = 0.0;

    // [params]
    std::map<std::string, double> params;

    // [forcing]
    std::string forcing_expr;
    std::string forcing_csv;
    std::optional<double> forcing_growth;

    // [generalized]
    std::string generalized_r;

    // [[pole]] blocks and [classical] data
    std::vector<PoleConfig> poles;
    std::vector<double> initial_values;

    // [contour]
    double abscissa = 0.5;
    double half_height = 200.0;
    double step = 0.05;

    // [grid]
    double t_start = 0.0;
    double t_end = 10.0;
    int n_points = 1001;

    // [tolerances]
    Tolerances tolerances;

    // [verify]
    std::string verify_phi;
    int verify_n_trunc = 40;
    double verify_tolerance = 1e-6;

    // [invert]
    std::string invert_G;

    // [output]
    std::string solution_csv = "solution.csv";
    std::string report_json = "report.json";
    std::string verify_json = "verify.json";
};

/// Parses the sectioned key-value format. Unknown sections or keys,
/// malformed values, and missing required fields raise ConfigError
/// with the offending field path.
[[nodiscard]] RunConfig parse_config(std::istream& in);

/// Reads and parses a configuration file.
[[nodiscard]] RunConfig parse_config_file(const std::string& path);

}  // namespace nlode
