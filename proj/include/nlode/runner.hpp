#pragma once

#include <iosfwd>
#include <string>

#include "nlode/config.hpp"
#include "nlode/laplace.hpp"

namespace nlode {

struct RunOptions {
    std::string out_dir = ".";
    bool quiet = false;
};

/// Runs the solve described by the configuration file and writes the
/// solution CSV and the JSON report into the output directory.
/// Returns 0 on success, 1 for configuration problems, 2 for solver
/// failures. Output bytes depend only on the inputs.
int run_solve(const std::string& config_path, const RunOptions& options,
              std::ostream& out, std::ostream& err);

/// Checks a candidate solution's residual against the forcing term and
/// writes a verification report. Returns 0 when the residual is below
/// the configured tolerance, 1 for configuration problems, 2 when the
/// check fails or cannot be performed.
int run_verify(const std::string& config_path, const RunOptions& options,
               std::ostream& out, std::ostream& err);

/// Inverts a transform given directly on the command line, writing CSV
/// to `out`. Returns 0, 1 for unparsable expressions, 2 for solver
/// failures.
int run_invert(const std::string& expr_text, const ContourParams& contour,
               double t_start, double t_end, int n_points, std::ostream& out,
               std::ostream& err);

}  // namespace nlode
