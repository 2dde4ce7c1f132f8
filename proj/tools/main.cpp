#include <CLI11.hpp>

#include <iostream>

#include "nlode/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"nlode: solve linear nonlocal ODEs f(d/dt) phi = J on t >= 0 "
                 "through Laplace-transform functional calculus"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    bool quiet = false;

    CLI::App* solve = app.add_subcommand(
        "solve", "solve the problem described by a configuration file");
    solve->add_option("--config", config_path, "configuration file")
        ->required();
    solve->add_option("--out-dir", out_dir, "directory for CSV and JSON outputs");
    solve->add_flag("--quiet", quiet, "suppress the summary line");

    CLI::App* verify = app.add_subcommand(
        "verify", "check a candidate solution's residual against the forcing");
    verify->add_option("--config", config_path, "configuration file")->required();
    verify->add_option("--out-dir", out_dir, "directory for the report");
    verify->add_flag("--quiet", quiet, "suppress the summary line");

    std::string invert_expr;
    double abscissa = 0.5;
    double half_height = 200.0;
    double step = 0.05;
    double t_start = 0.0;
    double t_end = 10.0;
    int n_points = 1001;
    CLI::App* invert = app.add_subcommand(
        "invert", "invert a Laplace transform along a Bromwich contour");
    invert->add_option("expr", invert_expr, "transform G(s)")->required();
    invert->add_option("--abscissa", abscissa, "contour abscissa");
    invert->add_option("--half-height", half_height, "contour half height");
    invert->add_option("--step", step, "contour step");
    invert->add_option("--t-start", t_start, "first output time");
    invert->add_option("--t-end", t_end, "last output time");
    invert->add_option("--n-points", n_points, "number of output times");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    nlode::RunOptions options{out_dir, quiet};
    if (solve->parsed())
        return nlode::run_solve(config_path, options, std::cout, std::cerr);
    if (verify->parsed())
        return nlode::run_verify(config_path, options, std::cout, std::cerr);
    try {
        nlode::ContourParams contour(abscissa, half_height, step);
        return nlode::run_invert(invert_expr, contour, t_start, t_end, n_points,
                                 std::cout, std::cerr);
    } catch (const nlode::Error& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
}
