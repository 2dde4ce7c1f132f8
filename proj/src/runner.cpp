#include "nlode/runner.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "nlode/verify.hpp"

namespace nlode {

namespace {

using Complex = std::complex<double>;
using Json = nlohmann::ordered_json;

AnalyticExpr parse_bound(const std::string& text, const std::string& variable,
                         const std::map<std::string, double>& params,
                         const std::string& field) {
    AnalyticExpr e;
    try {
        e = parse_expr(text, variable);
    } catch (const ParseError& err) {
        throw ConfigError(field, err.what());
    }
    for (const auto& [name, value] : params) e = e.with_parameter(name, value);
    auto unbound = e.unbound_parameters();
    if (!unbound.empty())
        throw ConfigError(field, "parameter '" + *unbound.begin() +
                                     "' has no value under [params]");
    return e;
}

ForcingTerm build_forcing(const RunConfig& config) {
    if (!config.forcing_csv.empty()) {
        std::ifstream in(config.forcing_csv);
        if (!in)
            throw ConfigError("forcing.csv",
                              "cannot open '" + config.forcing_csv + "'");
        double growth = config.forcing_growth.value_or(0.0);
        return ForcingTerm::sampled(read_csv(in), growth);
    }
    if (config.forcing_expr.empty()) return ForcingTerm::zero();
    AnalyticExpr expr =
        parse_bound(config.forcing_expr, "t", config.params, "forcing.expr");
    if (config.forcing_growth)
        return ForcingTerm::closed_form(std::move(expr), *config.forcing_growth);
    return ForcingTerm::closed_form(std::move(expr));
}

Json complex_json(Complex v) {
    return Json{{"re", v.real()}, {"im", v.imag()}};
}

Json finite_or_null(double v) {
    if (std::isfinite(v)) return Json(v);
    return Json(nullptr);
}

Json widder_json(const WidderReport& w) {
    Json out;
    out["passed"] = w.passed;
    out["worst_ratio"] = finite_or_null(w.worst_ratio);
    out["worst_order"] = w.worst_order;
    out["bound"] = w.bound;
    return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("runner", "cannot write '" + path.string() + "'");
    out << bytes;
}

std::filesystem::path prepare_out_dir(const RunOptions& options) {
    std::filesystem::path dir(options.out_dir.empty() ? "." : options.out_dir);
    std::filesystem::create_directories(dir);
    return dir;
}

int run_solve_classical(const RunConfig& config, const RunOptions& options,
                        std::ostream& out) {
    IVPProblem problem;
    problem.f = parse_bound(config.symbol_text, "s", config.params, "symbol.f");
    problem.region = GammaRegion(config.region_R, config.region_omega);
    problem.forcing = build_forcing(config);
    for (const auto& pole : config.poles)
        problem.poles.emplace_back(Complex(pole.re, pole.im), pole.order);
    for (double v : config.initial_values) problem.initial_values.emplace_back(v);
    problem.contour = ContourParams(config.abscissa, config.half_height, config.step);
    problem.tolerances = config.tolerances;

    std::vector<double> times = make_times(config.t_start, config.t_end,
                                           static_cast<std::size_t>(config.n_points));
    IVPSolution solution = solve_classical_ivp(problem, times);
    GridFunction total = solution.total();

    std::ostringstream csv;
    write_csv(total, csv);

    Json report;
    report["kind"] = "classical";
    report["symbol"] = problem.f.text();
    report["poles"] = Json::array();
    for (const auto& part : solution.residue_parts)
        report["poles"].push_back(Json{{"re", part.pole.location.real()},
                                       {"im", part.pole.location.imag()},
                                       {"order", part.pole.order}});
    report["laurent"] = Json::array();
    for (const auto& part : solution.residue_parts) {
        Json coeffs = Json::array();
        for (const auto& a : part.coeffs) coeffs.push_back(complex_json(a));
        report["laurent"].push_back(coeffs);
    }
    report["r0"] = solution.r0.text();
    report["trace"] = Json::array();
    for (const auto& v : solution.derivative_trace)
        report["trace"].push_back(complex_json(v));
    Json diag;
    diag["p_hat"] = finite_or_null(solution.diagnostics.p_hat);
    diag["certified_order"] =
        problem.forcing.is_zero() ? Json(nullptr)
                                  : Json(solution.diagnostics.certified_order);
    diag["condition"] = solution.diagnostics.condition;
    diag["refinement_gap"] = solution.diagnostics.refinement_gap;
    diag["r0_identity_gap"] = finite_or_null(solution.diagnostics.r0_identity_gap);
    diag["widder"] = widder_json(solution.diagnostics.widder);
    diag["warnings"] = solution.diagnostics.warnings;
    report["diagnostics"] = diag;

    auto dir = prepare_out_dir(options);
    write_text_file(dir / config.solution_csv, csv.str());
    write_text_file(dir / config.report_json, report.dump(2) + "\n");
    if (!options.quiet)
        out << "wrote " << (dir / config.solution_csv).string() << " and "
            << (dir / config.report_json).string() << " ("
            << solution.diagnostics.warnings.size() << " warnings)\n";
    return 0;
}

int run_solve_generalized(const RunConfig& config, const RunOptions& options,
                          std::ostream& out) {
    AnalyticExpr f = parse_bound(config.symbol_text, "s", config.params, "symbol.f");
    GammaRegion region(config.region_R, config.region_omega);
    ForcingTerm forcing = build_forcing(config);
    GeneralizedIC ic{
        parse_bound(config.generalized_r, "s", config.params, "generalized.r")};
    ContourParams contour(config.abscissa, config.half_height, config.step);
    std::vector<double> times = make_times(config.t_start, config.t_end,
                                           static_cast<std::size_t>(config.n_points));

    GeneralizedSolution solution = solve_generalized(f, region, forcing, ic, contour,
                                                     times, config.tolerances);

    std::ostringstream csv;
    write_csv(solution.grid, csv);

    Json report;
    report["kind"] = "generalized";
    report["symbol"] = f.text();
    report["r"] = ic.r.text();
    Json diag;
    diag["refinement_gap"] = solution.refinement_gap;
    diag["converged"] = solution.converged;
    diag["widder"] = widder_json(solution.widder);
    diag["warnings"] = solution.warnings;
    report["diagnostics"] = diag;

    auto dir = prepare_out_dir(options);
    write_text_file(dir / config.solution_csv, csv.str());
    write_text_file(dir / config.report_json, report.dump(2) + "\n");
    if (!options.quiet)
        out << "wrote " << (dir / config.solution_csv).string() << " and "
            << (dir / config.report_json).string() << " ("
            << solution.warnings.size() << " warnings)\n";
    return 0;
}

int run_solve_invert(const RunConfig& config, const RunOptions& options,
                     std::ostream& out) {
    AnalyticExpr G = parse_bound(config.invert_G, "s", config.params, "invert.G");
    ContourParams contour(config.abscissa, config.half_height, config.step);
    std::vector<double> times = make_times(config.t_start, config.t_end,
                                           static_cast<std::size_t>(config.n_points));
    InversionResult inverted = bromwich_invert(
        [&G](Complex s) { return eval_expr(G, s); }, contour, times);

    std::ostringstream csv;
    write_csv(inverted.grid, csv);

    Json report;
    report["kind"] = "invert";
    report["expr"] = G.text();
    Json diag;
    diag["refinement_gap"] = inverted.refinement_gap;
    diag["converged"] = inverted.converged;
    diag["warnings"] = inverted.warnings;
    report["diagnostics"] = diag;

    auto dir = prepare_out_dir(options);
    write_text_file(dir / config.solution_csv, csv.str());
    write_text_file(dir / config.report_json, report.dump(2) + "\n");
    if (!options.quiet)
        out << "wrote " << (dir / config.solution_csv).string() << " and "
            << (dir / config.report_json).string() << "\n";
    return 0;
}

}  // namespace

int run_solve(const std::string& config_path, const RunOptions& options,
              std::ostream& out, std::ostream& err) {
    try {
        RunConfig config = parse_config_file(config_path);
        switch (config.kind) {
            case RunConfig::Kind::Classical:
                return run_solve_classical(config, options, out);
            case RunConfig::Kind::Generalized:
                return run_solve_generalized(config, options, out);
            case RunConfig::Kind::Invert:
                return run_solve_invert(config, options, out);
        }
        return 2;
    } catch (const ConfigError& e) {
        err << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        err << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "unexpected failure: " << e.what() << "\n";
        return 2;
    }
}

int run_verify(const std::string& config_path, const RunOptions& options,
               std::ostream& out, std::ostream& err) {
    try {
        RunConfig config = parse_config_file(config_path);
        AnalyticExpr f =
            parse_bound(config.symbol_text, "s", config.params, "symbol.f");
        ForcingTerm forcing = build_forcing(config);
        std::vector<double> times =
            make_times(config.t_start, config.t_end,
                       static_cast<std::size_t>(config.n_points));

        ResidualReport report;
        if (!config.verify_phi.empty()) {
            SmoothVector phi(
                parse_bound(config.verify_phi, "t", config.params, "verify.phi"));
            report = residual_norm(f, phi, forcing, times, config.verify_n_trunc);
        } else if (config.kind == RunConfig::Kind::Classical) {
            IVPProblem problem;
            problem.f = f;
            problem.region = GammaRegion(config.region_R, config.region_omega);
            problem.forcing = forcing;
            for (const auto& pole : config.poles)
                problem.poles.emplace_back(Complex(pole.re, pole.im), pole.order);
            for (double v : config.initial_values)
                problem.initial_values.emplace_back(v);
            problem.contour =
                ContourParams(config.abscissa, config.half_height, config.step);
            problem.tolerances = config.tolerances;
            IVPSolution solution = solve_classical_ivp(problem, times);
            report = residual_norm(f, solution, forcing, times, config.verify_n_trunc);
        } else {
            throw Unsupported("verify",
                              "this run produces a grid-valued solution with no "
                              "closed form; give [verify] phi to check a candidate");
        }

        bool passed = report.residual < config.verify_tolerance;
        Json doc;
        doc["residual"] = report.residual;
        doc["tolerance"] = config.verify_tolerance;
        doc["n_trunc"] = report.n_trunc;
        doc["tail"] = report.tail;
        doc["tail_warning"] = report.tail_warning;
        doc["passed"] = passed;
        doc["warnings"] = report.warnings;
        auto dir = prepare_out_dir(options);
        write_text_file(dir / config.verify_json, doc.dump(2) + "\n");
        if (!options.quiet)
            out << "residual " << report.residual << " against tolerance "
                << config.verify_tolerance << ": " << (passed ? "pass" : "fail")
                << "\n";
        return passed ? 0 : 2;
    } catch (const ConfigError& e) {
        err << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        err << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "unexpected failure: " << e.what() << "\n";
        return 2;
    }
}

int run_invert(const std::string& expr_text, const ContourParams& contour,
               double t_start, double t_end, int n_points, std::ostream& out,
               std::ostream& err) {
    AnalyticExpr G;
    try {
        G = parse_expr(expr_text, "s");
        auto unbound = G.unbound_parameters();
        if (!unbound.empty())
            throw ParseError(0, {},
                             "parameter '" + *unbound.begin() +
                                 "' has no value; inline the number");
    } catch (const ParseError& e) {
        err << e.what() << "\n";
        return 1;
    }
    try {
        std::vector<double> times =
            make_times(t_start, t_end, static_cast<std::size_t>(n_points));
        InversionResult inverted = bromwich_invert(
            [&G](Complex s) { return eval_expr(G, s); }, contour, times);
        for (const auto& warning : inverted.warnings) err << warning << "\n";
        write_csv(inverted.grid, out);
        return 0;
    } catch (const Error& e) {
        err << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "unexpected failure: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace nlode
