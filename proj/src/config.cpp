#include "nlode/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace nlode {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string strip_comment(const std::string& line) {
    std::size_t pos = line.find('#');
    return pos == std::string::npos ? line : line.substr(0, pos);
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
        return s.substr(1, s.size() - 2);
    return s;
}

double parse_number(const std::string& field, const std::string& value) {
    char* end = nullptr;
    double v = std::strtod(value.c_str(), &end);
    if (!end || end == value.c_str() || *end != '\0')
        throw ConfigError(field, "expected a number, got '" + value + "'");
    return v;
}

int parse_integer(const std::string& field, const std::string& value) {
    double v = parse_number(field, value);
    auto i = static_cast<long>(v);
    if (static_cast<double>(i) != v)
        throw ConfigError(field, "expected an integer, got '" + value + "'");
    return static_cast<int>(i);
}

std::vector<double> parse_number_list(const std::string& field,
                                      const std::string& value) {
    std::vector<double> out;
    std::istringstream cells(value);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
        cell = trim(cell);
        if (cell.empty())
            throw ConfigError(field, "empty entry in number list");
        out.push_back(parse_number(field, cell));
    }
    return out;
}

/// Per-pole record builder; tracks which fields a [[pole]] block set
/// so the validator can name what is missing.
struct PoleDraft {
    std::optional<double> re;
    std::optional<double> im;
    std::optional<int> order;
};

}  // namespace

RunConfig parse_config(std::istream& in) {
    RunConfig config;
    std::vector<PoleDraft> poles;
    bool kind_seen = false;

    std::string section;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string text = trim(strip_comment(line));
        if (text.empty()) continue;

        if (text == "[[pole]]") {
            section = "pole";
            poles.emplace_back();
            continue;
        }
        if (text.front() == '[' && text.back() == ']') {
            section = text.substr(1, text.size() - 2);
            if (section != "symbol" && section != "params" && section != "forcing" &&
                section != "generalized" && section != "classical" &&
                section != "contour" && section != "grid" && section != "tolerances" &&
                section != "verify" && section != "invert" && section != "output")
                throw ConfigError(section, "unknown section on line " +
                                               std::to_string(lineno));
            continue;
        }

        std::size_t eq = text.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno),
                              "expected 'key = value'");
        std::string key = trim(text.substr(0, eq));
        std::string value = unquote(trim(text.substr(eq + 1)));
        if (key.empty())
            throw ConfigError("line " + std::to_string(lineno), "missing key");

        if (section.empty()) {
            if (key == "kind") {
                kind_seen = true;
                if (value == "classical")
                    config.kind = RunConfig::Kind::Classical;
                else if (value == "generalized")
                    config.kind = RunConfig::Kind::Generalized;
                else if (value == "invert")
                    config.kind = RunConfig::Kind::Invert;
                else
                    throw ConfigError(
                        "kind", "must be classical, generalized, or invert; got '" +
                                    value + "'");
            } else {
                throw ConfigError(key, "unknown top-level key");
            }
        } else if (section == "pole") {
            std::string field =
                "pole[" + std::to_string(poles.size() - 1) + "]." + key;
            if (key == "re")
                poles.back().re = parse_number(field, value);
            else if (key == "im")
                poles.back().im = parse_number(field, value);
            else if (key == "order")
                poles.back().order = parse_integer(field, value);
            else
                throw ConfigError(field, "unknown pole field");
        } else if (section == "symbol") {
            if (key == "f")
                config.symbol_text = value;
            else if (key == "R")
                config.region_R = parse_number("symbol.R", value);
            else if (key == "omega")
                config.region_omega = parse_number("symbol.omega", value);
            else
                throw ConfigError("symbol." + key, "unknown symbol field");
        } else if (section == "params") {
            config.params[key] = parse_number("params." + key, value);
        } else if (section == "forcing") {
            if (key == "expr")
                config.forcing_expr = value;
            else if (key == "csv")
                config.forcing_csv = value;
            else if (key == "growth")
                config.forcing_growth = parse_number("forcing.growth", value);
            else
                throw ConfigError("forcing." + key, "unknown forcing field");
        } else if (section == "generalized") {
            if (key == "r")
                config.generalized_r = value;
            else
                throw ConfigError("generalized." + key, "unknown field");
        } else if (section == "classical") {
            if (key == "initial_values")
                config.initial_values =
                    parse_number_list("classical.initial_values", value);
            else
                throw ConfigError("classical." + key, "unknown field");
        } else if (section == "contour") {
            if (key == "abscissa")
                config.abscissa = parse_number("contour.abscissa", value);
            else if (key == "half_height")
                config.half_height = parse_number("contour.half_height", value);
            else if (key == "step")
                config.step = parse_number("contour.step", value);
            else
                throw ConfigError("contour." + key, "unknown contour field");
        } else if (section == "grid") {
            if (key == "t_start")
                config.t_start = parse_number("grid.t_start", value);
            else if (key == "t_end")
                config.t_end = parse_number("grid.t_end", value);
            else if (key == "n_points")
                config.n_points = parse_integer("grid.n_points", value);
            else
                throw ConfigError("grid." + key, "unknown grid field");
        } else if (section == "tolerances") {
            if (key == "inversion_check")
                config.tolerances.inversion_check =
                    parse_number("tolerances.inversion_check", value);
            else if (key == "laurent_residual")
                config.tolerances.laurent_residual =
                    parse_number("tolerances.laurent_residual", value);
            else if (key == "rank")
                config.tolerances.rank = parse_number("tolerances.rank", value);
            else if (key == "identity_check")
                config.tolerances.identity_check =
                    parse_number("tolerances.identity_check", value);
            else if (key == "widder_bound")
                config.tolerances.widder_bound =
                    parse_number("tolerances.widder_bound", value);
            else
                throw ConfigError("tolerances." + key, "unknown tolerance");
        } else if (section == "verify") {
            if (key == "phi")
                config.verify_phi = value;
            else if (key == "n_trunc")
                config.verify_n_trunc = parse_integer("verify.n_trunc", value);
            else if (key == "tolerance")
                config.verify_tolerance = parse_number("verify.tolerance", value);
            else
                throw ConfigError("verify." + key, "unknown verify field");
        } else if (section == "invert") {
            if (key == "G")
                config.invert_G = value;
            else
                throw ConfigError("invert." + key, "unknown field");
        } else if (section == "output") {
            if (key == "solution_csv")
                config.solution_csv = value;
            else if (key == "report_json")
                config.report_json = value;
            else if (key == "verify_json")
                config.verify_json = value;
            else
                throw ConfigError("output." + key, "unknown output field");
        }
    }

    if (!kind_seen) throw ConfigError("kind", "required field missing");

    for (std::size_t i = 0; i < poles.size(); ++i) {
        std::string prefix = "pole[" + std::to_string(i) + "]";
        if (!poles[i].re) throw ConfigError(prefix + ".re", "required field missing");
        if (!poles[i].im) throw ConfigError(prefix + ".im", "required field missing");
        if (!poles[i].order)
            throw ConfigError(prefix + ".order", "required field missing");
        if (*poles[i].order < 1)
            throw ConfigError(prefix + ".order", "must be at least 1");
        config.poles.push_back(PoleConfig{*poles[i].re, *poles[i].im, *poles[i].order});
    }

    if (config.kind == RunConfig::Kind::Invert) {
        if (config.invert_G.empty())
            throw ConfigError("invert.G", "required field missing");
    } else {
        if (config.symbol_text.empty())
            throw ConfigError("symbol.f", "required field missing");
    }
    if (config.kind == RunConfig::Kind::Generalized && config.generalized_r.empty())
        throw ConfigError("generalized.r", "required field missing");
    if (!config.forcing_expr.empty() && !config.forcing_csv.empty())
        throw ConfigError("forcing.expr",
                          "give either an expression or a csv path, not both");
    if (config.n_points < 2)
        throw ConfigError("grid.n_points", "need at least two grid points");
    if (!(config.t_end > config.t_start))
        throw ConfigError("grid.t_end", "must exceed grid.t_start");
    if (!(config.step > 0.0) || !(config.half_height > 0.0) ||
        !(config.step < config.half_height))
        throw ConfigError("contour.step",
                          "contour needs 0 < step < half_height");
    if (!(config.region_omega < config.region_R))
        throw ConfigError("symbol.omega", "must lie strictly below symbol.R");
    return config;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open '" + path + "'");
    return parse_config(in);
}

}  // namespace nlode
