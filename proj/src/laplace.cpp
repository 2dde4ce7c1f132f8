#include "nlode/laplace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

namespace nlode {

namespace {

using Complex = std::complex<double>;
using detail::Node;
using detail::NodePtr;
using detail::Op;

constexpr double kPi = std::numbers::pi;

// ---------------------------------------------------------------------------
// transform table matcher
//
// Recognizes sums of coef * t^k * exp(a t) * {1, sin(b t), cos(b t)}
// by walking the parsed tree. Linearity of exponent arguments is
// tested numerically at five probe times, which rejects any curvature
// a polynomial or trig argument could hide.
// ---------------------------------------------------------------------------

struct MatchContext {
    const AnalyticExpr* host;

    Complex eval_node(const NodePtr& n, double t) const {
        AnalyticExpr wrapper(n, host->variable(), host->bindings());
        return eval_expr(wrapper, Complex(t));
    }
};

bool contains_variable(const NodePtr& n) {
    if (n->op == Op::Var) return true;
    if (n->a && contains_variable(n->a)) return true;
    if (n->b && contains_variable(n->b)) return true;
    return false;
}

/// Checks u(t) == alpha t + beta against probes and extracts the
/// coefficients. Returns false when u is not affine in t.
bool extract_affine(const MatchContext& ctx, const NodePtr& u, Complex& alpha,
                    Complex& beta) {
    Complex u0 = ctx.eval_node(u, 0.0);
    Complex u1 = ctx.eval_node(u, 1.0);
    alpha = u1 - u0;
    beta = u0;
    double scale = 1.0 + std::abs(u0) + std::abs(u1);
    for (double t : {2.0, 0.5, 0.25}) {
        Complex probe = ctx.eval_node(u, t);
        if (std::abs(probe - (alpha * t + beta)) > 1e-12 * (scale + std::abs(probe)))
            return false;
    }
    return true;
}

void flatten_sum(const NodePtr& n, Complex sign,
                 std::vector<std::pair<NodePtr, Complex>>& out) {
    if (n->op == Op::Add) {
        flatten_sum(n->a, sign, out);
        flatten_sum(n->b, sign, out);
    } else if (n->op == Op::Sub) {
        flatten_sum(n->a, sign, out);
        flatten_sum(n->b, -sign, out);
    } else {
        out.emplace_back(n, sign);
    }
}

bool collect_factors(const NodePtr& n, std::vector<NodePtr>& num,
                     std::vector<NodePtr>& den) {
    if (n->op == Op::Mul)
        return collect_factors(n->a, num, den) && collect_factors(n->b, num, den);
    if (n->op == Op::Div)
        return collect_factors(n->a, num, den) && collect_factors(n->b, den, num);
    num.push_back(n);
    return true;
}

std::optional<ForcingTerm::TableTerm> match_term(const MatchContext& ctx,
                                                 const NodePtr& n, Complex sign) {
    std::vector<NodePtr> num, den;
    if (!collect_factors(n, num, den)) return std::nullopt;

    ForcingTerm::TableTerm term;
    term.coef = sign;

    for (const NodePtr& d : den) {
        if (contains_variable(d)) return std::nullopt;
        Complex v = ctx.eval_node(d, 0.0);
        if (v == 0.0) return std::nullopt;
        term.coef /= v;
    }

    for (const NodePtr& f : num) {
        if (!contains_variable(f)) {
            term.coef *= ctx.eval_node(f, 0.0);
            continue;
        }
        if (f->op == Op::Var) {
            term.power += 1;
            continue;
        }
        if (f->op == Op::Pow && f->a->op == Op::Var && f->exponent >= 1) {
            term.power += f->exponent;
            continue;
        }
        if (f->op == Op::Exp) {
            Complex alpha, beta;
            if (!extract_affine(ctx, f->a, alpha, beta)) return std::nullopt;
            if (std::abs(alpha.imag()) > 1e-12 * (1.0 + std::abs(alpha)))
                return std::nullopt;
            term.rate += alpha.real();
            term.coef *= std::exp(beta);
            continue;
        }
        if (f->op == Op::Sin || f->op == Op::Cos) {
            if (term.trig != ForcingTerm::TableTerm::Trig::None) return std::nullopt;
            Complex alpha, beta;
            if (!extract_affine(ctx, f->a, alpha, beta)) return std::nullopt;
            if (std::abs(beta) > 1e-12 * (1.0 + std::abs(alpha))) return std::nullopt;
            if (std::abs(alpha.imag()) > 1e-12 * (1.0 + std::abs(alpha)))
                return std::nullopt;
            term.trig = f->op == Op::Sin ? ForcingTerm::TableTerm::Trig::Sin
                                         : ForcingTerm::TableTerm::Trig::Cos;
            term.freq = alpha.real();
            continue;
        }
        return std::nullopt;
    }
    return term;
}

std::optional<std::vector<ForcingTerm::TableTerm>> match_table(
    const AnalyticExpr& expr) {
    MatchContext ctx{&expr};
    std::vector<std::pair<NodePtr, Complex>> parts;
    flatten_sum(expr.root(), Complex(1.0), parts);
    std::vector<ForcingTerm::TableTerm> terms;
    try {
        for (const auto& [node, sign] : parts) {
            auto t = match_term(ctx, node, sign);
            if (!t) return std::nullopt;
            if (t->coef != 0.0) terms.push_back(*t);
        }
    } catch (const Error&) {
        // Unbound parameters or evaluation trouble: not table shaped.
        return std::nullopt;
    }
    return terms;
}

// ---------------------------------------------------------------------------
// quadrature
// ---------------------------------------------------------------------------

struct SimpsonState {
    int depth_limit = 28;
    // Hard cap on evaluations per chunk so an exploding integrand
    // cannot stall the refinement; the chunk then returns its current
    // (poor) estimate and the divergence watch in the caller fires.
    long evals = 0;
    long eval_budget = 60000;
};

Complex adaptive_simpson(const std::function<Complex(double)>& g, double a, double b,
                         Complex fa, Complex fm, Complex fb, Complex whole,
                         double tol, int depth, SimpsonState& st) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m);
    double rm = 0.5 * (m + b);
    Complex flm = g(lm);
    Complex frm = g(rm);
    st.evals += 2;
    Complex left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    Complex right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    Complex split = left + right;
    if (depth >= st.depth_limit || st.evals >= st.eval_budget) return split;
    if (std::abs(split - whole) <= 15.0 * tol) return split + (split - whole) / 15.0;
    return adaptive_simpson(g, a, m, fa, flm, fm, left, tol / 2.0, depth + 1, st) +
           adaptive_simpson(g, m, b, fm, frm, fb, right, tol / 2.0, depth + 1, st);
}

Complex integrate_chunk(const std::function<Complex(double)>& g, double a, double b,
                        double tol) {
    SimpsonState st;
    Complex fa = g(a);
    Complex fm = g(0.5 * (a + b));
    Complex fb = g(b);
    Complex whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(g, a, b, fa, fm, fb, whole, tol, 0, st);
}

Complex transform_by_quadrature(const AnalyticExpr& expr, Complex s,
                                double growth_hint) {
    auto integrand = [&](double t) -> Complex {
        return std::exp(-s * t) * eval_expr(expr, Complex(t));
    };
    double damping = s.real() - (std::isnan(growth_hint) ? 0.0 : growth_hint);
    double chunk = 8.0 / std::max(0.25, damping);

    Complex acc = 0.0;
    int quiet_chunks = 0;
    int growing_chunks = 0;
    double prev_mag = 0.0;
    const int max_chunks = 400;
    for (int k = 0; k < max_chunks; ++k) {
        double a = k * chunk;
        double b = a + chunk;
        Complex part;
        try {
            part = integrate_chunk(integrand, a, b, 1e-13 * (1.0 + std::abs(acc)));
        } catch (const EvalError&) {
            throw QuadratureFailure(
                "integrand overflowed before the transform tail settled; "
                "check the growth bound");
        }
        acc += part;
        double mag = std::abs(part);
        if (mag < 1e-14 * (1.0 + std::abs(acc))) {
            if (++quiet_chunks >= 2) return acc;
        } else {
            quiet_chunks = 0;
        }
        if (k > 0 && mag > prev_mag * 1.2 && mag > 1.0 + std::abs(acc)) {
            if (++growing_chunks >= 4)
                throw QuadratureFailure(
                    "transform integral appears divergent; check the growth bound");
        } else {
            growing_chunks = 0;
        }
        prev_mag = mag;
    }
    throw QuadratureFailure("transform tail did not fall below tolerance");
}

bool nearly_uniform(const std::vector<double>& t) {
    if (t.size() < 3) return true;
    double h = t[1] - t[0];
    for (std::size_t i = 2; i < t.size(); ++i)
        if (std::abs((t[i] - t[i - 1]) - h) > 1e-9 * std::max(1.0, std::abs(h)))
            return false;
    return true;
}

Complex transform_sampled(const GridFunction& g, Complex s) {
    // Composite Simpson when the native grid allows it, trapezoid
    // otherwise. Data outside the grid contributes nothing.
    const std::size_t n = g.size();
    if (n < 2) return 0.0;
    std::vector<Complex> w(n);
    for (std::size_t i = 0; i < n; ++i)
        w[i] = std::exp(-s * g.times[i]) * g.values[i];

    if (nearly_uniform(g.times) && n >= 3) {
        double h = g.times[1] - g.times[0];
        Complex acc = 0.0;
        std::size_t pairs = (n - 1) / 2;
        for (std::size_t p = 0; p < pairs; ++p) {
            std::size_t i = 2 * p;
            acc += h / 3.0 * (w[i] + 4.0 * w[i + 1] + w[i + 2]);
        }
        if ((n - 1) % 2 != 0) acc += 0.5 * h * (w[n - 2] + w[n - 1]);
        return acc;
    }
    Complex acc = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i)
        acc += 0.5 * (g.times[i + 1] - g.times[i]) * (w[i] + w[i + 1]);
    return acc;
}

// ---------------------------------------------------------------------------
// contour sums
// ---------------------------------------------------------------------------

struct ContourSamples {
    double abscissa = 0.0;
    double step = 0.0;
    long k_max = 0;
    std::vector<Complex> values;  // G at abscissa + i k step, k = -k_max..k_max
};

ContourSamples sample_contour(const std::function<Complex(Complex)>& G,
                              const ContourParams& contour) {
    ContourSamples out;
    out.abscissa = contour.abscissa;
    out.step = contour.step;
    out.k_max = static_cast<long>(
        std::ceil(contour.half_height / contour.step - 1e-12));
    out.values.reserve(2 * out.k_max + 1);
    for (long k = -out.k_max; k <= out.k_max; ++k)
        out.values.push_back(G(Complex(out.abscissa, k * out.step)));
    return out;
}

std::vector<Complex> invert_from_samples(const ContourSamples& c,
                                         const std::vector<double>& times) {
    std::vector<Complex> out(times.size());
    const double h = c.step;
    const long K = c.k_max;
    for (std::size_t i = 0; i < times.size(); ++i) {
        double t = times[i];
        Complex acc = 0.0;
        for (long k = -K; k <= K; ++k) {
            double y = k * h;
            Complex w = c.values[static_cast<std::size_t>(k + K)];
            if (k == -K || k == K) w *= 0.5;
            acc += w * Complex(std::cos(y * t), std::sin(y * t));
        }
        out[i] = acc * std::exp(c.abscissa * t) * h / (2.0 * kPi);
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// ForcingTerm
// ---------------------------------------------------------------------------

ForcingTerm ForcingTerm::closed_form(AnalyticExpr expr_in_t) {
    return closed_form(std::move(expr_in_t), std::nan(""));
}

ForcingTerm ForcingTerm::closed_form(AnalyticExpr expr_in_t, double growth) {
    if (expr_in_t.variable() != "t")
        throw DomainError("laplace", "forcing expressions use the variable 't'");
    ForcingTerm out;
    out.closed_ = true;
    out.expr_ = std::move(expr_in_t);
    out.growth_ = growth;
    if (auto table = match_table(out.expr_)) {
        out.table_ = std::move(*table);
        double rate = 0.0;
        for (const auto& term : out.table_) rate = std::max(rate, term.rate);
        out.growth_ = std::isnan(growth) ? rate : std::max(growth, rate);
        out.zero_ = out.table_.empty();
    }
    return out;
}

ForcingTerm ForcingTerm::sampled(GridFunction data, double growth) {
    if (data.size() < 2)
        throw DomainError("laplace", "sampled forcing needs at least two points");
    ForcingTerm out;
    out.grid_ = std::move(data);
    out.growth_ = growth;
    return out;
}

ForcingTerm ForcingTerm::zero() {
    ForcingTerm out;
    out.zero_ = true;
    out.closed_ = true;
    out.expr_ = parse_expr("0", "t");
    return out;
}

const AnalyticExpr& ForcingTerm::expr() const {
    if (!closed_)
        throw Unsupported("laplace", "sampled forcing has no defining expression");
    return expr_;
}

const GridFunction& ForcingTerm::grid() const {
    if (closed_) throw Unsupported("laplace", "closed-form forcing has no sample grid");
    return grid_;
}

std::complex<double> ForcingTerm::value_at(double t) const {
    if (zero_) return 0.0;
    if (closed_) return eval_expr(expr_, Complex(t));
    const auto& ts = grid_.times;
    if (ts.empty() || t < ts.front() || t > ts.back()) return 0.0;
    auto it = std::lower_bound(ts.begin(), ts.end(), t);
    if (it == ts.begin()) return grid_.values.front();
    std::size_t hi = static_cast<std::size_t>(it - ts.begin());
    std::size_t lo = hi - 1;
    if (hi == ts.size()) return grid_.values.back();
    double w = (t - ts[lo]) / (ts[hi] - ts[lo]);
    return (1.0 - w) * grid_.values[lo] + w * grid_.values[hi];
}

// ---------------------------------------------------------------------------
// forward transform
// ---------------------------------------------------------------------------

std::complex<double> laplace_forward(const ForcingTerm& J, std::complex<double> s) {
    if (J.is_zero()) return 0.0;
    double growth = J.growth_bound();
    if (!std::isnan(growth) && s.real() <= growth) {
        std::ostringstream os;
        os << "transform requested at Re(s) = " << s.real()
           << ", not right of the growth bound " << growth;
        throw DomainError("laplace", os.str());
    }
    if (J.is_closed_form()) {
        if (J.table_matched()) {
            Complex acc = 0.0;
            for (const auto& term : J.table()) {
                double kfact = 1.0;
                for (int k = 2; k <= term.power; ++k) kfact *= k;
                auto shifted = [&](Complex pole) {
                    return kfact / std::pow(s - pole, term.power + 1);
                };
                using Trig = ForcingTerm::TableTerm::Trig;
                Complex pole(term.rate, 0.0);
                if (term.trig == Trig::None) {
                    acc += term.coef * shifted(pole);
                } else {
                    Complex up(term.rate, term.freq);
                    Complex down(term.rate, -term.freq);
                    if (term.trig == Trig::Cos)
                        acc += term.coef * 0.5 * (shifted(up) + shifted(down));
                    else
                        acc += term.coef * (shifted(up) - shifted(down)) /
                               Complex(0.0, 2.0);
                }
            }
            return acc;
        }
        return transform_by_quadrature(J.expr(), s, growth);
    }
    return transform_sampled(J.grid(), s);
}

// ---------------------------------------------------------------------------
// inversion
// ---------------------------------------------------------------------------

InversionResult bromwich_invert(
    const std::function<std::complex<double>(std::complex<double>)>& G,
    const ContourParams& contour, const std::vector<double>& times,
    const BromwichOptions& options) {
    for (double t : times)
        if (!(t >= 0.0))
            throw DomainError("laplace", "inversion times must be nonnegative");
    if (!std::is_sorted(times.begin(), times.end()))
        throw DomainError("laplace", "inversion times must be sorted");

    ContourSamples coarse = sample_contour(G, contour);
    std::vector<Complex> base = invert_from_samples(coarse, times);

    InversionResult out;
    double max_imag = 0.0;
    for (const auto& v : base) max_imag = std::max(max_imag, std::abs(v.imag()));
    out.max_imag = max_imag;

    if (options.self_check) {
        ContourParams fine(contour.abscissa, 2.0 * contour.half_height,
                           0.5 * contour.step);
        ContourSamples refined = sample_contour(G, fine);
        std::vector<Complex> check = invert_from_samples(refined, times);
        double gap = 0.0;
        for (std::size_t i = 0; i < base.size(); ++i)
            gap = std::max(gap, std::abs(base[i] - check[i]));
        out.refinement_gap = gap;
        if (gap > options.check_tolerance) {
            out.converged = false;
            std::ostringstream os;
            os << "inversion self check: refined contour moved the result by " << gap
               << " (tolerance " << options.check_tolerance << ")";
            out.warnings.push_back(os.str());
        }
    }

    out.grid = GridFunction(times, std::move(base));
    return out;
}

DecayEstimate estimate_decay(
    const std::function<std::complex<double>(std::complex<double>)>& G,
    const ContourParams& contour) {
    const int samples = 48;
    const double y0 = contour.half_height;
    const double y1 = 10.0 * contour.half_height;
    double sx = 0.0, sz = 0.0, sxx = 0.0, sxz = 0.0;
    for (int j = 0; j < samples; ++j) {
        double y = y0 * std::pow(y1 / y0, static_cast<double>(j) / (samples - 1));
        double mag = std::abs(G(Complex(contour.abscissa, y)));
        double x = std::log(y);
        double z = std::log(std::max(mag, 1e-300));
        sx += x;
        sz += z;
        sxx += x * x;
        sxz += x * z;
    }
    double n = samples;
    double slope = (n * sxz - sx * sz) / (n * sxx - sx * sx);

    DecayEstimate out;
    out.p_hat = -slope;
    double snapped = std::round(out.p_hat);
    if (std::abs(out.p_hat - snapped) <= 0.05) out.p_hat = snapped;
    out.certified_order =
        std::max(0, static_cast<int>(std::floor(out.p_hat + 1e-12)) - 1);
    out.no_smoothing = out.p_hat < 0.5;
    return out;
}

WidderReport widder_heuristic(
    const std::function<std::complex<double>(std::complex<double>)>& G, double omega,
    int n_max, const std::vector<double>& s_values, double bound) {
    WidderReport report;
    report.bound = bound;

    std::vector<double> points = s_values;
    if (points.empty()) {
        const int count = 60;
        for (int j = 0; j < count; ++j)
            points.push_back(omega +
                             std::pow(10.0, -4.0 + 8.0 * j / (count - 1.0)));
    }

    const int nodes = 64;
    for (double s : points) {
        double gap = s - omega;
        if (!(gap > 0.0)) {
            report.passed = false;
            report.message = "sample points must lie right of the abscissa";
            return report;
        }
        double rho = 0.5 * gap;
        // c_n = G^(n)(s)/n! from one ring of samples around s.
        std::vector<Complex> ring(nodes);
        try {
            for (int j = 0; j < nodes; ++j) {
                double theta = 2.0 * kPi * j / nodes;
                ring[j] = G(Complex(s + rho * std::cos(theta), rho * std::sin(theta)));
            }
        } catch (const Error& e) {
            report.passed = false;
            report.worst_ratio = std::numeric_limits<double>::infinity();
            report.worst_point = s;
            std::ostringstream os;
            os << "evaluation failed near s = " << s << ": " << e.what();
            report.message = os.str();
            return report;
        }
        for (int order = 0; order <= n_max; ++order) {
            Complex acc = 0.0;
            for (int j = 0; j < nodes; ++j) {
                double phase = -2.0 * kPi * order * j / nodes;
                acc += ring[j] * Complex(std::cos(phase), std::sin(phase));
            }
            Complex cn = acc / (static_cast<double>(nodes) * std::pow(rho, order));
            double ratio = std::abs(cn) * std::pow(gap, order + 1);
            if (!std::isfinite(ratio)) ratio = std::numeric_limits<double>::infinity();
            if (ratio > report.worst_ratio) {
                report.worst_ratio = ratio;
                report.worst_order = order;
                report.worst_point = s;
            }
        }
    }
    if (report.worst_ratio > bound) {
        report.passed = false;
        std::ostringstream os;
        os << "Widder ratio " << report.worst_ratio << " at order "
           << report.worst_order << ", s = " << report.worst_point
           << " exceeds bound " << bound;
        report.message = os.str();
    }
    return report;
}

}  // namespace nlode
