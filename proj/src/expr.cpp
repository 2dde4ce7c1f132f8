#include "nlode/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace nlode {

using detail::Node;
using detail::NodePtr;
using detail::Op;

namespace {

using Complex = std::complex<double>;

// ---------------------------------------------------------------------------
// smart constructors
//
// Each folds the easy algebraic identities so derivative trees do not
// drown in zero and one factors. Folding 0/x to 0 and x^0 to 1 follows
// the usual CAS convention of simplifying on the dense open set.
// ---------------------------------------------------------------------------

NodePtr leaf_const(Complex v) {
    auto n = std::make_shared<Node>();
    n->op = Op::Const;
    n->value = v;
    return n;
}

NodePtr leaf_var() {
    auto n = std::make_shared<Node>();
    n->op = Op::Var;
    return n;
}

NodePtr leaf_param(std::string name) {
    auto n = std::make_shared<Node>();
    n->op = Op::Param;
    n->name = std::move(name);
    return n;
}

bool is_const(const NodePtr& n, Complex v) {
    return n->op == Op::Const && n->value == v;
}

NodePtr binary(Op op, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr unary(Op op, NodePtr a) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->a = std::move(a);
    return n;
}

NodePtr mk_add(NodePtr a, NodePtr b) {
    if (a->op == Op::Const && b->op == Op::Const) return leaf_const(a->value + b->value);
    if (is_const(a, 0.0)) return b;
    if (is_const(b, 0.0)) return a;
    return binary(Op::Add, std::move(a), std::move(b));
}

NodePtr mk_mul(NodePtr a, NodePtr b);

NodePtr mk_sub(NodePtr a, NodePtr b) {
    if (a->op == Op::Const && b->op == Op::Const) return leaf_const(a->value - b->value);
    if (is_const(b, 0.0)) return a;
    if (is_const(a, 0.0)) return mk_mul(leaf_const(-1.0), std::move(b));
    return binary(Op::Sub, std::move(a), std::move(b));
}

NodePtr mk_mul(NodePtr a, NodePtr b) {
    if (a->op == Op::Const && b->op == Op::Const) return leaf_const(a->value * b->value);
    if (is_const(a, 0.0) || is_const(b, 0.0)) return leaf_const(0.0);
    if (is_const(a, 1.0)) return b;
    if (is_const(b, 1.0)) return a;
    return binary(Op::Mul, std::move(a), std::move(b));
}

NodePtr mk_div(NodePtr a, NodePtr b) {
    if (is_const(a, 0.0)) return leaf_const(0.0);
    if (is_const(b, 1.0)) return a;
    if (a->op == Op::Const && b->op == Op::Const && b->value != 0.0)
        return leaf_const(a->value / b->value);
    return binary(Op::Div, std::move(a), std::move(b));
}

NodePtr mk_pow(NodePtr base, int exponent) {
    if (exponent == 0) return leaf_const(1.0);
    if (exponent == 1) return base;
    auto n = std::make_shared<Node>();
    n->op = Op::Pow;
    n->exponent = exponent;
    n->a = std::move(base);
    return n;
}

// ---------------------------------------------------------------------------
// tokenizer
// ---------------------------------------------------------------------------

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    double number = 0.0;
    std::size_t pos = 0;
};

const char* token_name(Tok k) {
    switch (k) {
        case Tok::Number: return "number";
        case Tok::Ident: return "identifier";
        case Tok::Plus: return "'+'";
        case Tok::Minus: return "'-'";
        case Tok::Star: return "'*'";
        case Tok::Slash: return "'/'";
        case Tok::Caret: return "'^'";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::End: return "end of input";
    }
    return "?";
}

std::vector<Token> tokenize(const std::string& text) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        Token t;
        t.pos = i;
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i + 1 < text.size() &&
             std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
            std::size_t j = i;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            if (j < text.size() && text[j] == '.') {
                ++j;
                while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            }
            if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < text.size() && (text[k] == '+' || text[k] == '-')) ++k;
                if (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) {
                    ++k;
                    while (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k])))
                        ++k;
                    j = k;
                }
            }
            t.kind = Tok::Number;
            t.text = text.substr(i, j - i);
            t.number = std::strtod(t.text.c_str(), nullptr);
            i = j;
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) ||
                                       text[j] == '_'))
                ++j;
            t.kind = Tok::Ident;
            t.text = text.substr(i, j - i);
            i = j;
        } else {
            switch (c) {
                case '+': t.kind = Tok::Plus; break;
                case '-': t.kind = Tok::Minus; break;
                case '*': t.kind = Tok::Star; break;
                case '/': t.kind = Tok::Slash; break;
                case '^': t.kind = Tok::Caret; break;
                case '(': t.kind = Tok::LParen; break;
                case ')': t.kind = Tok::RParen; break;
                default:
                    throw ParseError(i, {}, std::string("unexpected character '") + c + "'");
            }
            t.text = std::string(1, c);
            ++i;
        }
        out.push_back(std::move(t));
    }
    Token end;
    end.kind = Tok::End;
    end.pos = text.size();
    out.push_back(end);
    return out;
}

// ---------------------------------------------------------------------------
// recursive descent parser
// ---------------------------------------------------------------------------

bool is_function_name(const std::string& s) {
    return s == "exp" || s == "sin" || s == "cos" || s == "sqrt" || s == "log";
}

Op function_op(const std::string& s) {
    if (s == "exp") return Op::Exp;
    if (s == "sin") return Op::Sin;
    if (s == "cos") return Op::Cos;
    if (s == "sqrt") return Op::Sqrt;
    return Op::Log;
}

class Parser {
public:
    Parser(std::vector<Token> tokens, std::string variable)
        : tokens_(std::move(tokens)), variable_(std::move(variable)) {}

    NodePtr run() {
        NodePtr e = parse_sum();
        if (peek().kind != Tok::End)
            throw ParseError(peek().pos, {"operator", "end of input"},
                             unexpected(peek()));
        return e;
    }

private:
    const Token& peek() const { return tokens_[index_]; }

    Token advance() { return tokens_[index_++]; }

    static std::string unexpected(const Token& t) {
        if (t.kind == Tok::End) return "unexpected end of input";
        return "unexpected '" + t.text + "'";
    }

    NodePtr parse_sum() {
        NodePtr left = parse_term();
        while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
            Tok op = advance().kind;
            NodePtr right = parse_term();
            left = op == Tok::Plus ? mk_add(left, right) : mk_sub(left, right);
        }
        return left;
    }

    NodePtr parse_term() {
        NodePtr left = parse_factor();
        while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
            Tok op = advance().kind;
            NodePtr right = parse_factor();
            left = op == Tok::Star ? mk_mul(left, right) : mk_div(left, right);
        }
        return left;
    }

    NodePtr parse_factor() {
        if (peek().kind == Tok::Minus) {
            std::size_t pos = advance().pos;
            (void)pos;
            return mk_sub(leaf_const(0.0), parse_factor());
        }
        if (peek().kind == Tok::Plus) {
            advance();
            return parse_factor();
        }
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_primary();
        if (peek().kind == Tok::Caret) {
            std::size_t caret_pos = advance().pos;
            // The exponent binds right associatively and must fold to
            // an integer constant; anything else is rejected here so
            // branch choices never depend on runtime values.
            NodePtr expo = parse_factor();
            base = mk_pow(base, fold_integer_exponent(expo, caret_pos));
        }
        return base;
    }

    int fold_integer_exponent(const NodePtr& expo, std::size_t pos) const {
        if (!is_constant_subtree(expo))
            throw ParseError(pos, {"integer constant"},
                             "exponent must be a constant integer");
        Complex v = fold_value(expo);
        if (v.imag() != 0.0)
            throw ParseError(pos, {"integer constant"},
                             "exponent must be a real integer");
        double r = std::round(v.real());
        if (std::abs(v.real() - r) > 1e-9 || std::abs(r) > 1e9)
            throw ParseError(pos, {"integer constant"},
                             "exponent must be a constant integer");
        return static_cast<int>(r);
    }

    static bool is_constant_subtree(const NodePtr& n) {
        if (n->op == Op::Var || n->op == Op::Param) return false;
        if (n->a && !is_constant_subtree(n->a)) return false;
        if (n->b && !is_constant_subtree(n->b)) return false;
        return true;
    }

    static Complex fold_value(const NodePtr& n) {
        switch (n->op) {
            case Op::Const: return n->value;
            case Op::Add: return fold_value(n->a) + fold_value(n->b);
            case Op::Sub: return fold_value(n->a) - fold_value(n->b);
            case Op::Mul: return fold_value(n->a) * fold_value(n->b);
            case Op::Div: return fold_value(n->a) / fold_value(n->b);
            case Op::Pow: return std::pow(fold_value(n->a),
                                          static_cast<double>(n->exponent));
            case Op::Exp: return std::exp(fold_value(n->a));
            case Op::Sin: return std::sin(fold_value(n->a));
            case Op::Cos: return std::cos(fold_value(n->a));
            case Op::Sqrt: return std::sqrt(fold_value(n->a));
            case Op::Log: return std::log(fold_value(n->a));
            default: return {};
        }
    }

    NodePtr parse_primary() {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::Number: {
                advance();
                return leaf_const(t.number);
            }
            case Tok::Ident: {
                Token id = advance();
                if (is_function_name(id.text)) {
                    if (peek().kind != Tok::LParen)
                        throw ParseError(peek().pos, {"'('"},
                                         "function '" + id.text +
                                             "' requires parenthesized argument");
                    advance();
                    NodePtr arg = parse_sum();
                    expect(Tok::RParen);
                    return unary(function_op(id.text), arg);
                }
                if (id.text == "i") return leaf_const(Complex(0.0, 1.0));
                if (id.text == variable_) return leaf_var();
                if (id.text == "s" || id.text == "t")
                    throw ParseError(id.pos, {"parameter", "'" + variable_ + "'"},
                                     "'" + id.text +
                                         "' is reserved; the variable here is '" +
                                         variable_ + "'");
                return leaf_param(id.text);
            }
            case Tok::LParen: {
                advance();
                NodePtr e = parse_sum();
                expect(Tok::RParen);
                return e;
            }
            default:
                throw ParseError(t.pos,
                                 {"number", "identifier", "'('", "'-'"},
                                 unexpected(t));
        }
    }

    void expect(Tok kind) {
        if (peek().kind != kind)
            throw ParseError(peek().pos, {token_name(kind)}, unexpected(peek()));
        advance();
    }

    std::vector<Token> tokens_;
    std::string variable_;
    std::size_t index_ = 0;
};

// ---------------------------------------------------------------------------
// evaluation
// ---------------------------------------------------------------------------

Complex require_finite(Complex v, Complex at, const char* what) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw EvalError(EvalError::Kind::Overflow, at,
                        std::string("overflow evaluating ") + what);
    return v;
}

Complex pow_by_squaring(Complex base, int exponent, Complex at) {
    bool invert = exponent < 0;
    unsigned long k = invert ? -static_cast<long>(exponent) : exponent;
    if (invert && base == 0.0)
        throw EvalError(EvalError::Kind::DivisionByZero, at,
                        "zero raised to a negative power");
    Complex acc = 1.0;
    Complex cur = base;
    while (k != 0) {
        if (k & 1u) acc *= cur;
        cur *= cur;
        k >>= 1u;
    }
    if (invert) acc = Complex(1.0) / acc;
    return acc;
}

struct Evaluator {
    Complex point;
    const std::map<std::string, double>* bindings;
    std::unordered_map<const Node*, Complex> cache;

    Complex eval(const NodePtr& n) {
        auto hit = cache.find(n.get());
        if (hit != cache.end()) return hit->second;
        Complex v = compute(n);
        cache.emplace(n.get(), v);
        return v;
    }

    Complex compute(const NodePtr& n) {
        switch (n->op) {
            case Op::Const: return n->value;
            case Op::Var: return point;
            case Op::Param: {
                auto it = bindings->find(n->name);
                if (it == bindings->end()) throw UnboundParameter(n->name);
                return it->second;
            }
            case Op::Add: return require_finite(eval(n->a) + eval(n->b), point, "a sum");
            case Op::Sub:
                return require_finite(eval(n->a) - eval(n->b), point, "a difference");
            case Op::Mul:
                return require_finite(eval(n->a) * eval(n->b), point, "a product");
            case Op::Div: {
                Complex den = eval(n->b);
                if (den == 0.0)
                    throw EvalError(EvalError::Kind::DivisionByZero, point,
                                    "division by zero");
                return require_finite(eval(n->a) / den, point, "a quotient");
            }
            case Op::Pow:
                return require_finite(pow_by_squaring(eval(n->a), n->exponent, point),
                                      point, "a power");
            case Op::Exp: return require_finite(std::exp(eval(n->a)), point, "exp");
            case Op::Sin: return require_finite(std::sin(eval(n->a)), point, "sin");
            case Op::Cos: return require_finite(std::cos(eval(n->a)), point, "cos");
            case Op::Sqrt: return require_finite(std::sqrt(eval(n->a)), point, "sqrt");
            case Op::Log: {
                Complex arg = eval(n->a);
                if (arg == 0.0)
                    throw EvalError(EvalError::Kind::BranchPoint, point, "log of zero");
                return require_finite(std::log(arg), point, "log");
            }
        }
        throw EvalError(EvalError::Kind::Overflow, point, "corrupt expression node");
    }
};

// ---------------------------------------------------------------------------
// differentiation
// ---------------------------------------------------------------------------

struct Differentiator {
    std::unordered_map<const Node*, NodePtr> cache;

    NodePtr diff(const NodePtr& n) {
        auto hit = cache.find(n.get());
        if (hit != cache.end()) return hit->second;
        NodePtr d = compute(n);
        cache.emplace(n.get(), d);
        return d;
    }

    NodePtr compute(const NodePtr& n) {
        switch (n->op) {
            case Op::Const:
            case Op::Param: return leaf_const(0.0);
            case Op::Var: return leaf_const(1.0);
            case Op::Add: return mk_add(diff(n->a), diff(n->b));
            case Op::Sub: return mk_sub(diff(n->a), diff(n->b));
            case Op::Mul:
                return mk_add(mk_mul(diff(n->a), n->b), mk_mul(n->a, diff(n->b)));
            case Op::Div:
                return mk_div(mk_sub(mk_mul(diff(n->a), n->b), mk_mul(n->a, diff(n->b))),
                              mk_pow(n->b, 2));
            case Op::Pow:
                return mk_mul(
                    mk_mul(leaf_const(static_cast<double>(n->exponent)),
                           mk_pow(n->a, n->exponent - 1)),
                    diff(n->a));
            case Op::Exp: return mk_mul(unary(Op::Exp, n->a), diff(n->a));
            case Op::Sin: return mk_mul(unary(Op::Cos, n->a), diff(n->a));
            case Op::Cos:
                return mk_mul(mk_mul(leaf_const(-1.0), unary(Op::Sin, n->a)), diff(n->a));
            case Op::Sqrt:
                return mk_div(diff(n->a), mk_mul(leaf_const(2.0), unary(Op::Sqrt, n->a)));
            case Op::Log: return mk_div(diff(n->a), n->a);
        }
        return leaf_const(0.0);
    }
};

// ---------------------------------------------------------------------------
// rendering
// ---------------------------------------------------------------------------

/// Shortest decimal form that parses back to exactly the same double.
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

std::string format_const(Complex v, int& prec_out) {
    if (v.imag() == 0.0) {
        prec_out = v.real() < 0.0 ? 2 : 4;
        return format_double(v.real());
    }
    // Complex constants self parenthesize so they are atoms to callers.
    prec_out = 4;
    std::string im = format_double(std::abs(v.imag()));
    char sign = v.imag() < 0.0 ? '-' : '+';
    if (v.real() == 0.0)
        return std::string("(") + (sign == '-' ? "-" : "") + im + "*i)";
    return "(" + format_double(v.real()) + sign + im + "*i)";
}

const char* function_name(Op op) {
    switch (op) {
        case Op::Exp: return "exp";
        case Op::Sin: return "sin";
        case Op::Cos: return "cos";
        case Op::Sqrt: return "sqrt";
        default: return "log";
    }
}

/// Emits `n`, wrapping in parentheses when its precedence is below
/// what the surrounding context requires.
void render(const NodePtr& n, const std::string& var, int required, std::string& out) {
    int prec = 0;
    std::string body;
    switch (n->op) {
        case Op::Const: body = format_const(n->value, prec); break;
        case Op::Var:
            body = var;
            prec = 4;
            break;
        case Op::Param:
            body = n->name;
            prec = 4;
            break;
        case Op::Add: {
            render(n->a, var, 1, body);
            body += " + ";
            render(n->b, var, 1, body);
            prec = 1;
            break;
        }
        case Op::Sub: {
            render(n->a, var, 1, body);
            body += " - ";
            render(n->b, var, 2, body);
            prec = 1;
            break;
        }
        case Op::Mul: {
            render(n->a, var, 2, body);
            body += "*";
            render(n->b, var, 2, body);
            prec = 2;
            break;
        }
        case Op::Div: {
            render(n->a, var, 2, body);
            body += "/";
            render(n->b, var, 3, body);
            prec = 2;
            break;
        }
        case Op::Pow: {
            render(n->a, var, 4, body);
            body += "^";
            if (n->exponent < 0)
                body += "(" + std::to_string(n->exponent) + ")";
            else
                body += std::to_string(n->exponent);
            prec = 3;
            break;
        }
        case Op::Exp:
        case Op::Sin:
        case Op::Cos:
        case Op::Sqrt:
        case Op::Log: {
            body = std::string(function_name(n->op)) + "(";
            render(n->a, var, 0, body);
            body += ")";
            prec = 4;
            break;
        }
    }
    if (prec < required)
        out += "(" + body + ")";
    else
        out += body;
}

void collect_params(const NodePtr& n, std::set<std::string>& out) {
    if (n->op == Op::Param) out.insert(n->name);
    if (n->a) collect_params(n->a, out);
    if (n->b) collect_params(n->b, out);
}

void count_nodes(const NodePtr& n, std::unordered_set<const Node*>& seen) {
    if (!seen.insert(n.get()).second) return;
    if (n->a) count_nodes(n->a, seen);
    if (n->b) count_nodes(n->b, seen);
}

std::string merge_variable(const AnalyticExpr& x, const AnalyticExpr& y) {
    // A constant expression adopts the other operand's variable.
    auto vacuous = [](const AnalyticExpr& e) {
        return e.root()->op == Op::Const;
    };
    if (x.variable() == y.variable()) return x.variable();
    if (vacuous(x)) return y.variable();
    if (vacuous(y)) return x.variable();
    throw ShapeMismatch("expr", "cannot combine expressions in '" + x.variable() +
                                    "' and '" + y.variable() + "'");
}

std::map<std::string, double> merge_bindings(const AnalyticExpr& x,
                                             const AnalyticExpr& y) {
    std::map<std::string, double> m = x.bindings();
    for (const auto& [k, v] : y.bindings()) m.emplace(k, v);
    return m;
}

}  // namespace

AnalyticExpr::AnalyticExpr() : root_(leaf_const(0.0)), variable_("s") {}

AnalyticExpr::AnalyticExpr(detail::NodePtr root, std::string variable,
                           std::map<std::string, double> bindings)
    : root_(std::move(root)),
      variable_(std::move(variable)),
      bindings_(std::move(bindings)) {}

std::set<std::string> AnalyticExpr::parameters() const {
    std::set<std::string> out;
    collect_params(root_, out);
    return out;
}

std::set<std::string> AnalyticExpr::unbound_parameters() const {
    std::set<std::string> out = parameters();
    for (const auto& [k, v] : bindings_) out.erase(k);
    return out;
}

AnalyticExpr AnalyticExpr::with_parameter(const std::string& name, double value) const {
    std::map<std::string, double> b = bindings_;
    b[name] = value;
    return AnalyticExpr(root_, variable_, std::move(b));
}

std::size_t AnalyticExpr::node_count() const {
    std::unordered_set<const Node*> seen;
    count_nodes(root_, seen);
    return seen.size();
}

std::string AnalyticExpr::text() const {
    std::string out;
    render(root_, variable_, 0, out);
    return out;
}

AnalyticExpr parse_expr(const std::string& text, const std::string& variable) {
    if (variable != "s" && variable != "t")
        throw DomainError("parse", "variable must be 's' or 't'");
    Parser parser(tokenize(text), variable);
    return AnalyticExpr(parser.run(), variable);
}

std::complex<double> eval_expr(const AnalyticExpr& expr, std::complex<double> point) {
    Evaluator ev;
    ev.point = point;
    ev.bindings = &expr.bindings();
    return ev.eval(expr.root());
}

AnalyticExpr diff_expr(const AnalyticExpr& expr, int order) {
    if (order < 0) throw DomainError("expr", "derivative order must be nonnegative");
    NodePtr n = expr.root();
    for (int k = 0; k < order; ++k) {
        Differentiator d;
        n = d.diff(n);
    }
    return AnalyticExpr(n, expr.variable(), expr.bindings());
}

AnalyticExpr make_constant(std::complex<double> value, const std::string& variable) {
    return AnalyticExpr(leaf_const(value), variable);
}

AnalyticExpr make_variable(const std::string& variable) {
    if (variable != "s" && variable != "t")
        throw DomainError("expr", "variable must be 's' or 't'");
    return AnalyticExpr(leaf_var(), variable);
}

AnalyticExpr operator+(const AnalyticExpr& x, const AnalyticExpr& y) {
    return AnalyticExpr(mk_add(x.root(), y.root()), merge_variable(x, y),
                        merge_bindings(x, y));
}

AnalyticExpr operator-(const AnalyticExpr& x, const AnalyticExpr& y) {
    return AnalyticExpr(mk_sub(x.root(), y.root()), merge_variable(x, y),
                        merge_bindings(x, y));
}

AnalyticExpr operator*(const AnalyticExpr& x, const AnalyticExpr& y) {
    return AnalyticExpr(mk_mul(x.root(), y.root()), merge_variable(x, y),
                        merge_bindings(x, y));
}

AnalyticExpr operator/(const AnalyticExpr& x, const AnalyticExpr& y) {
    return AnalyticExpr(mk_div(x.root(), y.root()), merge_variable(x, y),
                        merge_bindings(x, y));
}

AnalyticExpr pow_int(const AnalyticExpr& base, int exponent) {
    return AnalyticExpr(mk_pow(base.root(), exponent), base.variable(),
                        base.bindings());
}

AnalyticExpr exp_of(const AnalyticExpr& argument) {
    return AnalyticExpr(unary(Op::Exp, argument.root()), argument.variable(),
                        argument.bindings());
}

}  // namespace nlode
