#pragma once

#include <complex>
#include <map>
#include <memory>
#include <set>
#include <string>

#include "nlode/errors.hpp"

namespace nlode {

namespace detail {

enum class Op {
    Const,
    Var,
    Param,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Exp,
    Sin,
    Cos,
    Sqrt,
    Log,
};

/// Internal expression node. Trees are immutable and children are
/// shared freely, so derivative trees stay polynomial in size even
/// when the fully expanded tree would not.
struct Node {
    Op op = Op::Const;
    std::complex<double> value;  // Op::Const
    std::string name;            // Op::Param
    int exponent = 0;            // Op::Pow
    std::shared_ptr<const Node> a;
    std::shared_ptr<const Node> b;
};

using NodePtr = std::shared_ptr<const Node>;

}  // namespace detail

/// A closed-form analytic expression in one variable with named real
/// parameters. Instances are immutable; binding a parameter returns a
/// new expression sharing the same tree.
class AnalyticExpr {
public:
    /// The zero expression in variable "s".
    AnalyticExpr();

    AnalyticExpr(detail::NodePtr root, std::string variable,
                 std::map<std::string, double> bindings = {});

    [[nodiscard]] const std::string& variable() const noexcept { return variable_; }

    /// Names of every parameter appearing in the tree, bound or not.
    [[nodiscard]] std::set<std::string> parameters() const;

    /// Parameters that appear in the tree but have no bound value yet.
    [[nodiscard]] std::set<std::string> unbound_parameters() const;

    [[nodiscard]] const std::map<std::string, double>& bindings() const noexcept {
        return bindings_;
    }

    /// Returns a copy with `name` bound to `value`.
    [[nodiscard]] AnalyticExpr with_parameter(const std::string& name, double value) const;

    /// Number of distinct nodes in the shared tree. This is the true
    /// evaluation cost, since evaluation caches shared subtrees.
    [[nodiscard]] std::size_t node_count() const;

    /// Renders the expression as text that reparses to an equivalent
    /// tree. Parameter bindings are not part of the text.
    [[nodiscard]] std::string text() const;

    [[nodiscard]] const detail::NodePtr& root() const noexcept { return root_; }

private:
    detail::NodePtr root_;
    std::string variable_;
    std::map<std::string, double> bindings_;
};

/// Parses `text` into an expression in the given variable.
///
/// Grammar summary: `+ - * /` with usual precedence, `^` right
/// associative with a constant integer exponent, functions `exp sin
/// cos sqrt log`, the literal `i`, and identifiers as parameters. The
/// names `s` and `t` are reserved for variables; only the declared one
/// may appear. See docs/expression-grammar.md for the full grammar.
[[nodiscard]] AnalyticExpr parse_expr(const std::string& text,
                                      const std::string& variable = "s");

/// Evaluates at `point` with all parameters bound. Raises
/// UnboundParameter or EvalError; never returns a non-finite value.
[[nodiscard]] std::complex<double> eval_expr(const AnalyticExpr& expr,
                                             std::complex<double> point);

/// Exact symbolic derivative of the given order (order >= 0).
[[nodiscard]] AnalyticExpr diff_expr(const AnalyticExpr& expr, int order = 1);

/// Building blocks for assembling expressions programmatically.
[[nodiscard]] AnalyticExpr make_constant(std::complex<double> value,
                                         const std::string& variable = "s");
[[nodiscard]] AnalyticExpr make_variable(const std::string& variable = "s");
[[nodiscard]] AnalyticExpr operator+(const AnalyticExpr& x, const AnalyticExpr& y);
[[nodiscard]] AnalyticExpr operator-(const AnalyticExpr& x, const AnalyticExpr& y);
[[nodiscard]] AnalyticExpr operator*(const AnalyticExpr& x, const AnalyticExpr& y);
[[nodiscard]] AnalyticExpr operator/(const AnalyticExpr& x, const AnalyticExpr& y);
[[nodiscard]] AnalyticExpr pow_int(const AnalyticExpr& base, int exponent);
[[nodiscard]] AnalyticExpr exp_of(const AnalyticExpr& argument);

}  // namespace nlode
