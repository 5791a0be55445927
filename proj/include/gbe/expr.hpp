#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace gbe {

using Rational = mpq_class;

/// Node kinds of the expression tree. The enumeration order is the
/// primary key of the canonical total order.
enum class Kind : std::uint8_t { Const, Var, Func, Call, Pow, Int, Prod, Sum };

/// Elementary functions. sqrt is not a node: it parses to a power 1/2.
enum class Fn : std::uint8_t { Exp, Ln, Abs, Sign, Sin, Cos };

const char* fn_name(Fn fn);

class Expr;

/// Immutable tree node. Field usage per kind:
///   Const  value
///   Var    name
///   Func   name, params, orders (derivative multi-index), children = arguments
///   Call   fn, children = {argument}
///   Pow    value = rational exponent, children = {base}
///   Int    name = dummy variable, value = lower limit, children = {body, upper}
///   Prod   value = rational coefficient, children = factors
///   Sum    children = terms
struct Node {
    Kind kind = Kind::Const;
    Fn fn = Fn::Exp;
    Rational value;
    std::string name;
    std::vector<Expr> children;
    std::vector<std::string> params;
    std::vector<int> orders;
    std::size_t hash = 0;
};

class Expr {
public:
    Expr();
    Expr(int v);
    Expr(long v);
    Expr(const Rational& v);
    explicit Expr(std::shared_ptr<const Node> node);

    const Node& node() const { return *node_; }
    const Node* ptr() const { return node_.get(); }
    Kind kind() const { return node_->kind; }
    std::size_t hash() const { return node_->hash; }

    bool is(Kind k) const { return node_->kind == k; }
    bool is_const() const { return node_->kind == Kind::Const; }
    bool is_zero() const;
    bool is_one() const;
    const Rational& value() const { return node_->value; }
    const std::string& name() const { return node_->name; }
    const std::vector<Expr>& children() const { return node_->children; }
    const Expr& child(std::size_t i) const { return node_->children[i]; }

    // Pow accessors.
    const Expr& base() const { return node_->children[0]; }
    const Rational& exponent() const { return node_->value; }

    // Func accessors.
    bool has_default_args() const;
    bool is_function(const std::string& symbol) const;

    // Int accessors.
    const Expr& body() const { return node_->children[0]; }
    const Expr& upper() const { return node_->children[1]; }

private:
    std::shared_ptr<const Node> node_;
};

int compare(const Expr& a, const Expr& b);
bool operator==(const Expr& a, const Expr& b);
inline bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

struct ExprLess {
    bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};
struct ExprHash {
    std::size_t operator()(const Expr& e) const { return e.hash(); }
};

bool is_integer(const Rational& q);
std::size_t hash_rational(const Rational& q);

/// Raw node construction. These do not canonicalize; use the builders in
/// simplify.hpp or the arithmetic operators below.
namespace raw {
Expr constant(const Rational& v);
Expr variable(const std::string& name);
Expr function(const std::string& name, std::vector<std::string> params, std::vector<Expr> args,
              std::vector<int> orders);
Expr call(Fn fn, const Expr& arg);
Expr power(const Expr& base, const Rational& exponent);
Expr integral(const Expr& body, const std::string& dummy, const Rational& lower, const Expr& upper);
Expr product(const Rational& coefficient, std::vector<Expr> factors);
Expr sum(std::vector<Expr> terms);
}  // namespace raw

// Canonicalizing arithmetic (structural rules only, no assumptions).
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr& operator+=(Expr& a, const Expr& b);
Expr& operator-=(Expr& a, const Expr& b);
Expr& operator*=(Expr& a, const Expr& b);

Expr var(const std::string& name);
Expr pow(const Expr& base, const Rational& exponent);
Expr sqrt(const Expr& e);
Expr exp(const Expr& e);
Expr ln(const Expr& e);
Expr abs(const Expr& e);
Expr sign(const Expr& e);
Expr sin(const Expr& e);
Expr cos(const Expr& e);
Rational rational(long num, long den = 1);

/// Function application with the declared parameter names as arguments.
Expr func(const std::string& name, const std::vector<std::string>& params,
          const std::vector<int>& orders = {});
/// Function application at explicit arguments.
Expr func_at(const std::string& name, const std::vector<std::string>& params, std::vector<Expr> args,
             const std::vector<int>& orders = {});
/// Antiderivative from `lower` to the dummy variable itself.
Expr integral(const Expr& body, const std::string& dummy, const Rational& lower = 0);
Expr integral(const Expr& body, const std::string& dummy, const Rational& lower, const Expr& upper);

// Errors shared by the engine.
struct ExprError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DomainError : ExprError {
    using ExprError::ExprError;
};
struct DiffError : ExprError {
    using ExprError::ExprError;
};
struct ArityError : ExprError {
    using ExprError::ExprError;
};
struct UnboundSymbol : ExprError {
    using ExprError::ExprError;
};
struct NonPolynomial : ExprError {
    using ExprError::ExprError;
};

}  // namespace gbe
