#pragma once

#include "gbe/expr.hpp"

#include <map>
#include <string>

namespace gbe {

enum class SignFact : std::uint8_t { Positive, Negative, Nonzero };

/// Sign facts about atoms, e.g. T_t > 0 or V1 != 0.
class Assumptions {
public:
    void add(const Expr& atom, SignFact fact);
    const SignFact* find(const Expr& atom) const;
    bool empty() const { return facts_.empty(); }
    const std::map<Expr, SignFact, ExprLess>& facts() const { return facts_; }

private:
    std::map<Expr, SignFact, ExprLess> facts_;
};

/// Canonicalizing node builders. Assumptions only enable guarded rewrites
/// (abs, sign, nested powers); without them every rule is unconditional.
class Simplifier {
public:
    explicit Simplifier(const Assumptions* assumptions = nullptr) : assumptions_(assumptions) {}

    Expr add(std::vector<Expr> terms) const;
    Expr mul(std::vector<Expr> factors) const;
    Expr power(const Expr& base, const Rational& q) const;
    Expr apply(Fn fn, const Expr& arg) const;
    Expr function(const std::string& name, const std::vector<std::string>& params, std::vector<Expr> args,
                  const std::vector<int>& orders) const;
    Expr integral(const Expr& body, const std::string& dummy, const Rational& lower, const Expr& upper) const;

    /// Bottom-up reconstruction through the builders.
    Expr rebuild(const Expr& e) const;

    /// +1, -1, or 0 when unknown.
    int sign_of(const Expr& e) const;
    bool nonzero(const Expr& e) const;

    const Assumptions* assumptions() const { return assumptions_; }

private:
    Expr power_const(const Rational& c, const Rational& q) const;
    Expr power_sum(const Expr& base, const Rational& q) const;
    Expr power_product(const Expr& base, const Rational& q) const;
    Expr expand(const Rational& coef, std::vector<Expr> plain, std::vector<Expr> sums) const;
    bool nonnegative(const Expr& e) const;

    const Assumptions* assumptions_;
};

/// Rebuild to a fixpoint under the given assumptions.
Expr simplify(const Expr& e, const Assumptions* assumptions = nullptr);

/// Rational coefficient and the remaining monomial of a term.
std::pair<Rational, Expr> split_coefficient(const Expr& term);
const std::vector<Expr>& terms_view(const Expr& e, std::vector<Expr>& storage);

bool depends_on(const Expr& e, const std::string& var);
bool contains(const Expr& e, const Expr& sub);
std::size_t node_count(const Expr& e);

}  // namespace gbe
