#pragma once

#include "gbe/simplify.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace gbe {

/// Partial derivative. abs and sign need a sign fact for their argument.
Expr differentiate(const Expr& e, const std::string& var, const Assumptions* assumptions = nullptr);
Expr differentiate(const Expr& e, const std::string& var, int order, const Assumptions* assumptions = nullptr);

/// As differentiate, but abs and sign of an argument with unknown sign are
/// treated as locally constant-signed: |g|' = sign(g) g', sign(g)' = 0.
/// Exact away from the zero set of g, which nondegeneracy conditions exclude.
Expr differentiate_branchwise(const Expr& e, const std::string& var, const Assumptions* assumptions = nullptr);

/// Simultaneous substitution. Function replacements are written in the
/// function's declared parameters; derivative nodes differentiate them.
struct Substitution {
    std::map<std::string, Expr> vars;
    std::map<std::string, Expr> funcs;

    Substitution& var(const std::string& name, const Expr& e) {
        vars[name] = e;
        return *this;
    }
    Substitution& func(const std::string& name, const Expr& e) {
        funcs[name] = e;
        return *this;
    }
};

Expr substitute(const Expr& e, const Substitution& s, const Assumptions* assumptions = nullptr);
Expr substitute(const Expr& e, const std::string& var, const Expr& value);
/// Substitution whose derivative rewrites differentiate branchwise.
Expr substitute_branchwise(const Expr& e, const Substitution& s, const Assumptions* assumptions = nullptr);

/// e(t, x, u) evaluated at (T, X, U).
Expr compose_point(const Expr& e, const Expr& T, const Expr& X, const Expr& U);
Expr compose_point(const Expr& e, const Expr& T, const Expr& X);

std::set<std::string> free_vars(const Expr& e);
/// Function symbols occurring in e, with their declared parameters.
std::map<std::string, std::vector<std::string>> function_symbols(const Expr& e);

/// Coefficients of e as a polynomial in the atom; index = power.
std::vector<Expr> collect(const Expr& e, const Expr& atom);
Expr reassemble(const std::vector<Expr>& coefficients, const Expr& atom);

/// Rational normalization e = numerator / denominator.
struct Fraction {
    Expr numerator;
    Expr denominator;
};
Fraction together(const Expr& e);

/// Table antiderivative from `lower` (powers, exponentials and sin/cos of
/// linear arguments). Empty when the body is outside the table.
std::optional<Expr> integrate_table(const Expr& body, const std::string& var, const Rational& lower = 0);
/// Replaces every Int node whose body is covered by the table.
Expr eval_integrals(const Expr& e);

}  // namespace gbe
