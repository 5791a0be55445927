#pragma once

#include "gbe/simplify.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace gbe {

struct ParseError : ExprError {
    ParseError(const std::string& message, std::size_t position)
        : ExprError("position " + std::to_string(position) + ": " + message), position(position) {}
    std::size_t position;
};

struct UndeclaredSymbol : ExprError {
    explicit UndeclaredSymbol(const std::string& symbol)
        : ExprError("undeclared symbol '" + symbol + "'"), symbol(symbol) {}
    std::string symbol;
};

/// Declared variables, function signatures and sign assumptions.
class Context {
public:
    void declare_variable(const std::string& name);
    void declare_function(const std::string& name, std::vector<std::string> params);
    bool is_variable(const std::string& name) const { return variables_.count(name) > 0; }
    const std::vector<std::string>* function(const std::string& name) const;

    /// "T_t>0", "a<0", "V1!=0"; several may be joined with ','.
    void assume(const std::string& text);
    void assume(const Expr& atom, SignFact fact) { assumptions_.add(atom, fact); }
    const Assumptions& assumptions() const { return assumptions_; }

    const std::set<std::string>& variables() const { return variables_; }
    const std::map<std::string, std::vector<std::string>>& functions() const { return functions_; }

    /// Coordinates t, x, u as variables; every arbitrary element and
    /// transformation parameter as a function symbol.
    static Context elements();
    /// As elements(), but u(t,x) and v(t,x) are unknown functions.
    static Context pde();

private:
    std::set<std::string> variables_;
    std::map<std::string, std::vector<std::string>> functions_;
    Assumptions assumptions_;
};

Expr parse(const std::string& text, const Context& context);
Rational parse_rational(const std::string& text);

}  // namespace gbe
