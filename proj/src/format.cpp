#include "gbe/format.hpp"

#include <sstream>

namespace gbe {

namespace {

std::string fmt(const Expr& e);

bool bare_base(const Expr& b) {
    switch (b.kind()) {
    case Kind::Var:
    case Kind::Func:
    case Kind::Call:
    case Kind::Int:
        return true;
    case Kind::Const:
        return is_integer(b.value()) && sgn(b.value()) >= 0;
    default:
        return false;
    }
}

std::string exponent_text(const Rational& q) {
    if (is_integer(q) && sgn(q) > 0) return q.get_str();
    return "(" + q.get_str() + ")";
}

std::string power_text(const Expr& base, const Rational& q) {
    std::string b = bare_base(base) ? fmt(base) : "(" + fmt(base) + ")";
    if (q == 1) return b;
    return b + "^" + exponent_text(q);
}

std::string product_text(Rational coef, const std::vector<Expr>& factors) {
    std::string sign;
    if (sgn(coef) < 0) {
        sign = "-";
        coef = -coef;
    }
    std::vector<std::string> num, den;
    if (coef.get_num() != 1) num.push_back(coef.get_num().get_str());
    if (coef.get_den() != 1) den.push_back(coef.get_den().get_str());
    for (const auto& f : factors) {
        if (f.is(Kind::Pow) && sgn(f.exponent()) < 0) {
            den.push_back(power_text(f.base(), -f.exponent()));
        } else if (f.is(Kind::Pow)) {
            num.push_back(power_text(f.base(), f.exponent()));
        } else if (f.is(Kind::Sum) || f.is(Kind::Prod)) {
            num.push_back("(" + fmt(f) + ")");
        } else if (f.is(Kind::Const) && !bare_base(f)) {
            num.push_back("(" + fmt(f) + ")");
        } else {
            num.push_back(fmt(f));
        }
    }
    std::string out = sign;
    if (num.empty()) {
        out += "1";
    } else {
        for (std::size_t i = 0; i < num.size(); ++i) out += (i ? "*" : "") + num[i];
    }
    if (!den.empty()) {
        out += "/";
        if (den.size() > 1) out += "(";
        for (std::size_t i = 0; i < den.size(); ++i) out += (i ? "*" : "") + den[i];
        if (den.size() > 1) out += ")";
    }
    return out;
}

bool negative_term(const Expr& t) {
    if (t.is(Kind::Const)) return sgn(t.value()) < 0;
    if (t.is(Kind::Prod)) return sgn(t.value()) < 0;
    return false;
}

Expr negate_term(const Expr& t) {
    if (t.is(Kind::Const)) return raw::constant(-t.value());
    return raw::product(-t.value(), t.children());
}

std::string fmt(const Expr& e) {
    switch (e.kind()) {
    case Kind::Const:
        return e.value().get_str();
    case Kind::Var:
        return e.name();
    case Kind::Func: {
        const Node& n = e.node();
        std::string s = n.name;
        std::string suffix;
        for (std::size_t i = 0; i < n.params.size(); ++i)
            for (int k = 0; k < n.orders[i]; ++k) suffix += n.params[i];
        if (!suffix.empty()) s += "_" + suffix;
        if (!e.has_default_args()) {
            s += "(";
            for (std::size_t i = 0; i < n.children.size(); ++i) s += (i ? ", " : "") + fmt(n.children[i]);
            s += ")";
        }
        return s;
    }
    case Kind::Call:
        return std::string(fn_name(e.node().fn)) + "(" + fmt(e.child(0)) + ")";
    case Kind::Pow:
        if (sgn(e.exponent()) < 0) return product_text(1, {e});
        return power_text(e.base(), e.exponent());
    case Kind::Int: {
        std::string s = "int(" + fmt(e.body()) + ", " + e.name();
        bool plain = sgn(e.value()) == 0 && e.upper().is(Kind::Var) && e.upper().name() == e.name();
        if (!plain) s += ", " + e.value().get_str() + ", " + fmt(e.upper());
        return s + ")";
    }
    case Kind::Prod:
        return product_text(e.value(), e.children());
    case Kind::Sum: {
        std::string s;
        const auto& ts = e.children();
        for (std::size_t i = 0; i < ts.size(); ++i) {
            if (i == 0) {
                s += fmt(ts[i]);
            } else if (negative_term(ts[i])) {
                s += " - " + fmt(negate_term(ts[i]));
            } else {
                s += " + " + fmt(ts[i]);
            }
        }
        return s;
    }
    }
    return "?";
}

}  // namespace

std::string format(const Expr& e) { return fmt(e); }
std::string format(const Rational& q) { return q.get_str(); }

}  // namespace gbe
