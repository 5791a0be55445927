#include "gbe/simplify.hpp"

#include <algorithm>
#include <functional>
#include <unordered_map>

namespace gbe {

void Assumptions::add(const Expr& atom, SignFact fact) { facts_[atom] = fact; }

const SignFact* Assumptions::find(const Expr& atom) const {
    auto it = facts_.find(atom);
    return it == facts_.end() ? nullptr : &it->second;
}

namespace {

Rational rpow(const Rational& c, long n) {
    Rational base = n >= 0 ? c : Rational(1) / c;
    unsigned long k = static_cast<unsigned long>(n >= 0 ? n : -n);
    mpz_class num, den;
    mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), k);
    mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), k);
    Rational r(num, den);
    r.canonicalize();
    return r;
}

bool exact_root(const mpz_class& v, unsigned long m, mpz_class& out) {
    return mpz_root(out.get_mpz_t(), v.get_mpz_t(), m) != 0;
}

bool odd(const mpz_class& z) { return mpz_odd_p(z.get_mpz_t()) != 0; }

// Multiplies a non-sum expression by a rational without rebuilding.
Expr scale(const Expr& e, const Rational& k) {
    if (k == 1) return e;
    if (e.is(Kind::Const)) return raw::constant(k * e.value());
    if (e.is(Kind::Prod)) return raw::product(k * e.value(), e.children());
    return raw::product(k, {e});
}

Expr term_from(const Rational& c, const Expr& monomial) {
    if (monomial.is_one()) return raw::constant(c);
    if (c == 1) return monomial;
    if (monomial.is(Kind::Prod)) return raw::product(c, monomial.children());
    return raw::product(c, {monomial});
}

Expr scale_sum(const Expr& s, const Rational& k) {
    std::vector<Expr> terms;
    terms.reserve(s.children().size());
    for (const auto& t : s.children()) {
        auto [c, m] = split_coefficient(t);
        terms.push_back(term_from(c * k, m));
    }
    return raw::sum(std::move(terms));
}

Rational last_coefficient(const Expr& s) { return split_coefficient(s.children().back()).first; }

}  // namespace

std::pair<Rational, Expr> split_coefficient(const Expr& term) {
    if (term.is(Kind::Const)) return {term.value(), Expr(1)};
    if (term.is(Kind::Prod)) {
        const auto& fs = term.children();
        if (fs.size() == 1) return {term.value(), fs[0]};
        return {term.value(), raw::product(1, fs)};
    }
    return {Rational(1), term};
}

const std::vector<Expr>& terms_view(const Expr& e, std::vector<Expr>& storage) {
    if (e.is(Kind::Sum)) return e.children();
    storage = {e};
    return storage;
}

Expr Simplifier::add(std::vector<Expr> terms) const {
    std::vector<std::pair<Expr, Rational>> items;
    Rational constant = 0;
    std::vector<Expr> stack(terms.rbegin(), terms.rend());
    while (!stack.empty()) {
        Expr t = std::move(stack.back());
        stack.pop_back();
        if (t.is(Kind::Sum)) {
            for (auto it = t.children().rbegin(); it != t.children().rend(); ++it) stack.push_back(*it);
        } else if (t.is(Kind::Const)) {
            constant += t.value();
        } else {
            auto [c, m] = split_coefficient(t);
            items.emplace_back(std::move(m), std::move(c));
        }
    }
    std::stable_sort(items.begin(), items.end(),
                     [](const auto& a, const auto& b) { return compare(a.first, b.first) < 0; });
    std::vector<Expr> out;
    if (sgn(constant) != 0) out.push_back(raw::constant(constant));
    for (std::size_t i = 0; i < items.size();) {
        Rational c = items[i].second;
        std::size_t j = i + 1;
        while (j < items.size() && items[j].first == items[i].first) c += items[j++].second;
        if (sgn(c) != 0) out.push_back(term_from(c, items[i].first));
        i = j;
    }
    if (out.empty()) return Expr(0);
    if (out.size() == 1) return out[0];
    return raw::sum(std::move(out));
}

Expr Simplifier::mul(std::vector<Expr> factors) const {
    Rational coef = 1;
    std::vector<std::pair<Expr, Rational>> bp;
    std::vector<Expr> exp_args;
    std::vector<Expr> stack(factors.rbegin(), factors.rend());
    while (!stack.empty()) {
        Expr f = std::move(stack.back());
        stack.pop_back();
        switch (f.kind()) {
        case Kind::Const:
            coef *= f.value();
            if (sgn(coef) == 0) return Expr(0);
            break;
        case Kind::Prod:
            coef *= f.value();
            for (auto it = f.children().rbegin(); it != f.children().rend(); ++it) stack.push_back(*it);
            break;
        case Kind::Call:
            if (f.node().fn == Fn::Exp) {
                exp_args.push_back(f.child(0));
            } else {
                bp.emplace_back(f, 1);
            }
            break;
        case Kind::Sum: {
            Rational c = last_coefficient(f);
            if (c != 1) {
                coef *= c;
                bp.emplace_back(scale_sum(f, Rational(1) / c), 1);
            } else {
                bp.emplace_back(f, 1);
            }
            break;
        }
        case Kind::Pow:
            bp.emplace_back(f.base(), f.exponent());
            break;
        default:
            bp.emplace_back(f, 1);
        }
    }
    if (sgn(coef) == 0) return Expr(0);
    std::stable_sort(bp.begin(), bp.end(), [](const auto& a, const auto& b) { return compare(a.first, b.first) < 0; });

    std::vector<Expr> out;
    std::vector<Expr> sums;
    bool redo = false;
    auto place = [&](const Expr& p) {
        switch (p.kind()) {
        case Kind::Const:
            coef *= p.value();
            break;
        case Kind::Prod:
            coef *= p.value();
            for (const auto& c : p.children()) {
                if (c.is(Kind::Call) && c.node().fn == Fn::Exp) {
                    exp_args.push_back(c.child(0));
                } else {
                    out.push_back(c);
                }
            }
            redo = redo || p.children().size() > 1;
            break;
        case Kind::Sum:
            sums.push_back(p);
            break;
        case Kind::Call:
            if (p.node().fn == Fn::Exp) {
                exp_args.push_back(p.child(0));
                break;
            }
            out.push_back(p);
            break;
        default:
            out.push_back(p);
        }
    };
    for (std::size_t i = 0; i < bp.size();) {
        Rational q = bp[i].second;
        std::size_t j = i + 1;
        while (j < bp.size() && bp[j].first == bp[i].first) q += bp[j++].second;
        const Expr& b = bp[i].first;
        if (sgn(q) != 0) {
            if (b.is(Kind::Prod) && !is_integer(q)) {
                out.push_back(raw::power(b, q));
            } else {
                place(power(b, q));
            }
        }
        i = j;
    }
    if (sgn(coef) == 0) return Expr(0);
    if (!exp_args.empty()) {
        Expr e = apply(Fn::Exp, add(exp_args));
        if (e.is(Kind::Call) && e.node().fn == Fn::Exp) {
            out.push_back(e);
        } else if (e.is(Kind::Const)) {
            coef *= e.value();
        } else {
            out.push_back(e);
            redo = true;
        }
    }
    // sign(B) * B^m = abs(B)^m for odd m
    for (std::size_t i = 0; i < out.size(); ++i) {
        const Expr& s = out[i];
        if (!s.is(Kind::Call) || s.node().fn != Fn::Sign) continue;
        const Expr& arg = s.child(0);
        for (std::size_t k = 0; k < out.size(); ++k) {
            Expr b;
            Rational m;
            if (out[k] == arg) {
                b = arg;
                m = 1;
            } else if (out[k].is(Kind::Pow) && out[k].base() == arg) {
                b = arg;
                m = out[k].exponent();
            } else {
                continue;
            }
            if (!is_integer(m) || !odd(m.get_num())) continue;
            Expr repl = power(apply(Fn::Abs, arg), m);
            std::vector<Expr> rest;
            for (std::size_t r = 0; r < out.size(); ++r)
                if (r != i && r != k) rest.push_back(out[r]);
            rest.push_back(repl);
            rest.push_back(raw::constant(coef));
            for (const auto& sm : sums) rest.push_back(sm);
            return mul(std::move(rest));
        }
    }
    if (redo) {
        std::vector<Expr> rest = out;
        rest.push_back(raw::constant(coef));
        for (const auto& sm : sums) rest.push_back(sm);
        bool changed = false;
        // only recurse if a base now repeats
        std::vector<Expr> bases;
        for (const auto& f : out) bases.push_back(f.is(Kind::Pow) ? f.base() : f);
        std::sort(bases.begin(), bases.end(), ExprLess{});
        for (std::size_t i = 1; i < bases.size(); ++i)
            if (bases[i] == bases[i - 1]) changed = true;
        if (changed) return mul(std::move(rest));
    }
    if (!sums.empty()) return expand(coef, std::move(out), std::move(sums));
    std::sort(out.begin(), out.end(), ExprLess{});
    if (out.empty()) return raw::constant(coef);
    if (out.size() == 1 && coef == 1) return out[0];
    return raw::product(coef, std::move(out));
}

Expr Simplifier::expand(const Rational& coef, std::vector<Expr> plain, std::vector<Expr> sums) const {
    std::sort(plain.begin(), plain.end(), ExprLess{});
    Expr head;
    if (plain.empty()) {
        head = raw::constant(coef);
    } else if (plain.size() == 1 && coef == 1) {
        head = plain[0];
    } else {
        head = raw::product(coef, std::move(plain));
    }
    std::vector<Expr> terms{head};
    for (const auto& s : sums) {
        std::vector<Expr> next;
        next.reserve(terms.size() * s.children().size());
        for (const auto& t : terms)
            for (const auto& u : s.children()) next.push_back(mul({t, u}));
        terms = std::move(next);
    }
    return add(std::move(terms));
}

Expr Simplifier::power_const(const Rational& c, const Rational& q) const {
    if (is_integer(q)) {
        if (sgn(c) == 0 && sgn(q) < 0) return raw::power(raw::constant(c), q);
        return raw::constant(rpow(c, q.get_num().get_si()));
    }
    const mpz_class& p = q.get_num();
    unsigned long m = q.get_den().get_ui();
    if (sgn(c) == 0) return sgn(q) > 0 ? Expr(0) : raw::power(raw::constant(c), q);
    if (sgn(c) < 0) {
        if (m % 2 == 0) return raw::power(raw::constant(c), q);
        Expr r = power_const(-c, q);
        return scale(r, odd(p) ? Rational(-1) : Rational(1));
    }
    mpz_class rn, rd;
    if (exact_root(c.get_num(), m, rn) && exact_root(c.get_den(), m, rd)) {
        Rational r(rn, rd);
        r.canonicalize();
        return raw::constant(rpow(r, p.get_si()));
    }
    mpz_class k;
    mpz_fdiv_q(k.get_mpz_t(), p.get_mpz_t(), q.get_den_mpz_t());
    Rational frac = q - Rational(k);
    Expr root = raw::power(raw::constant(c), frac);
    if (k == 0) return root;
    return raw::product(rpow(c, k.get_si()), {root});
}

Expr Simplifier::power_sum(const Expr& base, const Rational& q) const {
    if (is_integer(q) && sgn(q) > 0) {
        Expr result = base;
        long n = q.get_num().get_si();
        for (long i = 1; i < n; ++i) {
            std::vector<Expr> terms;
            std::vector<Expr> storage;
            const auto& lhs = terms_view(result, storage);
            for (const auto& a : lhs)
                for (const auto& b : base.children()) terms.push_back(mul({a, b}));
            result = add(std::move(terms));
        }
        return result;
    }
    Rational c = last_coefficient(base);
    if (!is_integer(q) && sgn(c) < 0) c = -c;
    if (c == 1) return raw::power(base, q);
    Expr monic = scale_sum(base, Rational(1) / c);
    return mul({power_const(c, q), raw::power(monic, q)});
}

bool Simplifier::nonnegative(const Expr& e) const {
    if (e.is(Kind::Pow)) {
        const Rational& q = e.exponent();
        if (!odd(q.get_num()) || !odd(q.get_den())) return true;
    }
    if (e.is(Kind::Call) && (e.node().fn == Fn::Exp || e.node().fn == Fn::Abs)) return true;
    return sign_of(e) > 0;
}

Expr Simplifier::power_product(const Expr& base, const Rational& q) const {
    std::vector<Expr> parts;
    if (is_integer(q)) {
        parts.push_back(power_const(base.value(), q));
        for (const auto& f : base.children()) parts.push_back(power(f, q));
        return mul(std::move(parts));
    }
    Rational c = base.value();
    Rational kept_coef = 1;
    if (sgn(c) < 0) {
        kept_coef = -1;
        c = -c;
    }
    std::vector<Expr> kept;
    for (const auto& f : base.children()) {
        if (nonnegative(f)) {
            parts.push_back(power(f, q));
        } else {
            kept.push_back(f);
        }
    }
    parts.push_back(power_const(c, q));
    if (kept.empty()) {
        if (kept_coef == -1) parts.push_back(power_const(-1, q));
    } else if (kept.size() == 1 && kept_coef == 1) {
        parts.push_back(power(kept[0], q));
    } else {
        parts.push_back(raw::power(raw::product(kept_coef, std::move(kept)), q));
    }
    return mul(std::move(parts));
}

Expr Simplifier::power(const Expr& base, const Rational& q) const {
    if (sgn(q) == 0) return Expr(1);
    if (q == 1) return base;
    switch (base.kind()) {
    case Kind::Const:
        return power_const(base.value(), q);
    case Kind::Pow: {
        const Expr& inner = base.base();
        const Rational& r = base.exponent();
        Rational rq = r * q;
        if (is_integer(q) || !odd(r.get_den()) || sign_of(inner) > 0) return power(inner, rq);
        if (!odd(r.get_num())) return power(apply(Fn::Abs, inner), rq);
        return power(inner, rq);
    }
    case Kind::Prod:
        return power_product(base, q);
    case Kind::Sum:
        return power_sum(base, q);
    case Kind::Call: {
        Fn fn = base.node().fn;
        if (fn == Fn::Exp) return apply(Fn::Exp, mul({raw::constant(q), base.child(0)}));
        if (fn == Fn::Abs && is_integer(q) && !odd(q.get_num())) return power(base.child(0), q);
        if (fn == Fn::Sign && is_integer(q)) return odd(q.get_num()) ? base : Expr(1);
        break;
    }
    default:
        break;
    }
    return raw::power(base, q);
}

Expr Simplifier::apply(Fn fn, const Expr& arg) const {
    switch (fn) {
    case Fn::Exp:
        if (arg.is_zero()) return Expr(1);
        if (arg.is(Kind::Call) && arg.node().fn == Fn::Ln) return arg.child(0);
        if (arg.is(Kind::Prod) && arg.children().size() == 1 && arg.child(0).is(Kind::Call) &&
            arg.child(0).node().fn == Fn::Ln)
            return power(arg.child(0).child(0), arg.value());
        break;
    case Fn::Ln:
        if (arg.is_one()) return Expr(0);
        if (arg.is(Kind::Call) && arg.node().fn == Fn::Exp) return arg.child(0);
        break;
    case Fn::Abs: {
        if (arg.is(Kind::Const)) return raw::constant(abs(arg.value()));
        int s = sign_of(arg);
        if (s > 0) return arg;
        if (s < 0) return mul({Expr(-1), arg});
        if (arg.is(Kind::Prod)) {
            std::vector<Expr> parts{raw::constant(abs(arg.value()))};
            for (const auto& f : arg.children()) parts.push_back(apply(Fn::Abs, f));
            return mul(std::move(parts));
        }
        if (nonnegative(arg)) return arg;
        if (arg.is(Kind::Pow)) return power(apply(Fn::Abs, arg.base()), arg.exponent());
        break;
    }
    case Fn::Sign: {
        if (arg.is(Kind::Const)) return Expr(sgn(arg.value()));
        int s = sign_of(arg);
        if (s != 0) return Expr(s);
        if (arg.is(Kind::Prod)) {
            std::vector<Expr> parts{Expr(sgn(arg.value()))};
            for (const auto& f : arg.children()) parts.push_back(apply(Fn::Sign, f));
            return mul(std::move(parts));
        }
        if (nonnegative(arg)) return Expr(1);
        if (arg.is(Kind::Pow)) return apply(Fn::Sign, arg.base());
        break;
    }
    case Fn::Sin:
        if (arg.is_zero()) return Expr(0);
        break;
    case Fn::Cos:
        if (arg.is_zero()) return Expr(1);
        break;
    }
    return raw::call(fn, arg);
}

Expr Simplifier::function(const std::string& name, const std::vector<std::string>& params, std::vector<Expr> args,
                          const std::vector<int>& orders) const {
    return raw::function(name, params, std::move(args), orders);
}

Expr Simplifier::integral(const Expr& body, const std::string& dummy, const Rational& lower,
                          const Expr& upper) const {
    if (body.is_zero()) return Expr(0);
    if (upper.is(Kind::Const) && upper.value() == lower) return Expr(0);
    if (body.is(Kind::Sum)) {
        std::vector<Expr> parts;
        for (const auto& t : body.children()) parts.push_back(integral(t, dummy, lower, upper));
        return add(std::move(parts));
    }
    if (!depends_on(body, dummy)) return mul({body, add({upper, raw::constant(-lower)})});
    if (body.is(Kind::Prod)) {
        std::vector<Expr> outside{raw::constant(body.value())};
        std::vector<Expr> inside;
        for (const auto& f : body.children()) {
            if (depends_on(f, dummy)) {
                inside.push_back(f);
            } else {
                outside.push_back(f);
            }
        }
        if (body.value() != 1 || outside.size() > 1) {
            Expr in = inside.size() == 1 ? inside[0] : raw::product(1, inside);
            outside.push_back(raw::integral(in, dummy, lower, upper));
            return mul(std::move(outside));
        }
    }
    return raw::integral(body, dummy, lower, upper);
}

Expr Simplifier::rebuild(const Expr& e) const {
    std::unordered_map<const Node*, Expr> memo;
    std::function<Expr(const Expr&)> go = [&](const Expr& x) -> Expr {
        auto it = memo.find(x.ptr());
        if (it != memo.end()) return it->second;
        Expr r;
        switch (x.kind()) {
        case Kind::Const:
        case Kind::Var:
            r = x;
            break;
        case Kind::Func: {
            std::vector<Expr> args;
            for (const auto& a : x.children()) args.push_back(go(a));
            r = function(x.name(), x.node().params, std::move(args), x.node().orders);
            break;
        }
        case Kind::Call:
            r = apply(x.node().fn, go(x.child(0)));
            break;
        case Kind::Pow:
            r = power(go(x.base()), x.exponent());
            break;
        case Kind::Int:
            r = integral(go(x.body()), x.name(), x.value(), go(x.upper()));
            break;
        case Kind::Prod: {
            std::vector<Expr> fs{raw::constant(x.value())};
            for (const auto& f : x.children()) fs.push_back(go(f));
            r = mul(std::move(fs));
            break;
        }
        case Kind::Sum: {
            std::vector<Expr> ts;
            for (const auto& t : x.children()) ts.push_back(go(t));
            r = add(std::move(ts));
            break;
        }
        }
        memo.emplace(x.ptr(), r);
        return r;
    };
    return go(e);
}

int Simplifier::sign_of(const Expr& e) const {
    if (e.is(Kind::Const)) return sgn(e.value());
    if (assumptions_) {
        if (const SignFact* f = assumptions_->find(e)) {
            if (*f == SignFact::Positive) return 1;
            if (*f == SignFact::Negative) return -1;
        }
    }
    switch (e.kind()) {
    case Kind::Call:
        if (e.node().fn == Fn::Exp || e.node().fn == Fn::Abs) return 1;
        return 0;
    case Kind::Pow: {
        const Rational& q = e.exponent();
        if (!odd(q.get_num()) || !odd(q.get_den())) return 1;
        return sign_of(e.base());
    }
    case Kind::Prod: {
        int s = sgn(e.value());
        for (const auto& f : e.children()) {
            int k = sign_of(f);
            if (k == 0) return 0;
            s *= k;
        }
        return s;
    }
    case Kind::Sum: {
        int s = sign_of(e.child(0));
        if (s == 0) return 0;
        for (const auto& t : e.children())
            if (sign_of(t) != s) return 0;
        return s;
    }
    default:
        return 0;
    }
}

bool Simplifier::nonzero(const Expr& e) const {
    if (sign_of(e) != 0) return true;
    if (assumptions_) {
        if (assumptions_->find(e)) return true;
    }
    switch (e.kind()) {
    case Kind::Pow:
        return nonzero(e.base());
    case Kind::Prod:
        for (const auto& f : e.children())
            if (!nonzero(f)) return false;
        return true;
    case Kind::Call:
        return e.node().fn == Fn::Abs ? nonzero(e.child(0)) : e.node().fn == Fn::Exp;
    default:
        return false;
    }
}

Expr simplify(const Expr& e, const Assumptions* assumptions) {
    Simplifier s(assumptions);
    Expr cur = e;
    for (int i = 0; i < 12; ++i) {
        Expr next = s.rebuild(cur);
        if (next == cur) return next;
        cur = next;
    }
    return cur;
}

bool depends_on(const Expr& e, const std::string& var) {
    switch (e.kind()) {
    case Kind::Const:
        return false;
    case Kind::Var:
        return e.name() == var;
    case Kind::Int:
        if (e.name() == var) return depends_on(e.upper(), var);
        return depends_on(e.body(), var) || depends_on(e.upper(), var);
    default:
        for (const auto& c : e.children())
            if (depends_on(c, var)) return true;
        return false;
    }
}

bool contains(const Expr& e, const Expr& sub) {
    if (e == sub) return true;
    for (const auto& c : e.children())
        if (contains(c, sub)) return true;
    return false;
}

std::size_t node_count(const Expr& e) {
    std::size_t n = 1;
    for (const auto& c : e.children()) n += node_count(c);
    return n;
}

}  // namespace gbe
