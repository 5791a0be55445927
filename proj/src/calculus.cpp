#include "gbe/calculus.hpp"

#include "gbe/format.hpp"

#include <algorithm>
#include <functional>
#include <unordered_map>

namespace gbe {

namespace {

using Memo = std::unordered_map<const Node*, Expr>;

thread_local bool branchwise = false;

Expr diff_impl(const Expr& e, const std::string& var, const Simplifier& s, Memo& memo);

Expr diff_int(const Expr& e, const std::string& var, const Simplifier& s, Memo& memo) {
    const std::string& dummy = e.name();
    std::vector<Expr> parts;
    Expr du = diff_impl(e.upper(), var, s, memo);
    if (!du.is_zero()) {
        Expr at_upper = substitute(e.body(), Substitution{}.var(dummy, e.upper()), s.assumptions());
        parts.push_back(s.mul({at_upper, du}));
    }
    if (var != dummy && depends_on(e.body(), var)) {
        Memo inner;
        Expr db = diff_impl(e.body(), var, s, inner);
        parts.push_back(s.integral(db, dummy, e.value(), e.upper()));
    }
    return s.add(std::move(parts));
}

Expr diff_impl(const Expr& e, const std::string& var, const Simplifier& s, Memo& memo) {
    auto it = memo.find(e.ptr());
    if (it != memo.end()) return it->second;
    Expr r;
    switch (e.kind()) {
    case Kind::Const:
        r = Expr(0);
        break;
    case Kind::Var:
        r = Expr(e.name() == var ? 1 : 0);
        break;
    case Kind::Func: {
        const Node& n = e.node();
        std::vector<Expr> parts;
        for (std::size_t i = 0; i < n.params.size(); ++i) {
            Expr da = diff_impl(n.children[i], var, s, memo);
            if (da.is_zero()) continue;
            std::vector<int> orders = n.orders;
            ++orders[i];
            parts.push_back(s.mul({raw::function(n.name, n.params, n.children, orders), da}));
        }
        r = s.add(std::move(parts));
        break;
    }
    case Kind::Call: {
        const Expr& a = e.child(0);
        Expr da = diff_impl(a, var, s, memo);
        if (da.is_zero()) {
            r = Expr(0);
            break;
        }
        switch (e.node().fn) {
        case Fn::Exp:
            r = s.mul({e, da});
            break;
        case Fn::Ln:
            r = s.mul({da, s.power(a, -1)});
            break;
        case Fn::Sin:
            r = s.mul({s.apply(Fn::Cos, a), da});
            break;
        case Fn::Cos:
            r = s.mul({Expr(-1), s.apply(Fn::Sin, a), da});
            break;
        case Fn::Abs: {
            int sg = s.sign_of(a);
            if (sg > 0) {
                r = da;
            } else if (sg < 0) {
                r = s.mul({Expr(-1), da});
            } else if (branchwise || s.nonzero(a)) {
                r = s.mul({s.apply(Fn::Sign, a), da});
            } else {
                throw DiffError("cannot differentiate abs(" + format(a) + ") without a sign assumption");
            }
            break;
        }
        case Fn::Sign:
            if (!branchwise && s.sign_of(a) == 0 && !s.nonzero(a))
                throw DiffError("cannot differentiate sign(" + format(a) + ") without a sign assumption");
            r = Expr(0);
            break;
        }
        break;
    }
    case Kind::Pow: {
        Expr db = diff_impl(e.base(), var, s, memo);
        if (db.is_zero()) {
            r = Expr(0);
            break;
        }
        const Rational& q = e.exponent();
        r = s.mul({raw::constant(q), s.power(e.base(), q - 1), db});
        break;
    }
    case Kind::Int:
        r = diff_int(e, var, s, memo);
        break;
    case Kind::Prod: {
        const auto& fs = e.children();
        std::vector<Expr> parts;
        for (std::size_t i = 0; i < fs.size(); ++i) {
            Expr df = diff_impl(fs[i], var, s, memo);
            if (df.is_zero()) continue;
            std::vector<Expr> term{raw::constant(e.value()), df};
            for (std::size_t j = 0; j < fs.size(); ++j)
                if (j != i) term.push_back(fs[j]);
            parts.push_back(s.mul(std::move(term)));
        }
        r = s.add(std::move(parts));
        break;
    }
    case Kind::Sum: {
        std::vector<Expr> parts;
        for (const auto& t : e.children()) parts.push_back(diff_impl(t, var, s, memo));
        r = s.add(std::move(parts));
        break;
    }
    }
    memo.emplace(e.ptr(), r);
    return r;
}

std::string fresh_name(const std::string& base, const std::set<std::string>& taken) {
    for (int i = 1;; ++i) {
        std::string n = base + std::to_string(i);
        if (!taken.count(n)) return n;
    }
}

class Substituter {
public:
    Substituter(const Substitution& sub, const Assumptions* a) : sub_(sub), s_(a), a_(a) {}

    Expr run(const Expr& x) {
        auto it = memo_.find(x.ptr());
        if (it != memo_.end()) return it->second;
        Expr r = go(x);
        memo_.emplace(x.ptr(), r);
        return r;
    }

private:
    Expr go(const Expr& x) {
        switch (x.kind()) {
        case Kind::Const:
            return x;
        case Kind::Var: {
            auto it = sub_.vars.find(x.name());
            return it == sub_.vars.end() ? x : it->second;
        }
        case Kind::Func:
            return func(x);
        case Kind::Call:
            return s_.apply(x.node().fn, run(x.child(0)));
        case Kind::Pow:
            return s_.power(run(x.base()), x.exponent());
        case Kind::Int:
            return integral(x);
        case Kind::Prod: {
            std::vector<Expr> fs{raw::constant(x.value())};
            for (const auto& f : x.children()) fs.push_back(run(f));
            return s_.mul(std::move(fs));
        }
        case Kind::Sum: {
            std::vector<Expr> ts;
            for (const auto& t : x.children()) ts.push_back(run(t));
            return s_.add(std::move(ts));
        }
        }
        return x;
    }

    Expr func(const Expr& x) {
        const Node& n = x.node();
        std::vector<Expr> args;
        bool default_args = true;
        for (std::size_t i = 0; i < n.children.size(); ++i) {
            args.push_back(run(n.children[i]));
            if (!(args.back().is(Kind::Var) && args.back().name() == n.params[i])) default_args = false;
        }
        auto it = sub_.funcs.find(n.name);
        if (it == sub_.funcs.end()) return s_.function(n.name, n.params, std::move(args), n.orders);
        Expr d = derivative_of(n.name, n.params, it->second, n.orders);
        if (default_args) return d;
        Substitution at;
        for (std::size_t i = 0; i < n.params.size(); ++i) at.var(n.params[i], args[i]);
        return substitute(d, at, a_);
    }

    Expr derivative_of(const std::string& name, const std::vector<std::string>& params, const Expr& repl,
                       const std::vector<int>& orders) {
        auto key = std::make_pair(name, orders);
        auto it = derivs_.find(key);
        if (it != derivs_.end()) return it->second;
        if (!checked_.count(name)) {
            for (const auto& v : free_vars(repl)) {
                if (std::find(params.begin(), params.end(), v) == params.end())
                    throw ArityError("replacement for " + name + " depends on " + v + ", which is not an argument of " +
                                     name);
            }
            checked_.insert(name);
        }
        Expr d = repl;
        for (std::size_t i = 0; i < params.size(); ++i) d = differentiate(d, params[i], orders[i], a_);
        derivs_.emplace(key, d);
        return d;
    }

    Expr integral(const Expr& x) {
        std::string dummy = x.name();
        Expr upper = run(x.upper());
        Substitution inner = sub_;
        inner.vars.erase(dummy);
        Expr body = x.body();
        auto body_vars = free_vars(body);
        bool capture = false;
        for (const auto& [v, r] : inner.vars)
            if (body_vars.count(v) && depends_on(r, dummy)) capture = true;
        if (capture) {
            std::set<std::string> taken = body_vars;
            for (const auto& [v, r] : inner.vars) {
                taken.insert(v);
                for (const auto& w : free_vars(r)) taken.insert(w);
            }
            for (const auto& w : free_vars(upper)) taken.insert(w);
            std::string renamed = fresh_name("s", taken);
            body = substitute(body, Substitution{}.var(dummy, var(renamed)), a_);
            dummy = renamed;
        }
        Expr nb = substitute(body, inner, a_);
        return s_.integral(nb, dummy, x.value(), upper);
    }

    const Substitution& sub_;
    Simplifier s_;
    const Assumptions* a_;
    Memo memo_;
    std::map<std::pair<std::string, std::vector<int>>, Expr> derivs_;
    std::set<std::string> checked_;
};

void collect_free(const Expr& e, std::set<std::string>& out) {
    switch (e.kind()) {
    case Kind::Var:
        out.insert(e.name());
        return;
    case Kind::Int: {
        std::set<std::string> inner;
        collect_free(e.body(), inner);
        inner.erase(e.name());
        out.insert(inner.begin(), inner.end());
        collect_free(e.upper(), out);
        return;
    }
    default:
        for (const auto& c : e.children()) collect_free(c, out);
    }
}

void collect_functions(const Expr& e, std::map<std::string, std::vector<std::string>>& out) {
    if (e.is(Kind::Func)) out[e.name()] = e.node().params;
    for (const auto& c : e.children()) collect_functions(c, out);
}

bool linear_in(const Expr& arg, const std::string& var, Expr& slope) {
    slope = differentiate(arg, var);
    return !slope.is_zero() && !depends_on(slope, var);
}

std::optional<Expr> antiderivative(const Expr& b, const std::string& v) {
    if (!depends_on(b, v)) return b * var(v);
    switch (b.kind()) {
    case Kind::Var:
        return pow(b, 2) / Expr(2);
    case Kind::Sum: {
        Expr acc(0);
        for (const auto& t : b.children()) {
            auto a = antiderivative(t, v);
            if (!a) return std::nullopt;
            acc += *a;
        }
        return acc;
    }
    case Kind::Prod: {
        Expr outside(b.value());
        std::vector<Expr> inside;
        for (const auto& f : b.children()) {
            if (depends_on(f, v)) {
                inside.push_back(f);
            } else {
                outside *= f;
            }
        }
        if (inside.size() != 1) return std::nullopt;
        auto a = antiderivative(inside[0], v);
        if (!a) return std::nullopt;
        return outside * *a;
    }
    case Kind::Pow: {
        Expr slope;
        const Rational& q = b.exponent();
        if (q == -1 || !linear_in(b.base(), v, slope)) return std::nullopt;
        return pow(b.base(), q + 1) / (Expr(q + 1) * slope);
    }
    case Kind::Call: {
        Expr slope;
        if (!linear_in(b.child(0), v, slope)) return std::nullopt;
        switch (b.node().fn) {
        case Fn::Exp:
            return b / slope;
        case Fn::Sin:
            return -cos(b.child(0)) / slope;
        case Fn::Cos:
            return sin(b.child(0)) / slope;
        default:
            return std::nullopt;
        }
    }
    default:
        return std::nullopt;
    }
}

}  // namespace

Expr differentiate(const Expr& e, const std::string& var, const Assumptions* assumptions) {
    Simplifier s(assumptions);
    Memo memo;
    return diff_impl(e, var, s, memo);
}

Expr differentiate(const Expr& e, const std::string& var, int order, const Assumptions* assumptions) {
    Expr r = e;
    for (int i = 0; i < order; ++i) r = differentiate(r, var, assumptions);
    return r;
}

Expr differentiate_branchwise(const Expr& e, const std::string& var, const Assumptions* assumptions) {
    bool saved = branchwise;
    branchwise = true;
    try {
        Expr r = differentiate(e, var, assumptions);
        branchwise = saved;
        return r;
    } catch (...) {
        branchwise = saved;
        throw;
    }
}

Expr substitute_branchwise(const Expr& e, const Substitution& s, const Assumptions* assumptions) {
    bool saved = branchwise;
    branchwise = true;
    try {
        Expr r = substitute(e, s, assumptions);
        branchwise = saved;
        return r;
    } catch (...) {
        branchwise = saved;
        throw;
    }
}

Expr substitute(const Expr& e, const Substitution& s, const Assumptions* assumptions) {
    if (s.vars.empty() && s.funcs.empty()) return e;
    Substituter sub(s, assumptions);
    return sub.run(e);
}

Expr substitute(const Expr& e, const std::string& name, const Expr& value) {
    return substitute(e, Substitution{}.var(name, value));
}

Expr compose_point(const Expr& e, const Expr& T, const Expr& X, const Expr& U) {
    return substitute(e, Substitution{}.var("t", T).var("x", X).var("u", U));
}

Expr compose_point(const Expr& e, const Expr& T, const Expr& X) {
    return substitute(e, Substitution{}.var("t", T).var("x", X));
}

std::set<std::string> free_vars(const Expr& e) {
    std::set<std::string> out;
    collect_free(e, out);
    return out;
}

std::map<std::string, std::vector<std::string>> function_symbols(const Expr& e) {
    std::map<std::string, std::vector<std::string>> out;
    collect_functions(e, out);
    return out;
}

std::vector<Expr> collect(const Expr& e, const Expr& atom) {
    std::vector<Expr> storage;
    std::map<long, std::vector<Expr>> buckets;
    for (const auto& term : terms_view(e, storage)) {
        std::vector<Expr> factors;
        std::vector<Expr> rest;
        if (term.is(Kind::Prod)) {
            rest.push_back(raw::constant(term.value()));
            factors = term.children();
        } else {
            factors = {term};
        }
        long k = 0;
        for (const auto& f : factors) {
            if (f == atom) {
                k += 1;
            } else if (f.is(Kind::Pow) && f.base() == atom && is_integer(f.exponent()) && sgn(f.exponent()) > 0) {
                k += f.exponent().get_num().get_si();
            } else {
                if (contains(f, atom)) throw NonPolynomial("expression is not polynomial in " + format(atom));
                rest.push_back(f);
            }
        }
        buckets[k].push_back(Simplifier().mul(std::move(rest)));
    }
    long top = buckets.empty() ? 0 : buckets.rbegin()->first;
    std::vector<Expr> out(static_cast<std::size_t>(top + 1), Expr(0));
    for (auto& [k, ts] : buckets) out[static_cast<std::size_t>(k)] = Simplifier().add(std::move(ts));
    return out;
}

Expr reassemble(const std::vector<Expr>& coefficients, const Expr& atom) {
    std::vector<Expr> terms;
    for (std::size_t k = 0; k < coefficients.size(); ++k)
        terms.push_back(coefficients[k] * pow(atom, static_cast<long>(k)));
    return Simplifier().add(std::move(terms));
}

Fraction together(const Expr& e) {
    Simplifier s;
    std::vector<Expr> storage;
    const auto& terms = terms_view(e, storage);
    std::map<Expr, Rational, ExprLess> denom;
    for (const auto& t : terms) {
        std::vector<Expr> one{t};
        const auto& fs = t.is(Kind::Prod) ? t.children() : one;
        for (const auto& f : fs) {
            if (!f.is(Kind::Pow) || sgn(f.exponent()) >= 0) continue;
            Rational need = -f.exponent();
            auto it = denom.find(f.base());
            if (it == denom.end()) {
                denom.emplace(f.base(), need);
            } else if (it->second < need) {
                it->second = need;
            }
        }
    }
    if (denom.empty()) return {e, Expr(1)};
    std::vector<Expr> dfs;
    for (const auto& [b, q] : denom) dfs.push_back(s.power(b, q));
    Expr d = s.mul(dfs);
    // Each term's cofactor comes from exponent arithmetic, since multiplying
    // by d directly would expand d before its factors can cancel.
    std::vector<Expr> parts;
    for (const auto& t : terms) {
        std::vector<Expr> one{t};
        const auto& fs = t.is(Kind::Prod) ? t.children() : one;
        std::vector<Expr> keep;
        if (t.is(Kind::Prod)) keep.push_back(raw::constant(t.value()));
        std::map<Expr, Rational, ExprLess> have;
        for (const auto& f : fs) {
            if (f.is(Kind::Pow) && sgn(f.exponent()) < 0)
                have[f.base()] += -f.exponent();
            else
                keep.push_back(f);
        }
        for (const auto& [b, q] : denom) {
            Rational rest = q;
            auto it = have.find(b);
            if (it != have.end()) rest -= it->second;
            if (sgn(rest) != 0) keep.push_back(s.power(b, rest));
        }
        parts.push_back(s.mul(std::move(keep)));
    }
    return {s.add(std::move(parts)), d};
}

std::optional<Expr> integrate_table(const Expr& body, const std::string& v, const Rational& lower) {
    auto a = antiderivative(body, v);
    if (!a) return std::nullopt;
    return *a - substitute(*a, v, Expr(lower));
}

Expr eval_integrals(const Expr& e) {
    if (e.children().empty()) return e;
    std::vector<Expr> kids;
    for (const auto& c : e.children()) kids.push_back(eval_integrals(c));
    Simplifier s;
    switch (e.kind()) {
    case Kind::Int: {
        auto a = integrate_table(kids[0], e.name(), e.value());
        if (a) return substitute(*a, e.name(), kids[1]);
        return s.integral(kids[0], e.name(), e.value(), kids[1]);
    }
    case Kind::Func:
        return s.function(e.name(), e.node().params, kids, e.node().orders);
    case Kind::Call:
        return s.apply(e.node().fn, kids[0]);
    case Kind::Pow:
        return s.power(kids[0], e.exponent());
    case Kind::Prod:
        kids.push_back(raw::constant(e.value()));
        return s.mul(kids);
    case Kind::Sum:
        return s.add(kids);
    default:
        return e;
    }
}

}  // namespace gbe
