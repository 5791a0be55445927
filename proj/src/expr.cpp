#include "gbe/expr.hpp"

#include "gbe/simplify.hpp"

#include <functional>

namespace gbe {

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
    return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

std::size_t compute_hash(const Node& n) {
    std::size_t h = static_cast<std::size_t>(n.kind) * 1315423911u;
    switch (n.kind) {
    case Kind::Const:
        return mix(h, hash_rational(n.value));
    case Kind::Var:
        return mix(h, std::hash<std::string>{}(n.name));
    case Kind::Func:
        h = mix(h, std::hash<std::string>{}(n.name));
        for (int o : n.orders) h = mix(h, static_cast<std::size_t>(o));
        break;
    case Kind::Call:
        h = mix(h, static_cast<std::size_t>(n.fn));
        break;
    case Kind::Pow:
    case Kind::Prod:
        h = mix(h, hash_rational(n.value));
        break;
    case Kind::Int:
        h = mix(h, std::hash<std::string>{}(n.name));
        h = mix(h, hash_rational(n.value));
        break;
    case Kind::Sum:
        break;
    }
    for (const auto& c : n.children) h = mix(h, c.hash());
    return h;
}

Expr make(Node n) {
    n.hash = compute_hash(n);
    return Expr(std::make_shared<const Node>(std::move(n)));
}

const Expr& zero_expr() {
    static const Expr z = raw::constant(0);
    return z;
}

int cmp_rational(const Rational& a, const Rational& b) {
    int c = cmp(a, b);
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

int cmp_vec(const std::vector<Expr>& a, const std::vector<Expr>& b) {
    std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        int c = compare(a[i], b[i]);
        if (c != 0) return c;
    }
    if (a.size() == b.size()) return 0;
    return a.size() < b.size() ? -1 : 1;
}

}  // namespace

const char* fn_name(Fn fn) {
    switch (fn) {
    case Fn::Exp: return "exp";
    case Fn::Ln: return "ln";
    case Fn::Abs: return "abs";
    case Fn::Sign: return "sign";
    case Fn::Sin: return "sin";
    case Fn::Cos: return "cos";
    }
    return "?";
}

bool is_integer(const Rational& q) { return q.get_den() == 1; }

std::size_t hash_rational(const Rational& q) {
    std::size_t h = static_cast<std::size_t>(mpz_get_si(q.get_num_mpz_t()));
    return mix(h, static_cast<std::size_t>(mpz_get_si(q.get_den_mpz_t())));
}

Expr::Expr() : node_(zero_expr().node_) {}
Expr::Expr(int v) : Expr(raw::constant(Rational(v))) {}
Expr::Expr(long v) : Expr(raw::constant(Rational(v))) {}
Expr::Expr(const Rational& v) : Expr(raw::constant(v)) {}
Expr::Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

bool Expr::is_zero() const { return node_->kind == Kind::Const && sgn(node_->value) == 0; }
bool Expr::is_one() const { return node_->kind == Kind::Const && node_->value == 1; }

bool Expr::has_default_args() const {
    const Node& n = *node_;
    for (std::size_t i = 0; i < n.params.size(); ++i) {
        const Node& a = *n.children[i].node_;
        if (a.kind != Kind::Var || a.name != n.params[i]) return false;
    }
    return true;
}

bool Expr::is_function(const std::string& symbol) const {
    return node_->kind == Kind::Func && node_->name == symbol;
}

int compare(const Expr& a, const Expr& b) {
    if (a.ptr() == b.ptr()) return 0;
    const Node& x = a.node();
    const Node& y = b.node();
    if (x.kind != y.kind) return x.kind < y.kind ? -1 : 1;
    switch (x.kind) {
    case Kind::Const:
        return cmp_rational(x.value, y.value);
    case Kind::Var:
        return x.name.compare(y.name) < 0 ? -1 : (x.name == y.name ? 0 : 1);
    case Kind::Func: {
        if (x.name != y.name) return x.name < y.name ? -1 : 1;
        if (x.orders != y.orders) return x.orders < y.orders ? -1 : 1;
        if (x.params != y.params) return x.params < y.params ? -1 : 1;
        return cmp_vec(x.children, y.children);
    }
    case Kind::Call:
        if (x.fn != y.fn) return x.fn < y.fn ? -1 : 1;
        return compare(x.children[0], y.children[0]);
    case Kind::Pow: {
        int c = compare(x.children[0], y.children[0]);
        return c != 0 ? c : cmp_rational(x.value, y.value);
    }
    case Kind::Int: {
        if (x.name != y.name) return x.name < y.name ? -1 : 1;
        int c = cmp_rational(x.value, y.value);
        return c != 0 ? c : cmp_vec(x.children, y.children);
    }
    case Kind::Prod: {
        int c = cmp_vec(x.children, y.children);
        return c != 0 ? c : cmp_rational(x.value, y.value);
    }
    case Kind::Sum:
        return cmp_vec(x.children, y.children);
    }
    return 0;
}

bool operator==(const Expr& a, const Expr& b) {
    if (a.ptr() == b.ptr()) return true;
    if (a.hash() != b.hash()) return false;
    return compare(a, b) == 0;
}

namespace raw {

Expr constant(const Rational& v) {
    Node n;
    n.kind = Kind::Const;
    n.value = v;
    n.value.canonicalize();
    return make(std::move(n));
}

Expr variable(const std::string& name) {
    Node n;
    n.kind = Kind::Var;
    n.name = name;
    return make(std::move(n));
}

Expr function(const std::string& name, std::vector<std::string> params, std::vector<Expr> args,
              std::vector<int> orders) {
    if (args.size() != params.size()) throw ArityError("function " + name + ": wrong number of arguments");
    if (orders.empty()) orders.assign(params.size(), 0);
    Node n;
    n.kind = Kind::Func;
    n.name = name;
    n.params = std::move(params);
    n.children = std::move(args);
    n.orders = std::move(orders);
    return make(std::move(n));
}

Expr call(Fn fn, const Expr& arg) {
    Node n;
    n.kind = Kind::Call;
    n.fn = fn;
    n.children = {arg};
    return make(std::move(n));
}

Expr power(const Expr& base, const Rational& exponent) {
    Node n;
    n.kind = Kind::Pow;
    n.value = exponent;
    n.children = {base};
    return make(std::move(n));
}

Expr integral(const Expr& body, const std::string& dummy, const Rational& lower, const Expr& upper) {
    Node n;
    n.kind = Kind::Int;
    n.name = dummy;
    n.value = lower;
    n.children = {body, upper};
    return make(std::move(n));
}

Expr product(const Rational& coefficient, std::vector<Expr> factors) {
    Node n;
    n.kind = Kind::Prod;
    n.value = coefficient;
    n.children = std::move(factors);
    return make(std::move(n));
}

Expr sum(std::vector<Expr> terms) {
    Node n;
    n.kind = Kind::Sum;
    n.children = std::move(terms);
    return make(std::move(n));
}

}  // namespace raw

namespace {
const Simplifier& plain() {
    static const Simplifier s;
    return s;
}
}  // namespace

Expr operator+(const Expr& a, const Expr& b) { return plain().add({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return plain().add({a, plain().mul({Expr(-1), b})}); }
Expr operator*(const Expr& a, const Expr& b) { return plain().mul({a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return plain().mul({a, plain().power(b, -1)}); }
Expr operator-(const Expr& a) { return plain().mul({Expr(-1), a}); }
Expr& operator+=(Expr& a, const Expr& b) { return a = a + b; }
Expr& operator-=(Expr& a, const Expr& b) { return a = a - b; }
Expr& operator*=(Expr& a, const Expr& b) { return a = a * b; }

Expr var(const std::string& name) { return raw::variable(name); }
Expr pow(const Expr& base, const Rational& exponent) { return plain().power(base, exponent); }
Expr sqrt(const Expr& e) { return plain().power(e, Rational(1, 2)); }
Expr exp(const Expr& e) { return plain().apply(Fn::Exp, e); }
Expr ln(const Expr& e) { return plain().apply(Fn::Ln, e); }
Expr abs(const Expr& e) { return plain().apply(Fn::Abs, e); }
Expr sign(const Expr& e) { return plain().apply(Fn::Sign, e); }
Expr sin(const Expr& e) { return plain().apply(Fn::Sin, e); }
Expr cos(const Expr& e) { return plain().apply(Fn::Cos, e); }

Rational rational(long num, long den) {
    Rational q(num, den);
    q.canonicalize();
    return q;
}

Expr func(const std::string& name, const std::vector<std::string>& params, const std::vector<int>& orders) {
    std::vector<Expr> args;
    for (const auto& p : params) args.push_back(var(p));
    return raw::function(name, params, std::move(args), orders);
}

Expr func_at(const std::string& name, const std::vector<std::string>& params, std::vector<Expr> args,
             const std::vector<int>& orders) {
    return plain().function(name, params, std::move(args), orders);
}

Expr integral(const Expr& body, const std::string& dummy, const Rational& lower) {
    return plain().integral(body, dummy, lower, var(dummy));
}

Expr integral(const Expr& body, const std::string& dummy, const Rational& lower, const Expr& upper) {
    return plain().integral(body, dummy, lower, upper);
}

}  // namespace gbe
