#include "gbe/classes.hpp"

#include "gbe/calculus.hpp"
#include "gbe/format.hpp"

#include <deque>
#include <sstream>

namespace gbe {

namespace {

struct ClassInfo {
    ClassId id;
    const char* tag;
    std::vector<ElementSpec> elements;
};

const std::vector<std::string> txu{"t", "x", "u"};
const std::vector<std::string> tx{"t", "x"};

const std::vector<ClassInfo>& registry() {
    static const std::vector<ClassInfo> r{
        {ClassId::Super, "SUPER", {{"F", txu, true}, {"H1", txu, false}, {"H0", txu, false}}},
        {ClassId::Linear, "LINEAR", {{"a", tx, true}, {"b", tx, false}, {"c", tx, false}}},
        {ClassId::LinzAbc, "LINZ_ABC", {{"a", tx, true}, {"b", tx, false}, {"f", tx, false}}},
        {ClassId::LinzBf, "LINZ_BF", {{"b", tx, false}, {"f", tx, false}}},
        {ClassId::LinzF, "LINZ_F", {{"f", tx, false}}},
        {ClassId::GbeTx, "GBE_TX", {{"f", tx, true}}},
        {ClassId::GbeDiv, "GBE_DIV", {{"f", tx, true}}},
        {ClassId::GbeDivNondeg, "GBE_DIV_NONDEG", {{"f", tx, true}}},
        {ClassId::GbeDivDeg, "GBE_DIV_DEG", {{"f", tx, true}}},
        {ClassId::GbeT, "GBE_T", {{"f", {"t"}, true}}},
        {ClassId::Burgers, "BURGERS", {}},
    };
    return r;
}

const ClassInfo& info(ClassId id) {
    for (const auto& c : registry())
        if (c.id == id) return c;
    throw InputError("unknown class");
}

Expr X() { return var("x"); }

}  // namespace

const char* class_tag(ClassId id) { return info(id).tag; }

ClassId class_from_tag(const std::string& tag) {
    for (const auto& c : registry())
        if (tag == c.tag) return c.id;
    throw InputError("unknown class tag '" + tag + "'");
}

const std::vector<ClassId>& all_classes() {
    static const std::vector<ClassId> ids = [] {
        std::vector<ClassId> v;
        for (const auto& c : registry()) v.push_back(c.id);
        return v;
    }();
    return ids;
}

const std::vector<ElementSpec>& signature(ClassId id) { return info(id).elements; }

const char* dependent_name(ClassId id) { return id == ClassId::Linear ? "v" : "u"; }

bool Chart::is_identity() const {
    return t.is(Kind::Var) && t.name() == "t" && x.is(Kind::Var) && x.name() == "x" && u.is(Kind::Var) &&
           u.name() == "u";
}

Chart Chart::then(const Expr& T, const Expr& Xn, const Expr& U) const {
    if (is_identity()) return {T, Xn, U};
    return {compose_point(T, t, x, u), compose_point(Xn, t, x, u), compose_point(U, t, x, u)};
}

Frame::Frame(const Chart& chart, const Assumptions* assumptions)
    : chart_(chart), assumptions_(assumptions), identity_(chart.is_identity()) {
    if (identity_) return;
    auto d = [&](const Expr& e, const char* v) { return differentiate_branchwise(e, v, assumptions_); };
    Expr a = d(chart.u, "u");
    Expr xx = d(chart.x, "x");
    Expr xt = d(chart.x, "t");
    Expr ux = d(chart.u, "x");
    Expr ut = d(chart.u, "t");
    Expr tt = d(chart.t, "t");
    inv_a_ = pow(a, -1);
    inv_xx_ = pow(xx, -1);
    inv_tt_ = pow(tt, -1);
    xt_over_xx_ = xt * inv_xx_;
    ux_over_a_ = ux * inv_a_;
    ut_term_ = (ut - ux * xt_over_xx_) * inv_a_;
}

Expr Frame::du(const Expr& e) const {
    if (identity_) return differentiate_branchwise(e, "u", assumptions_);
    return inv_a_ * differentiate_branchwise(e, "u", assumptions_);
}

Expr Frame::dx(const Expr& e) const {
    Expr ex = differentiate_branchwise(e, "x", assumptions_);
    if (identity_) return ex;
    Expr eu = differentiate_branchwise(e, "u", assumptions_);
    if (eu.is_zero()) return inv_xx_ * ex;
    return inv_xx_ * (ex - ux_over_a_ * eu);
}

Expr Frame::dt(const Expr& e) const {
    Expr et = differentiate_branchwise(e, "t", assumptions_);
    if (identity_) return et;
    Expr ex = differentiate_branchwise(e, "x", assumptions_);
    Expr eu = differentiate_branchwise(e, "u", assumptions_);
    return inv_tt_ * (et - xt_over_xx_ * ex - ut_term_ * eu);
}

Expr Frame::at(const Expr& e) const {
    if (identity_) return e;
    return compose_point(e, chart_.t, chart_.x, chart_.u);
}

const Expr& EquationInstance::operator[](const std::string& name) const {
    auto it = elements.find(name);
    if (it == elements.end())
        throw InputError(std::string(class_tag(id)) + " instance has no element '" + name + "'");
    return it->second;
}

std::vector<std::pair<std::string, Expr>> EquationInstance::ordered() const {
    std::vector<std::pair<std::string, Expr>> out;
    for (const auto& spec : signature(id)) out.emplace_back(spec.name, (*this)[spec.name]);
    return out;
}

EquationInstance make_instance(ClassId id, std::map<std::string, Expr> elements) {
    const auto& sig = signature(id);
    for (const auto& [name, e] : elements) {
        bool known = false;
        for (const auto& s : sig) known = known || s.name == name;
        if (!known) throw InputError(std::string(class_tag(id)) + " has no element '" + name + "'");
    }
    for (const auto& s : sig)
        if (!elements.count(s.name)) throw InputError(std::string(class_tag(id)) + " needs element '" + s.name + "'");
    EquationInstance inst;
    inst.id = id;
    inst.elements = std::move(elements);
    return inst;
}

EquationInstance generic_instance(ClassId id) {
    std::map<std::string, Expr> el;
    for (const auto& s : signature(id)) el[s.name] = func(s.name, s.params);
    return make_instance(id, std::move(el));
}

Expr pde_residual(const EquationInstance& inst, const Expr& solution, const Assumptions* assumptions) {
    Frame fr(inst.chart, assumptions);
    Substitution sub;
    sub.var("u", solution);
    auto el = [&](const char* n) { return substitute_branchwise(inst[n], sub, assumptions); };
    auto el_x = [&](const char* n) { return substitute_branchwise(fr.dx(inst[n]), sub, assumptions); };
    Expr w = substitute_branchwise(inst.chart.u, sub, assumptions);

    std::function<Expr(const Expr&)> Dx, Dt;
    if (inst.chart.is_identity()) {
        Dx = [&](const Expr& g) { return differentiate_branchwise(g, "x", assumptions); };
        Dt = [&](const Expr& g) { return differentiate_branchwise(g, "t", assumptions); };
    } else {
        Expr xx = differentiate_branchwise(inst.chart.x, "x", assumptions);
        Expr xt = differentiate_branchwise(inst.chart.x, "t", assumptions);
        Expr tt = differentiate_branchwise(inst.chart.t, "t", assumptions);
        Expr ixx = pow(xx, -1);
        Expr itt = pow(tt, -1);
        Dx = [=](const Expr& g) { return ixx * differentiate_branchwise(g, "x", assumptions); };
        Dt = [=](const Expr& g) {
            return itt * (differentiate_branchwise(g, "t", assumptions) - xt * ixx * differentiate_branchwise(g, "x", assumptions));
        };
    }
    Expr wt = Dt(w);
    Expr wx = Dx(w);
    Expr wxx = Dx(wx);
    Expr half = Expr(rational(1, 2));
    Expr r;
    switch (inst.id) {
    case ClassId::Super:
        r = wt + el("F") * wxx + el("H1") * wx + el("H0");
        break;
    case ClassId::Linear:
        r = wt + el("a") * wxx + el("b") * wx + el("c") * w;
        break;
    case ClassId::LinzAbc: {
        Expr a = el("a");
        Expr ax = el_x("a");
        r = wt + a * wxx + (a * w + ax + el("b")) * wx + half * ax * w * w + el_x("b") * w + el("f");
        break;
    }
    case ClassId::LinzBf:
        r = wt + wxx + (w + el("b")) * wx + el_x("b") * w + el("f");
        break;
    case ClassId::LinzF:
        r = wt + wxx + w * wx + el("f");
        break;
    case ClassId::GbeTx:
        r = wt + w * wx + el("f") * wxx;
        break;
    case ClassId::GbeDiv:
    case ClassId::GbeDivNondeg:
    case ClassId::GbeDivDeg:
    case ClassId::GbeT:
        r = wt + w * wx + el("f") * wxx + el_x("f") * wx;
        break;
    case ClassId::Burgers:
        r = wt + w * wx + wxx;
        break;
    }
    return simplify(r, assumptions);
}

Expr build_pde(const EquationInstance& inst) {
    return pde_residual(inst, func(dependent_name(inst.id), {"t", "x"}));
}

std::optional<QuadraticInX> quadratic_in_x(const Expr& f) {
    std::vector<Expr> cs;
    try {
        cs = collect(f, X());
    } catch (const NonPolynomial&) {
        return std::nullopt;
    }
    if (cs.size() > 3) return std::nullopt;
    cs.resize(3, Expr(0));
    for (const auto& c : cs)
        if (depends_on(c, "x")) return std::nullopt;
    return QuadraticInX{cs[0], cs[1], cs[2]};
}

VerificationReport check_membership(const EquationInstance& inst, const ZeroOptions& o) {
    VerificationReport rep;
    rep.tolerance = o.tolerance;
    rep.seed = o.domain.seed;
    for (const auto& s : signature(inst.id))
        if (s.nonvanishing) rep.add_nonvanishing(s.name + " != 0", nonvanishing(inst[s.name], o));
    Frame fr(inst.chart, o.assumptions);
    switch (inst.id) {
    case ClassId::GbeDivNondeg: {
        Expr fxxx = fr.dx(fr.dx(fr.dx(inst["f"])));
        rep.add_nonvanishing("f_xxx != 0", nonvanishing(fxxx, o));
        break;
    }
    case ClassId::GbeDivDeg: {
        Expr fxxx = fr.dx(fr.dx(fr.dx(inst["f"])));
        rep.add_zero("f_xxx = 0", is_zero(fxxx, o));
        auto q = inst.chart.is_identity() ? quadratic_in_x(simplify(inst["f"], o.assumptions)) : std::nullopt;
        if (q) {
            rep.details["f0"] = format(q->f0);
            rep.details["f1"] = format(q->f1);
            rep.details["f2"] = format(q->f2);
            Expr back = q->f2 * X() * X() + q->f1 * X() + q->f0 - inst["f"];
            rep.add_zero("f2*x^2 + f1*x + f0 = f", is_zero(back, o));
        } else {
            rep.add_precondition("extract (f0, f1, f2)", false, "f is not a polynomial of degree <= 2 in x");
        }
        break;
    }
    case ClassId::GbeT:
        rep.add_zero("f_x = 0", is_zero(fr.dx(inst["f"]), o));
        break;
    case ClassId::Burgers:
    case ClassId::Super:
    case ClassId::Linear:
    case ClassId::LinzAbc:
    case ClassId::LinzBf:
    case ClassId::LinzF:
    case ClassId::GbeTx:
    case ClassId::GbeDiv:
        break;
    }
    if (inst.id == ClassId::GbeT || inst.id == ClassId::GbeTx || inst.id == ClassId::GbeDiv ||
        inst.id == ClassId::GbeDivNondeg || inst.id == ClassId::GbeDivDeg)
        rep.details["domain_note"] = "nonvanishing of f is checked on the sampling domain only";
    rep.seal(std::string("membership in ") + class_tag(inst.id));
    return rep;
}

namespace {

struct Edge {
    ClassId from;
    ClassId to;
    bool composite;
};

const std::vector<Edge>& edges() {
    static const std::vector<Edge> e{
        {ClassId::LinzAbc, ClassId::Super, false},   {ClassId::LinzBf, ClassId::LinzAbc, false},
        {ClassId::LinzF, ClassId::LinzBf, false},    {ClassId::GbeTx, ClassId::Super, false},
        {ClassId::GbeDiv, ClassId::Super, false},    {ClassId::Burgers, ClassId::LinzF, false},
        {ClassId::Burgers, ClassId::GbeT, false},    {ClassId::GbeT, ClassId::GbeTx, false},
        {ClassId::GbeT, ClassId::GbeDiv, false},     {ClassId::GbeDivNondeg, ClassId::GbeDiv, false},
        {ClassId::GbeDivDeg, ClassId::GbeDiv, false}, {ClassId::LinzF, ClassId::Super, true},
        {ClassId::LinzBf, ClassId::Super, true},     {ClassId::Burgers, ClassId::Super, true},
    };
    return e;
}

EquationInstance embed_step(const EquationInstance& in, ClassId to) {
    Frame fr(in.chart);
    const Expr& u = in.chart.u;
    EquationInstance out;
    out.id = to;
    out.chart = in.chart;
    auto& el = out.elements;
    Expr half = Expr(rational(1, 2));
    switch (in.id) {
    case ClassId::LinzAbc: {
        Expr a = in["a"];
        Expr ax = fr.dx(a);
        el["F"] = a;
        el["H1"] = a * u + ax + in["b"];
        el["H0"] = half * ax * u * u + fr.dx(in["b"]) * u + in["f"];
        break;
    }
    case ClassId::LinzBf:
        if (to == ClassId::LinzAbc) {
            el["a"] = Expr(1);
            el["b"] = in["b"];
            el["f"] = in["f"];
        } else {
            el["F"] = Expr(1);
            el["H1"] = u + in["b"];
            el["H0"] = fr.dx(in["b"]) * u + in["f"];
        }
        break;
    case ClassId::LinzF:
        if (to == ClassId::LinzBf) {
            el["b"] = Expr(0);
            el["f"] = in["f"];
        } else {
            el["F"] = Expr(1);
            el["H1"] = u;
            el["H0"] = in["f"];
        }
        break;
    case ClassId::GbeTx:
        el["F"] = in["f"];
        el["H1"] = u;
        el["H0"] = Expr(0);
        break;
    case ClassId::GbeDiv:
        el["F"] = in["f"];
        el["H1"] = u + fr.dx(in["f"]);
        el["H0"] = Expr(0);
        break;
    case ClassId::Burgers:
        if (to == ClassId::LinzF) {
            el["f"] = Expr(0);
        } else if (to == ClassId::GbeT) {
            el["f"] = Expr(1);
        } else {
            el["F"] = Expr(1);
            el["H1"] = u;
            el["H0"] = Expr(0);
        }
        break;
    case ClassId::GbeT:
    case ClassId::GbeDivNondeg:
    case ClassId::GbeDivDeg:
        el["f"] = in["f"];
        break;
    case ClassId::Super:
    case ClassId::Linear:
        break;
    }
    return out;
}

std::vector<ClassId> path(ClassId from, ClassId to) {
    std::map<ClassId, ClassId> prev;
    std::deque<ClassId> q{from};
    prev[from] = from;
    while (!q.empty()) {
        ClassId c = q.front();
        q.pop_front();
        if (c == to) break;
        for (const auto& e : edges()) {
            if (e.from != c || e.composite || prev.count(e.to)) continue;
            prev[e.to] = c;
            q.push_back(e.to);
        }
    }
    if (!prev.count(to)) return {};
    std::vector<ClassId> p{to};
    while (p.back() != from) p.push_back(prev[p.back()]);
    return {p.rbegin(), p.rend()};
}

}  // namespace

bool embeds(ClassId from, ClassId to) { return from == to || !path(from, to).empty(); }

EquationInstance embed(const EquationInstance& inst, ClassId target) {
    if (inst.id == target) return inst;
    for (const auto& e : edges())
        if (e.from == inst.id && e.to == target) return embed_step(inst, target);
    auto p = path(inst.id, target);
    if (p.empty())
        throw InputError(std::string("no embedding from ") + class_tag(inst.id) + " into " + class_tag(target));
    EquationInstance cur = inst;
    for (std::size_t i = 1; i < p.size(); ++i) cur = embed_step(cur, p[i]);
    return cur;
}

EquationInstance linearizable_from_linear(const Expr& a, const Expr& b, const Expr& c) {
    return make_instance(ClassId::LinzAbc, {{"a", a}, {"b", b}, {"f", 2 * differentiate(c, "x")}});
}

EquationInstance linearizable_from_linear(const EquationInstance& linear) {
    if (linear.id != ClassId::Linear) throw InputError("linearizable_from_linear needs a LINEAR instance");
    Frame fr(linear.chart);
    EquationInstance out =
        make_instance(ClassId::LinzAbc, {{"a", linear["a"]}, {"b", linear["b"]}, {"f", 2 * fr.dx(linear["c"])}});
    if (linear.chart.is_identity()) return out;
    // v1 = A v induces u1 = (u + 2 A_x / A) / X_x; an inhomogeneous v-chart
    // has no u-counterpart.
    Expr A = simplify(differentiate_branchwise(linear.chart.u, "u"));
    if (depends_on(A, "u") || !(simplify(linear.chart.u - A * var("u")) == Expr(0)))
        throw InputError("the v-chart " + format(linear.chart.u) + " is not homogeneous in v");
    Expr Xx = differentiate_branchwise(linear.chart.x, "x");
    out.chart = linear.chart;
    out.chart.u = simplify((var("u") + 2 * differentiate_branchwise(A, "x") / A) / Xx);
    return out;
}

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

EquationInstance read_instance(const std::string& text, const Context& ctx) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    std::optional<ClassId> id;
    std::map<std::string, Expr> el;
    Chart chart;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        if (trim(line).empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw InputError("line " + std::to_string(lineno) + ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "class") {
                id = class_from_tag(value);
            } else if (key.rfind("element.", 0) == 0) {
                el[key.substr(8)] = parse(value, ctx);
            } else if (key == "chart.t") {
                chart.t = parse(value, ctx);
            } else if (key == "chart.x") {
                chart.x = parse(value, ctx);
            } else if (key == "chart.u") {
                chart.u = parse(value, ctx);
            } else {
                throw InputError("unknown key '" + key + "'");
            }
        } catch (const std::exception& e) {
            throw InputError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (!id) throw InputError("missing 'class = <tag>' line");
    EquationInstance inst = make_instance(*id, std::move(el));
    inst.chart = chart;
    return inst;
}

std::string write_instance(const EquationInstance& inst) {
    std::string out = std::string("class = ") + class_tag(inst.id) + "\n";
    for (const auto& [name, e] : inst.ordered()) out += "element." + name + " = " + format(e) + "\n";
    if (!inst.chart.is_identity()) {
        out += "chart.t = " + format(inst.chart.t) + "\n";
        out += "chart.x = " + format(inst.chart.x) + "\n";
        out += "chart.u = " + format(inst.chart.u) + "\n";
    }
    return out;
}

}  // namespace gbe
