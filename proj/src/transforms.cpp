#include "gbe/transforms.hpp"

#include "gbe/calculus.hpp"
#include "gbe/format.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace gbe {

namespace {

const Expr t_ = var("t");
const Expr x_ = var("x");
const Expr u_ = var("u");
const Expr half = Expr(rational(1, 2));

Expr D(const Expr& e, const char* v, int n = 1) {
    Expr r = e;
    for (int i = 0; i < n; ++i) r = differentiate_branchwise(r, v);
    return r;
}

Expr sqrt_abs(const Expr& e) { return sqrt(abs(e)); }

/// Parameter functions of the transform evaluated at the source chart.
struct Params {
    const Frame& fr;
    const Assumptions* a;
    Expr at(const Expr& e) const { return fr.at(e); }
    Expr d(const Expr& e, const char* v, int n = 1) const { return fr.at(D(e, v, n)); }
};

EquationInstance coerce(const EquationInstance& inst, ClassId target, const char* family) {
    if (inst.id == target) return inst;
    if (embeds(inst.id, target)) return embed(inst, target);
    throw InputError(std::string(family) + " transforms act on " + class_tag(target) + ", not " +
                     class_tag(inst.id));
}

bool is_div_class(ClassId id) {
    return id == ClassId::GbeDiv || id == ClassId::GbeDivNondeg || id == ClassId::GbeDivDeg || id == ClassId::GbeT;
}

Applied finish(const EquationInstance& src, ClassId id, std::map<std::string, Expr> el, const PointMap& map,
               const Transform& tr, const ApplyOptions& o) {
    Applied out;
    out.target.id = id;
    for (auto& [n, e] : el) out.target.elements[n] = simplify(e, o.zero.assumptions);
    out.target.chart = src.chart.then(map.t, map.x, map.u);
    out.map = map;
    Inverse inv = invert(tr);
    if (!inv.implicit) {
        GeneralTransform g = to_general(inv.transform);
        out.inverse = PointMap{g.T, g.X, simplify(g.U1 * u_ + g.U0)};
    }
    return out;
}

void add_nonvanishing(VerificationReport& rep, const std::string& name, const Expr& e, const ApplyOptions& o) {
    rep.add_nonvanishing(name, nonvanishing(e, o.zero));
}

void add_positive(VerificationReport& rep, const std::string& name, const Expr& e, const ApplyOptions& o) {
    rep.add_nonvanishing(name, positive(e, o.zero));
}

}  // namespace

ProjectiveTuple ProjectiveTuple::canonical() const {
    std::vector<Expr> es{alpha, beta, gamma, delta, kappa, mu0, mu1};
    double best = 0;
    std::size_t at = 0;
    std::vector<double> vals;
    for (std::size_t i = 0; i < es.size(); ++i) {
        double v;
        try {
            v = evaluate(es[i], {});
        } catch (const std::exception&) {
            return *this;
        }
        vals.push_back(v);
        if (std::fabs(v) > best * (1 + 1e-12)) {
            best = std::fabs(v);
            at = i;
        }
    }
    if (best == 0) return *this;
    Expr scale = es[at];
    if ((vals[at] < 0) != (vals[4] < 0)) scale = -scale;
    auto div = [&](const Expr& e) { return simplify(e / scale); };
    return {div(alpha), div(beta), div(gamma), div(delta), div(kappa), div(mu0), div(mu1)};
}

Expr ProjectiveTuple::det() const { return simplify(alpha * delta - beta * gamma); }

DivTransform AffineDivTransform::as_div() const {
    Rational s = sgn(c1) < 0 ? Rational(-1) : Rational(1);
    return {Expr(c1 * c1) * t_ + Expr(c0), Expr(c2) * t_ + Expr(c3), kappa * s};
}

Family family_of(const Transform& tr) { return static_cast<Family>(tr.index()); }

namespace {

const char* const family_tags[] = {"GENERAL", "LINZ", "GAUGED", "REDUCED", "PROJECTIVE", "DIV", "AFFINE_DIV", "LINEAR"};

}  // namespace

const char* family_tag(Family f) { return family_tags[static_cast<int>(f)]; }

Family family_from_tag(const std::string& tag) {
    for (int i = 0; i < 8; ++i)
        if (tag == family_tags[i]) return static_cast<Family>(i);
    throw InputError("unknown family tag '" + tag + "'");
}

Transform identity_transform(Family f) {
    switch (f) {
    case Family::General: return GeneralTransform{};
    case Family::Linz: return LinzTransform{};
    case Family::Gauged: return GaugedTransform{};
    case Family::Reduced: return ReducedTransform{};
    case Family::Projective: return ProjectiveTuple{};
    case Family::Div: return DivTransform{};
    case Family::AffineDiv: return AffineDivTransform{};
    case Family::Linear: return LinearTransform{};
    }
    return GeneralTransform{};
}

ClassId source_class(Family f) {
    switch (f) {
    case Family::General: return ClassId::Super;
    case Family::Linz: return ClassId::LinzAbc;
    case Family::Gauged: return ClassId::LinzBf;
    case Family::Reduced: return ClassId::LinzF;
    case Family::Projective: return ClassId::GbeTx;
    case Family::Div:
    case Family::AffineDiv: return ClassId::GbeDiv;
    case Family::Linear: return ClassId::Linear;
    }
    return ClassId::Super;
}

GeneralTransform to_general(const Transform& tr) {
    struct V {
        GeneralTransform operator()(const GeneralTransform& g) const { return g; }
        GeneralTransform operator()(const LinzTransform& l) const {
            return {l.T, l.X, simplify(pow(D(l.X, "x"), -1)), l.U0};
        }
        GeneralTransform operator()(const GaugedTransform& g) const {
            Expr e(g.eps);
            Expr st = sqrt(D(g.T, "t"));
            return {g.T, simplify(e * (st * x_ + g.X0)), simplify(e * pow(st, -1)), simplify(e * g.U0)};
        }
        GeneralTransform operator()(const ReducedTransform& r) const {
            Expr e(r.eps);
            Expr Tt = D(r.T, "t");
            Expr Ttt = D(r.T, "t", 2);
            Expr st = sqrt(Tt);
            Expr U0 = e * (Ttt * x_ * half * pow(Tt, rational(-3, 2)) + D(r.X0, "t") * pow(Tt, -1));
            return {r.T, simplify(e * (st * x_ + r.X0)), simplify(e * pow(st, -1)), simplify(U0)};
        }
        GeneralTransform operator()(const ProjectiveTuple& p) const {
            Expr den = p.gamma * t_ + p.delta;
            Expr d = p.det();
            return {simplify((p.alpha * t_ + p.beta) / den), simplify((p.kappa * x_ + p.mu1 * t_ + p.mu0) / den),
                    simplify(p.kappa * den / d),
                    simplify((-p.kappa * p.gamma * x_ + p.mu1 * p.delta - p.mu0 * p.gamma) / d)};
        }
        GeneralTransform operator()(const DivTransform& dv) const {
            Expr k(dv.kappa);
            Expr Tt = D(dv.T, "t");
            Expr Ttt = D(dv.T, "t", 2);
            Expr s = sqrt_abs(Tt);
            return {dv.T, simplify(k * s * x_ + dv.X0), simplify(k * s / Tt),
                    simplify(k * Ttt * s * x_ * half * pow(Tt, -2) + D(dv.X0, "t") / Tt)};
        }
        GeneralTransform operator()(const AffineDivTransform& a) const { return (*this)(a.as_div()); }
        GeneralTransform operator()(const LinearTransform& l) const { return {l.T, l.X, l.V1, l.V0}; }
    };
    return std::visit(V{}, tr);
}

PointMap point_map(const Transform& tr) {
    GeneralTransform g = to_general(tr);
    return {g.T, g.X, simplify(g.U1 * u_ + g.U0)};
}

Applied apply_general(const GeneralTransform& tr, const EquationInstance& source, const ApplyOptions& o) {
    EquationInstance src = coerce(source, ClassId::Super, "GENERAL");
    Frame fr(src.chart, o.zero.assumptions);
    Params P{fr, o.zero.assumptions};
    const Expr& u1 = src.chart.u;
    Expr Tt = P.d(tr.T, "t");
    Expr Xx = P.d(tr.X, "x");
    Expr Xxx = P.d(tr.X, "x", 2);
    Expr Xt = P.d(tr.X, "t");
    Expr U1 = P.at(tr.U1);
    Expr U1x = P.d(tr.U1, "x");
    Expr Ux = U1x * u1 + P.d(tr.U0, "x");
    Expr Uxx = P.d(tr.U1, "x", 2) * u1 + P.d(tr.U0, "x", 2);
    Expr Ut = P.d(tr.U1, "t") * u1 + P.d(tr.U0, "t");
    Expr F = src["F"], H1 = src["H1"], H0 = src["H0"];
    Expr iT = pow(Tt, -1);
    std::map<std::string, Expr> el;
    el["F"] = Xx * Xx * F * iT;
    el["H1"] = (Xx * H1 + Xxx * F - 2 * Xx * U1x / U1 * F + Xt) * iT;
    el["H0"] = U1 * H0 * iT + 2 * Ux * U1x * F * iT / U1 - (Ut + F * Uxx + H1 * Ux) * iT;
    Applied out = finish(src, ClassId::Super, std::move(el), point_map(tr), tr, o);
    if (o.check) {
        add_nonvanishing(out.admissibility, "T_t != 0", D(tr.T, "t"), o);
        add_nonvanishing(out.admissibility, "X_x != 0", D(tr.X, "x"), o);
        add_nonvanishing(out.admissibility, "U1 != 0", tr.U1, o);
    }
    out.admissibility.seal("GENERAL transform");
    return out;
}

Applied apply_linz(const LinzTransform& tr, const EquationInstance& source, const ApplyOptions& o) {
    EquationInstance src = coerce(source, ClassId::LinzAbc, "LINZ");
    Frame fr(src.chart, o.zero.assumptions);
    Params P{fr, o.zero.assumptions};
    Expr Tt = P.d(tr.T, "t");
    Expr Xx = P.d(tr.X, "x");
    Expr Xxx = P.d(tr.X, "x", 2);
    Expr Xt = P.d(tr.X, "t");
    Expr U0 = P.at(tr.U0);
    Expr Wsym = D(tr.X, "x") * tr.U0;
    Expr W = P.at(Wsym);
    Expr Wx = P.d(Wsym, "x");
    Expr Wxx = P.d(Wsym, "x", 2);
    Expr Wt = P.d(Wsym, "t");
    Expr a = src["a"], b = src["b"], f = src["f"];
    Expr ax = fr.dx(a), bx = fr.dx(b);
    Expr iT = pow(Tt, -1);
    std::map<std::string, Expr> el;
    el["a"] = Xx * Xx * a * iT;
    el["b"] = (Xx * b + Xxx * a - Xx * Xx * U0 * a + Xt) * iT;
    el["f"] = pow(Xx, -1) * iT *
              (f - (Wx * b + W * bx) + (W * W - 2 * Wx) * ax * half + (W * Wx - Wxx) * a - Wt);
    Applied out = finish(src, ClassId::LinzAbc, std::move(el), point_map(tr), tr, o);
    if (o.check) {
        add_nonvanishing(out.admissibility, "T_t != 0", D(tr.T, "t"), o);
        add_nonvanishing(out.admissibility, "X_x != 0", D(tr.X, "x"), o);
    }
    out.admissibility.seal("LINZ transform");
    return out;
}

Applied apply_bf(const GaugedTransform& tr, const EquationInstance& source, const ApplyOptions& o) {
    EquationInstance src = coerce(source, ClassId::LinzBf, "GAUGED");
    Frame fr(src.chart, o.zero.assumptions);
    Params P{fr, o.zero.assumptions};
    Expr e(tr.eps);
    const Expr& x1 = src.chart.x;
    Expr Tt = P.d(tr.T, "t");
    Expr Ttt = P.d(tr.T, "t", 2);
    Expr X0t = P.d(tr.X0, "t");
    Expr U0 = P.at(tr.U0);
    Expr U0x = P.d(tr.U0, "x");
    Expr U0xx = P.d(tr.U0, "x", 2);
    Expr U0t = P.d(tr.U0, "t");
    Expr b = src["b"], f = src["f"];
    Expr bx = fr.dx(b);
    Expr iT = pow(Tt, -1);
    Expr isq = pow(Tt, rational(-1, 2));
    std::map<std::string, Expr> el;
    el["b"] = e * (b * isq + Ttt * x1 * half * pow(Tt, rational(-3, 2)) + X0t * iT - U0);
    el["f"] = e * (f * pow(Tt, rational(-3, 2)) - (U0x * b + U0 * bx) * iT + U0 * U0x * isq - U0t * iT -
                   U0xx * iT - Ttt * U0 * half * pow(Tt, -2));
    Applied out = finish(src, ClassId::LinzBf, std::move(el), point_map(tr), tr, o);
    if (o.check) {
        out.admissibility.add_precondition("eps = +-1", tr.eps == 1 || tr.eps == -1, "eps must be +1 or -1");
        add_positive(out.admissibility, "T_t > 0", D(tr.T, "t"), o);
    }
    out.admissibility.seal("GAUGED transform");
    return out;
}

Applied apply_f(const ReducedTransform& tr, const EquationInstance& source, const ApplyOptions& o) {
    EquationInstance src = coerce(source, ClassId::LinzF, "REDUCED");
    Frame fr(src.chart, o.zero.assumptions);
    Params P{fr, o.zero.assumptions};
    Expr e(tr.eps);
    const Expr& x1 = src.chart.x;
    Expr Tt = P.d(tr.T, "t");
    Expr Ttt = P.d(tr.T, "t", 2);
    Expr Tttt = P.d(tr.T, "t", 3);
    Expr X0t = P.d(tr.X0, "t");
    Expr X0tt = P.d(tr.X0, "t", 2);
    std::map<std::string, Expr> el;
    el["f"] = e * (src["f"] * pow(Tt, rational(-3, 2)) +
                   (3 * Ttt * Ttt - 2 * Tt * Tttt) * x1 * Expr(rational(1, 4)) * pow(Tt, rational(-7, 2)) +
                   (X0t * Ttt - X0tt * Tt) * pow(Tt, -3));
    Applied out = finish(src, ClassId::LinzF, std::move(el), point_map(tr), tr, o);
    if (o.check) {
        out.admissibility.add_precondition("eps = +-1", tr.eps == 1 || tr.eps == -1, "eps must be +1 or -1");
        add_positive(out.admissibility, "T_t > 0", D(tr.T, "t"), o);
    }
    out.admissibility.seal("REDUCED transform");
    return out;
}

Applied apply_projective(const ProjectiveTuple& p, const EquationInstance& source, const ApplyOptions& o) {
    ClassId id = source.id == ClassId::GbeT || source.id == ClassId::Burgers ? ClassId::GbeT : ClassId::GbeTx;
    EquationInstance src = coerce(source, id, "PROJECTIVE");
    std::map<std::string, Expr> el;
    Expr d = p.det();
    el["f"] = p.kappa * p.kappa * src["f"] / d;
    Applied out = finish(src, id, std::move(el), point_map(p), p, o);
    if (o.check) {
        add_nonvanishing(out.admissibility, "alpha*delta - beta*gamma != 0", d, o);
        add_nonvanishing(out.admissibility, "kappa != 0", p.kappa, o);
    }
    out.admissibility.seal("PROJECTIVE transform");
    return out;
}

Expr div_constraint(const DivTransform& tr, const EquationInstance& source) {
    EquationInstance src = is_div_class(source.id) ? source : coerce(source, ClassId::GbeDiv, "DIV");
    Frame fr(src.chart);
    Params P{fr, nullptr};
    Expr k(tr.kappa);
    Expr Xfull = k * sqrt_abs(D(tr.T, "t")) * x_ + tr.X0;
    Expr Tt = P.d(tr.T, "t");
    Expr Ttt = P.d(tr.T, "t", 2);
    Expr Xt = P.d(Xfull, "t");
    Expr Xtt = P.d(Xfull, "t", 2);
    return simplify(k * sqrt_abs(Tt) * Ttt * fr.dx(src["f"]) + 2 * Tt * Xtt - 2 * Ttt * Xt);
}

Applied apply_div(const DivTransform& tr, const EquationInstance& source, const ApplyOptions& o) {
    EquationInstance src = is_div_class(source.id) ? source : coerce(source, ClassId::GbeDiv, "DIV");
    Frame fr(src.chart, o.zero.assumptions);
    Params P{fr, o.zero.assumptions};
    Expr Tt = P.d(tr.T, "t");
    Expr k(tr.kappa);
    std::map<std::string, Expr> el;
    el["f"] = sign(Tt) * k * k * src["f"];
    Applied out = finish(src, src.id, std::move(el), point_map(tr), tr, o);
    if (o.check) {
        out.admissibility.add_precondition("kappa != 0", sgn(tr.kappa) != 0, "kappa must be nonzero");
        add_nonvanishing(out.admissibility, "T_t != 0", D(tr.T, "t"), o);
        ZeroTest z = is_zero(div_constraint(tr, src), o.zero);
        Check& c = out.admissibility.add_zero("admissibility constraint", z);
        c.kind = Check::Kind::Precondition;
        if (!c.passed) c.note = "kappa*sqrt|T_t|*T_tt*f_x + 2*T_t*X_tt - 2*T_tt*X_t does not vanish";
    }
    out.admissibility.seal("DIV transform");
    return out;
}

Expr classifying_condition(const LinearTransform& tr, const EquationInstance& source) {
    EquationInstance src = coerce(source, ClassId::Linear, "LINEAR");
    Frame fr(src.chart);
    Params P{fr, nullptr};
    Expr R = simplify(tr.V0 / tr.V1);
    return simplify(P.d(R, "t") + src["a"] * P.d(R, "x", 2) + src["b"] * P.d(R, "x") + src["c"] * P.at(R));
}

Applied apply_linear(const LinearTransform& tr, const EquationInstance& source, const ApplyOptions& o) {
    EquationInstance src = coerce(source, ClassId::Linear, "LINEAR");
    Frame fr(src.chart, o.zero.assumptions);
    Params P{fr, o.zero.assumptions};
    Expr Tt = P.d(tr.T, "t");
    Expr Xx = P.d(tr.X, "x");
    Expr Xxx = P.d(tr.X, "x", 2);
    Expr Xt = P.d(tr.X, "t");
    Expr V1 = P.at(tr.V1);
    Expr V1x = P.d(tr.V1, "x");
    Expr V1xx = P.d(tr.V1, "x", 2);
    Expr V1t = P.d(tr.V1, "t");
    Expr a = src["a"], b = src["b"], c = src["c"];
    Expr iT = pow(Tt, -1);
    Expr iV = pow(V1, -1);
    std::map<std::string, Expr> el;
    el["a"] = Xx * Xx * a * iT;
    el["b"] = (Xx * b + Xxx * a - 2 * Xx * V1x * a * iV + Xt) * iT;
    el["c"] = (c - V1x * b * iV + (2 * V1x * V1x - V1 * V1xx) * a * iV * iV - V1t * iV) * iT;
    Applied out = finish(src, ClassId::Linear, std::move(el), point_map(tr), tr, o);
    if (o.check) {
        add_nonvanishing(out.admissibility, "T_t != 0", D(tr.T, "t"), o);
        add_nonvanishing(out.admissibility, "X_x != 0", D(tr.X, "x"), o);
        add_nonvanishing(out.admissibility, "V1 != 0", tr.V1, o);
        ZeroTest z = is_zero(classifying_condition(tr, src), o.zero);
        Check& c = out.admissibility.add_zero("classifying condition", z);
        c.kind = Check::Kind::Precondition;
        if (!c.passed) c.note = "V0/V1 does not solve the source equation";
    }
    out.admissibility.seal("LINEAR transform");
    return out;
}

Applied apply(const Transform& tr, const EquationInstance& source, const ApplyOptions& o) {
    struct V {
        const EquationInstance& s;
        const ApplyOptions& o;
        Applied operator()(const GeneralTransform& g) const { return apply_general(g, s, o); }
        Applied operator()(const LinzTransform& g) const { return apply_linz(g, s, o); }
        Applied operator()(const GaugedTransform& g) const { return apply_bf(g, s, o); }
        Applied operator()(const ReducedTransform& g) const { return apply_f(g, s, o); }
        Applied operator()(const ProjectiveTuple& g) const { return apply_projective(g, s, o); }
        Applied operator()(const DivTransform& g) const { return apply_div(g, s, o); }
        Applied operator()(const AffineDivTransform& g) const {
            Applied a = apply_div(g.as_div(), s, o);
            return a;
        }
        Applied operator()(const LinearTransform& g) const { return apply_linear(g, s, o); }
    };
    return std::visit(V{source, o}, tr);
}

namespace {

Expr at_t(const Expr& e, const Expr& T) { return simplify(substitute(e, "t", T)); }
Expr at_tx(const Expr& e, const Expr& T, const Expr& X) { return simplify(compose_point(e, T, X)); }

GeneralTransform compose_general(const GeneralTransform& g, const GeneralTransform& h) {
    Expr U1g = at_tx(g.U1, h.T, h.X);
    return {at_t(g.T, h.T), at_tx(g.X, h.T, h.X), simplify(U1g * h.U1), simplify(U1g * h.U0 + at_tx(g.U0, h.T, h.X))};
}

ProjectiveTuple compose_projective(const ProjectiveTuple& g, const ProjectiveTuple& h) {
    ProjectiveTuple p;
    p.kappa = simplify(g.kappa * h.kappa);
    p.mu1 = simplify(g.kappa * h.mu1 + g.mu1 * h.alpha + g.mu0 * h.gamma);
    p.mu0 = simplify(g.kappa * h.mu0 + g.mu1 * h.beta + g.mu0 * h.delta);
    p.alpha = simplify(g.alpha * h.alpha + g.beta * h.gamma);
    p.beta = simplify(g.alpha * h.beta + g.beta * h.delta);
    p.gamma = simplify(g.gamma * h.alpha + g.delta * h.gamma);
    p.delta = simplify(g.gamma * h.beta + g.delta * h.delta);
    return p.canonical();
}

}  // namespace

Transform compose(const Transform& second, const Transform& first) {
    Family fs = family_of(second);
    Family ff = family_of(first);
    if ((fs == Family::Linear) != (ff == Family::Linear))
        throw CompositionError("LINEAR transforms compose only with LINEAR transforms");
    if (fs != ff) {
        bool div_pair = (fs == Family::Div || fs == Family::AffineDiv) && (ff == Family::Div || ff == Family::AffineDiv);
        if (div_pair) {
            auto as_div = [](const Transform& t) {
                return t.index() == static_cast<std::size_t>(Family::Div) ? std::get<DivTransform>(t)
                                                                           : std::get<AffineDivTransform>(t).as_div();
            };
            return compose(Transform(as_div(second)), Transform(as_div(first)));
        }
        return compose_general(to_general(second), to_general(first));
    }
    switch (fs) {
    case Family::General:
        return compose_general(std::get<GeneralTransform>(second), std::get<GeneralTransform>(first));
    case Family::Linz: {
        const auto& g = std::get<LinzTransform>(second);
        const auto& h = std::get<LinzTransform>(first);
        Expr U0 = h.U0 / at_tx(D(g.X, "x"), h.T, h.X) + at_tx(g.U0, h.T, h.X);
        return LinzTransform{at_t(g.T, h.T), at_tx(g.X, h.T, h.X), simplify(U0)};
    }
    case Family::Gauged: {
        const auto& g = std::get<GaugedTransform>(second);
        const auto& h = std::get<GaugedTransform>(first);
        Expr e1(h.eps);
        Expr s = sqrt(at_t(D(g.T, "t"), h.T));
        Expr Xh = e1 * (sqrt(D(h.T, "t")) * x_ + h.X0);
        return GaugedTransform{at_t(g.T, h.T), simplify(s * h.X0 + e1 * at_t(g.X0, h.T)),
                               simplify(h.U0 / s + e1 * at_tx(g.U0, h.T, Xh)), g.eps * h.eps};
    }
    case Family::Reduced: {
        const auto& g = std::get<ReducedTransform>(second);
        const auto& h = std::get<ReducedTransform>(first);
        Expr e1(h.eps);
        Expr s = sqrt(at_t(D(g.T, "t"), h.T));
        return ReducedTransform{at_t(g.T, h.T), simplify(s * h.X0 + e1 * at_t(g.X0, h.T)), g.eps * h.eps};
    }
    case Family::Projective:
        return compose_projective(std::get<ProjectiveTuple>(second), std::get<ProjectiveTuple>(first));
    case Family::Div: {
        const auto& g = std::get<DivTransform>(second);
        const auto& h = std::get<DivTransform>(first);
        Expr s = sqrt_abs(at_t(D(g.T, "t"), h.T));
        return DivTransform{at_t(g.T, h.T), simplify(Expr(g.kappa) * s * h.X0 + at_t(g.X0, h.T)), g.kappa * h.kappa};
    }
    case Family::AffineDiv: {
        const auto& b = std::get<AffineDivTransform>(second);
        const auto& a = std::get<AffineDivTransform>(first);
        AffineDivTransform c;
        c.c1 = a.c1 * b.c1;
        c.c0 = b.c1 * b.c1 * a.c0 + b.c0;
        c.kappa = a.kappa * b.kappa;
        c.c2 = b.kappa * b.c1 * a.c2 + b.c2 * a.c1 * a.c1;
        c.c3 = b.kappa * b.c1 * a.c3 + b.c2 * a.c0 + b.c3;
        return c;
    }
    case Family::Linear: {
        const auto& g = std::get<LinearTransform>(second);
        const auto& h = std::get<LinearTransform>(first);
        GeneralTransform c = compose_general({g.T, g.X, g.V1, g.V0}, {h.T, h.X, h.V1, h.V0});
        return LinearTransform{c.T, c.X, c.U1, c.U0};
    }
    }
    throw CompositionError("unknown family");
}

namespace {

bool constant_coefficients(const std::vector<Expr>& cs) {
    for (const auto& c : cs)
        if (!free_vars(c).empty() || !function_symbols(c).empty()) return false;
    return true;
}

/// (a, b, c, d) with T = (a t + b)/(c t + d).
std::optional<std::array<Expr, 4>> fractional_linear(const Expr& T) {
    Fraction fr = together(simplify(T));
    std::vector<Expr> n, d;
    try {
        n = collect(simplify(fr.numerator), t_);
        d = collect(simplify(fr.denominator), t_);
    } catch (const ExprError&) {
        return std::nullopt;
    }
    if (n.size() > 2 || d.size() > 2 || !constant_coefficients(n) || !constant_coefficients(d)) return std::nullopt;
    n.resize(2, Expr(0));
    d.resize(2, Expr(0));
    Expr det = simplify(n[1] * d[0] - n[0] * d[1]);
    if (det.is_zero()) return std::nullopt;
    return std::array<Expr, 4>{n[1], n[0], d[1], d[0]};
}

/// X = p(t) x + q(t).
std::optional<std::pair<Expr, Expr>> affine_in_x(const Expr& X) {
    std::vector<Expr> cs;
    try {
        cs = collect(simplify(X), x_);
    } catch (const ExprError&) {
        return std::nullopt;
    }
    if (cs.size() != 2) return std::nullopt;
    for (const auto& c : cs)
        if (depends_on(c, "x")) return std::nullopt;
    if (cs[1].is_zero()) return std::nullopt;
    return std::make_pair(cs[1], cs[0]);
}

std::optional<GeneralTransform> invert_general(const GeneralTransform& g, std::string& reason) {
    auto fl = fractional_linear(g.T);
    if (!fl) {
        reason = "T is not affine or fractional-linear in t";
        return std::nullopt;
    }
    auto aff = affine_in_x(g.X);
    if (!aff) {
        reason = "X is not affine in x";
        return std::nullopt;
    }
    const auto& [a, b, c, d] = *fl;
    Expr Tinv = simplify((d * t_ - b) / (a - c * t_));
    Expr p = at_t(aff->first, Tinv);
    Expr q = at_t(aff->second, Tinv);
    Expr Xinv = simplify((x_ - q) / p);
    Expr U1 = at_tx(g.U1, Tinv, Xinv);
    Expr U0 = at_tx(g.U0, Tinv, Xinv);
    return GeneralTransform{Tinv, Xinv, simplify(pow(U1, -1)), simplify(-U0 / U1)};
}

}  // namespace

Inverse invert(const Transform& tr) {
    Inverse out;
    switch (family_of(tr)) {
    case Family::Projective: {
        const auto& p = std::get<ProjectiveTuple>(tr);
        ProjectiveTuple q;
        q.kappa = p.det();
        q.alpha = simplify(p.kappa * p.delta);
        q.beta = simplify(-p.kappa * p.beta);
        q.gamma = simplify(-p.kappa * p.gamma);
        q.delta = simplify(p.kappa * p.alpha);
        q.mu1 = simplify(p.mu0 * p.gamma - p.mu1 * p.delta);
        q.mu0 = simplify(p.mu1 * p.beta - p.mu0 * p.alpha);
        out.transform = q.canonical();
        return out;
    }
    case Family::AffineDiv: {
        const auto& a = std::get<AffineDivTransform>(tr);
        AffineDivTransform b;
        b.c1 = 1 / a.c1;
        b.c0 = -a.c0 / (a.c1 * a.c1);
        b.kappa = 1 / a.kappa;
        Rational kc3 = a.kappa * a.c1 * a.c1 * a.c1;
        b.c2 = -a.c2 / kc3;
        b.c3 = a.c2 * a.c0 / kc3 - a.c3 / (a.kappa * a.c1);
        out.transform = b;
        return out;
    }
    default:
        break;
    }
    GeneralTransform g = to_general(tr);
    auto gi = invert_general(g, out.reason);
    if (!gi) {
        out.implicit = true;
        out.transform = tr;
        return out;
    }
    Expr Xat0 = simplify(substitute(gi->X, "x", Expr(0)));
    switch (family_of(tr)) {
    case Family::General:
        out.transform = *gi;
        break;
    case Family::Linz:
        out.transform = LinzTransform{gi->T, gi->X, gi->U0};
        break;
    case Family::Gauged: {
        Rational e = std::get<GaugedTransform>(tr).eps;
        out.transform = GaugedTransform{gi->T, simplify(Expr(e) * Xat0), simplify(Expr(e) * gi->U0), e};
        break;
    }
    case Family::Reduced: {
        Rational e = std::get<ReducedTransform>(tr).eps;
        out.transform = ReducedTransform{gi->T, simplify(Expr(e) * Xat0), e};
        break;
    }
    case Family::Div:
        out.transform = DivTransform{gi->T, Xat0, 1 / std::get<DivTransform>(tr).kappa};
        break;
    case Family::Linear:
        out.transform = LinearTransform{gi->T, gi->X, gi->U1, gi->U0};
        break;
    case Family::Projective:
    case Family::AffineDiv:
        break;
    }
    return out;
}

std::optional<Expr> push_solution(const Transform& tr, const Expr& solution) {
    Inverse inv = invert(tr);
    if (inv.implicit) return std::nullopt;
    GeneralTransform g = to_general(tr);
    GeneralTransform gi = to_general(inv.transform);
    Expr pushed = g.U1 * solution + g.U0;
    return simplify(compose_point(pushed, gi.T, gi.X));
}

Gauge gauge_a_to_one(const EquationInstance& source, const Assumptions* assumptions, bool closed_form) {
    EquationInstance src = coerce(source, ClassId::LinzAbc, "LINZ");
    if (!src.chart.is_identity()) throw InputError("the a -> 1 gauge needs an instance in its own coordinates");
    Expr a = simplify(src["a"], assumptions);
    Simplifier s(assumptions);
    int sg = s.sign_of(a);
    if (sg == 0)
        throw InputError("the sign of a = " + format(a) +
                         " is not decidable; declare it constant-signed (e.g. --assume 'a>0')");
    Expr sigma(sg);
    Expr body = simplify(pow(sigma * a, rational(-1, 2)), assumptions);
    Expr X = integral(body, "x");
    if (closed_form) X = eval_integrals(X);
    LinzTransform tr{sigma * t_, simplify(X, assumptions), Expr(0)};
    ApplyOptions o;
    o.check = false;
    o.zero.assumptions = assumptions;
    Applied ap = apply_linz(tr, src, o);
    Gauge g;
    g.transform = tr;
    g.report.add_zero("a~ - 1 = 0", is_zero(ap.target["a"] - 1, o.zero));
    g.report.details["sign_a"] = sg;
    g.report.details["X"] = format(tr.X);
    g.report.details["assumption"] = "sign of a is constant on the domain";
    g.target = make_instance(ClassId::LinzBf, {{"b", ap.target["b"]}, {"f", ap.target["f"]}});
    g.target.chart = ap.target.chart;
    g.report.seal("gauge a -> 1");
    return g;
}

Gauge gauge_b_to_zero(const EquationInstance& source) {
    EquationInstance src = coerce(source, ClassId::LinzBf, "GAUGED");
    if (!src.chart.is_identity()) throw InputError("the b -> 0 gauge needs an instance in its own coordinates");
    GaugedTransform tr{t_, Expr(0), src["b"], 1};
    ApplyOptions o;
    o.check = false;
    Applied ap = apply_bf(tr, src, o);
    Gauge g;
    g.transform = tr;
    g.report.add_zero("b~ = 0", is_zero(ap.target["b"]));
    g.target = make_instance(ClassId::LinzF, {{"f", ap.target["f"]}});
    g.target.chart = ap.target.chart;
    g.report.seal("gauge b -> 0");
    return g;
}

DegDivResult solve_deg_div(const DegDivSolution& sol, double tolerance, Parallel mode) {
    DegDivResult out;
    Expr sigma(sol.sign < 0 ? -1 : 1);
    Expr inner = eval_integrals(integral(sol.f2, "t"));
    Expr w = Expr(sol.C2) * eval_integrals(integral(exp(-2 * inner), "t")) + Expr(sol.C1);
    Expr Tt = simplify(sigma * pow(w, -2));
    out.T = simplify(Expr(sol.C0) + eval_integrals(integral(Tt, "t")));
    Expr Ttt = differentiate_branchwise(Tt, "t");
    Expr g = simplify(sqrt_abs(Tt) * Ttt * sol.f1 * pow(Tt, -2));
    Expr k(sol.kappa);
    // Kept unexpanded: simplify would distribute the nested integral over g.
    out.X0 = -k * half * integral(Tt * integral(g, "t"), "t") + Expr(sol.C3) * out.T + Expr(sol.C4);

    const double h = sol.step;
    const int n = sol.grid;
    const int pad = 3;
    std::vector<double> ts;
    for (int i = -pad; i < n + pad; ++i) ts.push_back(sol.t_min + (sol.t_max - sol.t_min) * i / (n - 1));
    // Stencil points around each grid point are evaluated separately so the
    // grid spacing and the differencing step are independent.
    std::vector<double> pts;
    for (int i = 0; i < n; ++i)
        for (int k2 = -pad; k2 <= pad; ++k2) pts.push_back(ts[static_cast<std::size_t>(i + pad)] + k2 * h);

    auto time_only = [](const Program& prog) {
        for (const Expr& atom : prog.inputs())
            if (!atom.is(Kind::Var) || atom.name() != "t")
                throw InputError("deg-div data must be closed-form functions of t, found " + format(atom));
    };
    Program prog(std::vector<Expr>{out.T, Expr(0), sol.f1, sol.f2});
    time_only(prog);
    Program kernel(std::vector<Expr>{Tt, g});
    time_only(kernel);
    std::vector<double> in(pts.size() * prog.inputs().size());
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = 0; j < prog.inputs().size(); ++j) in[i * prog.inputs().size() + j] = pts[i];
    std::vector<double> vals;
    eval_batch(prog, in, pts.size(), vals, mode);

    // X0 by nested quadrature of the closed-form kernel; evaluating the
    // symbolic double integral node by node is far slower.
    const std::size_t R = prog.root_count();
    const double kap = sol.kappa.get_d(), c3 = sol.C3.get_d(), c4 = sol.C4.get_d();
    auto kernel_at = [&](double s, std::size_t which) {
        double in1[1] = {s}, o[2] = {0, 0};
        const double* inp = kernel.inputs().empty() ? nullptr : in1;
        if (!kernel.run(inp, o)) return std::numeric_limits<double>::quiet_NaN();
        return o[which];
    };
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    auto x0_at = [&](double p) {
        auto G = [&](double s) { return GK::integrate([&](double r) { return kernel_at(r, 1); }, 0.0, s, 6, 1e-12); };
        double outer = GK::integrate([&](double s) { return kernel_at(s, 0) * G(s); }, 0.0, p, 6, 1e-12);
        return -kap / 2 * outer;
    };
    const long np = static_cast<long>(pts.size());
#pragma omp parallel for schedule(dynamic, 4) if (mode == Parallel::OpenMP)
    for (long i = 0; i < np; ++i) {
        double* row = &vals[static_cast<std::size_t>(i) * R];
        row[1] = x0_at(pts[static_cast<std::size_t>(i)]) + c3 * row[0] + c4;
    }
    const std::size_t S = 2 * pad + 1;
    auto val = [&](int i, int k2, std::size_t root) { return vals[(static_cast<std::size_t>(i) * S + k2 + pad) * R + root]; };
    auto d1 = [&](int i, std::size_t r) {
        return (val(i, -2, r) - 8 * val(i, -1, r) + 8 * val(i, 1, r) - val(i, 2, r)) / (12 * h);
    };
    auto d2 = [&](int i, std::size_t r) {
        return (-val(i, -2, r) + 16 * val(i, -1, r) - 30 * val(i, 0, r) + 16 * val(i, 1, r) - val(i, 2, r)) /
               (12 * h * h);
    };
    auto d3 = [&](int i, std::size_t r) {
        return (val(i, -3, r) - 8 * val(i, -2, r) + 13 * val(i, -1, r) - 13 * val(i, 1, r) + 8 * val(i, 2, r) -
                val(i, 3, r)) /
               (8 * h * h * h);
    };
    bool finite = true;
    for (int i = 0; i < n; ++i) {
        double T1 = d1(i, 0), T2 = d2(i, 0), T3 = d3(i, 0);
        double X1 = d1(i, 1), X2 = d2(i, 1);
        double f1 = val(i, 0, 2), f2 = val(i, 0, 3);
        double r1 = 4 * T1 * T2 * f2 + 2 * T1 * T3 - 3 * T2 * T2;
        double r2 = sol.kappa.get_d() / 2 * std::sqrt(std::fabs(T1)) * T2 * f1 + T1 * X2 - T2 * X1;
        finite = finite && std::isfinite(r1) && std::isfinite(r2) && T1 != 0;
        out.t.push_back(ts[static_cast<std::size_t>(i + pad)]);
        out.T_values.push_back(val(i, 0, 0));
        out.X0_values.push_back(val(i, 0, 1));
        out.residual1.push_back(r1);
        out.residual2.push_back(r2);
        out.max_residual1 = std::max(out.max_residual1, std::fabs(r1));
        out.max_residual2 = std::max(out.max_residual2, std::fabs(r2));
    }
    auto& rep = out.report;
    rep.tolerance = tolerance;
    rep.add_precondition("quadrature finite and T_t != 0", finite, "evaluation failed or T_t vanished on the grid");
    for (int which = 1; which <= 2; ++which) {
        Check c;
        c.name = which == 1 ? "4*T_t*T_tt*f2 + 2*T_t*T_ttt - 3*T_tt^2 = 0"
                            : "kappa/2*sqrt|T_t|*T_tt*f1 + T_t*X0_tt - T_tt*X0_t = 0";
        double m = which == 1 ? out.max_residual1 : out.max_residual2;
        const auto& res = which == 1 ? out.residual1 : out.residual2;
        c.verdict = m <= tolerance ? Verdict::NumericZero : Verdict::Nonzero;
        c.passed = finite && m <= tolerance;
        std::ostringstream msg;
        msg << "max |residual| = " << m << " on " << n << " grid points, step " << h;
        c.note = msg.str();
        for (std::size_t i = 0; i < res.size(); ++i) {
            c.samples.push_back({{{"t", out.t[i]}}, res[i]});
            if (std::fabs(res[i]) > tolerance && c.witness < 0) c.witness = static_cast<int>(i);
        }
        rep.checks.push_back(std::move(c));
    }
    rep.details["T"] = format(out.T);
    rep.details["X0"] = format(out.X0);
    rep.details["max_residual_1"] = out.max_residual1;
    rep.details["max_residual_2"] = out.max_residual2;
    rep.seal("degenerate divergence-class solution");
    return out;
}

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::pair<std::string, std::string>> params_of(const Transform& tr) {
    struct V {
        using P = std::vector<std::pair<std::string, std::string>>;
        P operator()(const GeneralTransform& g) const {
            return {{"T", format(g.T)}, {"X", format(g.X)}, {"U1", format(g.U1)}, {"U0", format(g.U0)}};
        }
        P operator()(const LinzTransform& g) const {
            return {{"T", format(g.T)}, {"X", format(g.X)}, {"U0", format(g.U0)}};
        }
        P operator()(const GaugedTransform& g) const {
            return {{"T", format(g.T)}, {"X0", format(g.X0)}, {"U0", format(g.U0)}, {"eps", format(g.eps)}};
        }
        P operator()(const ReducedTransform& g) const {
            return {{"T", format(g.T)}, {"X0", format(g.X0)}, {"eps", format(g.eps)}};
        }
        P operator()(const ProjectiveTuple& p) const {
            return {{"alpha", format(p.alpha)}, {"beta", format(p.beta)}, {"gamma", format(p.gamma)},
                    {"delta", format(p.delta)}, {"kappa", format(p.kappa)}, {"mu0", format(p.mu0)},
                    {"mu1", format(p.mu1)}};
        }
        P operator()(const DivTransform& g) const {
            return {{"T", format(g.T)}, {"X0", format(g.X0)}, {"kappa", format(g.kappa)}};
        }
        P operator()(const AffineDivTransform& a) const {
            return {{"c0", format(a.c0)}, {"c1", format(a.c1)}, {"c2", format(a.c2)}, {"c3", format(a.c3)},
                    {"kappa", format(a.kappa)}};
        }
        P operator()(const LinearTransform& g) const {
            return {{"T", format(g.T)}, {"X", format(g.X)}, {"V1", format(g.V1)}, {"V0", format(g.V0)}};
        }
    };
    return std::visit(V{}, tr);
}

Rational as_rational(const Expr& e, const std::string& name) {
    if (!e.is(Kind::Const)) throw InputError("param." + name + " must be a rational constant");
    return e.value();
}

}  // namespace

std::string write_transform(const Transform& tr, bool implicit) {
    std::string out = std::string("family = ") + family_tag(family_of(tr)) + "\n";
    if (implicit) out += "implicit = true\n";
    for (const auto& [n, v] : params_of(tr)) out += "param." + n + " = " + v + "\n";
    return out;
}

Transform read_transform(const std::string& text, const Context& ctx, bool* implicit) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    std::optional<Family> fam;
    std::map<std::string, Expr> ps;
    bool imp = false;
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
            if (key == "family") {
                fam = family_from_tag(value);
            } else if (key == "implicit") {
                if (value != "true" && value != "false") throw InputError("implicit must be true or false");
                imp = value == "true";
            } else if (key.rfind("param.", 0) == 0) {
                ps[key.substr(6)] = parse(value, ctx);
            } else {
                throw InputError("unknown key '" + key + "'");
            }
        } catch (const std::exception& e) {
            throw InputError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (!fam) throw InputError("missing 'family = <tag>' line");
    if (implicit) *implicit = imp;
    Transform tr = identity_transform(*fam);
    std::vector<std::string> allowed;
    for (const auto& [n, v] : params_of(tr)) allowed.push_back(n);
    for (const auto& [n, v] : ps)
        if (std::find(allowed.begin(), allowed.end(), n) == allowed.end())
            throw InputError(std::string(family_tag(*fam)) + " has no parameter '" + n + "'");
    auto get = [&](const char* n, Expr& slot) {
        auto it = ps.find(n);
        if (it != ps.end()) slot = it->second;
    };
    auto getq = [&](const char* n, Rational& slot) {
        auto it = ps.find(n);
        if (it != ps.end()) slot = as_rational(it->second, n);
    };
    std::visit(
        [&](auto& t) {
            using Ty = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<Ty, GeneralTransform>) {
                get("T", t.T), get("X", t.X), get("U1", t.U1), get("U0", t.U0);
            } else if constexpr (std::is_same_v<Ty, LinzTransform>) {
                get("T", t.T), get("X", t.X), get("U0", t.U0);
            } else if constexpr (std::is_same_v<Ty, GaugedTransform>) {
                get("T", t.T), get("X0", t.X0), get("U0", t.U0), getq("eps", t.eps);
            } else if constexpr (std::is_same_v<Ty, ReducedTransform>) {
                get("T", t.T), get("X0", t.X0), getq("eps", t.eps);
            } else if constexpr (std::is_same_v<Ty, ProjectiveTuple>) {
                get("alpha", t.alpha), get("beta", t.beta), get("gamma", t.gamma), get("delta", t.delta);
                get("kappa", t.kappa), get("mu0", t.mu0), get("mu1", t.mu1);
            } else if constexpr (std::is_same_v<Ty, DivTransform>) {
                get("T", t.T), get("X0", t.X0), getq("kappa", t.kappa);
            } else if constexpr (std::is_same_v<Ty, AffineDivTransform>) {
                getq("c0", t.c0), getq("c1", t.c1), getq("c2", t.c2), getq("c3", t.c3), getq("kappa", t.kappa);
            } else {
                get("T", t.T), get("X", t.X), get("V1", t.V1), get("V0", t.V0);
            }
        },
        tr);
    return tr;
}

}  // namespace gbe
