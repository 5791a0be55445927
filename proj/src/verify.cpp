#include "gbe/verify.hpp"

#include "gbe/calculus.hpp"
#include "gbe/format.hpp"

namespace gbe {

VerificationReport residual(const EquationInstance& inst, const Expr& candidate, const ZeroOptions& o) {
    VerificationReport rep;
    rep.tolerance = o.tolerance;
    rep.seed = o.domain.seed;
    Expr r;
    try {
        r = pde_residual(inst, candidate, o.assumptions);
    } catch (const ExprError& e) {
        rep.add_precondition("residual construction", false, e.what());
        rep.seal("residual");
        return rep;
    }
    rep.add_zero("residual", is_zero(r, o));
    rep.seal(std::string("residual in ") + class_tag(inst.id));
    return rep;
}

VerificationReport compare_instances(const EquationInstance& lhs, const EquationInstance& rhs, const ZeroOptions& o) {
    VerificationReport rep;
    rep.tolerance = o.tolerance;
    rep.seed = o.domain.seed;
    if (lhs.id != rhs.id) {
        rep.add_precondition("same class", false,
                             std::string(class_tag(lhs.id)) + " differs from " + class_tag(rhs.id));
        rep.seal("instance comparison");
        return rep;
    }
    for (const auto& [name, e] : lhs.ordered()) rep.add_zero(name, is_zero(e - rhs[name], o));
    if (!lhs.chart.is_identity() || !rhs.chart.is_identity()) {
        rep.add_zero("chart t", is_zero(lhs.chart.t - rhs.chart.t, o));
        rep.add_zero("chart x", is_zero(lhs.chart.x - rhs.chart.x, o));
        rep.add_zero("chart u", is_zero(lhs.chart.u - rhs.chart.u, o));
    }
    rep.seal("instance comparison");
    return rep;
}

VerificationReport pushed_residual(const Applied& applied, const Expr& solution, const ZeroOptions& o) {
    return residual(applied.target, solution, o);
}

VerificationReport transport_check(const Transform& tr, const EquationInstance& source,
                                   const EquationInstance& target, const Expr& solution, const ZeroOptions& o) {
    VerificationReport rep;
    rep.tolerance = o.tolerance;
    rep.seed = o.domain.seed;
    VerificationReport src = residual(source, solution, o);
    rep.merge(src, "source ");
    if (!src.passed()) {
        rep.checks.back().kind = Check::Kind::Precondition;
        rep.seal("transport");
        return rep;
    }
    ApplyOptions ao;
    ao.zero = o;
    Applied ap = apply(tr, source, ao);
    rep.merge(ap.admissibility, "admissibility ");
    if (!ap.admissible()) {
        rep.seal("transport");
        return rep;
    }
    // The expected target is written in its own coordinates; carry it to the
    // base point along the transform's chart before comparing.
    EquationInstance actual = ap.target;
    EquationInstance expected = target;
    if (expected.id != actual.id) {
        if (embeds(expected.id, actual.id)) {
            expected = embed(expected, actual.id);
        } else if (embeds(actual.id, expected.id)) {
            actual = embed(actual, expected.id);
        } else {
            rep.add_precondition("target class", false,
                                 std::string("transform produces ") + class_tag(actual.id) + ", target is " +
                                     class_tag(expected.id));
            rep.seal("transport");
            return rep;
        }
    }
    Frame fr(actual.chart);
    for (auto& [name, e] : expected.elements) e = fr.at(e);
    expected.chart = actual.chart;
    VerificationReport el = compare_instances(actual, expected, o);
    rep.merge(el, "element ");
    if (!el.passed()) {
        rep.details["failed_stage"] = "elements";
        rep.seal("transport");
        return rep;
    }
    rep.merge(residual(ap.target, solution, o), "target ");
    rep.seal("transport");
    return rep;
}

}  // namespace gbe
