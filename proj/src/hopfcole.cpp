#include "gbe/hopfcole.hpp"

#include "gbe/calculus.hpp"
#include "gbe/format.hpp"

namespace gbe {

namespace {

ZeroOptions away_from_zero(ZeroOptions o, const Expr& v) {
    Exclusion ex;
    ex.expr = v;
    ex.bound = 0.1;
    o.domain.exclusions.push_back(ex);
    return o;
}

}  // namespace

BridgePair bridge(const EquationInstance& linear) {
    if (linear.id != ClassId::Linear) throw InputError("a bridge pair needs a LINEAR instance");
    return {linear, linearizable_from_linear(linear)};
}

Expr cole_hopf_solution(const Expr& v, const ZeroOptions& options) {
    if (is_zero(v, options).zero()) throw InputError("v vanishes identically");
    return simplify(2 * differentiate_branchwise(v, "x") / v, options.assumptions);
}

LinzTransform lift_transform(const LinearTransform& tr, const ZeroOptions& options) {
    if (!is_zero(tr.V0, options).zero())
        throw ObstructionError("V0 = " + format(tr.V0) +
                               " is nonzero: the transform has no counterpart in the equivalence groupoid of the "
                               "linearizable class");
    Expr Xx = differentiate_branchwise(tr.X, "x");
    Expr U0 = 2 * differentiate_branchwise(tr.V1, "x") / (Xx * tr.V1);
    return {tr.T, tr.X, simplify(U0, options.assumptions)};
}

VerificationReport verify_diagram(const LinearTransform& tr, const BridgePair& pair,
                                  const std::vector<Expr>& solutions, const ZeroOptions& options) {
    VerificationReport rep;
    rep.tolerance = options.tolerance;
    rep.seed = options.domain.seed;
    LinzTransform lifted;
    try {
        lifted = lift_transform(tr, options);
    } catch (const ObstructionError& e) {
        rep.add_precondition("V0 = 0", false, e.what());
        rep.details["obstruction"] = e.what();
        rep.seal("Hopf-Cole diagram");
        return rep;
    }
    rep.details["U0"] = format(lifted.U0);

    ApplyOptions ao;
    ao.zero = options;
    Applied lin = apply_linear(tr, pair.linear, ao);
    rep.merge(lin.admissibility, "linear: ");
    if (!rep.passed()) {
        rep.seal("Hopf-Cole diagram");
        return rep;
    }
    Applied linz = apply_linz(lifted, pair.linearizable, ao);
    EquationInstance via_linear = linearizable_from_linear(lin.target);
    rep.merge(compare_instances(linz.target, via_linear, options), "elements: ");

    if (!solutions.empty() && !pair.linear.chart.is_identity())
        throw InputError("the solution square needs the linear instance in its own coordinates");
    Expr Xx = differentiate_branchwise(tr.X, "x");
    for (std::size_t i = 0; i < solutions.size(); ++i) {
        const Expr& v = solutions[i];
        std::string tag = "solution " + std::to_string(i) + ": ";
        ZeroOptions zo = away_from_zero(options, v);
        ZeroTest src = is_zero(pde_residual(pair.linear, v, options.assumptions), zo);
        if (!src.zero()) {
            rep.add_precondition(tag + "v solves the linear equation", false, "v = " + format(v));
            continue;
        }
        // Route 1: push v, then Hopf-Cole in the new coordinates. T depends on
        // t only, so d/dx~ at fixed t~ is X_x^(-1) d/dx.
        Expr v_new = substitute(lin.map.u, "u", v);
        Expr u1 = 2 * differentiate_branchwise(v_new, "x") / (Xx * v_new);
        // Route 2: Hopf-Cole, then push u.
        Expr u = cole_hopf_solution(v, zo);
        Expr u2 = substitute(linz.map.u, "u", u);
        rep.add_zero(tag + "routes agree", is_zero(u1 - u2, zo));
        // pde_residual pushes the base solution along the target's chart.
        rep.add_zero(tag + "pushed u solves the target", is_zero(pde_residual(linz.target, u, options.assumptions), zo));
    }
    rep.seal("Hopf-Cole diagram");
    return rep;
}

const std::vector<Expr>& heat_catalog() {
    static const std::vector<Expr> catalog = [] {
        Context ctx = Context::elements();
        std::vector<Expr> out;
        for (const char* s : {"1", "x", "x + 2", "x^2 - 2*t", "x^3 - 6*t*x", "exp(x - t)", "1 + exp(x - t)", "1 + exp(2*x - 4*t)",
                              "exp(2*x - 4*t) + exp(-x - t)", "cos(x)*exp(t)"})
            out.push_back(parse(s, ctx));
        return out;
    }();
    return catalog;
}

std::vector<Expr> burgers_catalog() {
    std::vector<Expr> out;
    for (const Expr& v : heat_catalog()) out.push_back(cole_hopf_solution(v));
    return out;
}

}  // namespace gbe
