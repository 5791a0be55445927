#include "gbe/hopfcole.hpp"
#include "gbe/format.hpp"

#include <doctest.h>

using namespace gbe;

namespace {

Expr p(const std::string& s) { return parse(s, Context::elements()); }

BridgePair heat_pair() {
    return bridge(make_instance(ClassId::Linear, {{"a", Expr(1)}, {"b", Expr(0)}, {"c", Expr(0)}}));
}

}  // namespace

TEST_CASE("hopf-cole solution map") {
    CHECK(cole_hopf_solution(p("x")) == p("2/x"));
    CHECK(cole_hopf_solution(Expr(1)) == Expr(0));
    CHECK_THROWS_AS(cole_hopf_solution(Expr(0)), InputError);
    auto burgers = make_instance(ClassId::Burgers, {});
    CHECK(residual(burgers, cole_hopf_solution(p("1 + exp(x - t)"))).passed());
}

TEST_CASE("heat catalog maps to Burgers solutions") {
    auto pair = heat_pair();
    auto burgers = make_instance(ClassId::Burgers, {});
    auto us = burgers_catalog();
    REQUIRE(us.size() == heat_catalog().size());
    for (std::size_t i = 0; i < us.size(); ++i) {
        CAPTURE(format(heat_catalog()[i]));
        CHECK(residual(pair.linear, heat_catalog()[i]).passed());
        CHECK(residual(burgers, us[i]).passed());
        CHECK(residual(pair.linearizable, us[i]).passed());
    }
}

TEST_CASE("lifting linear transforms") {
    CHECK(lift_transform({p("4*t"), p("2*x"), Expr(1), Expr(0)}).U0 == Expr(0));
    CHECK(lift_transform({p("t"), p("x"), p("exp(x)"), Expr(0)}).U0 == Expr(2));
    CHECK_THROWS_AS(lift_transform({p("t"), p("x"), Expr(1), p("x")}), ObstructionError);
}

TEST_CASE("diagram commutes") {
    auto pair = heat_pair();
    for (const LinearTransform& tr : std::vector<LinearTransform>{
             {p("t"), p("x"), Expr(1), Expr(0)},
             {p("4*t"), p("2*x"), Expr(1), Expr(0)},
             {p("t"), p("x"), p("exp(x)"), Expr(0)},
             {p("t + 1"), p("x + 3*t"), p("1 + x^2"), Expr(0)},
             {p("2*t"), p("-x + 1"), p("exp(2*x)"), Expr(0)},
         }) {
        auto rep = verify_diagram(tr, pair, heat_catalog());
        CAPTURE(rep.to_json().dump(1));
        CHECK(rep.passed());
    }
}

TEST_CASE("nonzero V0 is an obstruction") {
    // V0 / V1 = x solves the heat equation, so the transform is admissible.
    auto rep = verify_diagram({p("t"), p("x"), Expr(1), p("x")}, heat_pair(), heat_catalog());
    CHECK(rep.verdict == Verdict::RejectedPrecondition);
    CHECK(rep.details.contains("obstruction"));
}

TEST_CASE("lift is functorial") {
    LinearTransform g{p("2*t"), p("x + t"), p("exp(x)"), Expr(0)};
    LinearTransform h{p("t + 1"), p("3*x"), p("1 + x^2"), Expr(0)};
    auto lhs = std::get<LinzTransform>(compose(lift_transform(g), lift_transform(h)));
    auto rhs = lift_transform(std::get<LinearTransform>(compose(g, h)));
    CHECK(is_zero(lhs.T - rhs.T).zero());
    CHECK(is_zero(lhs.X - rhs.X).zero());
    CHECK(is_zero(lhs.U0 - rhs.U0).zero());
}
