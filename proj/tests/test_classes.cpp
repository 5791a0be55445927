#include "doctest.h"

#include "gbe/calculus.hpp"
#include "gbe/classes.hpp"
#include "gbe/format.hpp"

using namespace gbe;

namespace {

Expr p(const std::string& s) {
    static const Context ctx = Context::elements();
    return parse(s, ctx);
}

Expr pde(const std::string& s) {
    static const Context ctx = Context::pde();
    return parse(s, ctx);
}

}  // namespace

TEST_CASE("build_pde") {
    CHECK(build_pde(make_instance(ClassId::Burgers, {})) == pde("u_t + u*u_x + u_xx"));
    CHECK(build_pde(make_instance(ClassId::LinzF, {{"f", Expr(0)}})) == pde("u_t + u_xx + u*u_x"));
    CHECK(build_pde(make_instance(ClassId::GbeDiv, {{"f", p("x")}})) == pde("u_t + u*u_x + x*u_xx + u_x"));
    CHECK(build_pde(make_instance(ClassId::Linear, {{"a", Expr(1)}, {"b", Expr(0)}, {"c", Expr(0)}})) ==
          pde("v_t + v_xx"));
}

TEST_CASE("membership") {
    CHECK(check_membership(make_instance(ClassId::GbeDivNondeg, {{"f", p("exp(x)")}})).passed());
    auto deg = check_membership(make_instance(ClassId::GbeDivDeg, {{"f", p("t*x^2 + 1")}}));
    CHECK(deg.passed());
    CHECK(deg.details["f2"] == "t");
    CHECK(deg.details["f1"] == "0");
    CHECK(deg.details["f0"] == "1");
    auto bad = check_membership(make_instance(ClassId::Super, {{"F", Expr(0)}, {"H1", p("u")}, {"H0", Expr(0)}}));
    CHECK(bad.verdict == Verdict::RejectedPrecondition);
    CHECK_FALSE(check_membership(make_instance(ClassId::GbeDivDeg, {{"f", p("exp(x)")}})).passed());
    CHECK_FALSE(check_membership(make_instance(ClassId::GbeT, {{"f", p("x + 1")}})).passed());
}

TEST_CASE("embeddings preserve the equation") {
    auto abc = generic_instance(ClassId::LinzAbc);
    auto sup = embed(abc, ClassId::Super);
    CHECK(sup["H0"] == p("1/2*a_x*u^2 + b_x*u + f"));
    CHECK(build_pde(abc) == build_pde(sup));
    for (ClassId from : all_classes()) {
        for (ClassId to : all_classes()) {
            if (from == to || !embeds(from, to)) continue;
            auto src = generic_instance(from);
            CHECK_MESSAGE(build_pde(src) == build_pde(embed(src, to)), class_tag(from), " -> ", class_tag(to));
        }
    }
    auto f = generic_instance(ClassId::LinzF);
    auto chain = embed(embed(embed(f, ClassId::LinzBf), ClassId::LinzAbc), ClassId::Super);
    auto direct = embed(f, ClassId::Super);
    for (const auto& [n, e] : direct.elements) CHECK(e == chain[n]);
    CHECK_THROWS_AS(embed(generic_instance(ClassId::Linear), ClassId::Super), InputError);
}

TEST_CASE("linearizable from linear") {
    auto l = linearizable_from_linear(Expr(1), Expr(0), p("x"));
    CHECK(l["f"] == Expr(2));
    auto g = linearizable_from_linear(p("a"), p("b"), p("c"));
    CHECK(g["f"] == p("2*c_x"));
}

TEST_CASE("instance files") {
    auto ctx = Context::elements();
    auto inst = read_instance("class = GBE_TX\nelement.f = t*x + 1 # comment\n", ctx);
    CHECK(inst.id == ClassId::GbeTx);
    CHECK(read_instance(write_instance(inst), ctx)["f"] == inst["f"]);
    CHECK_THROWS_AS(read_instance("class = NOPE\n", ctx), InputError);
    CHECK_THROWS_AS(read_instance("class = LINZ_F\nelement.f = x +\n", ctx), InputError);
    CHECK_THROWS_AS(read_instance("class = LINZ_F\n", ctx), InputError);
}

TEST_CASE("residuals of classical solutions") {
    auto burgers = make_instance(ClassId::Burgers, {});
    CHECK(pde_residual(burgers, p("2/x")).is_zero());
    CHECK(pde_residual(burgers, p("2*exp(x-t)/(1+exp(x-t))")).is_zero());
    CHECK_FALSE(pde_residual(burgers, p("x")).is_zero());
}
