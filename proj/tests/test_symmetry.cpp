#include "gbe/symmetry.hpp"

#include <doctest.h>

using namespace gbe;

namespace {

Expr p(const std::string& s) { return parse(s, Context::elements()); }

}  // namespace

TEST_CASE("brackets of the Burgers algebra") {
    const auto& e = burgers_algebra();
    CHECK(bracket(e[0], e[3]) == VectorField{});
    CHECK(bracket(e[0], e[2]) == e[1]);
    CHECK(bracket(e[3], e[4]) == VectorField{});
    CHECK(bracket(e[3], e[2]) == e[4]);
    CHECK(bracket(e[1], e[0]) == VectorField{Expr(-2), Expr(0), Expr(0)});
}

TEST_CASE("structure constants close") {
    auto tab = structure_constants(burgers_algebra());
    REQUIRE(tab.closed);
    CHECK(tab.report.passed());
    // [P_t, D] = 2 P_t, [D, Pi] = 2 Pi, [P_t, Pi] = D, [P_x, G] = 0, [D, G] = G.
    CHECK(tab.c[0][1][0] == 2);
    CHECK(tab.c[1][2][2] == 2);
    CHECK(tab.c[0][2][1] == 1);
    CHECK(tab.c[3][4][4] == 0);
    CHECK(tab.c[1][4][4] == 1);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j)
            for (std::size_t k = 0; k < 5; ++k) CHECK(tab.c[i][j][k] == -tab.c[j][i][k]);
    CHECK(jacobi_check(burgers_algebra()).passed());
    CHECK(jacobi_check(burgers_algebra()).checks.size() == 10);
}

TEST_CASE("non-closed basis is reported") {
    auto basis = burgers_algebra();
    basis.push_back({Expr(0), Expr(0), Expr(1)});
    auto tab = structure_constants(basis);
    CHECK(tab.independent);
    CHECK_FALSE(tab.closed);
    CHECK(structure_constants({burgers_algebra()[0]}).closed);
    auto dependent = burgers_algebra();
    dependent.push_back({Expr(2), Expr(0), Expr(0)});
    CHECK_FALSE(structure_constants(dependent).independent);
}

TEST_CASE("flows") {
    Expr e = rational(1, 3);
    auto proj = point_map(flow(2, e));
    CHECK(is_zero(proj.t - p("t/(1 - t/3)")).zero());
    CHECK(is_zero(proj.x - p("x/(1 - t/3)")).zero());
    CHECK(is_zero(proj.u - p("(1 - t/3)*u + x/3")).zero());
    auto sc = point_map(flow(1, p("ln(2)")));
    CHECK(is_zero(sc.t - p("4*t")).zero());
    CHECK(is_zero(sc.x - p("2*x")).zero());
    CHECK(is_zero(sc.u - p("u/2")).zero());
    for (int i = 0; i < flow_count; ++i) {
        auto id = point_map(flow(i, Expr(0)));
        CHECK(id.t == p("t"));
        CHECK(id.x == p("x"));
        CHECK(id.u == p("u"));
        CHECK(is_zero(flow(i, e).det() - flow(i, e).kappa * flow(i, e).kappa).zero());
        CHECK(flow_generator_check(i).passed());
    }
    CHECK_THROWS_AS(flow(5, e), InputError);
}

TEST_CASE("flow property") {
    for (int i = 0; i < flow_count; ++i) {
        auto lhs = std::get<ProjectiveTuple>(compose(flow(i, rational(1, 3)), flow(i, rational(1, 4)))).canonical();
        auto rhs = flow(i, rational(7, 12)).canonical();
        for (auto [a, b] : {std::pair{lhs.alpha, rhs.alpha}, {lhs.beta, rhs.beta}, {lhs.gamma, rhs.gamma},
                            {lhs.delta, rhs.delta}, {lhs.kappa, rhs.kappa}, {lhs.mu0, rhs.mu0}, {lhs.mu1, rhs.mu1}})
            CHECK(is_zero(a - b).zero());
    }
}

TEST_CASE("symmetries transport the catalog") {
    auto sols = burgers_catalog();
    for (int i = 0; i < flow_count; ++i) {
        auto rep = is_symmetry(flow(i, rational(1, 3)), sols);
        CAPTURE(i);
        CAPTURE(rep.to_json().dump(1));
        CHECK(rep.passed());
    }
    CHECK(is_symmetry(reflection(), sols).passed());
    ProjectiveTuple bad;
    bad.alpha = Expr(-1);
    CHECK(is_symmetry(bad, sols).verdict == Verdict::RejectedPrecondition);
}

TEST_CASE("symmetry check rejects a non-solution") {
    auto rep = is_symmetry(flow(0, rational(1, 3)), {p("x")});
    CHECK_FALSE(rep.passed());
}
