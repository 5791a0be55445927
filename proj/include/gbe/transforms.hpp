#pragma once

#include "gbe/classes.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace gbe {

/// t~ = T, x~ = X, u~ = U1*u + U0 on the superclass.
struct GeneralTransform {
    Expr T = var("t");
    Expr X = var("x");
    Expr U1 = Expr(1);
    Expr U0 = Expr(0);
};

/// Linearizable class: u~ = u/X_x + U0.
struct LinzTransform {
    Expr T = var("t");
    Expr X = var("x");
    Expr U0 = Expr(0);
};

/// a = 1 gauge: x~ = eps*(sqrt(T_t)*x + X0), u~ = eps*(u/sqrt(T_t) + U0).
struct GaugedTransform {
    Expr T = var("t");
    Expr X0 = Expr(0);
    Expr U0 = Expr(0);
    Rational eps = 1;
};

/// a = 1, b = 0: U0 is fixed by T and X0.
struct ReducedTransform {
    Expr T = var("t");
    Expr X0 = Expr(0);
    Rational eps = 1;
};

/// Fractional-linear group of u_t + u u_x + f(t,x) u_xx = 0. Entries are
/// constant expressions; the tuple is defined up to a common factor.
struct ProjectiveTuple {
    Expr alpha = Expr(1);
    Expr beta = Expr(0);
    Expr gamma = Expr(0);
    Expr delta = Expr(1);
    Expr kappa = Expr(1);
    Expr mu0 = Expr(0);
    Expr mu1 = Expr(0);

    /// Divided by the largest-magnitude entry, sign fixed by kappa > 0.
    /// Unchanged when an entry has no numeric value.
    ProjectiveTuple canonical() const;
    Expr det() const;
};

/// Divergence-form class: x~ = kappa*sqrt|T_t|*x + X0.
struct DivTransform {
    Expr T = var("t");
    Expr X0 = Expr(0);
    Rational kappa = 1;
};

/// T = c1^2 t + c0, X0 = c2 t + c3.
struct AffineDivTransform {
    Rational c0 = 0;
    Rational c1 = 1;
    Rational c2 = 0;
    Rational c3 = 0;
    Rational kappa = 1;

    DivTransform as_div() const;
};

/// Linear class: v~ = V1*v + V0.
struct LinearTransform {
    Expr T = var("t");
    Expr X = var("x");
    Expr V1 = Expr(1);
    Expr V0 = Expr(0);
};

using Transform = std::variant<GeneralTransform, LinzTransform, GaugedTransform, ReducedTransform, ProjectiveTuple,
                               DivTransform, AffineDivTransform, LinearTransform>;

enum class Family : std::uint8_t { General, Linz, Gauged, Reduced, Projective, Div, AffineDiv, Linear };

Family family_of(const Transform& tr);
const char* family_tag(Family f);
Family family_from_tag(const std::string& tag);
Transform identity_transform(Family f);

struct PointMap {
    Expr t, x, u;
};

/// The point map (t~, x~, u~) in source coordinates.
PointMap point_map(const Transform& tr);
/// The same transformation in superclass form (Linear stays linear in v).
GeneralTransform to_general(const Transform& tr);

struct ApplyOptions {
    bool check = true;
    ZeroOptions zero;
};

struct Applied {
    EquationInstance target;
    PointMap map;
    /// Tilde-coordinate re-expression (t, x, u in terms of t~, x~, u~ written
    /// as t, x, u) when the transform inverts in closed form.
    std::optional<PointMap> inverse;
    VerificationReport admissibility;
    bool admissible() const { return admissibility.passed(); }
};

/// Class the family acts on, and the class it produces from `source`.
ClassId source_class(Family f);

Applied apply(const Transform& tr, const EquationInstance& source, const ApplyOptions& options = {});
Applied apply_general(const GeneralTransform& tr, const EquationInstance& source, const ApplyOptions& options = {});
Applied apply_linz(const LinzTransform& tr, const EquationInstance& source, const ApplyOptions& options = {});
Applied apply_bf(const GaugedTransform& tr, const EquationInstance& source, const ApplyOptions& options = {});
Applied apply_f(const ReducedTransform& tr, const EquationInstance& source, const ApplyOptions& options = {});
Applied apply_projective(const ProjectiveTuple& p, const EquationInstance& source, const ApplyOptions& options = {});
Applied apply_div(const DivTransform& tr, const EquationInstance& source, const ApplyOptions& options = {});
Applied apply_linear(const LinearTransform& tr, const EquationInstance& source, const ApplyOptions& options = {});

/// Residual of the divergence-class admissibility constraint
/// kappa*sqrt|T_t|*T_tt*f_x + 2*T_t*X_tt - 2*T_tt*X_t with X the full
/// x-component.
Expr div_constraint(const DivTransform& tr, const EquationInstance& source);
/// (V0/V1)_t + a (V0/V1)_xx + b (V0/V1)_x + c V0/V1.
Expr classifying_condition(const LinearTransform& tr, const EquationInstance& source);

struct CompositionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// second after first. Same families compose in-family; mixed u-families
/// are lifted to GeneralTransform; Linear only composes with Linear.
Transform compose(const Transform& second, const Transform& first);

struct Inverse {
    bool implicit = false;
    /// The inverse, or the original transform when implicit.
    Transform transform;
    std::string reason;
};

/// Closed form for T affine or fractional-linear in t and X affine in x.
Inverse invert(const Transform& tr);

/// Solution pushed through an invertible transform, as a function of t, x.
std::optional<Expr> push_solution(const Transform& tr, const Expr& solution);

struct Gauge {
    EquationInstance target;
    Transform transform;
    VerificationReport report;
};

/// a -> 1 by t~ = sign(a) t, x~ = int (sign(a) a)^(-1/2) dx. The sign of a
/// must be decidable (constant or assumed). Table antiderivatives are used
/// when `closed_form`; otherwise X stays an integral node.
Gauge gauge_a_to_one(const EquationInstance& linz_abc, const Assumptions* assumptions = nullptr,
                     bool closed_form = true);
/// b -> 0 by u~ = u + b.
Gauge gauge_b_to_zero(const EquationInstance& linz_bf);

/// Constants and free functions of the closed-form solution of the
/// degenerate (f_xxx = 0) admissibility system.
struct DegDivSolution {
    Rational C0 = 0, C1 = 1, C2 = 0, C3 = 1, C4 = 0;
    Expr f1 = Expr(0);
    Expr f2 = Expr(0);
    int sign = 1;
    Rational kappa = 1;
    double t_min = 0.1;
    double t_max = 1.0;
    double step = 0.0025;
    int grid = 46;
};

struct DegDivResult {
    Expr T;
    Expr X0;
    std::vector<double> t, T_values, X0_values, residual1, residual2;
    double max_residual1 = 0;
    double max_residual2 = 0;
    VerificationReport report;
};

DegDivResult solve_deg_div(const DegDivSolution& sol, double tolerance = 1e-6, Parallel mode = Parallel::OpenMP);

/// `family = TAG`, `param.NAME = VALUE`, optional `implicit = true`.
Transform read_transform(const std::string& text, const Context& context, bool* implicit = nullptr);
std::string write_transform(const Transform& tr, bool implicit = false);

}  // namespace gbe
