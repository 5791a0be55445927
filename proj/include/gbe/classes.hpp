#pragma once

#include "gbe/parse.hpp"
#include "gbe/report.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gbe {

enum class ClassId : std::uint8_t {
    Super,
    Linear,
    LinzAbc,
    LinzBf,
    LinzF,
    GbeTx,
    GbeDiv,
    GbeDivNondeg,
    GbeDivDeg,
    GbeT,
    Burgers,
};

const char* class_tag(ClassId id);
/// Throws InputError for an unknown tag.
ClassId class_from_tag(const std::string& tag);
const std::vector<ClassId>& all_classes();

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ElementSpec {
    std::string name;
    std::vector<std::string> params;
    bool nonvanishing = false;
};

const std::vector<ElementSpec>& signature(ClassId id);
/// Name of the dependent variable in build_pde output (v for LINEAR).
const char* dependent_name(ClassId id);

/// Current coordinates (t1, x1, u1) written in the base coordinates t, x, u.
/// Instances produced by a transformation keep their elements as functions
/// of the base point; the chart tells how the new coordinates sit over it.
struct Chart {
    Expr t = var("t");
    Expr x = var("x");
    Expr u = var("u");

    static Chart identity() { return {}; }
    bool is_identity() const;
    /// (T, X, U) of the new coordinates, each written in this chart's
    /// coordinates, pulled back to base coordinates.
    Chart then(const Expr& T, const Expr& X, const Expr& U) const;
};

/// Partial derivatives with respect to chart coordinates, and evaluation of
/// chart-coordinate expressions at the base point.
class Frame {
public:
    explicit Frame(const Chart& chart, const Assumptions* assumptions = nullptr);

    Expr dt(const Expr& e) const;
    Expr dx(const Expr& e) const;
    Expr du(const Expr& e) const;
    /// e(t1, x1, u1) as a base-coordinate expression.
    Expr at(const Expr& e) const;

    const Chart& chart() const { return chart_; }
    const Assumptions* assumptions() const { return assumptions_; }

private:
    Chart chart_;
    const Assumptions* assumptions_;
    bool identity_;
    Expr inv_a_, inv_xx_, inv_tt_, xt_over_xx_, ux_over_a_, ut_term_;
};

struct EquationInstance {
    ClassId id = ClassId::Burgers;
    std::map<std::string, Expr> elements;
    Chart chart;

    const Expr& operator[](const std::string& name) const;
    /// Elements in signature order.
    std::vector<std::pair<std::string, Expr>> ordered() const;
};

/// Validates element names against the signature.
EquationInstance make_instance(ClassId id, std::map<std::string, Expr> elements);
/// Every element left as its generic function symbol.
EquationInstance generic_instance(ClassId id);

/// Residual of the class equation for the candidate `w` (a closed form in
/// base coordinates for the instance's current dependent variable), with
/// all derivatives taken along the instance's chart.
Expr pde_residual(const EquationInstance& inst, const Expr& solution, const Assumptions* assumptions = nullptr);

/// The equation's left-hand side in jets of u(t,x) (v(t,x) for LINEAR).
Expr build_pde(const EquationInstance& inst);

VerificationReport check_membership(const EquationInstance& inst, const ZeroOptions& options = {});

/// f = f2*x^2 + f1*x + f0 read off by polynomial division in x.
struct QuadraticInX {
    Expr f0, f1, f2;
};
std::optional<QuadraticInX> quadratic_in_x(const Expr& f);

/// Throws InputError when no embedding path exists.
EquationInstance embed(const EquationInstance& inst, ClassId target);
bool embeds(ClassId from, ClassId to);

/// (a, b, c) of a linear equation to the linearizable (a, b, f = 2c_x).
EquationInstance linearizable_from_linear(const Expr& a, const Expr& b, const Expr& c);
EquationInstance linearizable_from_linear(const EquationInstance& linear);

/// `class = TAG` and `element.NAME = EXPR` lines; '#' starts a comment.
EquationInstance read_instance(const std::string& text, const Context& context);
std::string write_instance(const EquationInstance& inst);

}  // namespace gbe
