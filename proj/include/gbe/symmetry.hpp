#pragma once

#include "gbe/hopfcole.hpp"

#include <string>
#include <vector>

namespace gbe {

/// xi_t d/dt + xi_x d/dx + eta d/du.
struct VectorField {
    Expr xi_t = Expr(0);
    Expr xi_x = Expr(0);
    Expr eta = Expr(0);

    Expr apply(const Expr& f) const;
};

VectorField bracket(const VectorField& a, const VectorField& b);
bool operator==(const VectorField& a, const VectorField& b);
std::string format(const VectorField& v);

/// d_t; 2t d_t + x d_x - u d_u; t^2 d_t + tx d_x + (x - ut) d_u; d_x; t d_x + d_u.
const std::vector<VectorField>& burgers_algebra();
const std::vector<std::string>& burgers_algebra_names();

struct StructureTable {
    /// c[i][j][k]: coefficient of basis k in [e_i, e_j].
    std::vector<std::vector<std::vector<Rational>>> c;
    bool independent = false;
    bool closed = false;
    VerificationReport report;
};

/// Expresses every pairwise bracket in the basis. Coefficients are solved
/// exactly from the fields at integer points and then confirmed symbolically.
StructureTable structure_constants(const std::vector<VectorField>& basis);

/// Cyclic sum over every triple of distinct basis fields.
VerificationReport jacobi_check(const std::vector<VectorField>& basis);

enum class Flow : std::uint8_t { TimeTranslation, Scaling, Projective, SpaceTranslation, Galilean };
constexpr int flow_count = 5;

/// One-parameter subgroup of the basis field with this index; eps may be
/// symbolic. Throws InputError for an index outside 0..4.
ProjectiveTuple flow(int index, const Expr& eps);
/// (t, x, u) -> (t, -x, -u).
ProjectiveTuple reflection();

/// alpha*delta - beta*gamma = kappa^2 > 0, then every solution must be
/// carried to a solution of the Burgers equation.
VerificationReport is_symmetry(const ProjectiveTuple& g, const std::vector<Expr>& solutions,
                               const ZeroOptions& options = {});

/// d/d eps at eps = 0 of the flow's point map against the basis field.
VerificationReport flow_generator_check(int index, const ZeroOptions& options = {});

}  // namespace gbe
