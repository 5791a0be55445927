#pragma once

#include "gbe/verify.hpp"

#include <vector>

namespace gbe {

/// A linear equation and its linearizable image (f = 2 c_x).
struct BridgePair {
    EquationInstance linear;
    EquationInstance linearizable;
};

BridgePair bridge(const EquationInstance& linear);

/// u = 2 v_x / v. Throws InputError when v vanishes identically.
Expr cole_hopf_solution(const Expr& v, const ZeroOptions& options = {});

/// Raised when a linear transform has no linearizable counterpart.
struct ObstructionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Same T and X, U0 = 2 V1_x / (X_x V1). Requires V0 = 0.
LinzTransform lift_transform(const LinearTransform& tr, const ZeroOptions& options = {});

/// Element square and solution square of the Hopf-Cole diagram. Solutions
/// must solve pair.linear; sampling keeps |v| >= 0.1 away from the poles.
VerificationReport verify_diagram(const LinearTransform& tr, const BridgePair& pair,
                                  const std::vector<Expr>& solutions, const ZeroOptions& options = {});

/// Closed-form solutions of v_t + v_xx = 0.
const std::vector<Expr>& heat_catalog();
/// Their Hopf-Cole images, solutions of u_t + u u_x + u_xx = 0.
std::vector<Expr> burgers_catalog();

}  // namespace gbe
