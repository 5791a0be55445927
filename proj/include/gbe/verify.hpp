#pragma once

#include "gbe/transforms.hpp"

namespace gbe {

/// Substitutes a closed-form candidate into the instance's equation.
VerificationReport residual(const EquationInstance& inst, const Expr& candidate, const ZeroOptions& options = {});

/// Element-wise and chart-wise equality of two instances of one class.
VerificationReport compare_instances(const EquationInstance& lhs, const EquationInstance& rhs,
                                     const ZeroOptions& options = {});

/// apply(tr, source) must equal target (checked first, failing fast), and
/// the pushed-forward solution must solve the target.
VerificationReport transport_check(const Transform& tr, const EquationInstance& source,
                                   const EquationInstance& target, const Expr& solution,
                                   const ZeroOptions& options = {});

/// Target residual of the solution carried along the transform's chart.
VerificationReport pushed_residual(const Applied& applied, const Expr& solution, const ZeroOptions& options = {});

}  // namespace gbe
