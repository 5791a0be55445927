#pragma once

#include "gbe/expr.hpp"

#include <string>

namespace gbe {

/// Text in the input grammar; parse(format(e)) reproduces e.
std::string format(const Expr& e);
std::string format(const Rational& q);

}  // namespace gbe
