#pragma once

#include "gbe/simplify.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace gbe {

/// Flattened evaluation program for one or more expressions. Inputs are the
/// free variables plus every uninstantiated function atom (and any
/// antiderivative whose body contains one); both receive sampled values.
class Program {
public:
    explicit Program(const std::vector<Expr>& roots);
    explicit Program(const Expr& root) : Program(std::vector<Expr>{root}) {}

    const std::vector<Expr>& inputs() const { return inputs_; }
    std::size_t root_count() const { return roots_.size(); }
    /// Inputs that must be sampled positive (under even roots or ln).
    const std::vector<bool>& positive_inputs() const { return positive_; }

    /// Evaluates every root; false on a domain error. When `magnitude` is
    /// given it receives a rounding scale per root (sum of absolute term
    /// sizes, propagated through products and powers).
    bool run(const double* in, double* out, double* magnitude = nullptr) const;

    struct Op {
        enum class Code : std::uint8_t { Const, Input, Add, Mul, Pow, Exp, Ln, Abs, Sign, Sin, Cos, Int };
        Code code = Code::Const;
        std::vector<std::size_t> args;
        double value = 0;  // constant, coefficient, or exponent
        bool num_odd = false;
        bool den_odd = true;
        bool integer = false;
        // Int: body program over its own inputs; map to outer inputs, the
        // dummy slot marked by npos.
        std::shared_ptr<const Program> body;
        std::vector<std::size_t> body_inputs;
        double lower = 0;
    };

private:
    friend struct ProgramBuilder;
    std::vector<Expr> inputs_;
    std::vector<bool> positive_;
    std::vector<Op> ops_;
    std::vector<std::size_t> roots_;
};

/// Evaluates a closed-form expression at a point.
double evaluate(const Expr& e, const std::map<std::string, double>& point);

enum class Parallel { Serial, OpenMP };

/// Row-major point matrix (points x inputs) to value matrix (points x roots).
/// Rows that hit a domain error get NaN.
void eval_batch(const Program& p, const std::vector<double>& points, std::size_t n, std::vector<double>& out,
                Parallel mode = Parallel::OpenMP);

struct Interval {
    double lo;
    double hi;
};

struct Exclusion {
    enum class Kind : std::uint8_t { Positive, AbsAtLeast };
    Expr expr;
    Kind kind = Kind::AbsAtLeast;
    double bound = 0.1;
};

struct SampleDomain {
    std::map<std::string, std::vector<Interval>> ranges;  // per variable; default below
    std::vector<Interval> fallback{{-2.0, -0.1}, {0.1, 2.0}};
    std::vector<Exclusion> exclusions;
    int count = 30;
    std::uint64_t seed = 42;

    const std::vector<Interval>& range_of(const std::string& var) const;
};

enum class Verdict : std::uint8_t { SymbolicZero, NumericZero, Nonzero, RejectedPrecondition, Undetermined };
const char* verdict_name(Verdict v);

struct Sample {
    std::vector<std::pair<std::string, double>> point;
    double value = 0;
};

struct ZeroTest {
    Verdict verdict = Verdict::Undetermined;
    Expr residual;
    std::vector<Sample> samples;
    double tolerance = 1e-9;
    std::uint64_t seed = 42;
    int witness = -1;
    int failed_points = 0;
    std::string note;
    bool zero() const { return verdict == Verdict::SymbolicZero || verdict == Verdict::NumericZero; }
};

struct ZeroOptions {
    double tolerance = 1e-9;
    SampleDomain domain;
    const Assumptions* assumptions = nullptr;
    bool use_together = true;
    std::size_t together_limit = 6000;
    Parallel mode = Parallel::OpenMP;
};

/// SYMBOLIC_ZERO, NUMERIC_ZERO (relative to the sum of term magnitudes) or
/// NONZERO with a witness.
ZeroTest is_zero(const Expr& e, const ZeroOptions& options = {});

/// Draws accepted sample points for a program (deterministic in the seed).
/// Roots of `p` past `main_roots` are the domain's exclusion expressions.
std::vector<std::vector<double>> draw_points(const Program& p, std::size_t main_roots, const SampleDomain& d,
                                             const Assumptions* a, int wanted, int& rejected,
                                             Parallel mode = Parallel::OpenMP);

}  // namespace gbe
