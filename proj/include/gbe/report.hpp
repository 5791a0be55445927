#pragma once

#include "gbe/numeric.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace gbe {

/// One named condition inside a report.
struct Check {
    enum class Kind : std::uint8_t { Zero, Nonvanishing, Precondition };
    std::string name;
    Kind kind = Kind::Zero;
    Verdict verdict = Verdict::Undetermined;
    bool passed = false;
    std::string residual_text;
    std::vector<Sample> samples;
    int witness = -1;
    std::string note;
};

/// Outcome of a residual, membership or admissibility check. The overall
/// verdict is REJECTED_PRECONDITION if any precondition failed, NONZERO if
/// any other check failed, otherwise SYMBOLIC_ZERO when every check was
/// decided symbolically and NUMERIC_ZERO when sampling was needed.
struct VerificationReport {
    Verdict verdict = Verdict::SymbolicZero;
    std::string residual_text = "0";
    std::vector<Sample> samples;
    double tolerance = 1e-9;
    std::uint64_t seed = 42;
    std::string summary;
    std::vector<Check> checks;
    nlohmann::ordered_json details = nlohmann::ordered_json::object();

    bool passed() const { return verdict == Verdict::SymbolicZero || verdict == Verdict::NumericZero; }

    Check& add_zero(const std::string& name, const ZeroTest& z);
    Check& add_nonvanishing(const std::string& name, const ZeroTest& z);
    Check& add_precondition(const std::string& name, bool ok, const std::string& note);
    void merge(const VerificationReport& other, const std::string& prefix);
    /// Recomputes the verdict and headline fields from the checks.
    void seal(const std::string& what);

    nlohmann::ordered_json to_json() const;
};

/// NONZERO verdict with no sampled zero: the expression is nonvanishing on
/// the sampling domain. Constants and sign-assumed atoms are decided
/// symbolically.
ZeroTest nonvanishing(const Expr& e, const ZeroOptions& options = {});
/// As nonvanishing, but every sampled value must also be positive.
ZeroTest positive(const Expr& e, const ZeroOptions& options = {});

}  // namespace gbe
