#include "gbe/report.hpp"

#include "gbe/format.hpp"

#include <cmath>

namespace gbe {

namespace {

nlohmann::ordered_json samples_json(const std::vector<Sample>& samples) {
    auto out = nlohmann::ordered_json::array();
    for (const auto& s : samples) {
        nlohmann::ordered_json point = nlohmann::ordered_json::object();
        for (const auto& [name, value] : s.point) point[name] = value;
        out.push_back({{"point", point}, {"value", s.value}});
    }
    return out;
}

const char* kind_name(Check::Kind k) {
    switch (k) {
    case Check::Kind::Zero: return "zero";
    case Check::Kind::Nonvanishing: return "nonvanishing";
    case Check::Kind::Precondition: return "precondition";
    }
    return "?";
}

}  // namespace

Check& VerificationReport::add_zero(const std::string& name, const ZeroTest& z) {
    Check c;
    c.name = name;
    c.kind = Check::Kind::Zero;
    c.verdict = z.verdict;
    c.passed = z.zero();
    c.residual_text = format(z.residual);
    c.samples = z.samples;
    c.witness = z.witness;
    c.note = z.note;
    tolerance = z.tolerance;
    seed = z.seed;
    checks.push_back(std::move(c));
    return checks.back();
}

Check& VerificationReport::add_nonvanishing(const std::string& name, const ZeroTest& z) {
    Check c;
    c.name = name;
    c.kind = Check::Kind::Nonvanishing;
    c.verdict = z.verdict;
    c.passed = z.verdict == Verdict::Nonzero && z.witness < 0;
    c.residual_text = format(z.residual);
    c.samples = z.samples;
    c.witness = z.witness;
    c.note = z.note;
    checks.push_back(std::move(c));
    return checks.back();
}

Check& VerificationReport::add_precondition(const std::string& name, bool ok, const std::string& note) {
    Check c;
    c.name = name;
    c.kind = Check::Kind::Precondition;
    c.verdict = ok ? Verdict::SymbolicZero : Verdict::RejectedPrecondition;
    c.passed = ok;
    c.note = note;
    checks.push_back(std::move(c));
    return checks.back();
}

void VerificationReport::merge(const VerificationReport& other, const std::string& prefix) {
    for (auto c : other.checks) {
        c.name = prefix + c.name;
        checks.push_back(std::move(c));
    }
    for (const auto& [k, v] : other.details.items()) details[prefix + k] = v;
}

void VerificationReport::seal(const std::string& what) {
    bool rejected = false;
    bool failed = false;
    bool numeric = false;
    const Check* first_bad = nullptr;
    const Check* first_numeric = nullptr;
    for (const auto& c : checks) {
        if (!c.passed) {
            if (c.kind == Check::Kind::Precondition || c.kind == Check::Kind::Nonvanishing) {
                rejected = true;
            } else {
                failed = true;
            }
            if (!first_bad) first_bad = &c;
        } else if (c.samples.size() > 0) {
            numeric = true;
            if (!first_numeric) first_numeric = &c;
        }
    }
    if (rejected) {
        verdict = Verdict::RejectedPrecondition;
    } else if (failed) {
        verdict = Verdict::Nonzero;
    } else {
        verdict = numeric ? Verdict::NumericZero : Verdict::SymbolicZero;
    }
    const Check* head = first_bad ? first_bad : first_numeric;
    if (head) {
        residual_text = head->residual_text.empty() ? "0" : head->residual_text;
        samples = head->samples;
    } else {
        residual_text = "0";
        samples.clear();
    }
    summary = what + ": " + verdict_name(verdict);
    if (first_bad) {
        summary += " (" + first_bad->name + " failed";
        if (!first_bad->note.empty()) summary += ": " + first_bad->note;
        summary += ")";
    } else {
        summary += " (" + std::to_string(checks.size()) + " checks)";
    }
}

nlohmann::ordered_json VerificationReport::to_json() const {
    nlohmann::ordered_json j;
    j["verdict"] = verdict_name(verdict);
    j["residual_text"] = residual_text;
    j["samples"] = samples_json(samples);
    j["tolerance"] = tolerance;
    j["seed"] = seed;
    j["summary"] = summary;
    auto cs = nlohmann::ordered_json::array();
    for (const auto& c : checks) {
        nlohmann::ordered_json o;
        o["name"] = c.name;
        o["kind"] = kind_name(c.kind);
        o["verdict"] = verdict_name(c.verdict);
        o["passed"] = c.passed;
        if (!c.residual_text.empty()) o["residual_text"] = c.residual_text;
        if (c.witness >= 0 && c.witness < static_cast<int>(c.samples.size()))
            o["witness"] = samples_json({c.samples[static_cast<std::size_t>(c.witness)]})[0];
        if (!c.note.empty()) o["note"] = c.note;
        cs.push_back(std::move(o));
    }
    j["checks"] = cs;
    if (!details.empty()) j["details"] = details;
    return j;
}

namespace {

ZeroTest sign_test(const Expr& e, const ZeroOptions& o, bool positive) {
    ZeroTest out;
    out.tolerance = o.tolerance;
    out.seed = o.domain.seed;
    Expr r = simplify(e, o.assumptions);
    out.residual = r;
    Simplifier s(o.assumptions);
    if (r.is_const()) {
        bool ok = positive ? sgn(r.value()) > 0 : !r.is_zero();
        out.verdict = r.is_zero() ? Verdict::SymbolicZero : Verdict::Nonzero;
        if (!ok) out.witness = 0;
        if (!ok) out.note = positive ? "not positive" : "identically zero";
        return out;
    }
    if (positive ? s.sign_of(r) > 0 : s.nonzero(r)) {
        out.verdict = Verdict::Nonzero;
        return out;
    }
    if (positive && s.sign_of(r) < 0) {
        out.verdict = Verdict::Nonzero;
        out.witness = 0;
        out.note = "negative by assumption";
        return out;
    }
    std::vector<Expr> roots{r};
    for (const auto& ex : o.domain.exclusions) roots.push_back(ex.expr);
    Program p(roots);
    int rejected = 0;
    auto points = draw_points(p, 1, o.domain, o.assumptions, o.domain.count, rejected, o.mode);
    out.failed_points = rejected;
    if (points.empty()) {
        out.verdict = Verdict::Undetermined;
        out.witness = 0;
        out.note = "no admissible sample point";
        return out;
    }
    std::vector<double> vals(p.root_count());
    std::vector<double> mags(p.root_count());
    bool any_nonzero = false;
    for (const auto& pt : points) {
        p.run(pt.data(), vals.data(), mags.data());
        Sample smp;
        for (std::size_t i = 0; i < pt.size(); ++i) smp.point.emplace_back(format(p.inputs()[i]), pt[i]);
        smp.value = vals[0];
        bool zero = std::fabs(vals[0]) <= o.tolerance * mags[0];
        bool bad = zero || (positive && vals[0] < 0);
        if (bad && out.witness < 0) out.witness = static_cast<int>(out.samples.size());
        any_nonzero = any_nonzero || !zero;
        out.samples.push_back(std::move(smp));
    }
    out.verdict = any_nonzero ? Verdict::Nonzero : Verdict::NumericZero;
    if (out.witness >= 0) out.note = positive ? "not positive at a sample point" : "vanishes at a sample point";
    return out;
}

}  // namespace

ZeroTest nonvanishing(const Expr& e, const ZeroOptions& o) { return sign_test(e, o, false); }

ZeroTest positive(const Expr& e, const ZeroOptions& o) { return sign_test(e, o, true); }

}  // namespace gbe
