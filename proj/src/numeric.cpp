#include "gbe/numeric.hpp"

#include "gbe/calculus.hpp"
#include "gbe/format.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <random>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gbe {

namespace {

constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

bool has_function(const Expr& e) {
    if (e.is(Kind::Func)) return true;
    for (const auto& c : e.children())
        if (has_function(c)) return true;
    return false;
}

bool odd_z(const mpz_class& z) { return mpz_odd_p(z.get_mpz_t()) != 0; }

}  // namespace

struct ProgramBuilder {
    Program& p;
    std::unordered_map<Expr, std::size_t, ExprHash> memo;
    std::unordered_map<Expr, std::size_t, ExprHash> input_slot;

    std::size_t input(const Expr& atom, bool positive) {
        auto it = input_slot.find(atom);
        std::size_t slot;
        if (it == input_slot.end()) {
            slot = p.inputs_.size();
            p.inputs_.push_back(atom);
            p.positive_.push_back(positive);
            input_slot.emplace(atom, slot);
        } else {
            slot = it->second;
            if (positive) p.positive_[slot] = true;
        }
        Program::Op op;
        op.code = Program::Op::Code::Input;
        op.args = {slot};
        p.ops_.push_back(std::move(op));
        return p.ops_.size() - 1;
    }

    std::size_t emit(Program::Op op) {
        p.ops_.push_back(std::move(op));
        return p.ops_.size() - 1;
    }

    std::size_t build(const Expr& e, bool positive = false) {
        auto it = memo.find(e);
        if (it != memo.end()) {
            if (positive && p.ops_[it->second].code == Program::Op::Code::Input)
                p.positive_[p.ops_[it->second].args[0]] = true;
            return it->second;
        }
        std::size_t r = build_new(e, positive);
        memo.emplace(e, r);
        return r;
    }

    std::size_t build_new(const Expr& e, bool positive) {
        using Code = Program::Op::Code;
        Program::Op op;
        switch (e.kind()) {
        case Kind::Const:
            op.code = Code::Const;
            op.value = e.value().get_d();
            return emit(std::move(op));
        case Kind::Var:
        case Kind::Func:
            return input(e, positive);
        case Kind::Call: {
            Fn fn = e.node().fn;
            std::size_t a = build(e.child(0), fn == Fn::Ln);
            static const Code codes[] = {Code::Exp, Code::Ln, Code::Abs, Code::Sign, Code::Sin, Code::Cos};
            op.code = codes[static_cast<int>(fn)];
            op.args = {a};
            return emit(std::move(op));
        }
        case Kind::Pow: {
            const Rational& q = e.exponent();
            bool even_root = !odd_z(q.get_den());
            std::size_t b = build(e.base(), even_root);
            op.code = Code::Pow;
            op.args = {b};
            op.value = q.get_d();
            op.num_odd = odd_z(q.get_num());
            op.den_odd = !even_root;
            op.integer = is_integer(q);
            return emit(std::move(op));
        }
        case Kind::Prod:
            op.code = Code::Mul;
            op.value = e.value().get_d();
            for (const auto& f : e.children()) op.args.push_back(build(f));
            return emit(std::move(op));
        case Kind::Sum:
            op.code = Code::Add;
            for (const auto& t : e.children()) op.args.push_back(build(t));
            return emit(std::move(op));
        case Kind::Int: {
            if (has_function(e.body())) return input(e, positive);
            auto body = std::make_shared<Program>(e.body());
            op.code = Code::Int;
            op.lower = e.value().get_d();
            op.args = {build(e.upper())};
            for (const auto& in : body->inputs()) {
                if (in.is(Kind::Var) && in.name() == e.name()) {
                    op.body_inputs.push_back(npos);
                } else {
                    std::size_t before = p.ops_.size();
                    std::size_t idx = build(in);
                    (void)before;
                    op.body_inputs.push_back(p.ops_[idx].args[0]);
                }
            }
            op.body = std::move(body);
            return emit(std::move(op));
        }
        }
        return 0;
    }
};

Program::Program(const std::vector<Expr>& roots) {
    ProgramBuilder b{*this, {}, {}};
    for (const auto& r : roots) roots_.push_back(b.build(r));
}

bool Program::run(const double* in, double* out, double* magnitude) const {
    using Code = Op::Code;
    std::vector<double> val(ops_.size());
    std::vector<double> mag(magnitude ? ops_.size() : 0);
    bool track = magnitude != nullptr;
    for (std::size_t i = 0; i < ops_.size(); ++i) {
        const Op& op = ops_[i];
        double v = 0;
        double m = 0;
        switch (op.code) {
        case Code::Const:
            v = op.value;
            m = std::fabs(v);
            break;
        case Code::Input:
            v = in[op.args[0]];
            m = std::fabs(v);
            break;
        case Code::Add:
            for (auto a : op.args) {
                v += val[a];
                if (track) m += mag[a];
            }
            break;
        case Code::Mul:
            v = op.value;
            m = std::fabs(op.value);
            for (auto a : op.args) {
                v *= val[a];
                if (track) m *= mag[a];
            }
            break;
        case Code::Pow: {
            double b = val[op.args[0]];
            double q = op.value;
            if (b == 0 && q < 0) return false;
            if (op.integer) {
                v = std::pow(b, q);
            } else if (!op.den_odd) {
                if (b < 0) return false;
                v = std::pow(b, q);
            } else {
                v = std::pow(std::fabs(b), q);
                if (b < 0 && op.num_odd) v = -v;
            }
            if (track) {
                double mb = mag[op.args[0]];
                if (q > 0) {
                    m = std::pow(mb, q);
                } else {
                    m = std::fabs(v) * (1 + std::fabs(q) * mb / std::fabs(b));
                }
            }
            break;
        }
        case Code::Exp:
            v = std::exp(val[op.args[0]]);
            m = v * (1 + (track ? mag[op.args[0]] : 0));
            break;
        case Code::Ln: {
            double a = val[op.args[0]];
            if (a <= 0) return false;
            v = std::log(a);
            m = std::fabs(v) + (track ? mag[op.args[0]] / a : 0);
            break;
        }
        case Code::Abs:
            v = std::fabs(val[op.args[0]]);
            m = track ? mag[op.args[0]] : v;
            break;
        case Code::Sign: {
            double a = val[op.args[0]];
            v = a > 0 ? 1.0 : (a < 0 ? -1.0 : 0.0);
            m = 1;
            break;
        }
        case Code::Sin:
            v = std::sin(val[op.args[0]]);
            m = std::fabs(v) + (track ? mag[op.args[0]] : 0);
            break;
        case Code::Cos:
            v = std::cos(val[op.args[0]]);
            m = std::fabs(v) + (track ? mag[op.args[0]] : 0);
            break;
        case Code::Int: {
            const Program& body = *op.body;
            std::vector<double> sub(op.body_inputs.size());
            std::size_t dummy = npos;
            for (std::size_t k = 0; k < op.body_inputs.size(); ++k) {
                if (op.body_inputs[k] == npos) {
                    dummy = k;
                } else {
                    sub[k] = in[op.body_inputs[k]];
                }
            }
            bool ok = true;
            auto f = [&](double s) {
                if (dummy != npos) sub[dummy] = s;
                double r = 0;
                if (!body.run(sub.data(), &r)) {
                    ok = false;
                    return 0.0;
                }
                return r;
            };
            double upper = val[op.args[0]];
            double err = 0;
            v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, op.lower, upper, 15, 1e-13, &err);
            if (!ok) return false;
            m = std::fabs(v) + err;
            break;
        }
        }
        if (!std::isfinite(v)) return false;
        val[i] = v;
        if (track) mag[i] = m;
    }
    for (std::size_t r = 0; r < roots_.size(); ++r) {
        out[r] = val[roots_[r]];
        if (track) magnitude[r] = mag[roots_[r]];
    }
    return true;
}

double evaluate(const Expr& e, const std::map<std::string, double>& point) {
    Program p(e);
    std::vector<double> in;
    for (const auto& atom : p.inputs()) {
        if (!atom.is(Kind::Var)) throw UnboundSymbol("uninstantiated symbol " + format(atom));
        auto it = point.find(atom.name());
        if (it == point.end()) throw UnboundSymbol("no value for " + atom.name());
        in.push_back(it->second);
    }
    double out = 0;
    if (!p.run(in.data(), &out)) throw DomainError("domain error evaluating " + format(e));
    return out;
}

void eval_batch(const Program& p, const std::vector<double>& points, std::size_t n, std::vector<double>& out,
                Parallel mode) {
    const std::size_t w = p.inputs().size();
    const std::size_t r = p.root_count();
    out.assign(n * r, std::numeric_limits<double>::quiet_NaN());
    const long count = static_cast<long>(n);
    if (mode == Parallel::OpenMP) {
#pragma omp parallel for schedule(dynamic, 4)
        for (long i = 0; i < count; ++i) {
            std::size_t k = static_cast<std::size_t>(i);
            if (!p.run(points.data() + k * w, out.data() + k * r))
                for (std::size_t j = 0; j < r; ++j) out[k * r + j] = std::numeric_limits<double>::quiet_NaN();
        }
    } else {
        for (long i = 0; i < count; ++i) {
            std::size_t k = static_cast<std::size_t>(i);
            if (!p.run(points.data() + k * w, out.data() + k * r))
                for (std::size_t j = 0; j < r; ++j) out[k * r + j] = std::numeric_limits<double>::quiet_NaN();
        }
    }
}

const std::vector<Interval>& SampleDomain::range_of(const std::string& var) const {
    auto it = ranges.find(var);
    return it == ranges.end() ? fallback : it->second;
}

const char* verdict_name(Verdict v) {
    switch (v) {
    case Verdict::SymbolicZero: return "SYMBOLIC_ZERO";
    case Verdict::NumericZero: return "NUMERIC_ZERO";
    case Verdict::Nonzero: return "NONZERO";
    case Verdict::RejectedPrecondition: return "REJECTED_PRECONDITION";
    case Verdict::Undetermined: return "UNDETERMINED";
    }
    return "?";
}

namespace {

double draw(std::mt19937_64& gen, const std::vector<Interval>& ranges) {
    double total = 0;
    for (const auto& r : ranges) total += r.hi - r.lo;
    double pick = std::uniform_real_distribution<double>(0.0, total)(gen);
    for (const auto& r : ranges) {
        double w = r.hi - r.lo;
        if (pick <= w) return r.lo + pick;
        pick -= w;
    }
    return ranges.back().hi;
}

}  // namespace

std::vector<std::vector<double>> draw_points(const Program& p, std::size_t main_roots, const SampleDomain& d,
                                             const Assumptions* a, int wanted, int& rejected, Parallel mode) {
    static const std::vector<Interval> positive{{0.1, 2.0}};
    static const std::vector<Interval> negative{{-2.0, -0.1}};
    std::mt19937_64 gen(d.seed);
    const auto& inputs = p.inputs();
    const std::size_t w = inputs.size();
    std::vector<const std::vector<Interval>*> ranges(w);
    for (std::size_t i = 0; i < w; ++i) {
        const Expr& atom = inputs[i];
        const std::vector<Interval>* r = atom.is(Kind::Var) ? &d.range_of(atom.name()) : &d.fallback;
        if (a) {
            if (const SignFact* f = a->find(atom)) {
                if (*f == SignFact::Positive) r = &positive;
                if (*f == SignFact::Negative) r = &negative;
            }
        }
        if (p.positive_inputs()[i] && r != &negative) {
            if (!atom.is(Kind::Var) || !d.ranges.count(atom.name())) r = &positive;
        }
        ranges[i] = r;
    }
    std::vector<std::vector<double>> accepted;
    rejected = 0;
    const int max_attempts = wanted * 40 + 100;
    int attempts = 0;
    const std::size_t batch = static_cast<std::size_t>(std::max(wanted, 8));
    std::vector<double> pts;
    std::vector<double> vals;
    while (static_cast<int>(accepted.size()) < wanted && attempts < max_attempts) {
        pts.assign(batch * w, 0.0);
        for (std::size_t k = 0; k < batch; ++k)
            for (std::size_t i = 0; i < w; ++i) pts[k * w + i] = draw(gen, *ranges[i]);
        attempts += static_cast<int>(batch);
        eval_batch(p, pts, batch, vals, mode);
        const std::size_t r = p.root_count();
        for (std::size_t k = 0; k < batch && static_cast<int>(accepted.size()) < wanted; ++k) {
            bool ok = true;
            for (std::size_t j = 0; j < r && ok; ++j) {
                double v = vals[k * r + j];
                if (!std::isfinite(v)) {
                    ok = false;
                } else if (j >= main_roots) {
                    const Exclusion& ex = d.exclusions[j - main_roots];
                    if (ex.kind == Exclusion::Kind::Positive && !(v > 0)) ok = false;
                    if (ex.kind == Exclusion::Kind::AbsAtLeast && std::fabs(v) < ex.bound) ok = false;
                }
            }
            if (ok) {
                accepted.emplace_back(pts.begin() + static_cast<long>(k * w),
                                      pts.begin() + static_cast<long>((k + 1) * w));
            } else {
                ++rejected;
            }
        }
    }
    return accepted;
}

ZeroTest is_zero(const Expr& e, const ZeroOptions& o) {
    ZeroTest out;
    out.tolerance = o.tolerance;
    out.seed = o.domain.seed;
    Expr r = simplify(e, o.assumptions);
    out.residual = r;
    if (r.is_zero()) {
        out.verdict = Verdict::SymbolicZero;
        return out;
    }
    if (o.use_together && node_count(r) <= o.together_limit) {
        Fraction f = together(r);
        if (simplify(f.numerator, o.assumptions).is_zero()) {
            out.verdict = Verdict::SymbolicZero;
            return out;
        }
    }
    std::vector<Expr> roots{r};
    for (const auto& ex : o.domain.exclusions) roots.push_back(ex.expr);
    Program p(roots);
    int rejected = 0;
    auto points = draw_points(p, 1, o.domain, o.assumptions, o.domain.count, rejected, o.mode);
    out.failed_points = rejected;
    if (points.empty()) {
        out.verdict = Verdict::Undetermined;
        out.note = "no admissible sample point (evaluation failed everywhere)";
        return out;
    }
    std::vector<double> vals(p.root_count());
    std::vector<double> mags(p.root_count());
    bool all_zero = true;
    for (const auto& pt : points) {
        p.run(pt.data(), vals.data(), mags.data());
        Sample s;
        for (std::size_t i = 0; i < pt.size(); ++i) s.point.emplace_back(format(p.inputs()[i]), pt[i]);
        s.value = vals[0];
        bool zero = std::fabs(vals[0]) <= o.tolerance * mags[0];
        if (!zero && all_zero) out.witness = static_cast<int>(out.samples.size());
        all_zero = all_zero && zero;
        out.samples.push_back(std::move(s));
    }
    out.verdict = all_zero ? Verdict::NumericZero : Verdict::Nonzero;
    if (static_cast<int>(points.size()) < o.domain.count)
        out.note = "only " + std::to_string(points.size()) + " of " + std::to_string(o.domain.count) +
                   " sample points were admissible";
    return out;
}

}  // namespace gbe
