#include "gbe/symmetry.hpp"

#include "gbe/calculus.hpp"
#include "gbe/format.hpp"

#include <array>

namespace gbe {

namespace {

const Expr t_ = var("t");
const Expr x_ = var("x");
const Expr u_ = var("u");

std::array<Expr, 3> components(const VectorField& v) { return {v.xi_t, v.xi_x, v.eta}; }

VectorField combine(const std::vector<VectorField>& basis, const std::vector<Rational>& c) {
    Expr a(0), b(0), e(0);
    for (std::size_t k = 0; k < basis.size(); ++k) {
        a = a + Expr(c[k]) * basis[k].xi_t;
        b = b + Expr(c[k]) * basis[k].xi_x;
        e = e + Expr(c[k]) * basis[k].eta;
    }
    return {simplify(a), simplify(b), simplify(e)};
}

bool field_is_zero(const VectorField& v) {
    for (const Expr& c : components(v))
        if (!is_zero(c).zero()) return false;
    return true;
}

// Component values at integer points where they come out exact; rows with
// a non-rational entry are left out.
std::vector<std::vector<Rational>> exact_rows(const std::vector<VectorField>& fields) {
    static const int pts[][3] = {{1, 2, 3}, {2, -1, 1}, {-1, 3, 2}, {3, 1, -2}, {-2, -3, 1}, {1, -2, -1},
                                 {2, 3, 5}, {-3, 1, 4}, {4, -2, 3}, {1, 1, 1}, {5, 2, -3}, {-1, -1, 2}};
    std::vector<std::vector<Rational>> rows;
    for (const auto& p : pts) {
        Substitution s;
        s.var("t", Expr(p[0])).var("x", Expr(p[1])).var("u", Expr(p[2]));
        for (int comp = 0; comp < 3; ++comp) {
            std::vector<Rational> row;
            bool exact = true;
            for (const auto& f : fields) {
                Expr v = simplify(substitute(components(f)[static_cast<std::size_t>(comp)], s));
                if (!v.is(Kind::Const)) {
                    exact = false;
                    break;
                }
                row.push_back(v.value());
            }
            if (exact) rows.push_back(std::move(row));
        }
    }
    return rows;
}

// Row reduction of [A | b]; returns the solution when the system is
// consistent and A has full column rank.
std::optional<std::vector<Rational>> solve_exact(std::vector<std::vector<Rational>> m, std::size_t n) {
    std::size_t r = 0;
    std::vector<std::size_t> pivots;
    for (std::size_t c = 0; c < n && r < m.size(); ++c) {
        std::size_t p = r;
        while (p < m.size() && m[p][c] == 0) ++p;
        if (p == m.size()) return std::nullopt;
        std::swap(m[p], m[r]);
        Rational inv = 1 / m[r][c];
        for (auto& v : m[r]) v *= inv;
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (i == r || m[i][c] == 0) continue;
            Rational f = m[i][c];
            for (std::size_t j = c; j <= n; ++j) m[i][j] -= f * m[r][j];
        }
        pivots.push_back(c);
        ++r;
    }
    if (pivots.size() < n) return std::nullopt;
    for (std::size_t i = r; i < m.size(); ++i)
        if (m[i][n] != 0) return std::nullopt;
    std::vector<Rational> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = m[i][n];
    return x;
}

std::size_t rank_exact(std::vector<std::vector<Rational>> m, std::size_t n) {
    std::size_t r = 0;
    for (std::size_t c = 0; c < n && r < m.size(); ++c) {
        std::size_t p = r;
        while (p < m.size() && m[p][c] == 0) ++p;
        if (p == m.size()) continue;
        std::swap(m[p], m[r]);
        for (std::size_t i = r + 1; i < m.size(); ++i) {
            if (m[i][c] == 0) continue;
            Rational f = m[i][c] / m[r][c];
            for (std::size_t j = c; j < n; ++j) m[i][j] -= f * m[r][j];
        }
        ++r;
    }
    return r;
}

}  // namespace

Expr VectorField::apply(const Expr& f) const {
    return xi_t * differentiate(f, "t") + xi_x * differentiate(f, "x") + eta * differentiate(f, "u");
}

VectorField bracket(const VectorField& a, const VectorField& b) {
    return {simplify(a.apply(b.xi_t) - b.apply(a.xi_t)), simplify(a.apply(b.xi_x) - b.apply(a.xi_x)),
            simplify(a.apply(b.eta) - b.apply(a.eta))};
}

bool operator==(const VectorField& a, const VectorField& b) {
    return a.xi_t == b.xi_t && a.xi_x == b.xi_x && a.eta == b.eta;
}

std::string format(const VectorField& v) {
    std::string out;
    const char* names[] = {"d_t", "d_x", "d_u"};
    auto cs = components(v);
    for (int i = 0; i < 3; ++i) {
        const Expr& c = cs[static_cast<std::size_t>(i)];
        if (c == Expr(0)) continue;
        if (!out.empty()) out += " + ";
        out += c == Expr(1) ? names[i] : "(" + gbe::format(c) + ")*" + names[i];
    }
    return out.empty() ? "0" : out;
}

const std::vector<VectorField>& burgers_algebra() {
    static const std::vector<VectorField> basis{
        {Expr(1), Expr(0), Expr(0)},
        {2 * t_, x_, -u_},
        {simplify(t_ * t_), simplify(t_ * x_), simplify(x_ - u_ * t_)},
        {Expr(0), Expr(1), Expr(0)},
        {Expr(0), t_, Expr(1)},
    };
    return basis;
}

const std::vector<std::string>& burgers_algebra_names() {
    static const std::vector<std::string> names{"P_t", "D", "Pi", "P_x", "G"};
    return names;
}

StructureTable structure_constants(const std::vector<VectorField>& basis) {
    StructureTable out;
    const std::size_t n = basis.size();
    auto& rep = out.report;
    auto rows = exact_rows(basis);
    out.independent = rank_exact(rows, n) == n;
    rep.add_precondition("basis linearly independent", out.independent,
                         "the fields are dependent at the integer sample points");
    if (!out.independent) {
        rep.seal("structure constants");
        return out;
    }
    out.closed = true;
    out.c.assign(n, std::vector<std::vector<Rational>>(n, std::vector<Rational>(n, 0)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            VectorField br = bracket(basis[i], basis[j]);
            std::vector<VectorField> fields = basis;
            fields.push_back(br);
            auto sys = exact_rows(fields);
            auto sol = solve_exact(sys, n);
            std::string name = "[e" + std::to_string(i + 1) + ", e" + std::to_string(j + 1) + "]";
            VectorField rest = br;
            if (sol) {
                VectorField span = combine(basis, *sol);
                rest = {simplify(br.xi_t - span.xi_t), simplify(br.xi_x - span.xi_x), simplify(br.eta - span.eta)};
            }
            bool ok = sol.has_value() && field_is_zero(rest);
            Check& c = rep.add_precondition(name + " in span", ok, ok ? "" : "residual field " + format(rest));
            c.kind = Check::Kind::Zero;
            c.verdict = ok ? Verdict::SymbolicZero : Verdict::Nonzero;
            c.residual_text = format(rest);
            if (!ok) {
                out.closed = false;
                continue;
            }
            for (std::size_t k = 0; k < n; ++k) {
                out.c[i][j][k] = (*sol)[k];
                out.c[j][i][k] = -(*sol)[k];
            }
        }
    rep.details["closed"] = out.closed;
    rep.seal("structure constants");
    return out;
}

VerificationReport jacobi_check(const std::vector<VectorField>& basis) {
    VerificationReport rep;
    const std::size_t n = basis.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k) {
                const auto &a = basis[i], &b = basis[j], &c = basis[k];
                VectorField s1 = bracket(a, bracket(b, c)), s2 = bracket(b, bracket(c, a)),
                            s3 = bracket(c, bracket(a, b));
                VectorField sum{simplify(s1.xi_t + s2.xi_t + s3.xi_t), simplify(s1.xi_x + s2.xi_x + s3.xi_x),
                                simplify(s1.eta + s2.eta + s3.eta)};
                std::string name = "Jacobi (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "," +
                                   std::to_string(k + 1) + ")";
                bool ok = sum == VectorField{};
                Check& ch = rep.add_precondition(name, ok, ok ? "" : format(sum));
                ch.kind = Check::Kind::Zero;
                ch.verdict = ok ? Verdict::SymbolicZero : Verdict::Nonzero;
                ch.residual_text = format(sum);
            }
    rep.seal("Jacobi identity");
    return rep;
}

ProjectiveTuple flow(int index, const Expr& eps) {
    ProjectiveTuple p;
    switch (index) {
    case 0: p.beta = eps; break;
    case 1:
        p.alpha = simplify(exp(2 * eps));
        p.kappa = simplify(exp(eps));
        break;
    case 2: p.gamma = simplify(-eps); break;
    case 3: p.mu0 = eps; break;
    case 4: p.mu1 = eps; break;
    default: throw InputError("flow index must be 0..4, got " + std::to_string(index));
    }
    return p;
}

ProjectiveTuple reflection() {
    ProjectiveTuple p;
    p.kappa = Expr(-1);
    return p;
}

VerificationReport is_symmetry(const ProjectiveTuple& g, const std::vector<Expr>& solutions, const ZeroOptions& options) {
    VerificationReport rep;
    rep.tolerance = options.tolerance;
    rep.seed = options.domain.seed;
    Expr d = g.det();
    Check& c = rep.add_zero("alpha*delta - beta*gamma = kappa^2", is_zero(d - g.kappa * g.kappa, options));
    c.kind = Check::Kind::Precondition;
    rep.add_nonvanishing("alpha*delta - beta*gamma > 0", positive(d, options)).kind = Check::Kind::Precondition;
    if (!rep.passed()) {
        rep.seal("point symmetry of the Burgers equation");
        return rep;
    }
    auto burgers = make_instance(ClassId::Burgers, {});
    for (std::size_t i = 0; i < solutions.size(); ++i) {
        VerificationReport tc = transport_check(g, burgers, burgers, solutions[i], options);
        rep.merge(tc, "solution " + std::to_string(i) + ": ");
    }
    rep.seal("point symmetry of the Burgers equation");
    return rep;
}

VerificationReport flow_generator_check(int index, const ZeroOptions& options) {
    const VectorField& field = burgers_algebra().at(static_cast<std::size_t>(index));
    Expr eps = var("eps");
    PointMap pm = point_map(flow(index, eps));
    VerificationReport rep;
    const char* names[] = {"t", "x", "u"};
    std::array<Expr, 3> maps{pm.t, pm.x, pm.u};
    auto comps = components(field);
    for (std::size_t i = 0; i < 3; ++i) {
        Expr gen = simplify(substitute(differentiate(maps[i], "eps"), "eps", Expr(0)));
        Check& c = rep.add_zero(std::string("d/d eps ") + names[i] + "~ at 0", is_zero(gen - comps[i], options));
        c.note = gbe::format(gen);
    }
    rep.seal("flow generator of " + burgers_algebra_names()[static_cast<std::size_t>(index)]);
    return rep;
}

}  // namespace gbe
