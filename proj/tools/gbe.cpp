// Batch front end: every subcommand writes a JSON report and prints one
// status line. Exit 0 on pass, 1 on a mathematical failure, 2 on bad input.

#include "gbe/format.hpp"
#include "gbe/symmetry.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

using namespace gbe;

namespace {

struct Settings {
    std::uint64_t seed = 42;
    double tol = 1e-9;
    std::vector<std::string> assume;
    std::string out;
    std::string emit;
};

// Input problems that are not CLI11 parse errors.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Session {
public:
    explicit Session(const Settings& s) : settings_(s), ctx_(Context::elements()) {
        for (const auto& a : s.assume) {
            try {
                ctx_.assume(a);
            } catch (const std::exception& e) {
                throw UsageError("--assume '" + a + "': " + e.what());
            }
        }
        zero_.tolerance = s.tol;
        zero_.domain.seed = s.seed;
        zero_.assumptions = &ctx_.assumptions();
    }

    const Context& ctx() const { return ctx_; }
    const ZeroOptions& zero() const { return zero_; }

    Expr expr(const std::string& what, const std::string& text) const {
        try {
            return parse(text, ctx_);
        } catch (const ExprError& e) {
            throw UsageError(what + ": " + e.what());
        }
    }

    std::string slurp(const std::string& path) const {
        std::ifstream in(path);
        if (!in) throw UsageError(path + ": cannot open");
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    EquationInstance instance(const std::string& path) const {
        try {
            return read_instance(slurp(path), ctx_);
        } catch (const UsageError&) {
            throw;
        } catch (const std::exception& e) {
            throw UsageError(path + ": " + e.what());
        }
    }

    Transform transform(const std::string& path, bool* implicit = nullptr) const {
        try {
            return read_transform(slurp(path), ctx_, implicit);
        } catch (const UsageError&) {
            throw;
        } catch (const std::exception& e) {
            throw UsageError(path + ": " + e.what());
        }
    }

    void emit(const std::string& text) const {
        if (settings_.emit.empty()) return;
        std::ofstream out(settings_.emit);
        if (!out) throw UsageError(settings_.emit + ": cannot write");
        out << text;
    }

    int finish(const std::string& command, VerificationReport& rep) const {
        rep.tolerance = settings_.tol;
        rep.seed = settings_.seed;
        std::string path = settings_.out.empty() ? command + "-report.json" : settings_.out;
        std::ofstream out(path);
        if (!out) throw UsageError(path + ": cannot write");
        out << rep.to_json().dump(2) << "\n";
        std::cout << command << ": " << verdict_name(rep.verdict);
        if (rep.details.contains("status")) std::cout << " (" << rep.details["status"].get<std::string>() << ")";
        std::cout << " -> " << path << "\n";
        return rep.passed() ? 0 : 1;
    }

private:
    Settings settings_;
    Context ctx_;
    ZeroOptions zero_;
};

void put_map(VerificationReport& rep, const PointMap& m) {
    rep.details["map"] = {{"t", format(m.t)}, {"x", format(m.x)}, {"u", format(m.u)}};
}

int parse_check(const Session& s, const std::string& text) {
    VerificationReport rep;
    Expr e = s.expr("expression", text);
    std::string canon = format(e);
    Expr back = s.expr("canonical form", canon);
    rep.add_precondition("format then parse returns the same tree", back == e, "reparsed as " + format(back));
    rep.add_precondition("canonical form is a fixed point", format(back) == canon, format(back));
    rep.details["canonical"] = canon;
    rep.seal("expression round trip");
    s.emit(canon + "\n");
    return s.finish("parse-check", rep);
}

int membership(const Session& s, const std::string& path) {
    auto inst = s.instance(path);
    auto rep = check_membership(inst, s.zero());
    return s.finish("membership", rep);
}

int transform(const Session& s, const std::string& tr_path, const std::string& inst_path) {
    Transform tr = s.transform(tr_path);
    auto inst = s.instance(inst_path);
    ApplyOptions o;
    o.zero = s.zero();
    Applied ap = apply(tr, inst, o);
    VerificationReport rep = ap.admissibility;
    put_map(rep, ap.map);
    std::string text = write_instance(ap.target);
    rep.details["target"] = text;
    s.emit(text);
    return s.finish("transform", rep);
}

int compose_cmd(const Session& s, const std::string& second, const std::string& first) {
    VerificationReport rep;
    Transform c = compose(s.transform(second), s.transform(first));
    std::string text = write_transform(c);
    rep.details["family"] = family_tag(family_of(c));
    rep.details["composite"] = text;
    put_map(rep, point_map(c));
    rep.seal("composition");
    s.emit(text);
    return s.finish("compose", rep);
}

int invert_cmd(const Session& s, const std::string& path) {
    VerificationReport rep;
    Inverse inv = invert(s.transform(path));
    std::string text = write_transform(inv.transform, inv.implicit);
    rep.details["implicit"] = inv.implicit;
    if (inv.implicit) rep.details["reason"] = inv.reason;
    rep.details["inverse"] = text;
    rep.seal(inv.implicit ? "inverse left implicit" : "closed-form inverse");
    s.emit(text);
    return s.finish("invert", rep);
}

int gauge_cmd(const Session& s, const std::string& which, const std::string& path, bool integral_nodes) {
    auto inst = s.instance(path);
    Gauge g;
    if (which == "a-to-one")
        g = gauge_a_to_one(inst, &s.ctx().assumptions(), !integral_nodes);
    else
        g = gauge_b_to_zero(inst);
    VerificationReport rep = g.report;
    rep.details["transform"] = write_transform(g.transform);
    std::string text = write_instance(g.target);
    rep.details["target"] = text;
    s.emit(text);
    return s.finish("gauge", rep);
}

int linearize(const Session& s, const std::string& path) {
    auto inst = s.instance(path);
    if (inst.id != ClassId::Linear) throw UsageError(path + ": expected class = LINEAR");
    VerificationReport rep;
    std::string text = write_instance(linearizable_from_linear(inst));
    rep.details["linearizable"] = text;
    rep.seal("linearizable counterpart");
    s.emit(text);
    return s.finish("linearize", rep);
}

int hopf_cole(const Session& s, const std::string& path, const std::vector<std::string>& vs,
              const std::string& tr_path) {
    auto inst = s.instance(path);
    if (inst.id != ClassId::Linear) throw UsageError(path + ": expected class = LINEAR");
    BridgePair pair = bridge(inst);
    std::vector<Expr> sols;
    for (const auto& v : vs) sols.push_back(s.expr("--v", v));
    VerificationReport rep;
    auto& images = rep.details["solutions"] = nlohmann::ordered_json::array();
    std::ostringstream emitted;
    for (const Expr& v : sols) {
        Expr u = cole_hopf_solution(v, s.zero());
        images.push_back({{"v", format(v)}, {"u", format(u)}});
        emitted << format(u) << "\n";
        ZeroOptions zo = s.zero();
        zo.domain.exclusions.push_back({v, Exclusion::Kind::AbsAtLeast, 0.1});
        rep.add_zero("v = " + format(v) + " solves the linear equation",
                     is_zero(pde_residual(pair.linear, v, zo.assumptions), zo))
            .kind = Check::Kind::Precondition;
        rep.add_zero("u = " + format(u) + " solves the linearizable equation",
                     is_zero(pde_residual(pair.linearizable, u, zo.assumptions), zo));
    }
    if (!tr_path.empty()) {
        Transform tr = s.transform(tr_path);
        if (family_of(tr) != Family::Linear) throw UsageError(tr_path + ": expected family = LINEAR");
        VerificationReport diag = verify_diagram(std::get<LinearTransform>(tr), pair, sols, s.zero());
        if (diag.details.contains("obstruction")) rep.details["status"] = "OBSTRUCTION";
        rep.merge(diag, "diagram: ");
        rep.details["diagram"] = diag.details;
    }
    rep.seal("Hopf-Cole bridge");
    s.emit(emitted.str());
    return s.finish("hopf-cole", rep);
}

int verify_solution(const Session& s, const std::string& path, const std::string& sol) {
    auto inst = s.instance(path);
    auto rep = residual(inst, s.expr("solution", sol), s.zero());
    return s.finish("verify-solution", rep);
}

int transport(const Session& s, const std::string& tr_path, const std::string& src, const std::string& dst,
              const std::string& sol) {
    auto rep = transport_check(s.transform(tr_path), s.instance(src), s.instance(dst), s.expr("solution", sol),
                               s.zero());
    return s.finish("transport", rep);
}

int symmetry_table(const Session& s) {
    const auto& basis = burgers_algebra();
    const auto& names = burgers_algebra_names();
    StructureTable tab = structure_constants(basis);
    VerificationReport rep = tab.report;
    rep.merge(jacobi_check(basis), "");
    auto& fields = rep.details["basis"] = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < basis.size(); ++i) fields[names[i]] = format(basis[i]);
    std::ostringstream text;
    if (tab.closed) {
        auto term_of = [&](std::size_t i, std::size_t j) {
            std::string term;
            for (std::size_t k = 0; k < basis.size(); ++k) {
                const Rational& c = tab.c[i][j][k];
                if (c == 0) continue;
                if (!term.empty()) term += c > 0 ? " + " : " - ";
                else if (c < 0) term += "-";
                Rational m = abs(c);
                if (m != 1) term += format(m) + "*";
                term += names[k];
            }
            return term.empty() ? std::string("0") : term;
        };
        auto& table = rep.details["brackets"] = nlohmann::ordered_json::object();
        auto& matrix = rep.details["matrix"] = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < basis.size(); ++i) {
            auto& row = matrix.emplace_back(nlohmann::ordered_json::array());
            for (std::size_t j = 0; j < basis.size(); ++j) row.push_back(term_of(i, j));
        }
        for (std::size_t i = 0; i < basis.size(); ++i)
            for (std::size_t j = i + 1; j < basis.size(); ++j) {
                std::string key = "[" + names[i] + ", " + names[j] + "]";
                table[key] = term_of(i, j);
                text << key << " = " << term_of(i, j) << "\n";
            }
    }
    rep.seal("Lie algebra of the Burgers equation");
    s.emit(text.str());
    return s.finish("symmetry-table", rep);
}

int symmetry_check(const Session& s, int flow_index, const std::string& eps, bool reflect, const std::string& tuple,
                   const std::vector<std::string>& sols_text) {
    int chosen = (flow_index >= 0) + reflect + !tuple.empty();
    if (chosen != 1) throw UsageError("give exactly one of --flow, --reflection, --tuple");
    ProjectiveTuple g;
    VerificationReport rep;
    if (flow_index >= 0) {
        g = flow(flow_index, s.expr("--eps", eps));
        rep.merge(flow_generator_check(flow_index, s.zero()), "generator: ");
    } else if (reflect) {
        g = reflection();
    } else {
        std::vector<Expr> parts;
        std::stringstream ss(tuple);
        std::string item;
        while (std::getline(ss, item, ';')) parts.push_back(s.expr("--tuple", item));
        if (parts.size() != 7) throw UsageError("--tuple needs 7 entries alpha;beta;gamma;delta;kappa;mu0;mu1");
        g = {parts[0], parts[1], parts[2], parts[3], parts[4], parts[5], parts[6]};
    }
    std::vector<Expr> sols;
    for (const auto& t : sols_text) sols.push_back(s.expr("--solution", t));
    if (sols.empty()) sols = burgers_catalog();
    rep.merge(is_symmetry(g, sols, s.zero()), "");
    rep.details["tuple"] = {format(g.alpha), format(g.beta),  format(g.gamma), format(g.delta),
                            format(g.kappa), format(g.mu0), format(g.mu1)};
    put_map(rep, point_map(g));
    rep.seal("point symmetry of the Burgers equation");
    return s.finish("symmetry-check", rep);
}

struct DegDivArgs {
    std::string C0 = "0", C1 = "1", C2 = "0", C3 = "1", C4 = "0", kappa = "1", f1 = "0", f2 = "0";
    int sign = 1;
    double t_min = 0.1, t_max = 1.0, step = 0.0025, tol = 1e-6;
    int grid = 46;
};

int deg_div(const Session& s, const DegDivArgs& a) {
    auto q = [&](const std::string& name, const std::string& v) {
        try {
            return parse_rational(v);
        } catch (const std::exception& e) {
            throw UsageError("--" + name + ": " + e.what());
        }
    };
    DegDivSolution sol;
    sol.C0 = q("C0", a.C0);
    sol.C1 = q("C1", a.C1);
    sol.C2 = q("C2", a.C2);
    sol.C3 = q("C3", a.C3);
    sol.C4 = q("C4", a.C4);
    sol.kappa = q("kappa", a.kappa);
    sol.f1 = s.expr("--f1", a.f1);
    sol.f2 = s.expr("--f2", a.f2);
    sol.sign = a.sign;
    sol.t_min = a.t_min;
    sol.t_max = a.t_max;
    sol.step = a.step;
    sol.grid = a.grid;
    if (sol.grid < 2 || !(sol.t_max > sol.t_min) || !(sol.step > 0)) throw UsageError("bad grid");
    DegDivResult r = solve_deg_div(sol, a.tol);
    VerificationReport rep = r.report;
    rep.seal("degenerate divergence-class solution");
    rep.tolerance = a.tol;
    std::ostringstream text;
    text.precision(17);
    text << "t,T,X0,residual1,residual2\n";
    for (std::size_t i = 0; i < r.t.size(); ++i)
        text << r.t[i] << "," << r.T_values[i] << "," << r.X0_values[i] << "," << r.residual1[i] << ","
             << r.residual2[i] << "\n";
    s.emit(text.str());
    return s.finish("deg-div-solve", rep);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Equivalence groupoids of generalized Burgers equations"};
    app.require_subcommand(1);
    app.fallthrough();
    Settings st;
    app.add_option("--seed", st.seed, "Sampling seed")->capture_default_str();
    app.add_option("--tol", st.tol, "Relative tolerance of numeric zero tests")->capture_default_str();
    app.add_option("--assume", st.assume, "Sign fact such as 'a>0' or 'V1!=0' (repeatable)");
    app.add_option("-o,--out", st.out, "Report path (default: <command>-report.json)");
    app.add_option("--emit", st.emit, "Write the primary result (instance, transform, table) here");

    std::string a1, a2, a3, a4;
    std::vector<std::string> many;
    bool flag = false;
    int index = -1;
    std::string text = "0";

    auto* pc = app.add_subcommand("parse-check", "Expression round trip");
    pc->add_option("expression", a1)->required();
    auto* mem = app.add_subcommand("membership", "Check an instance against its class");
    mem->add_option("instance", a1)->required()->check(CLI::ExistingFile);
    auto* tr = app.add_subcommand("transform", "Apply a transform file to an instance");
    tr->add_option("transform", a1)->required()->check(CLI::ExistingFile);
    tr->add_option("instance", a2)->required()->check(CLI::ExistingFile);
    auto* co = app.add_subcommand("compose", "SECOND after FIRST");
    co->add_option("second", a1)->required()->check(CLI::ExistingFile);
    co->add_option("first", a2)->required()->check(CLI::ExistingFile);
    auto* inv = app.add_subcommand("invert", "Closed-form inverse when one exists");
    inv->add_option("transform", a1)->required()->check(CLI::ExistingFile);
    auto* ga = app.add_subcommand("gauge", "a-to-one or b-to-zero");
    ga->add_option("which", a1)->required()->check(CLI::IsMember({"a-to-one", "b-to-zero"}));
    ga->add_option("instance", a2)->required()->check(CLI::ExistingFile);
    ga->add_flag("--integral-nodes", flag, "Keep x~ as an integral instead of a table antiderivative");
    auto* li = app.add_subcommand("linearize", "Linearizable counterpart of a linear instance");
    li->add_option("instance", a1)->required()->check(CLI::ExistingFile);
    auto* hc = app.add_subcommand("hopf-cole", "u = 2 v_x / v and the lifted-transform diagram");
    hc->add_option("instance", a1)->required()->check(CLI::ExistingFile);
    hc->add_option("--v", many, "Solution of the linear equation (repeatable)");
    hc->add_option("--transform", a2, "LINEAR transform file to lift")->check(CLI::ExistingFile);
    auto* vs = app.add_subcommand("verify-solution", "Residual of a candidate solution");
    vs->add_option("instance", a1)->required()->check(CLI::ExistingFile);
    vs->add_option("solution", a2)->required();
    auto* tp = app.add_subcommand("transport", "Transform, compare with TARGET, push the solution");
    tp->add_option("transform", a1)->required()->check(CLI::ExistingFile);
    tp->add_option("source", a2)->required()->check(CLI::ExistingFile);
    tp->add_option("target", a3)->required()->check(CLI::ExistingFile);
    tp->add_option("solution", a4)->required();
    auto* stb = app.add_subcommand("symmetry-table", "Brackets of the five-dimensional algebra");
    auto* sc = app.add_subcommand("symmetry-check", "Check a group element on Burgers solutions");
    sc->add_option("--flow", index, "Basis index 0..4")->check(CLI::Range(0, 4));
    sc->add_option("--eps", text, "Flow parameter")->capture_default_str();
    sc->add_flag("--reflection", flag, "(t, x, u) -> (t, -x, -u)");
    sc->add_option("--tuple", a1, "alpha;beta;gamma;delta;kappa;mu0;mu1");
    sc->add_option("--solution", many, "Burgers solution (repeatable; default: catalog)");
    DegDivArgs dd;
    auto* dv = app.add_subcommand("deg-div-solve", "Closed-form solution of the degenerate admissibility system");
    for (auto [name, ref] : {std::pair{"--C0", &dd.C0}, {"--C1", &dd.C1}, {"--C2", &dd.C2}, {"--C3", &dd.C3},
                             {"--C4", &dd.C4}, {"--kappa", &dd.kappa}, {"--f1", &dd.f1}, {"--f2", &dd.f2}})
        dv->add_option(name, *ref)->capture_default_str();
    dv->add_option("--sign", dd.sign)->check(CLI::IsMember({-1, 1}))->capture_default_str();
    dv->add_option("--t-min", dd.t_min)->capture_default_str();
    dv->add_option("--t-max", dd.t_max)->capture_default_str();
    dv->add_option("--step", dd.step)->capture_default_str();
    dv->add_option("--grid", dd.grid)->capture_default_str();
    dv->add_option("--ode-tol", dd.tol, "Tolerance on the ODE residuals")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        Session s(st);
        if (*pc) return parse_check(s, a1);
        if (*mem) return membership(s, a1);
        if (*tr) return transform(s, a1, a2);
        if (*co) return compose_cmd(s, a1, a2);
        if (*inv) return invert_cmd(s, a1);
        if (*ga) return gauge_cmd(s, a1, a2, flag);
        if (*li) return linearize(s, a1);
        if (*hc) return hopf_cole(s, a1, many, a2);
        if (*vs) return verify_solution(s, a1, a2);
        if (*tp) return transport(s, a1, a2, a3, a4);
        if (*stb) return symmetry_table(s);
        if (*sc) return symmetry_check(s, index, text, flag, a1, many);
        if (*dv) return deg_div(s, dd);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const CompositionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ExprError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
