// Serial vs OpenMP throughput of the batch evaluator on a Burgers residual.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

#include "CLI11.hpp"
#include "gbe/calculus.hpp"
#include "gbe/hopfcole.hpp"
#include "gbe/numeric.hpp"
#include "gbe/parse.hpp"

using namespace gbe;

namespace {

double seconds_for(const Program& prog, const std::vector<double>& pts, std::size_t n, int reps, Parallel mode,
                   std::vector<double>& out) {
    auto start = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) eval_batch(prog, pts, n, out, mode);
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / reps;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gbe batch-evaluation benchmark"};
    std::size_t n = 200000;
    int reps = 5;
    unsigned seed = 42;
    app.add_option("-n,--points", n, "sample points per batch");
    app.add_option("-r,--reps", reps, "repetitions per mode");
    app.add_option("--seed", seed, "RNG seed");
    CLI11_PARSE(app, argc, argv);

    Context ctx = Context::elements();
    // Two-front Burgers solution from the heat solution exp(2x - 4t) + exp(-x - t).
    Expr u = cole_hopf_solution(parse("exp(2*x - 4*t) + exp(-x - t)", ctx));
    // The residual simplifies to 0, so the three terms are separate roots
    // and summed numerically.
    std::vector<Expr> terms{differentiate(u, "t"), u * differentiate(u, "x"), differentiate(u, "x", 2)};
    Program prog(terms);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> pick(-1.0, 1.0);
    const std::size_t w = prog.inputs().size();
    std::vector<double> pts(n * w);
    for (auto& v : pts) v = pick(rng);

    std::vector<double> serial, omp;
    double ts = seconds_for(prog, pts, n, reps, Parallel::Serial, serial);
    double tp = seconds_for(prog, pts, n, reps, Parallel::OpenMP, omp);
    double worst = 0;
    for (std::size_t i = 0; i < serial.size(); ++i)
        if (std::isfinite(serial[i])) worst = std::max(worst, std::fabs(serial[i] - omp[i]));
    std::size_t nodes = 0;
    for (const auto& t : terms) nodes += node_count(t);
    std::printf("residual nodes: %zu, points: %zu, reps: %d\n", nodes, n, reps);
    std::printf("serial  %.4f s  (%.2e points/s)\n", ts, n / ts);
    std::printf("openmp  %.4f s  (%.2e points/s)  speedup %.2fx\n", tp, n / tp, ts / tp);
    std::printf("max |serial - openmp| = %.3e\n", worst);
    double big = 0;
    for (std::size_t i = 0; i + 2 < serial.size(); i += 3) {
        double r = serial[i] + serial[i + 1] + serial[i + 2];
        if (std::isfinite(r)) big = std::max(big, std::fabs(r));
    }
    std::printf("max |residual| sampled = %.3e\n", big);
    return worst == 0 ? 0 : 1;
}
