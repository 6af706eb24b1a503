// Acceptance gate: one PASS/FAIL line per criterion. Exit status is nonzero if
// any criterion fails.

#include "oracles.hpp"

#include "hawkes/experiments.hpp"
#include "hawkes/io.hpp"
#include "hawkes/likelihood.hpp"
#include "hawkes/model.hpp"
#include "hawkes/optim.hpp"
#include "hawkes/simulate.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace hawkes;
namespace fs = std::filesystem;

struct Outcome {
    bool pass{false};
    std::string detail;
};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, format, a, b, c, d);
    return buf;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

ModelSpec k2_spec(const KernelFamily& family) {
    ModelSpec spec;
    spec.num_types = 2;
    spec.kernels = {family};
    return spec;
}

ParamVector k2_params(double mu0, double mu1, double a00, double a01, double a10, double a11, double beta) {
    ParamVector p;
    p.mu = Eigen::Vector2d(mu0, mu1);
    Eigen::MatrixXd a(2, 2);
    a << a00, a01, a10, a11;
    p.alpha = {a};
    p.beta = Eigen::VectorXd::Constant(1, beta);
    return p;
}

BoxDomain k2_box(double mu_lo, double mu_hi, double a_lo, double a_hi, double b_lo, double b_hi) {
    BoxDomain d;
    d.lower = k2_params(mu_lo, mu_lo, a_lo, a_lo, a_lo, a_lo, b_lo);
    d.upper = k2_params(mu_hi, mu_hi, a_hi, a_hi, a_hi, a_hi, b_hi);
    return d;
}

// ---- Lyapunov bookkeeping shared by every theory-compliant run ----------------

struct LyapunovLedger {
    std::size_t runs{0};
    double worst_increase{-std::numeric_limits<double>::infinity()};
    std::size_t accepted_steps{0};
    std::size_t fallback_steps{0};
    std::size_t violations{0};

    void record(const RunResult& r) {
        ++runs;
        for (std::size_t k = 1; k < r.trace.size(); ++k) {
            const double inc = r.trace[k].lyapunov - r.trace[k - 1].lyapunov;
            worst_increase = std::max(worst_increase, inc);
            if (inc > 1e-9) ++violations;
            if (r.trace[k].step_kind == StepKind::kAaAccepted) ++accepted_steps;
            if (r.trace[k].step_kind == StepKind::kAaRejected) ++fallback_steps;
        }
    }
};

LyapunovLedger g_lyapunov;

// ---- 1. gradient vs central differences ----------------------------------------

Outcome criterion_gradient() {
    std::mt19937_64 rng(20240601);
    double worst = 0.0;
    int points = 0;
    for (int inst = 0; inst < 5; ++inst) {
        const bool power = inst % 2 == 1;
        const ModelSpec spec = k2_spec(power ? KernelFamily::power_law(1.0) : KernelFamily::exponential());
        const ParamVector truth = power ? k2_params(0.5, 0.4, 0.2, 0.1, 0.05, 0.15, 1.8)
                                        : k2_params(0.5, 0.4, 0.3, 0.2, 0.1, 0.4, 1.2 + 0.2 * inst);
        SimConfig sim;
        sim.seed = 100 + static_cast<std::uint64_t>(inst);
        EventSequence ev = simulate_cluster(spec, truth, 40.0, sim);
        const BoxDomain box = power ? k2_box(0.05, 2.0, 0.0, 1.0, 1.2, 4.0) : k2_box(0.05, 2.0, 0.0, 1.0, 0.2, 4.0);
        const LikelihoodProblem problem(spec, std::move(ev), box, 0.3 + 0.1 * inst);
        const FlatIndexMap map(spec);
        const auto f = [&](const Eigen::VectorXd& x) { return regularized_objective(problem, map.unpack(x)); };
        for (int q = 0; q < 20; ++q) {
            const Eigen::VectorXd x = oracle::interior_point(box.flat_lower(), box.flat_upper(), rng);
            const Eigen::VectorXd analytic = grad_regularized(problem, map.unpack(x));
            const Eigen::VectorXd numeric = oracle::central_diff(f, x, 1e-6);
            worst = std::max(worst, (analytic - numeric).norm() / analytic.norm());
            ++points;
        }
    }
    return {worst <= 1e-5, fmt("%.0f points, max ||g - g_fd|| / ||g|| = %.2e (limit 1e-5)", points, worst)};
}

// ---- 2. closed-form likelihood vs quadrature -------------------------------------

Outcome criterion_quadrature() {
    double worst = 0.0;
    int cases = 0;
    for (int inst = 0; inst < 6; ++inst) {
        const bool power = inst >= 3;
        const ModelSpec spec = k2_spec(power ? KernelFamily::power_law(1.0) : KernelFamily::exponential());
        const ParamVector truth = power ? k2_params(0.6, 0.5, 0.3, 0.2, 0.1, 0.3, 1.6 + 0.2 * inst)
                                        : k2_params(0.6, 0.5, 0.4, 0.2, 0.3, 0.5, 0.8 + 0.5 * inst);
        SimConfig sim;
        sim.seed = 7 + static_cast<std::uint64_t>(inst);
        EventSequence ev = simulate_cluster(spec, truth, 30.0, sim);
        while (ev.size() > 50) {
            ev.times.pop_back();
            ev.types.pop_back();
        }
        ev.horizon = std::min(ev.horizon, ev.times.empty() ? 30.0 : ev.times.back() + 0.5);
        const BoxDomain box = power ? k2_box(0.01, 5, 0, 5, 1.05, 10) : k2_box(0.01, 5, 0, 5, 0.01, 10);
        const LikelihoodProblem problem(spec, ev, box, 0.0);
        const double closed = log_likelihood(problem, truth);
        const double quad = oracle::loglik_quadrature(spec, truth, ev);
        worst = std::max(worst, std::abs(closed - quad));
        ++cases;
    }
    return {worst <= 1e-6, fmt("%.0f instances (<= 50 events), max |closed - quadrature| = %.2e (limit 1e-6)",
                               cases, worst)};
}

// ---- 3. simulator means ---------------------------------------------------------

Outcome criterion_simulator() {
    const ModelSpec spec = k2_spec(KernelFamily::exponential());
    const ParamVector p = k2_params(0.4, 0.3, 0.45, 0.15, 0.3, 0.375, 1.5);
    const Eigen::MatrixXd g = oracle::branching(spec, p);
    const double rho = g.eigenvalues().cwiseAbs().maxCoeff();
    const Eigen::VectorXd target = oracle::neumann_mean(g, p.mu);
    constexpr int kReps = 200;
    constexpr double kHorizon = 500.0;
    Eigen::MatrixXd cluster(kReps, 2);
    Eigen::MatrixXd thinning(kReps, 2);
    for (int r = 0; r < kReps; ++r) {
        SimConfig a;
        a.seed = static_cast<std::uint64_t>(r) + 1;
        SimConfig b;
        b.seed = static_cast<std::uint64_t>(r) + 100001;
        const auto ca = simulate_cluster(spec, p, kHorizon, a).counts();
        const auto cb = simulate_thinning(spec, p, kHorizon, b).counts();
        for (int i = 0; i < 2; ++i) {
            cluster(r, i) = static_cast<double>(ca[static_cast<std::size_t>(i)]) / kHorizon;
            thinning(r, i) = static_cast<double>(cb[static_cast<std::size_t>(i)]) / kHorizon;
        }
    }
    const auto mean = [](const Eigen::MatrixXd& x) { return Eigen::VectorXd(x.colwise().mean()); };
    const auto se = [&](const Eigen::MatrixXd& x) {
        const Eigen::RowVectorXd m = x.colwise().mean();
        const Eigen::MatrixXd c = x.rowwise() - m;
        return Eigen::VectorXd((c.array().square().colwise().sum() / (x.rows() - 1)).sqrt() /
                               std::sqrt(static_cast<double>(x.rows())));
    };
    const Eigen::VectorXd mc = mean(cluster);
    const Eigen::VectorXd mt = mean(thinning);
    const Eigen::VectorXd sc = se(cluster);
    const Eigen::VectorXd st = se(thinning);
    double worst = 0.0;  // in standard errors
    for (int i = 0; i < 2; ++i) {
        worst = std::max(worst, std::abs(mc[i] - target[i]) / sc[i]);
        worst = std::max(worst, std::abs(mt[i] - target[i]) / st[i]);
        worst = std::max(worst, std::abs(mc[i] - mt[i]) / std::hypot(sc[i], st[i]));
    }
    return {rho <= 0.6 && worst <= 3.0,
            fmt("rho = %.3f, lambda_bar = (%.4f, %.4f), worst deviation %.2f SE (limit 3)", rho, target[0],
                target[1], worst)};
}

// ---- 4. Poisson closed form -------------------------------------------------------

Outcome criterion_poisson() {
    const ModelSpec spec = k2_spec(KernelFamily::exponential());
    SimConfig sim;
    sim.seed = 5;
    EventSequence ev = simulate_cluster(spec, k2_params(0.7, 0.4, 0, 0, 0, 0, 1.0), 400.0, sim);
    const auto counts = ev.counts();
    const Eigen::Vector2d mle(static_cast<double>(counts[0]) / 400.0, static_cast<double>(counts[1]) / 400.0);
    // alpha is pinned to 0, so every excitation term vanishes and a short truncation
    // horizon leaves the likelihood exact while skipping the pair loop.
    const LikelihoodProblem problem(spec, std::move(ev), k2_box(0.1, 3.0, 0.0, 0.0, 0.5, 3.0), 0.0, 1e-3);
    const LipschitzBounds bounds = safe_lipschitz_bounds(problem);
    const ParamVector init = k2_params(2.0, 0.2, 0, 0, 0, 0, 1.0);
    double worst = 0.0;
    bool ok = true;
    std::string runs;
    for (const auto& [algo, gamma] : {std::pair{Algorithm::kPalm, 0.0}, std::pair{Algorithm::kIpalm, 0.5},
                                      std::pair{Algorithm::kAaIpalm, 0.5}, std::pair{Algorithm::kAaIpalm, 0.0}}) {
        HyperParams hp = HyperParams::theory_compliant(bounds, gamma, gamma);
        hp.max_iters = 5000;
        ok = ok && hp.compliant();
        const RunResult r = run_algorithm(algo, problem, hp, init);
        g_lyapunov.record(r);
        const double err = ((r.params.mu - mle).array().abs() / mle.array()).maxCoeff();
        worst = std::max(worst, err);
        ok = ok && err <= 1e-5;
    }
    return {ok, fmt("n/T = (%.4f, %.4f), max relative error over 4 runs = %.2e (limit 1e-5, 5000 iterations)",
                    mle[0], mle[1], worst)};
}

// ---- 5. Lyapunov monotonicity ------------------------------------------------------

Outcome criterion_lyapunov() {
    struct Instance {
        ModelSpec spec;
        ParamVector truth;
        BoxDomain box;
        ParamVector init;
        double horizon;
    };
    const std::vector<Instance> instances{
        {k2_spec(KernelFamily::exponential()), k2_params(0.4, 0.3, 0.45, 0.15, 0.3, 0.375, 1.5),
         k2_box(0.1, 2.0, 0.0, 1.0, 0.5, 5.0), k2_params(0.5, 0.2, 0.2, 0.2, 0.2, 0.2, 2.0), 300.0},
        {k2_spec(KernelFamily::exponential()), k2_params(0.4, 0.3, 0.45, 0.15, 0.3, 0.375, 1.5),
         k2_box(0.1, 2.0, 0.0, 1.0, 0.5, 5.0), k2_params(1.5, 0.15, 0.9, 0.0, 0.6, 0.1, 0.6), 100.0},
        {k2_spec(KernelFamily::power_law(0.5)), k2_params(0.4, 0.3, 0.2, 0.1, 0.1, 0.2, 2.0),
         k2_box(0.1, 2.0, 0.0, 1.0, 1.5, 4.0), k2_params(0.5, 0.2, 0.2, 0.2, 0.2, 0.2, 3.0), 200.0},
    };
    std::size_t before = g_lyapunov.runs;
    std::uint64_t seed = 1;
    for (const auto& inst : instances) {
        SimConfig sim;
        sim.seed = seed++;
        EventSequence ev = simulate_cluster(inst.spec, inst.truth, inst.horizon, sim);
        const LikelihoodProblem problem(inst.spec, std::move(ev), inst.box, 0.01);
        const LipschitzBounds bounds = safe_lipschitz_bounds(problem);
        for (const double gamma : {0.0, 0.3, 0.6}) {
            for (const Algorithm algo : {Algorithm::kPalm, Algorithm::kIpalm, Algorithm::kAaIpalm}) {
                if (algo == Algorithm::kPalm && gamma > 0.0) continue;
                HyperParams hp = HyperParams::theory_compliant(bounds, gamma, gamma);
                hp.max_iters = 300;
                if (!hp.compliant()) return {false, "theory_compliant() produced noncompliant hyperparameters"};
                g_lyapunov.record(run_algorithm(algo, problem, hp, inst.init));
                if (algo == Algorithm::kAaIpalm) {
                    hp.aa_pairing = AaPairing::kAnchored;
                    g_lyapunov.record(run_algorithm(algo, problem, hp, inst.init));
                }
            }
        }
    }
    const bool both_kinds = g_lyapunov.accepted_steps > 0 && g_lyapunov.fallback_steps > 0;
    std::ostringstream os;
    os << g_lyapunov.runs << " runs (" << g_lyapunov.runs - before << " here, rest from criteria 4/6/7), max Phi_{k+1} - Phi_k = "
       << fmt("%.2e", g_lyapunov.worst_increase) << " (limit 1e-9), AA-accepted steps " << g_lyapunov.accepted_steps
       << ", fallback steps " << g_lyapunov.fallback_steps;
    return {g_lyapunov.violations == 0 && both_kinds, os.str()};
}

// ---- 6. inverse H bound ----------------------------------------------------------------

Outcome criterion_h_bounds() {
    const ModelSpec spec = k2_spec(KernelFamily::exponential());
    SimConfig sim;
    sim.seed = 3;
    EventSequence ev = simulate_cluster(spec, k2_params(0.4, 0.3, 0.45, 0.15, 0.3, 0.375, 1.5), 300.0, sim);
    const LikelihoodProblem problem(spec, std::move(ev), k2_box(0.1, 2.0, 0.0, 1.0, 0.5, 5.0), 0.01);
    const ParamVector init = k2_params(0.5, 0.2, 0.2, 0.2, 0.2, 0.2, 2.0);
    const LipschitzBounds bounds = safe_lipschitz_bounds(problem);
    bool ok = true;
    std::ostringstream os;
    os << "2P = " << 2 * FlatIndexMap(spec).size();
    for (const int m : {1, 5}) {
        for (const double gamma : {0.0, 0.5}) {
            HyperParams hp = HyperParams::theory_compliant(bounds, gamma, gamma);
            hp.omega_bar = 0.1;
            hp.nu = 0.1;
            hp.memory = m;
            hp.max_iters = 200;
            const double limit = hp.inverse_h_bound();
            double worst = 0.0;
            double worst_h = 0.0;
            RunOptions opts;
            opts.observer = [&](const OptimizerState& s) {
                const Eigen::JacobiSVD<Eigen::MatrixXd> svd(s.h);
                const Eigen::VectorXd sv = svd.singularValues();
                worst = std::max(worst, 1.0 / sv[sv.size() - 1]);
                worst_h = std::max(worst_h, sv[0]);
            };
            const RunResult r = run_aa_ipalm(problem, hp, init, opts);
            g_lyapunov.record(r);
            ok = ok && worst <= limit;
            os << fmt("; m=%.0f gamma=%.1f: max ||H^-1|| = %.3g <= %.6g", m, gamma, worst, limit)
               << fmt(" (max ||H|| = %.3g)", worst_h);
        }
    }
    return {ok, os.str()};
}

// ---- 7. degeneracies --------------------------------------------------------------------

bool same_trajectory(const RunResult& a, const RunResult& b, bool compare_kinds) {
    if (a.trace.size() != b.trace.size() || a.flat != b.flat) return false;
    for (std::size_t k = 0; k < a.trace.size(); ++k) {
        const auto& x = a.trace[k];
        const auto& y = b.trace[k];
        if (x.objective != y.objective || x.residual != y.residual || x.lyapunov != y.lyapunov) return false;
        if (compare_kinds && x.step_kind != y.step_kind) return false;
    }
    return true;
}

Outcome criterion_degeneracy() {
    bool ok = true;
    int pairs = 0;
    for (const bool power : {false, true}) {
        const ModelSpec spec = k2_spec(power ? KernelFamily::power_law(0.5) : KernelFamily::exponential());
        SimConfig sim;
        sim.seed = 21;
        EventSequence ev = simulate_cluster(
            spec, power ? k2_params(0.4, 0.3, 0.2, 0.1, 0.1, 0.2, 2.0) : k2_params(0.4, 0.3, 0.45, 0.15, 0.3, 0.375, 1.5),
            200.0, sim);
        const BoxDomain box = power ? k2_box(0.1, 2.0, 0.0, 1.0, 1.5, 4.0) : k2_box(0.1, 2.0, 0.0, 1.0, 0.5, 5.0);
        const LikelihoodProblem problem(spec, std::move(ev), box, 0.01);
        const ParamVector init = k2_params(0.5, 0.2, 0.2, 0.2, 0.2, 0.2, power ? 3.0 : 2.0);
        const LipschitzBounds bounds = safe_lipschitz_bounds(problem);

        HyperParams flat = HyperParams::theory_compliant(bounds, 0.0, 0.0);
        flat.max_iters = 150;
        const RunResult palm = run_palm(problem, flat, init);
        const RunResult ipalm0 = run_ipalm(problem, flat, init);
        g_lyapunov.record(palm);
        ok = ok && same_trajectory(palm, ipalm0, false);

        HyperParams mom = HyperParams::theory_compliant(bounds, 0.5, 0.5);
        mom.max_iters = 150;
        const RunResult ipalm = run_ipalm(problem, mom, init);
        mom.aa_enabled = false;
        const RunResult aa_off = run_aa_ipalm(problem, mom, init);
        g_lyapunov.record(ipalm);
        ok = ok && same_trajectory(ipalm, aa_off, true);
        pairs += 2;
    }
    return {ok, fmt("%.0f trajectory pairs compared bit-for-bit (gamma=0 iPALM vs PALM; AA off vs iPALM)", pairs)};
}

// ---- 8 and 10. benchmark ordering and residual trend ---------------------------------------

constexpr std::uint64_t kRecipeSeed = 7;

const BenchmarkReport& benchmark_report() {
    static const BenchmarkReport report = [] {
        const SyntheticInstance inst = generate_instance(SyntheticRecipe::by_name("exp-k5", kRecipeSeed));
        BenchmarkOptions opts;
        opts.iterations = 500;
        opts.seeds = {1, 2, 3, 4, 5};
        HyperParams hp = inst.hp;
        hp.max_iters = opts.iterations;
        return run_benchmark(inst, hp, opts);
    }();
    return report;
}

Outcome criterion_ordering() {
    const BenchmarkReport& report = benchmark_report();
    const double palm = report.median_final_objective(Algorithm::kPalm);
    const double ipalm = report.median_final_objective(Algorithm::kIpalm);
    const double aa = report.median_final_objective(Algorithm::kAaIpalm);
    const bool ok = aa >= ipalm - 1e-6 && ipalm >= palm - 1e-6 && aa > palm;
    return {ok, fmt("K=5 exponential recipe, 5 seeds, 500 iterations: median final objective AA-iPALM %.3f, "
                    "iPALM %.3f, PALM %.3f",
                    aa, ipalm, palm)};
}

Outcome criterion_residual_trend() {
    const BenchmarkReport& report = benchmark_report();
    bool ok = true;
    std::vector<double> ratios;
    for (const auto& run : report.runs) {
        if (run.algorithm != Algorithm::kAaIpalm) continue;
        const ResidualSummary s = residual_diagnostics(run.result.trace, 100);
        const double r100 = s.checkpoints.front().min_residual_sq;
        const double r400 = s.checkpoints.back().min_residual_sq;
        ok = ok && s.checkpoints.back().iterations == 400 && r400 <= r100 && s.nonincreasing;
        ratios.push_back(r400 / r100);
    }
    return {ok, fmt("AA-iPALM on the criterion-8 instance: min residual^2 ratio K=400/K=100, median %.3g "
                    "(range %.3g .. %.3g over 5 seeds)",
                    median(ratios), *std::min_element(ratios.begin(), ratios.end()),
                    *std::max_element(ratios.begin(), ratios.end()))};
}

// ---- 9. consistency ----------------------------------------------------------------

Outcome criterion_consistency() {
    const SyntheticInstance inst = consistency_instance();
    ConsistencyOptions opts;
    opts.horizons = {200.0, 2000.0};
    const ConsistencyReport report = run_consistency_study(inst, opts);
    const double e200 = report.median_error[0];
    const double e2000 = report.median_error[1];
    return {e2000 < e200, fmt("K=2 exponential, 10 seeds: median relative error %.4f at T=200, %.4f at T=2000",
                              e200, e2000)};
}

// ---- 11. Powell values ----------------------------------------------------------------

Outcome criterion_powell() {
    const double eps = std::numeric_limits<double>::epsilon();
    const double a = powell_phi(0.5, 0.1);
    const double b = powell_phi(0.0, 0.1);
    const double c = powell_phi(-0.05, 0.1);
    const bool ok = a == 1.0 && std::abs(b - 0.9) <= eps && std::abs(c - 1.1 / 1.05) <= 2 * eps;
    return {ok, fmt("phi(0.5) = %.17g, phi(0) = %.17g, phi(-0.05) = %.17g (1.1/1.05 = %.17g)", a, b, c, 1.1 / 1.05)};
}

// ---- 12. CLI round trip ------------------------------------------------------------------

int run(const std::string& cmd) {
    const int status = std::system((cmd + " > cli.log 2>&1").c_str());
    return status == -1 ? -1 : WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Outcome criterion_cli() {
    const fs::path dir = fs::temp_directory_path() / "hawkes_acceptance_cli";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path old = fs::current_path();
    fs::current_path(dir);
    const std::string exe = HAWKES_MLE_PATH;
    const std::string cfg = std::string(HAWKES_SOURCE_DIR) + "/configs/k2_exp.json";
    const int a = run(exe + " simulate --config " + cfg + " --horizon 300 --seed 4 --out events.csv");
    const int b = run(exe + " fit --events events.csv --config " + cfg + " --horizon 300 --iters 60 --out params.json"
                            " --trace trace.csv");
    const int c = run(exe + " check-stationarity --params params.json");

    bool lossless = a == 0 && b == 0 && c == 0;
    std::string why;
    if (lossless) {
        const RunConfig rc = read_config(cfg);
        SimConfig sim;
        sim.seed = 4;
        const EventSequence direct = simulate_cluster(rc.spec, *rc.truth, 300.0, sim);
        EventReadOptions ro;
        ro.num_types = 2;
        ro.horizon = 300.0;
        const EventSequence back = read_events_csv("events.csv", ro);
        if (back.times != direct.times || back.types != direct.types) why += " events differ;";
        std::ostringstream ev;
        write_events_csv(ev, back);
        if (ev.str() != slurp("events.csv")) why += " events re-serialization differs;";
        const ParamsDocument doc = read_params_json("params.json");
        if (params_to_json(doc) + "\n" != slurp("params.json") && params_to_json(doc) != slurp("params.json")) {
            why += " params re-serialization differs;";
        }
        const auto trace = read_trace_csv("trace.csv");
        std::ostringstream tr;
        write_trace_csv(tr, trace);
        if (tr.str() != slurp("trace.csv")) why += " trace re-serialization differs;";
        if (trace.size() != 61) why += " trace length;";
        const RunConfig again = config_from_json(config_to_json(rc));
        if (config_to_json(again) != config_to_json(rc)) why += " config re-serialization differs;";
        lossless = why.empty();
    }
    fs::current_path(old);
    return {lossless, fmt("exit codes simulate=%.0f fit=%.0f check-stationarity=%.0f; ", a, b, c) +
                          (why.empty() ? std::string("events, params, trace and config round-trip exactly")
                                       : "round-trip problems:" + why)};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> fn;
    };
    // Criterion 5 runs after 4, 6 and 7 so it can include their Lyapunov checks.
    const std::vector<Criterion> criteria{
        {1, "gradient matches central differences", criterion_gradient},
        {2, "closed-form likelihood matches quadrature", criterion_quadrature},
        {3, "simulator means match the stationary intensity", criterion_simulator},
        {4, "Poisson closed form recovered by every optimizer", criterion_poisson},
        {6, "inverse H norm bound", criterion_h_bounds},
        {7, "degenerate settings reproduce trajectories bit-exactly", criterion_degeneracy},
        {5, "Lyapunov function nonincreasing", criterion_lyapunov},
        {8, "benchmark ordering AA-iPALM >= iPALM >= PALM", criterion_ordering},
        {9, "parameter error shrinks with horizon", criterion_consistency},
        {10, "prefix-min residual nonincreasing", criterion_residual_trend},
        {11, "Powell function values", criterion_powell},
        {12, "CLI round trip", criterion_cli},
    };
    std::vector<std::pair<int, std::string>> lines;
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::ostringstream line;
        line << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << "): " << o.detail
             << fmt(" [%.1f s]", secs);
        std::cout << line.str() << std::endl;
        lines.emplace_back(c.id, line.str());
        failures += o.pass ? 0 : 1;
    }
    std::sort(lines.begin(), lines.end());
    std::cout << "\nsummary:\n";
    for (const auto& [id, text] : lines) std::cout << "  " << text.substr(0, text.find(':')) << '\n';
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << '\n';
    return failures == 0 ? 0 : 1;
}
