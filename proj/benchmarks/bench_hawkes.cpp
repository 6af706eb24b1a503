// Micro benchmarks: likelihood evaluation, one iPALM map application, simulation.

#include "hawkes/experiments.hpp"
#include "hawkes/likelihood.hpp"
#include "hawkes/optim.hpp"
#include "hawkes/simulate.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace hawkes;

LikelihoodProblem make_problem(double horizon, double truncation) {
    const SyntheticInstance inst = consistency_instance();
    SimConfig sim;
    sim.seed = 11;
    EventSequence events = simulate_cluster(inst.spec, inst.truth, horizon, sim);
    return LikelihoodProblem(inst.spec, std::move(events), inst.domain, inst.reg_c, truncation);
}

void BM_LikelihoodValue(benchmark::State& state) {
    const LikelihoodProblem problem = make_problem(static_cast<double>(state.range(0)), 60.0);
    const Eigen::VectorXd flat = problem.index_map().pack(consistency_instance().init);
    for (auto _ : state) {
        benchmark::DoNotOptimize(evaluate_regularized(problem, flat, kValue).value);
    }
    state.counters["events"] = static_cast<double>(problem.events.size());
}
BENCHMARK(BM_LikelihoodValue)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_LikelihoodGradient(benchmark::State& state) {
    const LikelihoodProblem problem = make_problem(static_cast<double>(state.range(0)), 60.0);
    const Eigen::VectorXd flat = problem.index_map().pack(consistency_instance().init);
    for (auto _ : state) {
        benchmark::DoNotOptimize(evaluate_regularized(problem, flat, kEverything).gradient);
    }
    state.counters["events"] = static_cast<double>(problem.events.size());
}
BENCHMARK(BM_LikelihoodGradient)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_IpalmMap(benchmark::State& state) {
    const LikelihoodProblem problem = make_problem(2000.0, 60.0);
    const Eigen::VectorXd theta = problem.index_map().pack(consistency_instance().init);
    Eigen::VectorXd u(2 * theta.size());
    u << theta, theta;
    HyperParams hp;
    hp.lbar1 = hp.lbar2 = 1e5;
    for (auto _ : state) {
        benchmark::DoNotOptimize(ipalm_map(problem, hp, u));
    }
}
BENCHMARK(BM_IpalmMap)->Unit(benchmark::kMillisecond);

void BM_SimulateCluster(benchmark::State& state) {
    const SyntheticInstance inst = consistency_instance();
    const double horizon = static_cast<double>(state.range(0));
    std::uint64_t seed = 0;
    for (auto _ : state) {
        SimConfig sim;
        sim.seed = ++seed;
        benchmark::DoNotOptimize(simulate_cluster(inst.spec, inst.truth, horizon, sim).size());
    }
}
BENCHMARK(BM_SimulateCluster)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_SimulateThinning(benchmark::State& state) {
    const SyntheticInstance inst = consistency_instance();
    const double horizon = static_cast<double>(state.range(0));
    std::uint64_t seed = 0;
    for (auto _ : state) {
        SimConfig sim;
        sim.seed = ++seed;
        benchmark::DoNotOptimize(simulate_thinning(inst.spec, inst.truth, horizon, sim).size());
    }
}
BENCHMARK(BM_SimulateThinning)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
