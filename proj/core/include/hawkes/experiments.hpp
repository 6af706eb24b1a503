#pragma once

// Synthetic instance recipes, the multi-algorithm regret benchmark, and the
// empirical consistency study.

#include "hawkes/likelihood.hpp"
#include "hawkes/model.hpp"
#include "hawkes/optim.hpp"
#include "hawkes/simulate.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hawkes {

enum class RecipeKind { kExponential, kPowerLaw, kCustom };

/// Random instance recipe: alpha ~ U[alpha_range] / alpha_divisor, mu ~ U[mu_range] /
/// mu_divisor, fixed beta; box bounds scaled from the sampled truth.
struct SyntheticRecipe {
    RecipeKind kind{RecipeKind::kExponential};
    int num_types{10};
    double cutoff{0.05};
    double beta{0.5};
    double alpha_low{0.001};
    double alpha_high{1.0};
    double alpha_divisor{11.0};
    double mu_low{0.001};
    double mu_high{0.1};
    double mu_divisor{2.0};
    double reg_c{1.0};
    double beta_lb_floor{0.0};  // lb_beta = max(beta / 100, beta_lb_floor)
    double init_mu{1.0};
    double init_alpha{1.0};
    double init_beta{3.0};
    double horizon{1000.0};
    std::uint64_t seed{0};
    int max_attempts{100};

    static SyntheticRecipe exponential(std::uint64_t seed, int num_types = 10);
    /// Power-law kernel with c = 0.05, alpha divisor 200, lb_beta >= 1.2. The true
    /// exponent is 1.5 (the kernel needs beta > 1 to be integrable).
    static SyntheticRecipe power_law(std::uint64_t seed, int num_types = 10);
    /// "exp-k10", "pwl-k10", "exp-k5", "pwl-k5".
    static SyntheticRecipe by_name(const std::string& name, std::uint64_t seed);
};

struct SyntheticInstance {
    ModelSpec spec;
    ParamVector truth;
    BoxDomain domain;
    ParamVector init;  // projected onto the box
    double reg_c{0.0};
    double horizon{0.0};
    /// Step size 1e-7, momentum 0.9, 500 iterations, omega_bar = nu = 0.1,
    /// delta = 0.02, C1 = C2 = 1e8, memory 20. Not theory-compliant.
    HyperParams hp;
    int attempts{0};
};

/// Throws DomainError if no stationary draw with an interior init is found
/// within recipe.max_attempts.
[[nodiscard]] SyntheticInstance generate_instance(const SyntheticRecipe& recipe);
[[nodiscard]] SyntheticInstance gen_synthetic_exponential(std::uint64_t seed, int num_types = 10);
[[nodiscard]] SyntheticInstance gen_synthetic_powerlaw(std::uint64_t seed, int num_types = 10);

/// Box from a truth: mu in [min mu / 100, 100 max mu], alpha in [0, 100 max alpha],
/// beta in [max(beta / 100, floor), 100 beta].
[[nodiscard]] BoxDomain scaled_box(const ModelSpec& spec, const ParamVector& truth,
                                   double beta_lb_floor = 0.0);

/// Paper-style benchmark hyperparameters (see SyntheticInstance::hp).
[[nodiscard]] HyperParams benchmark_hyperparams();

// ---- benchmark ---------------------------------------------------------------

struct BenchmarkRun {
    std::uint64_t seed{0};
    Algorithm algorithm{Algorithm::kPalm};
    std::size_t num_events{0};
    RunResult result;
    /// log(best + eps_floor - objective_k) per trace record.
    std::vector<double> log_regret;
};

struct BenchmarkReport {
    std::vector<std::uint64_t> seeds;
    std::vector<Algorithm> algorithms;
    /// Best objective over all algorithms and iterations, per seed.
    std::vector<double> best;
    std::vector<BenchmarkRun> runs;  // seed-major, then algorithm order
    HyperParams hp;
    double eps_floor{1e-12};

    /// Median over seeds of the final objective of one algorithm.
    [[nodiscard]] double median_final_objective(Algorithm algorithm) const;
};

struct BenchmarkOptions {
    std::vector<Algorithm> algorithms{Algorithm::kPalm, Algorithm::kIpalm, Algorithm::kAaIpalm};
    int iterations{500};
    std::vector<std::uint64_t> seeds{1};
    double eps_floor{1e-12};
};

/// One event stream per seed, every algorithm from the shared init.
[[nodiscard]] BenchmarkReport run_benchmark(const SyntheticInstance& instance,
                                            const HyperParams& hp,
                                            const BenchmarkOptions& options);

/// Writes regret_iter.csv, regret_time.csv and manifest.json into `dir` (created if needed).
void write_benchmark_report(const BenchmarkReport& report, const SyntheticInstance& instance,
                            const std::string& dir, const std::string& recipe_name = "custom");

// ---- consistency ---------------------------------------------------------------

struct ConsistencyCell {
    double horizon{0.0};
    std::uint64_t seed{0};
    std::size_t num_events{0};
    double relative_error{0.0};
    double objective{0.0};
    bool feasible{true};
};

struct ConsistencyReport {
    std::vector<ConsistencyCell> cells;
    std::vector<double> horizons;
    std::vector<double> median_error;  // aligned with horizons
};

struct ConsistencyOptions {
    std::vector<double> horizons{200.0, 2000.0};
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    int iterations{300};
    double gamma{0.5};
    double epsilon{0.05};
    double lbar_safety{2.0};
    /// Excitation pairs further apart than this are dropped from the likelihood.
    double truncation_horizon{60.0};
};

/// K = 2 exponential instance with spectral radius about 0.45, a neutral init and C = 0.01.
[[nodiscard]] SyntheticInstance consistency_instance();

/// For each horizon and seed: simulate from instance.truth, fit with AA-iPALM using
/// theory-compliant hyperparameters (curvature estimated at init), record
/// ||theta_hat - theta*|| / ||theta*||.
[[nodiscard]] ConsistencyReport run_consistency_study(const SyntheticInstance& instance,
                                                      const ConsistencyOptions& options);

/// Writes consistency.csv and manifest.json into `dir`.
void write_consistency_report(const ConsistencyReport& report, const SyntheticInstance& instance,
                              const ConsistencyOptions& options, const std::string& dir);

}  // namespace hawkes
