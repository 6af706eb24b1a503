#include "hawkes/experiments.hpp"

#include "hawkes/errors.hpp"
#include "hawkes/io.hpp"
#include "hawkes/rng.hpp"
#include "parallel.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace hawkes {

using nlohmann::json;

namespace {

double uniform_between(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

std::string format_double(double value) {
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, result.ptr);
}

double median(std::vector<double> values) {
    if (values.empty()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

std::ofstream open_in_dir(const std::string& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    const auto path = std::filesystem::path(dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot open '" + path.string() + "' for writing");
    }
    return out;
}

json hyperparams_json(const HyperParams& hp) {
    json out = {
        {"epsilon", hp.epsilon},     {"gamma1", hp.gamma1},       {"gamma2", hp.gamma2},
        {"Lbar1", hp.lbar1},         {"Lbar2", hp.lbar2},         {"tau1", hp.tau1()},
        {"tau2", hp.tau2()},         {"tau1_overridden", hp.tau1_override.has_value()},
        {"tau2_overridden", hp.tau2_override.has_value()},        {"omega_bar", hp.omega_bar},
        {"nu", hp.nu},               {"delta", hp.delta},         {"C1", hp.c1},
        {"C2", hp.c2},               {"memory", hp.memory},       {"max_iters", hp.max_iters},
        {"aa_enabled", hp.aa_enabled},
        {"aa_pairing", to_string(hp.aa_pairing)},
    };
    json issues = json::array();
    for (const auto& issue : hp.compliance_issues()) issues.push_back(issue);
    out["compliance_issues"] = std::move(issues);
    return out;
}

json vector_json(const Eigen::VectorXd& v) {
    return json(std::vector<double>(v.data(), v.data() + v.size()));
}

json instance_json(const SyntheticInstance& inst) {
    json alpha = json::array();
    for (const auto& a : inst.truth.alpha) {
        json rows = json::array();
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            rows.push_back(vector_json(a.row(i).transpose()));
        }
        alpha.push_back(std::move(rows));
    }
    json kernels = json::array();
    for (const auto& k : inst.spec.kernels) {
        json entry = {{"family", k.name()}};
        if (k.kind == KernelKind::kPowerLaw) entry["cutoff"] = k.cutoff;
        kernels.push_back(std::move(entry));
    }
    return {
        {"K", inst.spec.num_types},
        {"kernels", std::move(kernels)},
        {"truth", {{"mu", vector_json(inst.truth.mu)}, {"alpha", std::move(alpha)}, {"beta", vector_json(inst.truth.beta)}}},
        {"reg_c", inst.reg_c},
        {"horizon", inst.horizon},
        {"attempts", inst.attempts},
        {"domain_lower", vector_json(FlatIndexMap(inst.spec).pack(inst.domain.lower))},
        {"domain_upper", vector_json(FlatIndexMap(inst.spec).pack(inst.domain.upper))},
        {"init", vector_json(FlatIndexMap(inst.spec).pack(inst.init))},
    };
}

}  // namespace

// ---- recipes -----------------------------------------------------------------

SyntheticRecipe SyntheticRecipe::exponential(std::uint64_t seed, int num_types) {
    SyntheticRecipe r;
    r.kind = RecipeKind::kExponential;
    r.num_types = num_types;
    r.seed = seed;
    return r;
}

SyntheticRecipe SyntheticRecipe::power_law(std::uint64_t seed, int num_types) {
    SyntheticRecipe r;
    r.kind = RecipeKind::kPowerLaw;
    r.num_types = num_types;
    r.beta = 1.5;
    r.alpha_divisor = 200.0;
    r.beta_lb_floor = 1.2;
    r.seed = seed;
    return r;
}

SyntheticRecipe SyntheticRecipe::by_name(const std::string& name, std::uint64_t seed) {
    if (name == "exp-k10") return exponential(seed, 10);
    if (name == "pwl-k10") return power_law(seed, 10);
    if (name == "exp-k5") return exponential(seed, 5);
    if (name == "pwl-k5") return power_law(seed, 5);
    throw ConfigError("unknown recipe '" + name + "' (expected exp-k10, pwl-k10, exp-k5 or pwl-k5)");
}

HyperParams benchmark_hyperparams() {
    HyperParams hp;
    hp.epsilon = 0.05;
    hp.gamma1 = hp.gamma2 = 0.9;
    hp.tau1_override = hp.tau2_override = 1e-7;
    // Curvature constants for which the step-size formula gives exactly 1e-7.
    hp.lbar1 = hp.lbar2 = 2.0 * (1.0 - 0.9) / ((1.0 + 0.9) * 1e-7);
    hp.omega_bar = 0.1;
    hp.nu = 0.1;
    hp.delta = 0.02;
    hp.c1 = hp.c2 = 1e8;
    hp.memory = 20;
    hp.max_iters = 500;
    return hp;
}

BoxDomain scaled_box(const ModelSpec& spec, const ParamVector& truth, double beta_lb_floor) {
    BoxDomain box;
    const int k = spec.num_types;
    const int m = spec.num_kernels();
    box.lower.mu = Eigen::VectorXd::Constant(k, truth.mu.minCoeff() / 100.0);
    box.upper.mu = Eigen::VectorXd::Constant(k, 100.0 * truth.mu.maxCoeff());
    double alpha_max = 0.0;
    for (const auto& a : truth.alpha) alpha_max = std::max(alpha_max, a.maxCoeff());
    box.lower.alpha.assign(static_cast<std::size_t>(m), Eigen::MatrixXd::Zero(k, k));
    box.upper.alpha.assign(static_cast<std::size_t>(m), Eigen::MatrixXd::Constant(k, k, 100.0 * alpha_max));
    box.lower.beta.resize(m);
    box.upper.beta.resize(m);
    for (int mm = 0; mm < m; ++mm) {
        box.lower.beta[mm] = std::max(truth.beta[mm] / 100.0, beta_lb_floor);
        box.upper.beta[mm] = 100.0 * truth.beta[mm];
    }
    box.validate(spec);
    return box;
}

SyntheticInstance generate_instance(const SyntheticRecipe& recipe) {
    if (recipe.num_types < 1) throw ConfigError("recipe needs at least one type");
    if (recipe.max_attempts < 1) throw ConfigError("recipe needs a positive attempt budget");
    SyntheticInstance inst;
    inst.spec.num_types = recipe.num_types;
    inst.spec.kernels = {recipe.kind == RecipeKind::kPowerLaw ? KernelFamily::power_law(recipe.cutoff)
                                                              : KernelFamily::exponential()};
    inst.spec.validate();
    inst.reg_c = recipe.reg_c;
    inst.horizon = recipe.horizon;
    inst.hp = benchmark_hyperparams();

    const int k = recipe.num_types;
    Rng rng = make_stream(recipe.seed, streams::kRecipe);
    const FlatIndexMap map(inst.spec);
    for (int attempt = 1; attempt <= recipe.max_attempts; ++attempt) {
        ParamVector truth = ParamVector::zeros(inst.spec);
        for (int i = 0; i < k; ++i) {
            truth.mu[i] = uniform_between(rng, recipe.mu_low, recipe.mu_high) / recipe.mu_divisor;
        }
        for (int i = 0; i < k; ++i) {
            for (int j = 0; j < k; ++j) {
                truth.alpha[0](i, j) =
                    uniform_between(rng, recipe.alpha_low, recipe.alpha_high) / recipe.alpha_divisor;
            }
        }
        truth.beta[0] = recipe.beta;
        truth.validate(inst.spec);
        if (!(spectral_radius(branching_matrix(inst.spec, truth)) < 1.0)) {
            continue;
        }
        const BoxDomain box = scaled_box(inst.spec, truth, recipe.beta_lb_floor);
        const bool mu_inside = box.lower.mu.maxCoeff() < recipe.init_mu && recipe.init_mu < box.upper.mu.minCoeff();
        const bool beta_inside = box.lower.beta[0] < recipe.init_beta && recipe.init_beta < box.upper.beta[0];
        if (!mu_inside || !beta_inside) {
            continue;
        }
        const ParamVector raw_init = ParamVector::filled(inst.spec, recipe.init_mu, recipe.init_alpha, recipe.init_beta);
        inst.truth = std::move(truth);
        inst.domain = box;
        inst.init = map.unpack(project_onto_box(box, map.pack(raw_init)));
        inst.attempts = attempt;
        return inst;
    }
    std::ostringstream os;
    os << "no admissible instance (stationary, interior init) after " << recipe.max_attempts << " attempts";
    throw DomainError(os.str());
}

SyntheticInstance gen_synthetic_exponential(std::uint64_t seed, int num_types) {
    return generate_instance(SyntheticRecipe::exponential(seed, num_types));
}

SyntheticInstance gen_synthetic_powerlaw(std::uint64_t seed, int num_types) {
    return generate_instance(SyntheticRecipe::power_law(seed, num_types));
}

// ---- benchmark ---------------------------------------------------------------

double BenchmarkReport::median_final_objective(Algorithm algorithm) const {
    std::vector<double> finals;
    for (const auto& run : runs) {
        if (run.algorithm == algorithm) finals.push_back(run.result.objective);
    }
    return median(std::move(finals));
}

BenchmarkReport run_benchmark(const SyntheticInstance& instance, const HyperParams& hp_in,
                              const BenchmarkOptions& options) {
    if (options.algorithms.empty() || options.seeds.empty()) {
        throw ConfigError("benchmark needs at least one algorithm and one seed");
    }
    if (!(options.eps_floor > 0.0)) throw ConfigError("benchmark eps_floor must be positive");
    HyperParams hp = hp_in;
    hp.max_iters = options.iterations;
    hp.validate();

    BenchmarkReport report;
    report.seeds = options.seeds;
    report.algorithms = options.algorithms;
    report.hp = hp;
    report.eps_floor = options.eps_floor;

    std::vector<LikelihoodProblem> problems;
    problems.reserve(options.seeds.size());
    for (const auto seed : options.seeds) {
        SimConfig sim;
        sim.seed = seed;
        problems.emplace_back(instance.spec, simulate_cluster(instance.spec, instance.truth, instance.horizon, sim),
                              instance.domain, instance.reg_c);
    }

    const std::size_t num_alg = options.algorithms.size();
    report.runs.resize(options.seeds.size() * num_alg);
    detail::parallel_chunks(report.runs.size(), [&](std::size_t cell) {
        const std::size_t s = cell / num_alg;
        BenchmarkRun& run = report.runs[cell];
        run.seed = options.seeds[s];
        run.algorithm = options.algorithms[cell % num_alg];
        run.num_events = problems[s].events.size();
        run.result = run_algorithm(run.algorithm, problems[s], hp, instance.init);
    });

    report.best.assign(options.seeds.size(), -std::numeric_limits<double>::infinity());
    for (std::size_t cell = 0; cell < report.runs.size(); ++cell) {
        double& best = report.best[cell / num_alg];
        for (const auto& r : report.runs[cell].result.trace) best = std::max(best, r.objective);
    }
    for (std::size_t cell = 0; cell < report.runs.size(); ++cell) {
        auto& run = report.runs[cell];
        const double best = report.best[cell / num_alg];
        run.log_regret.reserve(run.result.trace.size());
        for (const auto& r : run.result.trace) {
            run.log_regret.push_back(std::log(best + options.eps_floor - r.objective));
        }
    }
    return report;
}

void write_benchmark_report(const BenchmarkReport& report, const SyntheticInstance& instance,
                            const std::string& dir, const std::string& recipe_name) {
    std::ofstream by_iter = open_in_dir(dir, "regret_iter.csv");
    std::ofstream by_time = open_in_dir(dir, "regret_time.csv");
    by_iter << "seed,algorithm,iter,objective,log_regret\n";
    by_time << "seed,algorithm,seconds,log_regret\n";
    for (const auto& run : report.runs) {
        const std::string alg = to_string(run.algorithm);
        for (std::size_t k = 0; k < run.result.trace.size(); ++k) {
            const auto& r = run.result.trace[k];
            by_iter << run.seed << ',' << alg << ',' << r.iter << ',' << format_double(r.objective) << ','
                    << format_double(run.log_regret[k]) << '\n';
            by_time << run.seed << ',' << alg << ',' << format_double(r.seconds) << ','
                    << format_double(run.log_regret[k]) << '\n';
        }
    }

    json runs = json::array();
    for (const auto& run : report.runs) {
        runs.push_back({{"seed", run.seed},
                        {"algorithm", to_string(run.algorithm)},
                        {"num_events", run.num_events},
                        {"final_objective", run.result.objective},
                        {"aa_accepted", run.result.aa_accepted},
                        {"aa_rejected", run.result.aa_rejected},
                        {"restarts", run.result.restarts},
                        {"seconds", run.result.trace.back().seconds}});
    }
    json algorithms = json::array();
    for (const auto a : report.algorithms) algorithms.push_back(to_string(a));
    json medians = json::object();
    for (const auto a : report.algorithms) medians[to_string(a)] = report.median_final_objective(a);
    const json manifest = {
        {"kind", "benchmark"},
        {"recipe", recipe_name},
        {"instance", instance_json(instance)},
        {"simulation_seeds", report.seeds},
        {"algorithms", std::move(algorithms)},
        {"hyperparameters", hyperparams_json(report.hp)},
        {"eps_floor", report.eps_floor},
        {"best_objective", report.best},
        {"median_final_objective", std::move(medians)},
        {"runs", std::move(runs)},
    };
    std::ofstream out = open_in_dir(dir, "manifest.json");
    out << manifest.dump(2) << '\n';
}

// ---- consistency ---------------------------------------------------------------

SyntheticInstance consistency_instance() {
    SyntheticInstance inst;
    inst.spec.num_types = 2;
    inst.spec.kernels = {KernelFamily::exponential()};
    inst.truth = ParamVector::zeros(inst.spec);
    inst.truth.mu << 0.4, 0.3;
    inst.truth.alpha[0] << 0.45, 0.15, 0.3, 0.375;
    inst.truth.beta[0] = 1.5;
    inst.domain = scaled_box(inst.spec, inst.truth);
    inst.init = ParamVector::filled(inst.spec, 0.2, 0.1, 1.0);
    inst.reg_c = 0.01;
    inst.horizon = 2000.0;
    inst.hp = benchmark_hyperparams();
    inst.attempts = 1;
    return inst;
}

ConsistencyReport run_consistency_study(const SyntheticInstance& instance, const ConsistencyOptions& options) {
    if (options.horizons.empty() || options.seeds.empty()) {
        throw ConfigError("consistency study needs at least one horizon and one seed");
    }
    if (options.iterations < 1) throw ConfigError("consistency study needs a positive iteration count");
    const double rho = spectral_radius(branching_matrix(instance.spec, instance.truth));
    if (!(rho < 1.0)) {
        throw NonStationaryError("consistency truth is not stationary", rho);
    }
    const FlatIndexMap map(instance.spec);
    const Eigen::VectorXd truth_flat = map.pack(instance.truth);

    ConsistencyReport report;
    report.horizons = options.horizons;
    const std::size_t num_seeds = options.seeds.size();
    report.cells.resize(options.horizons.size() * num_seeds);
    detail::parallel_chunks(report.cells.size(), [&](std::size_t c) {
        ConsistencyCell& cell = report.cells[c];
        cell.horizon = options.horizons[c / num_seeds];
        cell.seed = options.seeds[c % num_seeds];
        SimConfig sim;
        sim.seed = cell.seed;
        const LikelihoodProblem problem(instance.spec,
                                        simulate_cluster(instance.spec, instance.truth, cell.horizon, sim),
                                        instance.domain, instance.reg_c, options.truncation_horizon);
        cell.num_events = problem.events.size();
        HyperParams hp = HyperParams::theory_compliant(
            estimate_lipschitz(problem, instance.init, options.lbar_safety), options.gamma, options.gamma,
            options.epsilon);
        hp.max_iters = options.iterations;
        const RunResult fit = run_aa_ipalm(problem, hp, instance.init);
        cell.objective = fit.objective;
        cell.feasible = instance.domain.contains_flat(fit.flat);
        cell.relative_error = (fit.flat - truth_flat).norm() / truth_flat.norm();
    });

    for (std::size_t h = 0; h < options.horizons.size(); ++h) {
        std::vector<double> errors;
        for (std::size_t s = 0; s < num_seeds; ++s) errors.push_back(report.cells[h * num_seeds + s].relative_error);
        report.median_error.push_back(median(std::move(errors)));
    }
    return report;
}

void write_consistency_report(const ConsistencyReport& report, const SyntheticInstance& instance,
                              const ConsistencyOptions& options, const std::string& dir) {
    std::ofstream csv = open_in_dir(dir, "consistency.csv");
    csv << "horizon,seed,num_events,relative_error,objective,feasible\n";
    for (const auto& c : report.cells) {
        csv << format_double(c.horizon) << ',' << c.seed << ',' << c.num_events << ','
            << format_double(c.relative_error) << ',' << format_double(c.objective) << ','
            << (c.feasible ? 1 : 0) << '\n';
    }
    json medians = json::array();
    for (std::size_t h = 0; h < report.horizons.size(); ++h) {
        medians.push_back({{"horizon", report.horizons[h]}, {"median_relative_error", report.median_error[h]}});
    }
    const json manifest = {
        {"kind", "consistency"},
        {"instance", instance_json(instance)},
        {"horizons", options.horizons},
        {"simulation_seeds", options.seeds},
        {"iterations", options.iterations},
        {"gamma", options.gamma},
        {"epsilon", options.epsilon},
        {"lbar_safety", options.lbar_safety},
        {"truncation_horizon", options.truncation_horizon},
        {"algorithm", "aa-ipalm"},
        {"median_relative_error", std::move(medians)},
    };
    std::ofstream out = open_in_dir(dir, "manifest.json");
    out << manifest.dump(2) << '\n';
}

}  // namespace hawkes
