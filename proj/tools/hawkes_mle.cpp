// hawkes_mle: simulate, fit and benchmark multivariate Hawkes processes.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 domain error
// (non-stationary parameters, infeasible start), 3 data error.

#include "hawkes/errors.hpp"
#include "hawkes/experiments.hpp"
#include "hawkes/io.hpp"
#include "hawkes/likelihood.hpp"
#include "hawkes/model.hpp"
#include "hawkes/optim.hpp"
#include "hawkes/simulate.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace hawkes;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitDomain = 2;
constexpr int kExitData = 3;

const Eigen::IOFormat kMatrixFormat(8, 0, "  ", "\n", "  [", "]");

// Rejects noncompliant hyperparameters unless explicitly allowed; always warns.
void check_compliance(const HyperParams& hp, bool allow) {
    const auto issues = hp.compliance_issues();
    if (issues.empty()) {
        return;
    }
    for (const auto& issue : issues) {
        std::cerr << "warning: hyperparameters violate a convergence condition: " << issue << '\n';
    }
    if (!allow) {
        throw ConfigError("noncompliant hyperparameters (pass --allow-noncompliant-hp to run anyway)");
    }
}

// A missing configuration file is a usage error, not a data error.
std::string read_config_text(const std::string& path) {
    try {
        return read_text_file(path);
    } catch (const DataError& e) {
        throw ConfigError(e.what());
    }
}

RunConfig load_config(const std::string& path) { return config_from_json(read_config_text(path)); }

json load_json(const std::string& path) {
    try {
        return json::parse(read_config_text(path));
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": invalid JSON: " + e.what());
    }
}

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* key : allowed) known = known || item.key() == key;
        if (!known) throw ConfigError("unknown key '" + item.key() + "' in " + where);
    }
}

// ---- simulate ------------------------------------------------------------------

struct SimulateArgs {
    std::string config;
    std::string params;
    std::optional<double> horizon;
    std::uint64_t seed{0};
    std::string out;
    std::string method{"cluster"};
    std::size_t max_events{10'000'000};
};

int cmd_simulate(const SimulateArgs& args) {
    ModelSpec spec;
    ParamVector params;
    std::optional<double> horizon = args.horizon;
    if (!args.config.empty()) {
        const RunConfig cfg = load_config(args.config);
        spec = cfg.spec;
        params = cfg.truth.value_or(cfg.init);
        if (!horizon) horizon = cfg.horizon;
    }
    if (!args.params.empty()) {
        const ParamsDocument doc = read_params_json(args.params);
        if (!args.config.empty() && !(doc.spec == spec)) {
            throw ConfigError("--params model does not match the config model");
        }
        spec = doc.spec;
        params = doc.params;
    }
    if (args.config.empty() && args.params.empty()) {
        throw ConfigError("simulate needs --config or --params");
    }
    if (!horizon) {
        throw ConfigError("no horizon: pass --horizon or set 'horizon' in the config");
    }
    SimConfig sim;
    sim.seed = args.seed;
    sim.max_events = args.max_events;
    const EventSequence events = args.method == "thinning" ? simulate_thinning(spec, params, *horizon, sim)
                                                           : simulate_cluster(spec, params, *horizon, sim);
    write_events_csv(args.out, events);

    std::cout << "events: " << events.size() << "  horizon: " << *horizon << "  method: " << args.method << '\n';
    const auto counts = events.counts();
    const double rho = spectral_radius(branching_matrix(spec, params));
    std::cout << "spectral radius: " << rho << '\n';
    const Eigen::VectorXd mean = rho < 1.0 ? stationary_mean_intensity(spec, params)
                                           : Eigen::VectorXd::Constant(spec.num_types, std::nan(""));
    std::cout << "type  count  empirical_rate  stationary_rate\n";
    for (int i = 0; i < spec.num_types; ++i) {
        const double rate = *horizon > 0.0 ? static_cast<double>(counts[static_cast<std::size_t>(i)]) / *horizon : 0.0;
        std::cout << std::setw(4) << i << "  " << std::setw(5) << counts[static_cast<std::size_t>(i)] << "  "
                  << std::setw(14) << rate << "  " << std::setw(15) << mean[i] << '\n';
    }
    return kExitOk;
}

// ---- fit ---------------------------------------------------------------------

struct FitArgs {
    std::string events;
    std::string config;
    std::string algo;
    std::optional<int> iters;
    std::optional<double> horizon;
    std::string out;
    std::string trace;
    bool allow_noncompliant{false};
};

int cmd_fit(const FitArgs& args) {
    RunConfig cfg = load_config(args.config);
    if (!args.algo.empty()) cfg.algorithm = parse_algorithm(args.algo);
    if (args.iters) cfg.hp.max_iters = *args.iters;
    cfg.hp.validate();

    EventReadOptions read;
    read.num_types = cfg.spec.num_types;
    read.horizon = args.horizon ? args.horizon : cfg.horizon;
    EventSequence events = read_events_csv(args.events, read);
    const LikelihoodProblem problem(cfg.spec, std::move(events), cfg.domain, cfg.reg_c, cfg.truncation_horizon);

    if (!cfg.domain.contains(cfg.init)) {
        throw DomainError("initial point lies outside the parameter domain");
    }
    resolve_hyperparams(cfg, problem);
    HyperParams hp = cfg.hp;
    if (cfg.algorithm == Algorithm::kPalm) {
        hp.gamma1 = hp.gamma2 = 0.0;
    }
    if (cfg.algorithm != Algorithm::kAaIpalm) {
        hp.aa_enabled = false;  // pairing options do not apply
    }
    check_compliance(hp, args.allow_noncompliant);

    const RunResult result = run_algorithm(cfg.algorithm, problem, hp, cfg.init);
    ParamsDocument doc;
    doc.spec = cfg.spec;
    doc.params = result.params;
    doc.objective = result.objective;
    FitSummary fit;
    fit.algorithm = to_string(cfg.algorithm);
    fit.iterations = result.trace.size() - 1;
    fit.aa_accepted = result.aa_accepted;
    fit.aa_rejected = result.aa_rejected;
    fit.restarts = result.restarts;
    fit.num_events = problem.events.size();
    fit.horizon = problem.events.horizon;
    fit.reg_c = problem.reg_c;
    doc.fit = fit;
    write_params_json(args.out, doc);
    if (!args.trace.empty()) {
        write_trace_csv(args.trace, result.trace);
    }
    std::cout << "algorithm: " << fit.algorithm << "  iterations: " << fit.iterations
              << "  events: " << fit.num_events << '\n'
              << "objective: " << std::setprecision(12) << result.objective << '\n';
    if (cfg.algorithm == Algorithm::kAaIpalm) {
        std::cout << "aa accepted: " << result.aa_accepted << "  rejected: " << result.aa_rejected
                  << "  restarts: " << result.restarts << '\n';
    }
    return kExitOk;
}

// ---- benchmark -----------------------------------------------------------------

HyperParams apply_optimizer_overrides(HyperParams hp, const json& opt) {
    reject_unknown(opt, {"epsilon", "gamma", "tau", "Lbar", "omega_bar", "nu", "delta", "C1", "C2", "memory",
                         "aa_enabled", "aa_pairing"},
                   "benchmark optimizer");
    if (opt.contains("epsilon")) hp.epsilon = opt["epsilon"].get<double>();
    if (opt.contains("gamma")) hp.gamma1 = hp.gamma2 = opt["gamma"].get<double>();
    if (opt.contains("tau")) hp.tau1_override = hp.tau2_override = opt["tau"].get<double>();
    if (opt.contains("Lbar")) hp.lbar1 = hp.lbar2 = opt["Lbar"].get<double>();
    if (opt.contains("omega_bar")) hp.omega_bar = opt["omega_bar"].get<double>();
    if (opt.contains("nu")) hp.nu = opt["nu"].get<double>();
    if (opt.contains("delta")) hp.delta = opt["delta"].get<double>();
    if (opt.contains("C1")) hp.c1 = opt["C1"].get<double>();
    if (opt.contains("C2")) hp.c2 = opt["C2"].get<double>();
    if (opt.contains("memory")) hp.memory = opt["memory"].get<int>();
    if (opt.contains("aa_enabled")) hp.aa_enabled = opt["aa_enabled"].get<bool>();
    if (opt.contains("aa_pairing")) hp.aa_pairing = parse_aa_pairing(opt["aa_pairing"].get<std::string>());
    return hp;
}

int cmd_benchmark(const std::string& config_path, const std::string& out_dir, bool allow_noncompliant) {
    const json cfg = load_json(config_path);
    reject_unknown(cfg, {"recipe", "recipe_seed", "num_types", "horizon", "seeds", "iterations", "algorithms",
                         "optimizer"},
                   "benchmark config");
    try {
        const std::string name = cfg.value("recipe", std::string("exp-k10"));
        SyntheticRecipe recipe = SyntheticRecipe::by_name(name, cfg.value("recipe_seed", std::uint64_t{1}));
        if (cfg.contains("num_types")) recipe.num_types = cfg["num_types"].get<int>();
        if (cfg.contains("horizon")) recipe.horizon = cfg["horizon"].get<double>();
        const SyntheticInstance instance = generate_instance(recipe);

        BenchmarkOptions options;
        if (cfg.contains("seeds")) options.seeds = cfg["seeds"].get<std::vector<std::uint64_t>>();
        if (cfg.contains("iterations")) options.iterations = cfg["iterations"].get<int>();
        if (cfg.contains("algorithms")) {
            options.algorithms.clear();
            for (const auto& a : cfg["algorithms"]) options.algorithms.push_back(parse_algorithm(a.get<std::string>()));
        }
        HyperParams hp = instance.hp;
        if (cfg.contains("optimizer")) hp = apply_optimizer_overrides(hp, cfg["optimizer"]);
        hp.max_iters = options.iterations;
        hp.validate();
        check_compliance(hp, allow_noncompliant);

        const BenchmarkReport report = run_benchmark(instance, hp, options);
        write_benchmark_report(report, instance, out_dir, name);
        std::cout << "recipe: " << name << "  K: " << instance.spec.num_types << "  seeds: " << options.seeds.size()
                  << "  iterations: " << options.iterations << '\n';
        for (const auto a : options.algorithms) {
            std::cout << std::setw(9) << to_string(a) << "  median final objective: " << std::setprecision(12)
                      << report.median_final_objective(a) << '\n';
        }
        std::cout << "report written to " << out_dir << '\n';
    } catch (const json::exception& e) {
        throw ConfigError(std::string("benchmark config: ") + e.what());
    }
    return kExitOk;
}

int cmd_consistency(const std::string& config_path, const std::string& out_dir) {
    const json cfg = load_json(config_path);
    reject_unknown(cfg, {"horizons", "seeds", "iterations", "gamma", "epsilon", "lbar_safety", "truncation_horizon"},
                   "consistency config");
    try {
        ConsistencyOptions options;
        if (cfg.contains("horizons")) options.horizons = cfg["horizons"].get<std::vector<double>>();
        if (cfg.contains("seeds")) options.seeds = cfg["seeds"].get<std::vector<std::uint64_t>>();
        if (cfg.contains("iterations")) options.iterations = cfg["iterations"].get<int>();
        if (cfg.contains("gamma")) options.gamma = cfg["gamma"].get<double>();
        if (cfg.contains("epsilon")) options.epsilon = cfg["epsilon"].get<double>();
        if (cfg.contains("lbar_safety")) options.lbar_safety = cfg["lbar_safety"].get<double>();
        if (cfg.contains("truncation_horizon")) options.truncation_horizon = cfg["truncation_horizon"].get<double>();
        const SyntheticInstance instance = consistency_instance();
        const ConsistencyReport report = run_consistency_study(instance, options);
        write_consistency_report(report, instance, options, out_dir);
        std::cout << "horizon  median_relative_error\n";
        for (std::size_t h = 0; h < report.horizons.size(); ++h) {
            std::cout << std::setw(7) << report.horizons[h] << "  " << report.median_error[h] << '\n';
        }
        std::cout << "report written to " << out_dir << '\n';
    } catch (const json::exception& e) {
        throw ConfigError(std::string("consistency config: ") + e.what());
    }
    return kExitOk;
}

// ---- check-stationarity ----------------------------------------------------------

int cmd_check_stationarity(const std::string& params_path) {
    const ParamsDocument doc = read_params_json(params_path);
    doc.params.validate(doc.spec);
    const Eigen::MatrixXd g = branching_matrix(doc.spec, doc.params);
    const double rho = spectral_radius(g);
    std::cout << "branching matrix G:\n" << g.format(kMatrixFormat) << '\n';
    std::cout << "spectral radius: " << std::setprecision(12) << rho << '\n';
    if (!(rho < 1.0)) {
        std::cout << "not stationary (spectral radius must be < 1)\n";
        return kExitDomain;
    }
    const Eigen::VectorXd mean = stationary_mean_intensity(doc.spec, doc.params);
    std::cout << "stationary mean intensity: " << mean.transpose().format(kMatrixFormat) << '\n';
    return kExitOk;
}

// ---- ingestion ---------------------------------------------------------------------

void print_ingest_summary(const IngestSummary& s) {
    std::cout << "rows: " << s.rows << "  parsed-bad: " << s.bad << "  unmapped: " << s.unmapped
              << "  emitted: " << s.emitted << "  time offset: " << std::setprecision(15) << s.time_offset << '\n';
}

int cmd_ingest_lobster(const std::string& messages, const std::string& mapping_path, const std::string& out,
                       std::optional<double> max_bad) {
    LobsterMapping mapping = mapping_path.empty() ? LobsterMapping::standard() : read_lobster_mapping(mapping_path);
    if (max_bad) mapping.max_bad_fraction = *max_bad;
    std::ifstream in(messages, std::ios::binary);
    if (!in) throw DataError("cannot open '" + messages + "'");
    IngestSummary summary;
    const EventSequence events = ingest_lobster(in, mapping, &summary);
    write_events_csv(out, events);
    print_ingest_summary(summary);
    return kExitOk;
}

int cmd_ingest_posts(const std::string& posts, const std::string& mapping_path, const std::string& out,
                     std::optional<double> max_bad) {
    GroupMapping mapping = read_group_mapping(mapping_path);
    if (max_bad) mapping.max_bad_fraction = *max_bad;
    std::ifstream in(posts, std::ios::binary);
    if (!in) throw DataError("cannot open '" + posts + "'");
    IngestSummary summary;
    const EventSequence events = ingest_posting_log(in, mapping, &summary);
    write_events_csv(out, events);
    print_ingest_summary(summary);
    std::cout << "types: " << events.num_types << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulate and fit multivariate Hawkes processes (PALM, iPALM, AA-iPALM)"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Simulate an event stream");
    simulate->add_option("--config", sim.config, "Run configuration JSON (uses 'truth', else 'init')");
    simulate->add_option("--params", sim.params, "Parameter JSON (overrides the config parameters)");
    simulate->add_option("--horizon", sim.horizon, "Observation horizon T in seconds");
    simulate->add_option("--seed", sim.seed, "Master seed");
    simulate->add_option("--out", sim.out, "Output event CSV")->required();
    simulate->add_option("--method", sim.method, "cluster or thinning")
        ->check(CLI::IsMember({"cluster", "thinning"}));
    simulate->add_option("--max-events", sim.max_events, "Abort above this many events");

    FitArgs fit;
    auto* fitcmd = app.add_subcommand("fit", "Fit parameters by regularized maximum likelihood");
    fitcmd->add_option("--events", fit.events, "Event CSV")->required();
    fitcmd->add_option("--config", fit.config, "Run configuration JSON")->required();
    fitcmd->add_option("--algo", fit.algo, "palm, ipalm or aa-ipalm")
        ->check(CLI::IsMember({"palm", "ipalm", "aa-ipalm"}));
    fitcmd->add_option("--iters", fit.iters, "Iteration count (overrides the config)");
    fitcmd->add_option("--horizon", fit.horizon, "Observation horizon (overrides the config)");
    fitcmd->add_option("--out", fit.out, "Output parameter JSON")->required();
    fitcmd->add_option("--trace", fit.trace, "Output trace CSV");
    fitcmd->add_flag("--allow-noncompliant-hp", fit.allow_noncompliant,
                     "Run even if the hyperparameters violate the convergence conditions");

    std::string bench_config;
    std::string bench_out;
    bool bench_allow = false;
    auto* bench = app.add_subcommand("benchmark", "Compare algorithms on a synthetic recipe");
    bench->add_option("--config", bench_config, "Benchmark JSON")->required();
    bench->add_option("--out", bench_out, "Report directory")->required();
    bench->add_flag("--allow-noncompliant-hp", bench_allow,
                    "Run even if the hyperparameters violate the convergence conditions");

    std::string cons_config;
    std::string cons_out;
    auto* cons = app.add_subcommand("consistency", "Parameter error versus observation horizon");
    cons->add_option("--config", cons_config, "Consistency JSON")->required();
    cons->add_option("--out", cons_out, "Report directory")->required();

    std::string stat_params;
    auto* stat = app.add_subcommand("check-stationarity", "Print G, its spectral radius and the mean intensity");
    stat->add_option("--params", stat_params, "Parameter JSON")->required();

    std::string lob_messages;
    std::string lob_types;
    std::string lob_out;
    std::optional<double> lob_max_bad;
    auto* lob = app.add_subcommand("ingest-lobster", "Convert order-book messages to an event CSV");
    lob->add_option("--messages", lob_messages, "Message CSV")->required();
    lob->add_option("--types", lob_types, "Mapping JSON (default: standard six-type mapping)");
    lob->add_option("--out", lob_out, "Output event CSV")->required();
    lob->add_option("--max-bad-fraction", lob_max_bad, "Fail above this fraction of unparseable rows");

    std::string meme_posts;
    std::string meme_groups;
    std::string meme_out;
    std::optional<double> meme_max_bad;
    auto* meme = app.add_subcommand("ingest-memetracker", "Convert a time,group posting log to an event CSV");
    meme->add_option("--posts", meme_posts, "Posting log CSV")->required();
    meme->add_option("--groups", meme_groups, "Group mapping JSON")->required();
    meme->add_option("--out", meme_out, "Output event CSV")->required();
    meme->add_option("--max-bad-fraction", meme_max_bad, "Fail above this fraction of unparseable rows");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(sim);
        if (fitcmd->parsed()) return cmd_fit(fit);
        if (bench->parsed()) return cmd_benchmark(bench_config, bench_out, bench_allow);
        if (cons->parsed()) return cmd_consistency(cons_config, cons_out);
        if (stat->parsed()) return cmd_check_stationarity(stat_params);
        if (lob->parsed()) return cmd_ingest_lobster(lob_messages, lob_types, lob_out, lob_max_bad);
        if (meme->parsed()) return cmd_ingest_posts(meme_posts, meme_groups, meme_out, meme_max_bad);
    } catch (const NonStationaryError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDomain;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return kExitDomain;
    } catch (const CapacityError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDomain;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
