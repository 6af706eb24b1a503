#pragma once

// Block-alternating projected gradient ascent on the regularized log-likelihood:
// PALM, inertial PALM (iPALM), and Anderson-accelerated iPALM (AA-iPALM) with
// restart checking, Powell-type regularization, and a four-condition safeguard.

#include "hawkes/likelihood.hpp"
#include "hawkes/model.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hawkes {

enum class Algorithm { kPalm, kIpalm, kAaIpalm };

[[nodiscard]] std::string to_string(Algorithm algorithm);
/// Accepts "palm", "ipalm", "aa-ipalm". Throws ConfigError otherwise.
[[nodiscard]] Algorithm parse_algorithm(std::string_view name);

/// Next state after an accepted AA candidate u~ = (theta~, u~_2):
///   kDuplicate -> (theta~, theta~)   no momentum carried into the next sweep
///   kAnchored  -> (theta~, theta^k)  momentum along the accepted jump
///   kVerbatim  -> (theta~, u~_2)     the candidate as is
/// The first two keep the Lyapunov function nonincreasing; the last only does so
/// when gamma1 = gamma2 = 0.
enum class AaPairing { kDuplicate, kAnchored, kVerbatim };

[[nodiscard]] std::string to_string(AaPairing pairing);
[[nodiscard]] AaPairing parse_aa_pairing(std::string_view name);

struct HyperParams {
    double epsilon{0.05};
    double gamma1{0.0};
    double gamma2{0.0};
    double lbar1{1.0};
    double lbar2{1.0};
    /// Explicit step sizes; when unset the step-size formula is used.
    std::optional<double> tau1_override;
    std::optional<double> tau2_override;
    double omega_bar{0.1};
    double nu{0.1};
    double delta{0.0};
    double c1{1e8};
    double c2{1e8};
    int memory{20};
    int max_iters{500};
    /// When false AA-iPALM never takes the accelerated candidate.
    bool aa_enabled{true};
    /// How an accepted AA candidate theta~ becomes the next doubled state.
    AaPairing aa_pairing{AaPairing::kVerbatim};

    /// tau = 2 (1 - gamma) / ((1 + gamma) Lbar).
    [[nodiscard]] double formula_tau1() const;
    [[nodiscard]] double formula_tau2() const;
    [[nodiscard]] double tau1() const { return tau1_override.value_or(formula_tau1()); }
    [[nodiscard]] double tau2() const { return tau2_override.value_or(formula_tau2()); }
    /// delta_i = gamma_i Lbar_i / (2 (1 - epsilon - gamma_i)).
    [[nodiscard]] double delta1() const;
    [[nodiscard]] double delta2() const;
    /// sigma_H^- = 3 ((1 + omega_bar + nu) / nu)^memory - 2.
    [[nodiscard]] double inverse_h_bound() const;
    /// sigma_H^+ with the ambient dimension n supplied by the caller.
    [[nodiscard]] double h_bound(double dimension) const;

    /// Throws ConfigError for values that make the iteration ill-defined.
    void validate() const;
    /// Human-readable list of violated convergence conditions (empty if compliant).
    [[nodiscard]] std::vector<std::string> compliance_issues() const;
    [[nodiscard]] bool compliant() const { return compliance_issues().empty(); }

    /// Hyperparameters satisfying every convergence condition for the given bounds:
    /// formula step sizes, delta = max(delta1, delta2), duplicate AA pairing.
    static HyperParams theory_compliant(const LipschitzBounds& bounds, double gamma1,
                                        double gamma2, double epsilon = 0.05);
};

enum class StepKind { kInit, kPalm, kIpalm, kAaAccepted, kAaRejected };

[[nodiscard]] std::string to_string(StepKind kind);
[[nodiscard]] StepKind parse_step_kind(std::string_view name);

/// One record per iterate u^k. `residual` is the fixed-point residual
/// ||H_iPALM(u^k) - u^k||_2; `step_kind` says how u^k was produced.
struct TraceRecord {
    std::size_t iter{0};
    double objective{0.0};
    double residual{0.0};
    StepKind step_kind{StepKind::kInit};
    double lyapunov{0.0};
    double seconds{0.0};
};

/// Mutable state of one run. For PALM/iPALM only `u` is meaningful.
struct OptimizerState {
    std::size_t iter{0};
    Eigen::VectorXd u;                      // (theta^k, previous), length 2P
    Eigen::MatrixXd h;                      // approximate inverse Jacobian, 2P x 2P
    int memory_count{0};                    // m_k
    std::vector<Eigen::VectorXd> s_window;  // orthogonalized directions in the window
    Eigen::VectorXd cached_map;             // H_iPALM(u^{k-1})
    bool restarted{false};                  // restart fired at this iteration
};

struct RunOptions {
    /// Called once per iteration after the state is updated.
    std::function<void(const OptimizerState&)> observer;
};

struct RunResult {
    ParamVector params;
    Eigen::VectorXd flat;
    std::vector<TraceRecord> trace;
    std::size_t aa_accepted{0};
    std::size_t aa_rejected{0};
    std::size_t restarts{0};
    double objective{0.0};
};

/// One iPALM sweep on the doubled state u = (theta', theta): projected gradient
/// step with inertia on (mu, alpha), then on beta using the updated (mu, alpha).
/// Returns (theta'', theta').
[[nodiscard]] Eigen::VectorXd ipalm_map(const LikelihoodProblem& problem, const HyperParams& hp,
                                        const Eigen::Ref<const Eigen::VectorXd>& u);

/// Phi_k = -L^reg(theta_k) + delta1/2 ||d(mu, alpha)||^2 + delta2/2 ||d beta||^2.
[[nodiscard]] double lyapunov_value(const LikelihoodProblem& problem, const HyperParams& hp,
                                    const ParamVector& theta_k, const ParamVector& theta_prev);

/// Powell-type damping: 1 if |eta| >= omega_bar, else (1 - sign(eta) omega_bar) / (1 - eta),
/// with sign(0) = 1.
[[nodiscard]] double powell_phi(double eta, double omega_bar);

[[nodiscard]] RunResult run_palm(const LikelihoodProblem& problem, const HyperParams& hp,
                                 const ParamVector& theta0, const RunOptions& options = {});
[[nodiscard]] RunResult run_ipalm(const LikelihoodProblem& problem, const HyperParams& hp,
                                  const ParamVector& theta0, const RunOptions& options = {});
[[nodiscard]] RunResult run_aa_ipalm(const LikelihoodProblem& problem, const HyperParams& hp,
                                     const ParamVector& theta0, const RunOptions& options = {});
[[nodiscard]] RunResult run_algorithm(Algorithm algorithm, const LikelihoodProblem& problem,
                                      const HyperParams& hp, const ParamVector& theta0,
                                      const RunOptions& options = {});

struct ResidualCheckpoint {
    std::size_t iterations{0};    // K
    double min_residual_sq{0.0};  // min_{k <= K} residual_k^2
    double scaled{0.0};           // K * min_residual_sq; bounded under an O(1/K) rate
};

struct ResidualSummary {
    std::vector<ResidualCheckpoint> checkpoints;
    bool nonincreasing{true};
};

/// Prefix-minimum squared residual at K0, 2 K0, 4 K0 (clipped to the trace length).
[[nodiscard]] ResidualSummary residual_diagnostics(const std::vector<TraceRecord>& trace,
                                                   std::size_t k0);

}  // namespace hawkes
