#include "hawkes/optim.hpp"

#include "hawkes/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <sstream>
#include <utility>

namespace hawkes {

std::string to_string(Algorithm algorithm) {
    switch (algorithm) {
        case Algorithm::kPalm: return "palm";
        case Algorithm::kIpalm: return "ipalm";
        case Algorithm::kAaIpalm: return "aa-ipalm";
    }
    return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
    if (name == "palm") return Algorithm::kPalm;
    if (name == "ipalm") return Algorithm::kIpalm;
    if (name == "aa-ipalm") return Algorithm::kAaIpalm;
    throw ConfigError("unknown algorithm '" + std::string(name) +
                      "' (expected palm, ipalm or aa-ipalm)");
}

std::string to_string(StepKind kind) {
    switch (kind) {
        case StepKind::kInit: return "init";
        case StepKind::kPalm: return "palm";
        case StepKind::kIpalm: return "ipalm";
        case StepKind::kAaAccepted: return "aa-accepted";
        case StepKind::kAaRejected: return "aa-rejected";
    }
    return "unknown";
}

StepKind parse_step_kind(std::string_view name) {
    if (name == "init") return StepKind::kInit;
    if (name == "palm") return StepKind::kPalm;
    if (name == "ipalm") return StepKind::kIpalm;
    if (name == "aa-accepted") return StepKind::kAaAccepted;
    if (name == "aa-rejected") return StepKind::kAaRejected;
    throw DataError("unknown step kind '" + std::string(name) + "'");
}

std::string to_string(AaPairing pairing) {
    switch (pairing) {
        case AaPairing::kDuplicate: return "duplicate";
        case AaPairing::kAnchored: return "anchored";
        case AaPairing::kVerbatim: return "verbatim";
    }
    return "unknown";
}

AaPairing parse_aa_pairing(std::string_view name) {
    if (name == "duplicate") return AaPairing::kDuplicate;
    if (name == "anchored") return AaPairing::kAnchored;
    if (name == "verbatim") return AaPairing::kVerbatim;
    throw ConfigError("unknown AA pairing '" + std::string(name) +
                      "' (expected duplicate, anchored or verbatim)");
}

// ---------------------------------------------------------------------------
// Hyperparameters

namespace {

double step_formula(double gamma, double lbar) {
    return 2.0 * (1.0 - gamma) / ((1.0 + gamma) * lbar);
}

double delta_formula(double gamma, double lbar, double epsilon) {
    return gamma * lbar / (2.0 * (1.0 - epsilon - gamma));
}

}  // namespace

double HyperParams::formula_tau1() const { return step_formula(gamma1, lbar1); }
double HyperParams::formula_tau2() const { return step_formula(gamma2, lbar2); }
double HyperParams::delta1() const { return delta_formula(gamma1, lbar1, epsilon); }
double HyperParams::delta2() const { return delta_formula(gamma2, lbar2, epsilon); }

double HyperParams::inverse_h_bound() const {
    return 3.0 * std::pow((1.0 + omega_bar + nu) / nu, memory) - 2.0;
}

double HyperParams::h_bound(double dimension) const {
    return std::pow(inverse_h_bound(), dimension - 1.0) / std::pow(omega_bar, memory);
}

void HyperParams::validate() const {
    const auto fail = [](const std::string& what) { throw ConfigError("optimizer: " + what); };
    if (!(epsilon > 0.0 && epsilon < 0.5)) fail("epsilon must lie in (0, 1/2)");
    if (!(gamma1 >= 0.0 && gamma1 < 1.0 - epsilon)) fail("gamma1 must lie in [0, 1 - epsilon)");
    if (!(gamma2 >= 0.0 && gamma2 < 1.0 - epsilon)) fail("gamma2 must lie in [0, 1 - epsilon)");
    if (!(lbar1 > 0.0) || !std::isfinite(lbar1)) fail("Lbar1 must be positive and finite");
    if (!(lbar2 > 0.0) || !std::isfinite(lbar2)) fail("Lbar2 must be positive and finite");
    if (tau1_override && (!(*tau1_override > 0.0) || !std::isfinite(*tau1_override))) {
        fail("tau1 must be positive and finite");
    }
    if (tau2_override && (!(*tau2_override > 0.0) || !std::isfinite(*tau2_override))) {
        fail("tau2 must be positive and finite");
    }
    if (!(omega_bar > 0.0 && omega_bar < 1.0)) fail("omega_bar must lie in (0, 1)");
    if (!(nu > 0.0 && nu < 1.0)) fail("nu must lie in (0, 1)");
    if (!(delta >= 0.0) || !std::isfinite(delta)) fail("delta must be finite and nonnegative");
    if (!(c1 >= 1.0)) fail("C1 must be >= 1");
    if (!(c2 >= 1.0)) fail("C2 must be >= 1");
    if (memory < 1) fail("memory must be a positive integer");
    if (max_iters < 1) fail("max_iters must be a positive integer");
}

std::vector<std::string> HyperParams::compliance_issues() const {
    std::vector<std::string> issues;
    const double gamma_cap = 1.0 - 2.0 * epsilon;
    const auto describe = [](const char* what, double value, const char* rel, double limit) {
        std::ostringstream os;
        os << what << " = " << value << ' ' << rel << ' ' << limit;
        return os.str();
    };
    if (gamma1 > gamma_cap) issues.push_back(describe("gamma1", gamma1, "exceeds 1 - 2 epsilon =", gamma_cap));
    if (gamma2 > gamma_cap) issues.push_back(describe("gamma2", gamma2, "exceeds 1 - 2 epsilon =", gamma_cap));
    if (tau1_override && *tau1_override > formula_tau1()) {
        issues.push_back(describe("tau1", *tau1_override, "exceeds the step-size formula value", formula_tau1()));
    }
    if (tau2_override && *tau2_override > formula_tau2()) {
        issues.push_back(describe("tau2", *tau2_override, "exceeds the step-size formula value", formula_tau2()));
    }
    if (aa_enabled && aa_pairing == AaPairing::kVerbatim && (gamma1 > 0.0 || gamma2 > 0.0)) {
        issues.emplace_back(
            "aa_pairing = verbatim with nonzero momentum does not keep the Lyapunov function "
            "nonincreasing (use duplicate or anchored)");
    }
    const double needed = std::max(delta1(), delta2());
    if (delta < needed) {
        issues.push_back(describe("delta", delta, "is below max(delta1, delta2) =", needed));
    }
    return issues;
}

HyperParams HyperParams::theory_compliant(const LipschitzBounds& bounds, double gamma1,
                                          double gamma2, double epsilon) {
    HyperParams hp;
    hp.epsilon = epsilon;
    hp.gamma1 = gamma1;
    hp.gamma2 = gamma2;
    hp.lbar1 = bounds.block1;
    hp.lbar2 = bounds.block2;
    hp.delta = std::max(hp.delta1(), hp.delta2());
    hp.aa_pairing = AaPairing::kDuplicate;
    return hp;
}

double powell_phi(double eta, double omega_bar) {
    if (std::abs(eta) >= omega_bar) {
        return 1.0;
    }
    const double sign = eta >= 0.0 ? 1.0 : -1.0;
    return (1.0 - sign * omega_bar) / (1.0 - eta);
}

// ---------------------------------------------------------------------------
// iPALM map

namespace {

struct Context {
    const LikelihoodProblem& problem;
    const HyperParams& hp;
    FlatIndexMap map;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
    double tau1;
    double tau2;

    Context(const LikelihoodProblem& p, const HyperParams& h)
        : problem(p),
          hp(h),
          map(p.spec),
          lower(p.domain.flat_lower()),
          upper(p.domain.flat_upper()),
          tau1(h.tau1()),
          tau2(h.tau2()) {}

    [[nodiscard]] Eigen::Index dim() const { return map.size(); }
};

// Map image plus the objective and full gradient at the current half of u.
struct MapOutput {
    Eigen::VectorXd next;
    double value{0.0};
    Eigen::VectorXd gradient;
};

MapOutput apply_map(const Context& ctx, const Eigen::Ref<const Eigen::VectorXd>& u) {
    const Eigen::Index p = ctx.dim();
    const Eigen::Index b1 = ctx.map.block1_size();
    const Eigen::Index b2 = ctx.map.block2_size();
    const auto current = u.head(p);
    const auto previous = u.tail(p);

    MapOutput out;
    Evaluation first = evaluate_regularized(ctx.problem, current, kEverything);
    out.value = first.value;
    out.gradient = std::move(first.gradient);

    Eigen::VectorXd middle = current;
    middle.head(b1) = (current.head(b1) + ctx.tau1 * out.gradient.head(b1) +
                       ctx.hp.gamma1 * (current.head(b1) - previous.head(b1)))
                          .cwiseMax(ctx.lower.head(b1))
                          .cwiseMin(ctx.upper.head(b1));

    const Eigen::VectorXd g2 =
        evaluate_regularized(ctx.problem, middle, kGradBeta).gradient.tail(b2);
    middle.tail(b2) = (current.tail(b2) + ctx.tau2 * g2 +
                       ctx.hp.gamma2 * (current.tail(b2) - previous.tail(b2)))
                          .cwiseMax(ctx.lower.tail(b2))
                          .cwiseMin(ctx.upper.tail(b2));

    out.next.resize(2 * p);
    out.next.head(p) = middle;
    out.next.tail(p) = current;
    return out;
}

double lyapunov_from(const Context& ctx, double objective,
                     const Eigen::Ref<const Eigen::VectorXd>& u) {
    const Eigen::Index p = ctx.dim();
    const Eigen::Index b1 = ctx.map.block1_size();
    const Eigen::VectorXd diff = u.head(p) - u.tail(p);
    return -objective + 0.5 * ctx.hp.delta1() * diff.head(b1).squaredNorm() +
           0.5 * ctx.hp.delta2() * diff.tail(ctx.map.block2_size()).squaredNorm();
}

void check_state(const Context& ctx, const Eigen::Ref<const Eigen::VectorXd>& u) {
    const Eigen::Index p = ctx.dim();
    if (u.size() != 2 * p) {
        throw DomainError("optimizer state has the wrong dimension");
    }
    if (!ctx.problem.domain.contains_flat(u.head(p)) ||
        !ctx.problem.domain.contains_flat(u.tail(p))) {
        throw DomainError("optimizer state lies outside the parameter domain");
    }
}

Eigen::VectorXd initial_state(const Context& ctx, const ParamVector& theta0) {
    const Eigen::VectorXd x = ctx.map.pack(theta0);
    if (!ctx.problem.domain.contains_flat(x)) {
        throw DomainError("initial point lies outside the parameter domain");
    }
    Eigen::VectorXd u(2 * x.size());
    u << x, x;
    return u;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

RunResult finish(const Context& ctx, const Eigen::VectorXd& u, std::vector<TraceRecord> trace) {
    RunResult result;
    result.flat = u.head(ctx.dim());
    result.params = ctx.map.unpack(result.flat);
    result.objective = trace.back().objective;
    result.trace = std::move(trace);
    return result;
}

RunResult run_inertial(const LikelihoodProblem& problem, const HyperParams& hp,
                       const ParamVector& theta0, const RunOptions& options, StepKind kind) {
    hp.validate();
    const Context ctx(problem, hp);
    const auto start = Clock::now();
    Eigen::VectorXd u = initial_state(ctx, theta0);
    OptimizerState state;
    std::vector<TraceRecord> trace;
    trace.reserve(static_cast<std::size_t>(hp.max_iters) + 1);
    StepKind how = StepKind::kInit;
    for (std::size_t k = 0;; ++k) {
        MapOutput out = apply_map(ctx, u);
        trace.push_back({k, out.value, (out.next - u).norm(), how, lyapunov_from(ctx, out.value, u),
                         seconds_since(start)});
        if (options.observer) {
            state.iter = k;
            state.u = u;
            options.observer(state);
        }
        if (k == static_cast<std::size_t>(hp.max_iters)) {
            break;
        }
        u = std::move(out.next);
        how = kind;
    }
    return finish(ctx, u, std::move(trace));
}

}  // namespace

Eigen::VectorXd ipalm_map(const LikelihoodProblem& problem, const HyperParams& hp,
                          const Eigen::Ref<const Eigen::VectorXd>& u) {
    const Context ctx(problem, hp);
    check_state(ctx, u);
    return apply_map(ctx, u).next;
}

double lyapunov_value(const LikelihoodProblem& problem, const HyperParams& hp,
                      const ParamVector& theta_k, const ParamVector& theta_prev) {
    const Context ctx(problem, hp);
    Eigen::VectorXd u(2 * ctx.dim());
    u << ctx.map.pack(theta_k), ctx.map.pack(theta_prev);
    check_state(ctx, u);
    const double objective = evaluate_regularized(problem, u.head(ctx.dim()), kValue).value;
    return lyapunov_from(ctx, objective, u);
}

RunResult run_palm(const LikelihoodProblem& problem, const HyperParams& hp,
                   const ParamVector& theta0, const RunOptions& options) {
    HyperParams plain = hp;
    plain.gamma1 = 0.0;
    plain.gamma2 = 0.0;
    return run_inertial(problem, plain, theta0, options, StepKind::kPalm);
}

RunResult run_ipalm(const LikelihoodProblem& problem, const HyperParams& hp,
                    const ParamVector& theta0, const RunOptions& options) {
    return run_inertial(problem, hp, theta0, options, StepKind::kIpalm);
}

// ---------------------------------------------------------------------------
// AA-iPALM

RunResult run_aa_ipalm(const LikelihoodProblem& problem, const HyperParams& hp,
                       const ParamVector& theta0, const RunOptions& options) {
    hp.validate();
    const Context ctx(problem, hp);
    const auto start = Clock::now();
    const Eigen::Index p = ctx.dim();
    const Eigen::Index n = 2 * p;
    const double guard = 0.5 * (hp.delta + hp.epsilon * hp.delta);

    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t restarts = 0;
    std::vector<TraceRecord> trace;
    trace.reserve(static_cast<std::size_t>(hp.max_iters) + 1);

    // k = 0: u^0 = (theta0, theta0); u^1 = u~^1 = H_iPALM(u^0).
    Eigen::VectorXd u_prev = initial_state(ctx, theta0);
    MapOutput out = apply_map(ctx, u_prev);
    trace.push_back({0, out.value, (out.next - u_prev).norm(), StepKind::kInit,
                     lyapunov_from(ctx, out.value, u_prev), seconds_since(start)});

    OptimizerState state;
    state.h = Eigen::MatrixXd::Identity(n, n);
    state.cached_map = out.next;
    if (options.observer) {
        state.u = u_prev;
        options.observer(state);
    }
    Eigen::VectorXd u = out.next;
    Eigen::VectorXd u_tilde = out.next;
    StepKind how = StepKind::kIpalm;
    std::deque<std::pair<std::size_t, Eigen::VectorXd>> window;  // (index j, s^_j)

    for (std::size_t k = 1; hp.max_iters > 0; ++k) {
        MapOutput current = apply_map(ctx, u);  // u^ = H_iPALM(u^k), L and grad at theta^k
        trace.push_back({k, current.value, (current.next - u).norm(), how,
                         lyapunov_from(ctx, current.value, u), seconds_since(start)});
        if (k == static_cast<std::size_t>(hp.max_iters)) {
            state.iter = k;
            state.u = u;
            break;
        }

        // Secant pair from (u~^k, u^{k-1}).
        state.restarted = false;
        state.memory_count += 1;
        const Eigen::VectorXd s = u_tilde - u_prev;
        const Eigen::VectorXd map_tilde =
            (u_tilde == u) ? current.next : apply_map(ctx, u_tilde).next;
        const Eigen::VectorXd y = s - (map_tilde - state.cached_map);
        const Eigen::VectorXd g = u_prev - state.cached_map;

        const std::size_t lowest = k >= static_cast<std::size_t>(state.memory_count)
                                       ? k - static_cast<std::size_t>(state.memory_count)
                                       : 0;
        while (!window.empty() && window.front().first < lowest) {
            window.pop_front();
        }
        Eigen::VectorXd s_hat = s;
        for (const auto& [j, sj] : window) {
            if (j + 2 <= k) {
                s_hat -= (sj.dot(s) / sj.squaredNorm()) * sj;
            }
        }

        const auto restart = [&] {
            state.memory_count = 0;
            s_hat = s;
            state.h.setIdentity();
            window.clear();
            state.restarted = true;
            ++restarts;
        };
        if (state.memory_count == hp.memory + 1 || s_hat.norm() < hp.nu * s.norm()) {
            restart();
        }

        const double s_hat_sq = s_hat.squaredNorm();
        if (s_hat_sq > 0.0) {
            for (int attempt = 0; attempt < 2; ++attempt) {
                const Eigen::RowVectorXd sh = s_hat.transpose() * state.h;  // s^T H
                const double omega = powell_phi(sh.dot(y) / s_hat_sq, hp.omega_bar);
                const Eigen::VectorXd y_tilde = omega * y - (1.0 - omega) * g;
                const double denom = sh.dot(y_tilde);
                if (std::abs(denom) >= 1e-300 && std::isfinite(denom)) {
                    state.h.noalias() += ((s - state.h * y_tilde) / denom) * sh;
                    break;
                }
                if (!state.restarted) {
                    restart();
                } else {
                    break;  // H stays the identity
                }
            }
        } else if (!state.restarted) {
            restart();
        }
        window.emplace_back(k - 1, s_hat);

        // Candidates.
        const Eigen::VectorXd& u_hat = current.next;
        Eigen::VectorXd candidate = u - state.h * (u - u_hat);

        bool accept = hp.aa_enabled;
        if (accept) {
            const auto theta_c = candidate.head(p);
            accept = current.gradient.norm() <= hp.c1 * (u_hat - u).norm() &&
                     problem.domain.contains_flat(theta_c) &&
                     (candidate.tail(p) - u.tail(p)).norm() <= hp.c2 * (u_hat.tail(p) - u.tail(p)).norm();
            if (accept) {
                const double gain =
                    evaluate_regularized(problem, theta_c, kValue).value - current.value;
                accept = std::isfinite(gain) &&
                         gain >= guard * (theta_c - u.head(p)).squaredNorm();
            }
        }

        u_prev = u;
        state.cached_map = u_hat;
        // The secant pair needs H_iPALM(u~), which is only defined on the domain.
        u_tilde.head(p) = project_onto_box(problem.domain, candidate.head(p));
        u_tilde.tail(p) = project_onto_box(problem.domain, candidate.tail(p));
        if (accept) {
            ++accepted;
            how = StepKind::kAaAccepted;
            if (hp.aa_pairing == AaPairing::kDuplicate) {
                candidate.tail(p) = candidate.head(p);
            } else if (hp.aa_pairing == AaPairing::kAnchored) {
                candidate.tail(p) = u.head(p);
            } else {
                candidate.tail(p) = u_tilde.tail(p);  // projected second half
            }
            u = std::move(candidate);
        } else {
            if (hp.aa_enabled) {
                ++rejected;
            }
            how = hp.aa_enabled ? StepKind::kAaRejected : StepKind::kIpalm;
            u = current.next;
        }

        if (options.observer) {
            state.iter = k;
            state.u = u;
            state.s_window.clear();
            for (const auto& entry : window) {
                state.s_window.push_back(entry.second);
            }
            options.observer(state);
        }
    }

    RunResult result = finish(ctx, u, std::move(trace));
    result.aa_accepted = accepted;
    result.aa_rejected = rejected;
    result.restarts = restarts;
    return result;
}

RunResult run_algorithm(Algorithm algorithm, const LikelihoodProblem& problem,
                        const HyperParams& hp, const ParamVector& theta0,
                        const RunOptions& options) {
    switch (algorithm) {
        case Algorithm::kPalm: return run_palm(problem, hp, theta0, options);
        case Algorithm::kIpalm: return run_ipalm(problem, hp, theta0, options);
        case Algorithm::kAaIpalm: return run_aa_ipalm(problem, hp, theta0, options);
    }
    throw ConfigError("unknown algorithm");
}

ResidualSummary residual_diagnostics(const std::vector<TraceRecord>& trace, std::size_t k0) {
    if (trace.empty()) {
        throw ConfigError("residual diagnostics need a nonempty trace");
    }
    if (k0 == 0) {
        throw ConfigError("residual diagnostics need a positive base checkpoint");
    }
    const std::size_t last = trace.size() - 1;
    ResidualSummary summary;
    std::size_t scanned = 0;
    double best = trace.front().residual * trace.front().residual;
    for (const std::size_t mult : {1u, 2u, 4u}) {
        const std::size_t target = std::min(k0 * mult, last);
        for (; scanned <= target; ++scanned) {
            best = std::min(best, trace[scanned].residual * trace[scanned].residual);
        }
        const double iterations = static_cast<double>(std::max<std::size_t>(target, 1));
        if (!summary.checkpoints.empty() && best > summary.checkpoints.back().min_residual_sq) {
            summary.nonincreasing = false;
        }
        summary.checkpoints.push_back({target, best, iterations * best});
    }
    return summary;
}

}  // namespace hawkes
