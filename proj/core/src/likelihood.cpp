#include "hawkes/likelihood.hpp"

#include "hawkes/errors.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

namespace hawkes {

LikelihoodProblem::LikelihoodProblem(ModelSpec spec_in, EventSequence events_in,
                                     BoxDomain domain_in, double reg_c_in,
                                     double truncation_horizon_in)
    : spec(std::move(spec_in)),
      events(std::move(events_in)),
      domain(std::move(domain_in)),
      reg_c(reg_c_in),
      truncation_horizon(truncation_horizon_in) {
    spec.validate();
    domain.validate(spec);
    events.validate();
    if (events.num_types != spec.num_types) {
        throw DataError("event sequence type count does not match the model");
    }
    if (!(events.horizon > 0.0)) {
        throw DataError("likelihood needs a positive observation horizon");
    }
    if (!(reg_c >= 0.0) || !std::isfinite(reg_c)) {
        throw ConfigError("regularization coefficient must be finite and nonnegative");
    }
    if (!(truncation_horizon > 0.0)) {
        throw ConfigError("truncation horizon must be positive");
    }
}

namespace {

constexpr std::size_t kChunkSize = 512;
constexpr std::size_t kParallelThreshold = 4096;

// Kernel value and beta-derivative without per-call validation.
struct FastKernel {
    KernelKind kind;
    double beta;
    double cutoff;

    [[nodiscard]] double value(double lag) const {
        if (kind == KernelKind::kExponential) {
            return std::exp(-beta * lag);
        }
        return std::exp(-beta * std::log(lag + cutoff));
    }

    // Returns phi and writes d phi / d beta.
    double value_and_dbeta(double lag, double& dbeta) const {
        if (kind == KernelKind::kExponential) {
            const double v = std::exp(-beta * lag);
            dbeta = -lag * v;
            return v;
        }
        const double lw = std::log(lag + cutoff);
        const double v = std::exp(-beta * lw);
        dbeta = -lw * v;
        return v;
    }
};

std::vector<FastKernel> make_kernels(const ModelSpec& spec, const ParamVector& params) {
    std::vector<FastKernel> out;
    out.reserve(spec.kernels.size());
    for (int m = 0; m < spec.num_kernels(); ++m) {
        check_beta(spec.kernels[m], params.beta[m]);
        out.push_back({spec.kernels[m].kind, params.beta[m], spec.kernels[m].cutoff});
    }
    return out;
}

[[noreturn]] void throw_nonpositive_intensity(double lambda, double t, int type) {
    std::ostringstream os;
    os << "internal invariant violated: intensity of type " << type << " at t = " << t
       << " is " << lambda << " (must be positive inside the domain)";
    throw std::logic_error(os.str());
}

void check_shape(const LikelihoodProblem& problem, const ParamVector& params) {
    const int k = problem.spec.num_types;
    if (params.mu.size() != k || params.beta.size() != problem.spec.num_kernels() ||
        static_cast<int>(params.alpha.size()) != problem.spec.num_kernels()) {
        throw DomainError("parameter vector shape does not match the problem");
    }
}

}  // namespace

double intensity_at(const LikelihoodProblem& problem, const ParamVector& params, double t,
                    int type) {
    check_shape(problem, params);
    if (!(t >= 0.0 && t <= problem.events.horizon)) {
        std::ostringstream os;
        os << "intensity requested at t = " << t << " outside [0, " << problem.events.horizon
           << "]";
        throw DomainError(os.str());
    }
    if (type < 0 || type >= problem.spec.num_types) {
        throw DomainError("intensity requested for an unknown event type");
    }
    const auto kernels = make_kernels(problem.spec, params);
    const auto& times = problem.events.times;
    const auto& types = problem.events.types;
    double lambda = params.mu[type];
    const auto end = std::lower_bound(times.begin(), times.end(), t);
    for (auto it = times.begin(); it != end; ++it) {
        const double lag = t - *it;
        if (lag > problem.truncation_horizon) {
            continue;
        }
        const int j = types[static_cast<std::size_t>(it - times.begin())];
        for (std::size_t m = 0; m < kernels.size(); ++m) {
            lambda += params.alpha[m](type, j) * kernels[m].value(lag);
        }
    }
    return lambda;
}

Evaluation evaluate_log_likelihood(const LikelihoodProblem& problem, const ParamVector& params,
                                   unsigned parts) {
    check_shape(problem, params);
    const ModelSpec& spec = problem.spec;
    const FlatIndexMap map(spec);
    const int k = spec.num_types;
    const int num_kernels = spec.num_kernels();
    const auto kernels = make_kernels(spec, params);
    const auto& times = problem.events.times;
    const auto& types = problem.events.types;
    const double horizon = problem.events.horizon;
    const double cut = problem.truncation_horizon;
    const bool want_value = (parts & kValue) != 0;
    const bool want_g1 = (parts & kGradMuAlpha) != 0;
    const bool want_g2 = (parts & kGradBeta) != 0;
    const std::size_t n = times.size();
    const std::size_t pairs = static_cast<std::size_t>(k) * static_cast<std::size_t>(num_kernels);

    // Compensator sums per (source type j, kernel m).
    std::vector<double> comp(pairs, 0.0);
    std::vector<double> comp_db(pairs, 0.0);
    for (std::size_t e = 0; e < n; ++e) {
        const double remaining = horizon - times[e];
        const auto j = static_cast<std::size_t>(types[e]);
        for (int m = 0; m < num_kernels; ++m) {
            const auto& family = spec.kernels[m];
            comp[j * num_kernels + m] += kernel_antiderivative(family, remaining, params.beta[m]);
            if (want_g2) {
                comp_db[j * num_kernels + m] +=
                    kernel_antideriv_dbeta(family, remaining, params.beta[m]);
            }
        }
    }

    const std::size_t num_chunks = (n + kChunkSize - 1) / kChunkSize;
    std::vector<Evaluation> partial(num_chunks);
    const auto work = [&](std::size_t chunk) {
        Evaluation& out = partial[chunk];
        out.gradient = Eigen::VectorXd::Zero(map.size());
        std::vector<double> excite(pairs);
        std::vector<double> excite_db(pairs);
        const std::size_t first = chunk * kChunkSize;
        const std::size_t last = std::min(n, first + kChunkSize);
        for (std::size_t e = first; e < last; ++e) {
            const double t = times[e];
            const int i = types[e];
            std::fill(excite.begin(), excite.end(), 0.0);
            if (want_g2) {
                std::fill(excite_db.begin(), excite_db.end(), 0.0);
            }
            for (std::size_t s = e; s-- > 0;) {
                const double lag = t - times[s];
                if (lag == 0.0) {
                    continue;  // simultaneous events do not excite each other
                }
                if (lag > cut) {
                    break;
                }
                const auto base = static_cast<std::size_t>(types[s]) * num_kernels;
                for (int m = 0; m < num_kernels; ++m) {
                    if (want_g2) {
                        double db = 0.0;
                        excite[base + m] += kernels[m].value_and_dbeta(lag, db);
                        excite_db[base + m] += db;
                    } else {
                        excite[base + m] += kernels[m].value(lag);
                    }
                }
            }
            double lambda = params.mu[i];
            for (int j = 0; j < k; ++j) {
                for (int m = 0; m < num_kernels; ++m) {
                    lambda += params.alpha[m](i, j) * excite[j * num_kernels + m];
                }
            }
            if (!(lambda > 0.0) || !std::isfinite(lambda)) {
                throw_nonpositive_intensity(lambda, t, i);
            }
            if (want_value) {
                out.value += std::log(lambda);
            }
            const double inv = 1.0 / lambda;
            if (want_g1) {
                out.gradient[map.mu(i)] += inv;
                for (int m = 0; m < num_kernels; ++m) {
                    for (int j = 0; j < k; ++j) {
                        out.gradient[map.alpha(m, i, j)] += excite[j * num_kernels + m] * inv;
                    }
                }
            }
            if (want_g2) {
                for (int m = 0; m < num_kernels; ++m) {
                    double acc = 0.0;
                    for (int j = 0; j < k; ++j) {
                        acc += params.alpha[m](i, j) * excite_db[j * num_kernels + m];
                    }
                    out.gradient[map.beta(m)] += acc * inv;
                }
            }
        }
    };
    if (n >= kParallelThreshold) {
        detail::parallel_chunks(num_chunks, work);
    } else {
        for (std::size_t c = 0; c < num_chunks; ++c) {
            work(c);
        }
    }

    Evaluation result;
    result.gradient = Eigen::VectorXd::Zero(map.size());
    // Compensator contributions first, then chunks in order.
    if (want_value) {
        result.value = -horizon * params.mu.sum();
        for (int m = 0; m < num_kernels; ++m) {
            for (int i = 0; i < k; ++i) {
                for (int j = 0; j < k; ++j) {
                    result.value -= params.alpha[m](i, j) * comp[j * num_kernels + m];
                }
            }
        }
    }
    if (want_g1) {
        for (int i = 0; i < k; ++i) {
            result.gradient[map.mu(i)] = -horizon;
        }
        for (int m = 0; m < num_kernels; ++m) {
            for (int i = 0; i < k; ++i) {
                for (int j = 0; j < k; ++j) {
                    result.gradient[map.alpha(m, i, j)] = -comp[j * num_kernels + m];
                }
            }
        }
    }
    if (want_g2) {
        for (int m = 0; m < num_kernels; ++m) {
            double acc = 0.0;
            for (int i = 0; i < k; ++i) {
                for (int j = 0; j < k; ++j) {
                    acc += params.alpha[m](i, j) * comp_db[j * num_kernels + m];
                }
            }
            result.gradient[map.beta(m)] = -acc;
        }
    }
    for (const auto& p : partial) {
        result.value += p.value;
        result.gradient += p.gradient;
    }
    if (!want_value) {
        result.value = 0.0;
    }
    return result;
}

Evaluation evaluate_regularized(const LikelihoodProblem& problem,
                                const Eigen::Ref<const Eigen::VectorXd>& flat, unsigned parts) {
    const FlatIndexMap map(problem.spec);
    Evaluation eval = evaluate_log_likelihood(problem, map.unpack(flat), parts);
    const double c = problem.reg_c;
    if (parts & kValue) {
        eval.value -= c * flat.squaredNorm();
    }
    if (parts & kGradMuAlpha) {
        eval.gradient.head(map.block1_size()) -= 2.0 * c * flat.head(map.block1_size());
    }
    if (parts & kGradBeta) {
        eval.gradient.tail(map.block2_size()) -= 2.0 * c * flat.tail(map.block2_size());
    }
    return eval;
}

double log_likelihood(const LikelihoodProblem& problem, const ParamVector& params) {
    return evaluate_log_likelihood(problem, params, kValue).value;
}

Eigen::VectorXd grad_log_likelihood(const LikelihoodProblem& problem, const ParamVector& params) {
    return evaluate_log_likelihood(problem, params, kGradAll).gradient;
}

double regularized_objective(const LikelihoodProblem& problem, const ParamVector& params) {
    return evaluate_regularized(problem, problem.index_map().pack(params), kValue).value;
}

Eigen::VectorXd grad_regularized(const LikelihoodProblem& problem, const ParamVector& params) {
    return evaluate_regularized(problem, problem.index_map().pack(params), kGradAll).gradient;
}

}  // namespace hawkes
