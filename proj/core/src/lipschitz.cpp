#include "hawkes/likelihood.hpp"

#include "hawkes/errors.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace hawkes {

namespace {

// sup and inf of phi(lag; beta) over beta in [lo, hi]; phi is monotone in beta at fixed lag.
std::pair<double, double> kernel_range(const KernelFamily& family, double lag, double lo,
                                       double hi) {
    const double a = kernel_value(family, lag, lo);
    const double b = kernel_value(family, lag, hi);
    return {std::max(a, b), std::min(a, b)};
}

// sup over beta in [lo, hi] of |d phi / d beta|.
double kernel_dbeta_sup(const KernelFamily& family, double lag, double lo, double hi) {
    if (family.kind == KernelKind::kExponential) {
        return lag * std::exp(-lo * lag);
    }
    const double w = lag + family.cutoff;
    return std::abs(std::log(w)) * std::max(std::pow(w, -lo), std::pow(w, -hi));
}

// sup over beta in [lo, hi] of d^2 Phi / d beta^2 (nonnegative for both families).
double antideriv_d2beta_sup(const KernelFamily& family, double u, double lo, double hi) {
    if (family.kind == KernelKind::kExponential) {
        return kernel_antideriv_d2beta(family, u, lo);
    }
    // (v+c)^{-b} <= (v+c)^{-lo} + (v+c)^{-hi} pointwise.
    return kernel_antideriv_d2beta(family, u, lo) + kernel_antideriv_d2beta(family, u, hi);
}

}  // namespace

LipschitzBounds safe_lipschitz_bounds(const LikelihoodProblem& problem) {
    const ModelSpec& spec = problem.spec;
    const int k = spec.num_types;
    const int num_kernels = spec.num_kernels();
    const auto& lo = problem.domain.lower;
    const auto& hi = problem.domain.upper;
    const auto& times = problem.events.times;
    const auto& types = problem.events.types;
    const std::size_t n = times.size();
    const std::size_t pairs = static_cast<std::size_t>(k) * num_kernels;

    double block1 = 0.0;
    double block2_gram = 0.0;
    std::vector<double> s_sup(pairs);
    std::vector<double> s_inf(pairs);
    std::vector<double> d_sup(pairs);
    for (std::size_t e = 0; e < n; ++e) {
        const double t = times[e];
        const int i = types[e];
        std::fill(s_sup.begin(), s_sup.end(), 0.0);
        std::fill(s_inf.begin(), s_inf.end(), 0.0);
        std::fill(d_sup.begin(), d_sup.end(), 0.0);
        for (std::size_t s = e; s-- > 0;) {
            const double lag = t - times[s];
            if (lag == 0.0) {
                continue;
            }
            if (lag > problem.truncation_horizon) {
                break;
            }
            const auto base = static_cast<std::size_t>(types[s]) * num_kernels;
            for (int m = 0; m < num_kernels; ++m) {
                const auto [sup, inf] = kernel_range(spec.kernels[m], lag, lo.beta[m], hi.beta[m]);
                s_sup[base + m] += sup;
                s_inf[base + m] += inf;
                d_sup[base + m] +=
                    kernel_dbeta_sup(spec.kernels[m], lag, lo.beta[m], hi.beta[m]);
            }
        }
        double lambda_floor = lo.mu[i];
        double v_norm2 = 1.0;
        for (int j = 0; j < k; ++j) {
            for (int m = 0; m < num_kernels; ++m) {
                lambda_floor += lo.alpha[m](i, j) * s_inf[j * num_kernels + m];
                v_norm2 += s_sup[j * num_kernels + m] * s_sup[j * num_kernels + m];
            }
        }
        const double inv2 = 1.0 / (lambda_floor * lambda_floor);
        block1 += v_norm2 * inv2;
        double g_norm2 = 0.0;
        for (int m = 0; m < num_kernels; ++m) {
            double g = 0.0;
            for (int j = 0; j < k; ++j) {
                g += hi.alpha[m](i, j) * d_sup[j * num_kernels + m];
            }
            g_norm2 += g * g;
        }
        block2_gram += g_norm2 * inv2;
    }

    double compensator = 0.0;
    for (int m = 0; m < num_kernels; ++m) {
        double acc = 0.0;
        for (std::size_t e = 0; e < n; ++e) {
            const int j = types[e];
            double weight = 0.0;
            for (int i = 0; i < k; ++i) {
                weight += hi.alpha[m](i, j);
            }
            acc += weight * antideriv_d2beta_sup(spec.kernels[m], problem.events.horizon - times[e],
                                                 lo.beta[m], hi.beta[m]);
        }
        compensator = std::max(compensator, acc);
    }

    // A flat block (e.g. beta when alpha is pinned to 0 and C = 0) still needs a
    // positive bound for the step size; any positive value bounds zero curvature.
    const double ridge = 2.0 * problem.reg_c;
    return {std::max(block1 + ridge, 1e-12), std::max(block2_gram + compensator + ridge, 1e-12)};
}

LipschitzBounds estimate_lipschitz(const LikelihoodProblem& problem, const ParamVector& at,
                                   double safety) {
    if (!(safety > 0.0)) {
        throw ConfigError("Lipschitz safety factor must be positive");
    }
    const FlatIndexMap map(problem.spec);
    const Eigen::VectorXd x = map.pack(at);

    const auto block_estimate = [&](Eigen::Index offset, Eigen::Index size, unsigned part) {
        Eigen::VectorXd v = Eigen::VectorXd::Ones(size).normalized();
        double estimate = 0.0;
        // Step small enough that mu - h stays positive.
        const double h = std::min(1e-6 * std::max(1.0, x.segment(offset, size).cwiseAbs().maxCoeff()),
                                  0.5 * x.head(map.num_types()).minCoeff());
        for (int it = 0; it < 50; ++it) {
            Eigen::VectorXd plus = x;
            Eigen::VectorXd minus = x;
            plus.segment(offset, size) += h * v;
            minus.segment(offset, size) -= h * v;
            const Eigen::VectorXd gp = evaluate_regularized(problem, plus, part).gradient;
            const Eigen::VectorXd gm = evaluate_regularized(problem, minus, part).gradient;
            const Eigen::VectorXd hv =
                -(gp.segment(offset, size) - gm.segment(offset, size)) / (2.0 * h);
            const double norm = hv.norm();
            if (!(norm > 0.0) || !std::isfinite(norm)) {
                break;
            }
            const double previous = estimate;
            estimate = std::abs(v.dot(hv));
            v = hv / norm;
            if (std::abs(estimate - previous) <= 1e-6 * estimate) {
                break;
            }
        }
        return std::max(estimate, 1e-12);
    };

    return {safety * block_estimate(0, map.block1_size(), kGradMuAlpha),
            safety * block_estimate(map.block2_offset(), map.block2_size(), kGradBeta)};
}

}  // namespace hawkes
