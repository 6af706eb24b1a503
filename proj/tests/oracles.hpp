#pragma once

// Independent reference implementations used only by the tests. Nothing here
// calls the library's kernel or likelihood code.

#include "hawkes/model.hpp"
#include "hawkes/simulate.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <random>

namespace oracle {

inline double phi(const hawkes::KernelFamily& f, double t, double beta) {
    if (f.kind == hawkes::KernelKind::kExponential) {
        return std::exp(-beta * t);
    }
    return std::pow(t + f.cutoff, -beta);
}

/// int_0^inf phi, by quadrature. The power-law tail is algebraic, so it is
/// integrated in v = log(t + c), where the integrand decays exponentially.
inline double phi_mass(const hawkes::KernelFamily& f, double beta) {
    const double inf = std::numeric_limits<double>::infinity();
    if (f.kind == hawkes::KernelKind::kExponential) {
        auto g = [&](double t) { return phi(f, t, beta); };
        return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, 0.0, inf, 15, 1e-13);
    }
    // (t + c)^(-beta) dt with t + c = e^v becomes e^((1 - beta) v) dv.
    auto g = [&](double v) { return std::exp((1.0 - beta) * v); };
    boost::math::quadrature::exp_sinh<double> integrator;
    return integrator.integrate(g, std::log(f.cutoff), inf, 1e-14);
}

/// lambda_i(t) from the defining sum over strictly earlier events.
inline double intensity(const hawkes::ModelSpec& spec, const hawkes::ParamVector& p,
                        const hawkes::EventSequence& ev, double t, int i) {
    double lam = p.mu[i];
    for (std::size_t k = 0; k < ev.size() && ev.times[k] < t; ++k) {
        for (int m = 0; m < spec.num_kernels(); ++m) {
            lam += p.alpha[m](i, ev.types[k]) *
                   phi(spec.kernels[static_cast<std::size_t>(m)], t - ev.times[k], p.beta[m]);
        }
    }
    return lam;
}

/// sum_k log lambda(t_k) - sum_i int_0^T lambda_i, with the compensator computed by
/// adaptive Gauss-Kronrod between consecutive events.
inline double loglik_quadrature(const hawkes::ModelSpec& spec, const hawkes::ParamVector& p,
                                const hawkes::EventSequence& ev) {
    double value = 0.0;
    for (std::size_t k = 0; k < ev.size(); ++k) {
        value += std::log(intensity(spec, p, ev, ev.times[k], ev.types[k]));
    }
    std::vector<double> knots{0.0};
    for (double t : ev.times) {
        if (t > knots.back()) knots.push_back(t);
    }
    if (ev.horizon > knots.back()) knots.push_back(ev.horizon);
    for (int i = 0; i < spec.num_types; ++i) {
        for (std::size_t s = 0; s + 1 < knots.size(); ++s) {
            const double a = knots[s];
            const double b = knots[s + 1];
            // Events at a count (s < t for t in (a, b]); evaluating just inside the open interval.
            auto f = [&](double t) {
                return intensity(spec, p, ev, std::max(t, std::nextafter(a, b)), i);
            };
            value -= boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 8, 1e-12);
        }
    }
    return value;
}

/// Central differences with an absolute step.
inline Eigen::VectorXd central_diff(const std::function<double(const Eigen::VectorXd&)>& f,
                                    const Eigen::VectorXd& x, double h) {
    Eigen::VectorXd g(x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        Eigen::VectorXd xp = x;
        Eigen::VectorXd xm = x;
        xp[k] += h;
        xm[k] -= h;
        g[k] = (f(xp) - f(xm)) / (2.0 * h);
    }
    return g;
}

/// (I - G)^{-1} mu by the Neumann series sum_n G^n mu.
inline Eigen::VectorXd neumann_mean(const Eigen::MatrixXd& g, const Eigen::VectorXd& mu) {
    Eigen::VectorXd term = mu;
    Eigen::VectorXd sum = mu;
    for (int n = 0; n < 100000 && term.lpNorm<Eigen::Infinity>() > 1e-15 * sum.lpNorm<Eigen::Infinity>(); ++n) {
        term = g * term;
        sum += term;
    }
    return sum;
}

/// G by quadrature of each kernel.
inline Eigen::MatrixXd branching(const hawkes::ModelSpec& spec, const hawkes::ParamVector& p) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(spec.num_types, spec.num_types);
    for (int m = 0; m < spec.num_kernels(); ++m) {
        g += p.alpha[m] * phi_mass(spec.kernels[static_cast<std::size_t>(m)], p.beta[m]);
    }
    return g;
}

/// Random interior point of a box (strictly inside by `margin` of each width).
inline Eigen::VectorXd interior_point(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, std::mt19937_64& rng,
                                      double margin = 0.05) {
    std::uniform_real_distribution<double> u(margin, 1.0 - margin);
    Eigen::VectorXd x(lo.size());
    for (Eigen::Index k = 0; k < lo.size(); ++k) x[k] = lo[k] + u(rng) * (hi[k] - lo[k]);
    return x;
}

}  // namespace oracle
