#pragma once

#include "hawkes/model.hpp"
#include "hawkes/simulate.hpp"

#include <Eigen/Dense>

#include <limits>

namespace hawkes {

/// Regularized MLE problem: maximize L_T(theta) - reg_c * ||theta||^2 over the box.
struct LikelihoodProblem {
    ModelSpec spec;
    EventSequence events;
    BoxDomain domain;
    double reg_c{0.0};
    /// Pairs with lag t - s above this are dropped from the excitation sums.
    /// Infinite (the default) means the exact O(n^2) evaluation.
    double truncation_horizon{std::numeric_limits<double>::infinity()};

    LikelihoodProblem(ModelSpec spec, EventSequence events, BoxDomain domain, double reg_c,
                      double truncation_horizon = std::numeric_limits<double>::infinity());

    [[nodiscard]] FlatIndexMap index_map() const { return FlatIndexMap(spec); }
    [[nodiscard]] Eigen::Index dimension() const { return index_map().size(); }
};

/// Which parts of an evaluation to compute.
enum EvalParts : unsigned {
    kValue = 1u,
    kGradMuAlpha = 2u,
    kGradBeta = 4u,
    kGradAll = kGradMuAlpha | kGradBeta,
    kEverything = kValue | kGradAll,
};

struct Evaluation {
    double value{0.0};
    /// Flat gradient (zero in the blocks that were not requested).
    Eigen::VectorXd gradient;
};

/// lambda_i(t) = mu_i + sum_{j,m} alpha^m_ij sum_{s < t, type j} phi_m(t - s).
/// Events at exactly t do not contribute.
[[nodiscard]] double intensity_at(const LikelihoodProblem& problem, const ParamVector& params,
                                  double t, int type);

/// Unregularized log-likelihood (value and/or gradient) by direct pairwise summation.
[[nodiscard]] Evaluation evaluate_log_likelihood(const LikelihoodProblem& problem,
                                                 const ParamVector& params,
                                                 unsigned parts = kEverything);

/// Regularized objective L_T - C ||theta||^2 and its gradient at a flat point.
[[nodiscard]] Evaluation evaluate_regularized(const LikelihoodProblem& problem,
                                              const Eigen::Ref<const Eigen::VectorXd>& flat,
                                              unsigned parts = kEverything);

[[nodiscard]] double log_likelihood(const LikelihoodProblem& problem, const ParamVector& params);
[[nodiscard]] Eigen::VectorXd grad_log_likelihood(const LikelihoodProblem& problem,
                                                  const ParamVector& params);
[[nodiscard]] double regularized_objective(const LikelihoodProblem& problem,
                                           const ParamVector& params);
[[nodiscard]] Eigen::VectorXd grad_regularized(const LikelihoodProblem& problem,
                                               const ParamVector& params);

/// Upper bounds on the curvature of -L^reg over the box, used for step sizes.
struct LipschitzBounds {
    double block1{0.0};  // (mu, alpha) block
    double block2{0.0};  // beta block
};

/// Rigorous bounds: sup over the box of the largest eigenvalue of each diagonal
/// block of the negated Hessian, bounded via trace-type estimates with intensity
/// floored at mu_lb. Usually loose. Each bound is at least 1e-12.
[[nodiscard]] LipschitzBounds safe_lipschitz_bounds(const LikelihoodProblem& problem);

/// Local estimate at a point: power iteration on finite-difference Hessian-vector
/// products of each block, multiplied by `safety`.
[[nodiscard]] LipschitzBounds estimate_lipschitz(const LikelihoodProblem& problem,
                                                 const ParamVector& at, double safety = 2.0);

}  // namespace hawkes
