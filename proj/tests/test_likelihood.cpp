#include "oracles.hpp"

#include "hawkes/likelihood.hpp"
#include "hawkes/simulate.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace hawkes;

namespace {

ModelSpec mixed_spec() {
    ModelSpec spec;
    spec.num_types = 3;
    spec.kernels = {KernelFamily::exponential(), KernelFamily::power_law(0.5)};
    return spec;
}

ParamVector mixed_truth() {
    ParamVector p = ParamVector::zeros(mixed_spec());
    p.mu << 0.3, 0.2, 0.25;
    p.alpha[0] << 0.3, 0.1, 0.0, 0.05, 0.2, 0.1, 0.1, 0.0, 0.3;
    p.alpha[1] << 0.05, 0.0, 0.05, 0.05, 0.1, 0.0, 0.0, 0.05, 0.05;
    p.beta << 1.2, 2.0;
    return p;
}

BoxDomain mixed_box() {
    return {ParamVector::filled(mixed_spec(), 0.05, 0.0, 1.1), ParamVector::filled(mixed_spec(), 2.0, 1.0, 4.0)};
}

EventSequence sample(double horizon, std::uint64_t seed) {
    SimConfig cfg;
    cfg.seed = seed;
    return simulate_cluster(mixed_spec(), mixed_truth(), horizon, cfg);
}

}  // namespace

TEST(Likelihood, ClosedFormMatchesQuadratureWithTwoKernels) {
    EventSequence ev = sample(25.0, 3);
    ASSERT_GT(ev.size(), 5u);
    const LikelihoodProblem problem(mixed_spec(), ev, mixed_box(), 0.0);
    std::mt19937_64 rng(4);
    const FlatIndexMap map(mixed_spec());
    for (int rep = 0; rep < 3; ++rep) {
        const ParamVector p = map.unpack(oracle::interior_point(mixed_box().flat_lower(), mixed_box().flat_upper(), rng));
        EXPECT_NEAR(log_likelihood(problem, p), oracle::loglik_quadrature(mixed_spec(), p, ev), 1e-7);
    }
}

TEST(Likelihood, IntensityMatchesDefinition) {
    const EventSequence ev = sample(30.0, 5);
    const LikelihoodProblem problem(mixed_spec(), ev, mixed_box(), 0.0);
    for (double t : {0.0, 3.3, 12.0, 29.9}) {
        for (int i = 0; i < 3; ++i) {
            const double expected = oracle::intensity(mixed_spec(), mixed_truth(), ev, t, i);
            EXPECT_NEAR(intensity_at(problem, mixed_truth(), t, i), expected, 1e-12 * expected);
        }
    }
}

TEST(Likelihood, SimultaneousEventsDoNotExciteEachOther) {
    ModelSpec spec;
    spec.num_types = 1;
    spec.kernels = {KernelFamily::exponential()};
    EventSequence ev;
    ev.num_types = 1;
    ev.horizon = 2.0;
    ev.times = {1.0, 1.0};
    ev.types = {0, 0};
    ParamVector p = ParamVector::filled(spec, 0.5, 0.4, 1.0);
    const BoxDomain box{ParamVector::filled(spec, 0.1, 0.0, 0.5), ParamVector::filled(spec, 1.0, 1.0, 2.0)};
    const LikelihoodProblem problem(spec, ev, box, 0.0);
    // Both events see only the baseline; the compensator counts both kernels from t = 1.
    const double expected = 2.0 * std::log(0.5) - (0.5 * 2.0 + 2.0 * 0.4 * (1.0 - std::exp(-1.0)));
    EXPECT_NEAR(log_likelihood(problem, p), expected, 1e-14);
    EXPECT_DOUBLE_EQ(intensity_at(problem, p, 1.0, 0), 0.5);
}

TEST(Likelihood, EmptyStreamIsPoissonCompensatorOnly) {
    EventSequence ev;
    ev.num_types = 3;
    ev.horizon = 10.0;
    const LikelihoodProblem problem(mixed_spec(), ev, mixed_box(), 0.0);
    EXPECT_NEAR(log_likelihood(problem, mixed_truth()), -10.0 * mixed_truth().mu.sum(), 1e-14);
}

TEST(Likelihood, RegularizationSubtractsSquaredNorm) {
    const EventSequence ev = sample(40.0, 6);
    const LikelihoodProblem plain(mixed_spec(), ev, mixed_box(), 0.0);
    const LikelihoodProblem reg(mixed_spec(), ev, mixed_box(), 0.7);
    const Eigen::VectorXd flat = FlatIndexMap(mixed_spec()).pack(mixed_truth());
    EXPECT_NEAR(regularized_objective(reg, mixed_truth()),
                log_likelihood(plain, mixed_truth()) - 0.7 * flat.squaredNorm(), 1e-10);
    EXPECT_LT((grad_regularized(reg, mixed_truth()) - grad_log_likelihood(plain, mixed_truth()) + 1.4 * flat)
                  .cwiseAbs()
                  .maxCoeff(),
              1e-10);
}

TEST(Likelihood, GradientMatchesCentralDifferences) {
    const EventSequence ev = sample(60.0, 7);
    const LikelihoodProblem problem(mixed_spec(), ev, mixed_box(), 0.2);
    const FlatIndexMap map(mixed_spec());
    const auto f = [&](const Eigen::VectorXd& x) { return regularized_objective(problem, map.unpack(x)); };
    std::mt19937_64 rng(8);
    for (int rep = 0; rep < 5; ++rep) {
        const Eigen::VectorXd x = oracle::interior_point(mixed_box().flat_lower(), mixed_box().flat_upper(), rng);
        const Eigen::VectorXd g = grad_regularized(problem, map.unpack(x));
        const Eigen::VectorXd fd = oracle::central_diff(f, x, 1e-6);
        EXPECT_LT((g - fd).norm() / g.norm(), 1e-6);
    }
}

TEST(Likelihood, PartialEvaluationsAgreeWithFullEvaluation) {
    const EventSequence ev = sample(50.0, 9);
    const LikelihoodProblem problem(mixed_spec(), ev, mixed_box(), 0.1);
    const FlatIndexMap map(mixed_spec());
    const Eigen::VectorXd x = map.pack(mixed_truth());
    const Evaluation full = evaluate_regularized(problem, x, kEverything);
    EXPECT_EQ(evaluate_regularized(problem, x, kValue).value, full.value);
    const Evaluation b1 = evaluate_regularized(problem, x, kGradMuAlpha);
    const Evaluation b2 = evaluate_regularized(problem, x, kGradBeta);
    const Eigen::Index n1 = map.block1_size();
    EXPECT_LT((b1.gradient.head(n1) - full.gradient.head(n1)).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((b2.gradient.tail(2) - full.gradient.tail(2)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Likelihood, TruncationConvergesToExact) {
    const EventSequence ev = sample(80.0, 10);
    const LikelihoodProblem exact(mixed_spec(), ev, mixed_box(), 0.0);
    const double reference = log_likelihood(exact, mixed_truth());
    double previous = std::numeric_limits<double>::infinity();
    for (double h : {1.0, 10.0, 100.0}) {
        const LikelihoodProblem cut(mixed_spec(), ev, mixed_box(), 0.0, h);
        const double err = std::abs(log_likelihood(cut, mixed_truth()) - reference);
        EXPECT_LE(err, previous);
        previous = err;
    }
    EXPECT_LT(previous, 1e-12);
}

TEST(Likelihood, LargeStreamsAreDeterministic) {
    ModelSpec spec;
    spec.num_types = 2;
    spec.kernels = {KernelFamily::exponential()};
    ParamVector p = ParamVector::filled(spec, 2.0, 0.2, 2.0);
    SimConfig cfg;
    cfg.seed = 11;
    EventSequence ev = simulate_cluster(spec, p, 1500.0, cfg);
    ASSERT_GT(ev.size(), 5000u);  // exercises the chunked parallel path
    const BoxDomain box{ParamVector::filled(spec, 0.1, 0.0, 0.5), ParamVector::filled(spec, 5.0, 1.0, 5.0)};
    const LikelihoodProblem problem(spec, std::move(ev), box, 0.0, 20.0);
    const Eigen::VectorXd x = FlatIndexMap(spec).pack(p);
    const Evaluation a = evaluate_regularized(problem, x, kEverything);
    const Evaluation b = evaluate_regularized(problem, x, kEverything);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.gradient, b.gradient);
}

TEST(Lipschitz, SafeBoundsDominateLocalCurvature) {
    ModelSpec spec;
    spec.num_types = 2;
    spec.kernels = {KernelFamily::exponential()};
    ParamVector truth = ParamVector::zeros(spec);
    truth.mu << 0.4, 0.3;
    truth.alpha[0] << 0.45, 0.15, 0.3, 0.375;
    truth.beta << 1.5;
    SimConfig cfg;
    cfg.seed = 12;
    EventSequence ev = simulate_cluster(spec, truth, 100.0, cfg);
    const BoxDomain box{ParamVector::filled(spec, 0.1, 0.0, 0.5), ParamVector::filled(spec, 2.0, 1.0, 5.0)};
    const LikelihoodProblem problem(spec, std::move(ev), box, 0.05);
    const LipschitzBounds safe = safe_lipschitz_bounds(problem);
    const FlatIndexMap map(spec);
    std::mt19937_64 rng(13);
    for (int rep = 0; rep < 10; ++rep) {
        const Eigen::VectorXd x = oracle::interior_point(box.flat_lower(), box.flat_upper(), rng, 0.01);
        // Finite-difference Hessian of -L^reg; its diagonal blocks must have spectral norm <= the bounds.
        const Eigen::Index n = x.size();
        Eigen::MatrixXd h(n, n);
        for (Eigen::Index k = 0; k < n; ++k) {
            Eigen::VectorXd xp = x;
            Eigen::VectorXd xm = x;
            xp[k] += 1e-6;
            xm[k] -= 1e-6;
            h.col(k) = -(grad_regularized(problem, map.unpack(xp)) - grad_regularized(problem, map.unpack(xm))) / 2e-6;
        }
        h = 0.5 * (h + h.transpose());
        const Eigen::Index n1 = map.block1_size();
        const double l1 = h.topLeftCorner(n1, n1).selfadjointView<Eigen::Lower>().eigenvalues().cwiseAbs().maxCoeff();
        const double l2 = std::abs(h(n - 1, n - 1));
        EXPECT_LE(l1, safe.block1);
        EXPECT_LE(l2, safe.block2);
        const LipschitzBounds local = estimate_lipschitz(problem, map.unpack(x), 1.0);
        EXPECT_NEAR(local.block1, l1, 1e-3 * l1);
        EXPECT_NEAR(local.block2, l2, 1e-3 * std::max(l2, 1.0));
    }
}
