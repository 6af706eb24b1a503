#include "hawkes/model.hpp"

#include "hawkes/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace hawkes {

namespace {

// e^{-x}(1 + x) - 1 without cancellation for small x.
double exp_times_one_plus_minus_one(double x) {
    if (std::abs(x) >= 0.1) {
        return std::exp(-x) * (1.0 + x) - 1.0;
    }
    // sum_{n>=2} (-1)^{n-1} (n-1) x^n / n!
    double term = x;  // x^n / n! at n = 1
    double sum = 0.0;
    for (int n = 2; n < 30; ++n) {
        term *= x / n;
        const double contrib = ((n % 2 == 0) ? -1.0 : 1.0) * (n - 1) * term;
        sum += contrib;
        if (std::abs(contrib) < 1e-18 * std::abs(sum)) {
            break;
        }
    }
    return sum;
}

void check_time(double t, const char* what) {
    if (!(t >= 0.0)) {
        std::ostringstream os;
        os << what << " must be nonnegative, got " << t;
        throw DomainError(os.str());
    }
}

}  // namespace

KernelFamily KernelFamily::power_law(double cutoff) {
    KernelFamily family{KernelKind::kPowerLaw, cutoff};
    family.validate();
    return family;
}

std::string KernelFamily::name() const {
    return kind == KernelKind::kExponential ? "exponential" : "power_law";
}

void KernelFamily::validate() const {
    if (kind == KernelKind::kPowerLaw && !(cutoff > 0.0 && std::isfinite(cutoff))) {
        throw DomainError("power-law kernel requires a positive finite cutoff c");
    }
}

void check_beta(const KernelFamily& family, double beta) {
    if (!std::isfinite(beta)) {
        throw DomainError("kernel shape beta must be finite");
    }
    switch (family.kind) {
        case KernelKind::kExponential:
            if (!(beta > 0.0)) {
                throw DomainError("exponential kernel requires beta > 0");
            }
            break;
        case KernelKind::kPowerLaw:
            if (!(beta > 1.0)) {
                std::ostringstream os;
                os << "power-law kernel requires beta > 1 for integrability, got " << beta;
                throw DomainError(os.str());
            }
            break;
    }
}

double kernel_value(const KernelFamily& family, double t, double beta) {
    check_time(t, "kernel lag");
    check_beta(family, beta);
    if (family.kind == KernelKind::kExponential) {
        return std::exp(-beta * t);
    }
    return std::pow(t + family.cutoff, -beta);
}

double kernel_antiderivative(const KernelFamily& family, double u, double beta) {
    check_time(u, "integration limit");
    check_beta(family, beta);
    if (family.kind == KernelKind::kExponential) {
        if (std::isinf(u)) {
            return 1.0 / beta;
        }
        return -std::expm1(-beta * u) / beta;
    }
    const double a = beta - 1.0;
    const double c = family.cutoff;
    if (std::isinf(u)) {
        return std::pow(c, -a) / a;
    }
    // (c^{-a} - (u+c)^{-a}) / a  =  c^{-a} (1 - ((u+c)/c)^{-a}) / a
    return -std::pow(c, -a) * std::expm1(-a * std::log1p(u / c)) / a;
}

double kernel_dbeta(const KernelFamily& family, double t, double beta) {
    check_time(t, "kernel lag");
    check_beta(family, beta);
    if (family.kind == KernelKind::kExponential) {
        return -t * std::exp(-beta * t);
    }
    const double w = t + family.cutoff;
    return -std::log(w) * std::pow(w, -beta);
}

double kernel_antideriv_dbeta(const KernelFamily& family, double u, double beta) {
    check_time(u, "integration limit");
    check_beta(family, beta);
    if (family.kind == KernelKind::kExponential) {
        if (std::isinf(u)) {
            return -1.0 / (beta * beta);
        }
        return exp_times_one_plus_minus_one(beta * u) / (beta * beta);
    }
    // h(a) = N(a)/a with N(a) = c^{-a} - w^{-a}, a = beta - 1.
    const double a = beta - 1.0;
    const double x = std::log(family.cutoff);
    const double ec = std::exp(-a * x);
    double n = ec;
    double dn = -x * ec;
    if (!std::isinf(u)) {
        const double y = std::log(u + family.cutoff);
        const double ew = std::exp(-a * y);
        n -= ew;
        dn += y * ew;
    }
    return dn / a - n / (a * a);
}

double kernel_d2beta(const KernelFamily& family, double t, double beta) {
    check_time(t, "kernel lag");
    check_beta(family, beta);
    if (family.kind == KernelKind::kExponential) {
        return t * t * std::exp(-beta * t);
    }
    const double w = t + family.cutoff;
    const double lw = std::log(w);
    return lw * lw * std::pow(w, -beta);
}

double kernel_antideriv_d2beta(const KernelFamily& family, double u, double beta) {
    check_time(u, "integration limit");
    check_beta(family, beta);
    if (family.kind == KernelKind::kExponential) {
        const double b3 = beta * beta * beta;
        if (std::isinf(u)) {
            return 2.0 / b3;
        }
        const double x = beta * u;
        return (2.0 - std::exp(-x) * (x * x + 2.0 * x + 2.0)) / b3;
    }
    const double a = beta - 1.0;
    const double x = std::log(family.cutoff);
    const double ec = std::exp(-a * x);
    double n = ec;
    double dn = -x * ec;
    double d2n = x * x * ec;
    if (!std::isinf(u)) {
        const double y = std::log(u + family.cutoff);
        const double ew = std::exp(-a * y);
        n -= ew;
        dn += y * ew;
        d2n -= y * y * ew;
    }
    return d2n / a - 2.0 * dn / (a * a) + 2.0 * n / (a * a * a);
}

void ModelSpec::validate() const {
    if (num_types < 1) {
        throw DomainError("model needs at least one event type (K >= 1)");
    }
    if (kernels.empty()) {
        throw DomainError("model needs at least one base kernel (M >= 1)");
    }
    for (const auto& kernel : kernels) {
        kernel.validate();
    }
}

ParamVector ParamVector::zeros(const ModelSpec& spec) {
    return filled(spec, 0.0, 0.0, 0.0);
}

ParamVector ParamVector::filled(const ModelSpec& spec, double mu, double alpha, double beta) {
    ParamVector p;
    const int k = spec.num_types;
    p.mu = Eigen::VectorXd::Constant(k, mu);
    p.alpha.assign(spec.kernels.size(), Eigen::MatrixXd::Constant(k, k, alpha));
    p.beta = Eigen::VectorXd::Constant(spec.num_kernels(), beta);
    return p;
}

void ParamVector::validate(const ModelSpec& spec) const {
    const int k = spec.num_types;
    if (mu.size() != k || static_cast<int>(alpha.size()) != spec.num_kernels() ||
        beta.size() != spec.num_kernels()) {
        throw DomainError("parameter vector shape does not match the model");
    }
    for (int i = 0; i < k; ++i) {
        if (!(mu[i] > 0.0) || !std::isfinite(mu[i])) {
            throw DomainError("baseline intensities mu must be positive and finite");
        }
    }
    for (const auto& a : alpha) {
        if (a.rows() != k || a.cols() != k) {
            throw DomainError("alpha matrices must be K x K");
        }
        if (!a.allFinite() || (a.array() < 0.0).any()) {
            throw DomainError("excitation weights alpha must be nonnegative and finite");
        }
    }
    for (int m = 0; m < spec.num_kernels(); ++m) {
        check_beta(spec.kernels[m], beta[m]);
    }
}

FlatIndexMap::FlatIndexMap(int num_types, int num_kernels) : k_(num_types), m_(num_kernels) {
    if (k_ < 1 || m_ < 1) {
        throw DomainError("flat index map needs K >= 1 and M >= 1");
    }
}

Eigen::VectorXd FlatIndexMap::pack(const ParamVector& params) const {
    if (params.mu.size() != k_ || static_cast<int>(params.alpha.size()) != m_ ||
        params.beta.size() != m_) {
        throw DomainError("cannot pack: parameter shape does not match index map");
    }
    Eigen::VectorXd flat(size());
    flat.head(k_) = params.mu;
    for (int m = 0; m < m_; ++m) {
        for (int i = 0; i < k_; ++i) {
            for (int j = 0; j < k_; ++j) {
                flat[alpha(m, i, j)] = params.alpha[m](i, j);
            }
        }
    }
    flat.tail(m_) = params.beta;
    return flat;
}

ParamVector FlatIndexMap::unpack(const Eigen::Ref<const Eigen::VectorXd>& flat) const {
    if (flat.size() != size()) {
        throw DomainError("cannot unpack: flat vector has wrong dimension");
    }
    ParamVector p;
    p.mu = flat.head(k_);
    p.alpha.assign(m_, Eigen::MatrixXd(k_, k_));
    for (int m = 0; m < m_; ++m) {
        for (int i = 0; i < k_; ++i) {
            for (int j = 0; j < k_; ++j) {
                p.alpha[m](i, j) = flat[alpha(m, i, j)];
            }
        }
    }
    p.beta = flat.tail(m_);
    return p;
}

void BoxDomain::validate(const ModelSpec& spec) const {
    const FlatIndexMap map(spec);
    Eigen::VectorXd lb;
    Eigen::VectorXd ub;
    try {
        lb = map.pack(lower);
        ub = map.pack(upper);
    } catch (const DomainError&) {
        throw DomainError("box bounds do not match the model shape");
    }
    if (!lb.allFinite() || !ub.allFinite()) {
        throw DomainError("box bounds must be finite (the domain is compact)");
    }
    if ((lb.array() > ub.array()).any()) {
        throw DomainError("box lower bounds must not exceed upper bounds");
    }
    if ((lower.mu.array() <= 0.0).any()) {
        throw DomainError("box requires mu_lb > 0");
    }
    for (const auto& a : lower.alpha) {
        if ((a.array() < 0.0).any()) {
            throw DomainError("box requires alpha_lb >= 0");
        }
    }
    for (int m = 0; m < spec.num_kernels(); ++m) {
        try {
            check_beta(spec.kernels[m], lower.beta[m]);
        } catch (const DomainError& e) {
            throw DomainError(std::string("box beta_lb inadmissible: ") + e.what());
        }
    }
}

Eigen::VectorXd BoxDomain::flat_lower() const {
    return FlatIndexMap(static_cast<int>(lower.mu.size()), static_cast<int>(lower.beta.size()))
        .pack(lower);
}

Eigen::VectorXd BoxDomain::flat_upper() const {
    return FlatIndexMap(static_cast<int>(upper.mu.size()), static_cast<int>(upper.beta.size()))
        .pack(upper);
}

bool BoxDomain::contains(const ParamVector& params) const {
    const FlatIndexMap map(static_cast<int>(lower.mu.size()), static_cast<int>(lower.beta.size()));
    return contains_flat(map.pack(params));
}

bool BoxDomain::contains_flat(const Eigen::Ref<const Eigen::VectorXd>& flat) const {
    const Eigen::VectorXd lb = flat_lower();
    const Eigen::VectorXd ub = flat_upper();
    if (flat.size() != lb.size()) {
        return false;
    }
    return (flat.array() >= lb.array()).all() && (flat.array() <= ub.array()).all();
}

Eigen::VectorXd project_onto_box(const BoxDomain& domain,
                                 const Eigen::Ref<const Eigen::VectorXd>& flat) {
    const Eigen::VectorXd lb = domain.flat_lower();
    const Eigen::VectorXd ub = domain.flat_upper();
    if (flat.size() != lb.size()) {
        std::ostringstream os;
        os << "projection dimension mismatch: expected " << lb.size() << ", got " << flat.size();
        throw DomainError(os.str());
    }
    return flat.cwiseMax(lb).cwiseMin(ub);
}

Eigen::MatrixXd branching_matrix(const ModelSpec& spec, const ParamVector& params) {
    const int k = spec.num_types;
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(k, k);
    for (int m = 0; m < spec.num_kernels(); ++m) {
        const double mass =
            kernel_antiderivative(spec.kernels[m], std::numeric_limits<double>::infinity(),
                                  params.beta[m]);
        g += params.alpha[m] * mass;
    }
    return g;
}

double spectral_radius(const Eigen::MatrixXd& matrix, const SpectralRadiusOptions& options) {
    if (matrix.rows() != matrix.cols()) {
        throw DomainError("spectral radius needs a square matrix");
    }
    const Eigen::Index n = matrix.rows();
    if (n == 0 || matrix.cwiseAbs().maxCoeff() == 0.0) {
        return 0.0;
    }
    // Power iteration on G + I keeps the iterate strictly positive and makes the
    // Perron root dominant even for periodic G. Collatz-Wielandt bounds bracket rho.
    const Eigen::MatrixXd shifted = matrix + Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
    double upper = std::numeric_limits<double>::infinity();
    double previous = upper;
    for (int it = 0; it < options.max_iterations; ++it) {
        const Eigen::VectorXd gx = matrix * x;
        const Eigen::ArrayXd ratios = gx.array() / x.array();
        upper = ratios.maxCoeff();
        const double lower = ratios.minCoeff();
        if (upper - lower <= options.tolerance * std::max(1.0, upper) ||
            std::abs(upper - previous) <= options.tolerance * std::max(1.0, upper) * 1e-2) {
            break;
        }
        previous = upper;
        const Eigen::VectorXd next = shifted * x;
        x = next / next.maxCoeff();
    }
    return std::max(upper, 0.0);
}

Eigen::VectorXd stationary_mean_intensity(const ModelSpec& spec, const ParamVector& params) {
    const Eigen::MatrixXd g = branching_matrix(spec, params);
    const double rho = spectral_radius(g);
    if (!(rho < 1.0)) {
        std::ostringstream os;
        os << "parameters are not stationary: spectral radius of the branching matrix is "
           << rho << " (must be < 1)";
        throw NonStationaryError(os.str(), rho);
    }
    const Eigen::Index k = g.rows();
    const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(k, k) - g;
    return system.partialPivLu().solve(params.mu);
}

}  // namespace hawkes
