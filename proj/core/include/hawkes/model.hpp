#pragma once

// Parameter and kernel domain model for multivariate Hawkes processes with
// triggering functions g_ij(t) = sum_m alpha^m_ij * phi_m(t; beta_m).

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace hawkes {

enum class KernelKind {
    kExponential,  // phi(t) = exp(-beta t)
    kPowerLaw,     // phi(t) = (t + c)^(-beta), requires beta > 1
};

struct KernelFamily {
    KernelKind kind{KernelKind::kExponential};
    double cutoff{0.0};  // c, time units; only meaningful for kPowerLaw

    static KernelFamily exponential() { return {KernelKind::kExponential, 0.0}; }
    static KernelFamily power_law(double cutoff);

    [[nodiscard]] std::string name() const;
    /// Throws DomainError if the family itself is malformed (c <= 0).
    void validate() const;

    friend bool operator==(const KernelFamily&, const KernelFamily&) = default;
};

/// Throws DomainError when beta is not admissible for the family.
void check_beta(const KernelFamily& family, double beta);

/// phi(t; beta).
[[nodiscard]] double kernel_value(const KernelFamily& family, double t, double beta);
/// Phi(u; beta) = int_0^u phi(v; beta) dv. u may be +infinity.
[[nodiscard]] double kernel_antiderivative(const KernelFamily& family, double u, double beta);
/// d phi / d beta.
[[nodiscard]] double kernel_dbeta(const KernelFamily& family, double t, double beta);
/// d Phi / d beta. u may be +infinity.
[[nodiscard]] double kernel_antideriv_dbeta(const KernelFamily& family, double u, double beta);
/// d^2 phi / d beta^2 (used by the Lipschitz bounds).
[[nodiscard]] double kernel_d2beta(const KernelFamily& family, double t, double beta);
/// d^2 Phi / d beta^2. u may be +infinity.
[[nodiscard]] double kernel_antideriv_d2beta(const KernelFamily& family, double u, double beta);

struct ModelSpec {
    int num_types{1};                   // K
    std::vector<KernelFamily> kernels;  // M base kernels

    [[nodiscard]] int num_kernels() const { return static_cast<int>(kernels.size()); }
    void validate() const;

    friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

/// theta = (mu, alpha, beta). alpha[m](i, j) is the excitation of type i by type j
/// through base kernel m.
struct ParamVector {
    Eigen::VectorXd mu;
    std::vector<Eigen::MatrixXd> alpha;
    Eigen::VectorXd beta;

    static ParamVector zeros(const ModelSpec& spec);
    static ParamVector filled(const ModelSpec& spec, double mu, double alpha, double beta);

    /// Checks shapes, mu > 0, alpha >= 0, and beta admissibility for each kernel.
    void validate(const ModelSpec& spec) const;
};

/// Layout of theta as one flat coordinate vector:
/// [mu (K)] ++ [alpha in (m, i, j) row-major order] ++ [beta (M)].
/// The (mu, alpha) block is contiguous and comes first.
class FlatIndexMap {
public:
    FlatIndexMap(int num_types, int num_kernels);
    explicit FlatIndexMap(const ModelSpec& spec)
        : FlatIndexMap(spec.num_types, spec.num_kernels()) {}

    [[nodiscard]] int num_types() const { return k_; }
    [[nodiscard]] int num_kernels() const { return m_; }
    [[nodiscard]] Eigen::Index size() const { return k_ + m_ * k_ * k_ + m_; }
    [[nodiscard]] Eigen::Index mu(int i) const { return i; }
    [[nodiscard]] Eigen::Index alpha(int m, int i, int j) const {
        return k_ + (static_cast<Eigen::Index>(m) * k_ + i) * k_ + j;
    }
    [[nodiscard]] Eigen::Index beta(int m) const { return k_ + m_ * k_ * k_ + m; }
    /// Size of the leading (mu, alpha) block.
    [[nodiscard]] Eigen::Index block1_size() const { return k_ + m_ * k_ * k_; }
    [[nodiscard]] Eigen::Index block2_offset() const { return block1_size(); }
    [[nodiscard]] Eigen::Index block2_size() const { return m_; }

    [[nodiscard]] Eigen::VectorXd pack(const ParamVector& params) const;
    [[nodiscard]] ParamVector unpack(const Eigen::Ref<const Eigen::VectorXd>& flat) const;

private:
    int k_;
    int m_;
};

/// Compact box Theta = A x B given by per-coordinate bounds.
struct BoxDomain {
    ParamVector lower;
    ParamVector upper;

    /// Checks lb <= ub, mu_lb > 0, alpha_lb >= 0, and power-law beta_lb > 1.
    void validate(const ModelSpec& spec) const;

    [[nodiscard]] Eigen::VectorXd flat_lower() const;
    [[nodiscard]] Eigen::VectorXd flat_upper() const;
    [[nodiscard]] bool contains(const ParamVector& params) const;
    [[nodiscard]] bool contains_flat(const Eigen::Ref<const Eigen::VectorXd>& flat) const;
};

/// Componentwise clamp of a flat vector onto the box.
[[nodiscard]] Eigen::VectorXd project_onto_box(const BoxDomain& domain,
                                               const Eigen::Ref<const Eigen::VectorXd>& flat);

/// G_ij = int_0^inf g_ij(t) dt = sum_m alpha^m_ij * Phi_m(inf; beta_m).
[[nodiscard]] Eigen::MatrixXd branching_matrix(const ModelSpec& spec, const ParamVector& params);

struct SpectralRadiusOptions {
    double tolerance{1e-10};
    int max_iterations{10'000};
};

/// Dominant eigenvalue of a nonnegative square matrix by power iteration.
[[nodiscard]] double spectral_radius(const Eigen::MatrixXd& matrix,
                                     const SpectralRadiusOptions& options = {});

/// lambda_bar = (I - G)^{-1} mu. Throws NonStationaryError when rho(G) >= 1.
[[nodiscard]] Eigen::VectorXd stationary_mean_intensity(const ModelSpec& spec,
                                                        const ParamVector& params);

}  // namespace hawkes
