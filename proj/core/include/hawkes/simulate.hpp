#pragma once

#include "hawkes/model.hpp"
#include "hawkes/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace hawkes {

/// Typed arrival times on [0, horizon], sorted ascending (ties allowed).
struct EventSequence {
    std::vector<double> times;
    std::vector<int> types;
    double horizon{0.0};
    int num_types{1};

    [[nodiscard]] std::size_t size() const { return times.size(); }
    [[nodiscard]] bool empty() const { return times.empty(); }
    /// Number of events of each type.
    [[nodiscard]] std::vector<std::size_t> counts() const;
    /// Throws DataError if unsorted, out of [0, horizon], or mistyped.
    void validate() const;
};

struct SimConfig {
    std::uint64_t seed{0};
    std::size_t max_events{10'000'000};
};

/// Branching (cluster) construction: Poisson immigrants of each type, then
/// generation by generation each event spawns Poisson offspring per (target
/// type, base kernel) with offsets drawn from the truncated normalized kernel.
/// Ties are ordered by (time, generation, type).
[[nodiscard]] EventSequence simulate_cluster(const ModelSpec& spec, const ParamVector& params,
                                             double horizon, const SimConfig& config = {});

/// Ogata thinning under the total intensity evaluated just after the last
/// accepted or proposed time. Valid because both kernel families are nonincreasing.
[[nodiscard]] EventSequence simulate_thinning(const ModelSpec& spec, const ParamVector& params,
                                              double horizon, const SimConfig& config = {});

/// Inverse of the truncated CDF u -> Phi(u) / Phi(window) at probability p in [0, 1).
/// window may be +infinity.
[[nodiscard]] double kernel_inverse_cdf(const KernelFamily& family, double beta, double window,
                                        double p);

/// Offspring of one parent through one kernel: count ~ Poisson(alpha_total * Phi(window)),
/// offsets i.i.d. from the normalized kernel restricted to [0, window].
[[nodiscard]] std::vector<double> offspring_offsets(const KernelFamily& family,
                                                    double alpha_total, double beta,
                                                    double window, Rng& rng);

}  // namespace hawkes
