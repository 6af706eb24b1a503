#include "hawkes/simulate.hpp"

#include "hawkes/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace hawkes {

std::vector<std::size_t> EventSequence::counts() const {
    std::vector<std::size_t> out(static_cast<std::size_t>(std::max(num_types, 0)), 0);
    for (const int type : types) {
        if (type >= 0 && type < num_types) {
            ++out[static_cast<std::size_t>(type)];
        }
    }
    return out;
}

void EventSequence::validate() const {
    if (times.size() != types.size()) {
        throw DataError("event sequence: times and types have different lengths");
    }
    if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
        throw DataError("event sequence: horizon must be finite and nonnegative");
    }
    if (num_types < 1) {
        throw DataError("event sequence: needs at least one type");
    }
    for (std::size_t e = 0; e < times.size(); ++e) {
        if (!(times[e] >= 0.0 && times[e] <= horizon)) {
            std::ostringstream os;
            os << "event sequence: event " << e << " at time " << times[e]
               << " lies outside [0, " << horizon << "]";
            throw DataError(os.str());
        }
        if (e > 0 && times[e] < times[e - 1]) {
            std::ostringstream os;
            os << "event sequence: times not sorted at event " << e;
            throw DataError(os.str());
        }
        if (types[e] < 0 || types[e] >= num_types) {
            std::ostringstream os;
            os << "event sequence: event " << e << " has type " << types[e] << " outside [0, "
               << num_types << ")";
            throw DataError(os.str());
        }
    }
}

double kernel_inverse_cdf(const KernelFamily& family, double beta, double window, double p) {
    check_beta(family, beta);
    if (!(window > 0.0)) {
        throw DomainError("inverse CDF needs a positive window");
    }
    if (!(p >= 0.0 && p < 1.0)) {
        throw DomainError("inverse CDF probability must lie in [0, 1)");
    }
    if (family.kind == KernelKind::kExponential) {
        // Truncated mass 1 - e^{-beta w}; inverse -ln(1 - p (1 - e^{-beta w})) / beta.
        const double mass = std::isinf(window) ? 1.0 : -std::expm1(-beta * window);
        return -std::log1p(-p * mass) / beta;
    }
    // Phi(u) = c^{1-b} (1 - (1 + u/c)^{1-b}) / (b - 1). Solve Phi(u) = p Phi(w) for u.
    const double a = beta - 1.0;
    const double c = family.cutoff;
    const double tail_w = std::isinf(window) ? 0.0 : std::exp(-a * std::log1p(window / c));
    const double remaining = 1.0 - p * (1.0 - tail_w);  // (1 + u/c)^{-a}
    const double u = c * std::expm1(-std::log(remaining) / a);
    return std::isinf(window) ? u : std::min(u, window);
}

std::vector<double> offspring_offsets(const KernelFamily& family, double alpha_total,
                                      double beta, double window, Rng& rng) {
    if (!(alpha_total >= 0.0)) {
        throw DomainError("offspring weight must be nonnegative");
    }
    if (!(window > 0.0)) {
        throw DomainError("offspring window must be positive");
    }
    std::vector<double> offsets;
    if (alpha_total == 0.0) {
        return offsets;
    }
    const double mean = alpha_total * kernel_antiderivative(family, window, beta);
    if (!(mean > 0.0)) {
        return offsets;
    }
    std::poisson_distribution<long long> count_dist(mean);
    const long long count = count_dist(rng);
    offsets.reserve(static_cast<std::size_t>(count));
    for (long long n = 0; n < count; ++n) {
        offsets.push_back(kernel_inverse_cdf(family, beta, window, uniform01(rng)));
    }
    return offsets;
}

namespace {

struct SimEvent {
    double time;
    int generation;
    int type;
};

void check_simulation_inputs(const ModelSpec& spec, const ParamVector& params, double horizon) {
    spec.validate();
    params.validate(spec);
    if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
        throw DomainError("simulation horizon must be finite and nonnegative");
    }
}

void check_stationary(const ModelSpec& spec, const ParamVector& params) {
    const double rho = spectral_radius(branching_matrix(spec, params));
    if (!(rho < 1.0)) {
        std::ostringstream os;
        os << "cannot simulate: spectral radius of the branching matrix is " << rho
           << " (must be < 1)";
        throw NonStationaryError(os.str(), rho);
    }
}

[[noreturn]] void throw_capacity(std::size_t count, std::size_t cap) {
    std::ostringstream os;
    os << "simulation exceeded max_events = " << cap << " (generated " << count
       << " events before stopping)";
    throw CapacityError(os.str(), count);
}

EventSequence finish(std::vector<SimEvent>& events, double horizon, int num_types) {
    std::stable_sort(events.begin(), events.end(), [](const SimEvent& a, const SimEvent& b) {
        if (a.time != b.time) return a.time < b.time;
        if (a.generation != b.generation) return a.generation < b.generation;
        return a.type < b.type;
    });
    EventSequence out;
    out.horizon = horizon;
    out.num_types = num_types;
    out.times.reserve(events.size());
    out.types.reserve(events.size());
    for (const auto& e : events) {
        out.times.push_back(e.time);
        out.types.push_back(e.type);
    }
    return out;
}

}  // namespace

EventSequence simulate_cluster(const ModelSpec& spec, const ParamVector& params, double horizon,
                               const SimConfig& config) {
    check_simulation_inputs(spec, params, horizon);
    check_stationary(spec, params);
    const int k = spec.num_types;
    std::vector<SimEvent> events;
    if (horizon == 0.0) {
        return finish(events, horizon, k);
    }

    Rng immigrant_rng = make_stream(config.seed, streams::kImmigrants);
    Rng offspring_rng = make_stream(config.seed, streams::kOffspring);

    for (int type = 0; type < k; ++type) {
        std::poisson_distribution<long long> count_dist(params.mu[type] * horizon);
        const long long count = count_dist(immigrant_rng);
        if (static_cast<std::size_t>(count) + events.size() > config.max_events) {
            throw_capacity(events.size() + static_cast<std::size_t>(count), config.max_events);
        }
        for (long long n = 0; n < count; ++n) {
            events.push_back({uniform01(immigrant_rng) * horizon, 0, type});
        }
    }

    // Breadth-first over generations; events[begin, end) is the current generation.
    std::size_t begin = 0;
    int generation = 0;
    while (begin < events.size()) {
        const std::size_t end = events.size();
        ++generation;
        for (std::size_t e = begin; e < end; ++e) {
            const double parent_time = events[e].time;
            const int parent_type = events[e].type;
            const double window = horizon - parent_time;
            if (!(window > 0.0)) {
                continue;
            }
            for (int child_type = 0; child_type < k; ++child_type) {
                for (int m = 0; m < spec.num_kernels(); ++m) {
                    const double weight = params.alpha[m](child_type, parent_type);
                    if (weight == 0.0) {
                        continue;
                    }
                    const auto offsets = offspring_offsets(spec.kernels[m], weight,
                                                           params.beta[m], window, offspring_rng);
                    if (events.size() + offsets.size() > config.max_events) {
                        throw_capacity(events.size() + offsets.size(), config.max_events);
                    }
                    for (const double offset : offsets) {
                        const double t = std::min(parent_time + offset, horizon);
                        events.push_back({t, generation, child_type});
                    }
                }
            }
        }
        begin = end;
    }
    return finish(events, horizon, k);
}

EventSequence simulate_thinning(const ModelSpec& spec, const ParamVector& params, double horizon,
                                const SimConfig& config) {
    check_simulation_inputs(spec, params, horizon);
    const int k = spec.num_types;
    const int num_kernels = spec.num_kernels();
    std::vector<SimEvent> events;
    if (horizon == 0.0) {
        return finish(events, horizon, k);
    }
    Rng rng = make_stream(config.seed, streams::kThinning);

    // lambda_i(t) given the accepted events with time < t (or <= t when inclusive).
    std::vector<double> intensity(static_cast<std::size_t>(k));
    const auto evaluate = [&](double t, bool inclusive) {
        for (int i = 0; i < k; ++i) {
            intensity[static_cast<std::size_t>(i)] = params.mu[i];
        }
        for (const auto& ev : events) {
            if (ev.time > t || (!inclusive && ev.time == t)) {
                break;
            }
            const double lag = t - ev.time;
            for (int m = 0; m < num_kernels; ++m) {
                const double phi = kernel_value(spec.kernels[m], lag, params.beta[m]);
                for (int i = 0; i < k; ++i) {
                    intensity[static_cast<std::size_t>(i)] += params.alpha[m](i, ev.type) * phi;
                }
            }
        }
        return std::accumulate(intensity.begin(), intensity.end(), 0.0);
    };

    double t = 0.0;
    double bound = evaluate(t, true);
    while (true) {
        const double u = uniform01(rng);
        t += -std::log1p(-u) / bound;
        if (!(t <= horizon)) {
            break;
        }
        const double total = evaluate(t, false);
        const double accept = uniform01(rng) * bound;
        if (accept < total) {
            // Pick the type proportionally to its intensity.
            double target = uniform01(rng) * total;
            int type = k - 1;
            for (int i = 0; i < k; ++i) {
                target -= intensity[static_cast<std::size_t>(i)];
                if (target < 0.0) {
                    type = i;
                    break;
                }
            }
            if (events.size() + 1 > config.max_events) {
                throw_capacity(events.size() + 1, config.max_events);
            }
            events.push_back({t, 0, type});
        }
        bound = evaluate(t, true);
    }
    return finish(events, horizon, k);
}

}  // namespace hawkes
