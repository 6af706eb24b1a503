#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hawkes {

/// Parameter or argument outside the admissible set (e.g. power-law beta <= 1).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Branching matrix with spectral radius >= 1.
class NonStationaryError : public DomainError {
public:
    NonStationaryError(const std::string& what, double radius)
        : DomainError(what), radius_(radius) {}

    [[nodiscard]] double spectral_radius() const noexcept { return radius_; }

private:
    double radius_;
};

/// Simulation stopped because the event cap was hit.
class CapacityError : public std::runtime_error {
public:
    CapacityError(const std::string& what, std::size_t partial_count)
        : std::runtime_error(what), partial_count_(partial_count) {}

    [[nodiscard]] std::size_t partial_count() const noexcept { return partial_count_; }

private:
    std::size_t partial_count_;
};

/// Malformed input data (event files, message files).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or invalid configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace hawkes
