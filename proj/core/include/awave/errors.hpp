#pragma once

#include <stdexcept>
#include <string>

namespace awave {

// Invalid scenario, flux, or measure configuration. The CLI maps this to
// exit code 2.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// A profile value left the flux working range mid-computation. Recoverable:
// the operation that threw leaves its input state untouched. CLI exit code 3.
class range_error : public std::runtime_error {
public:
    range_error(const std::string& what, double value, double xi)
        : std::runtime_error(what), value(value), xi(xi) {}

    double value;
    double xi;
};

// A fixed-point iteration failed to converge within its iteration budget.
class convergence_error : public std::runtime_error {
public:
    convergence_error(const std::string& what, int iterations, double last_ratio)
        : std::runtime_error(what), iterations(iterations), last_ratio(last_ratio) {}

    int iterations;
    double last_ratio;
};

}  // namespace awave
