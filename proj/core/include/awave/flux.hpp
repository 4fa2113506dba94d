#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "awave/errors.hpp"

namespace awave {

/// Smooth flux function together with the derivatives the solvers need.
/// Instances are built by make_flux (or flux_from_json) so that the stored
/// metadata (Lipschitz bound, convexity flag) is computed, not claimed.
struct Flux {
    std::function<double(double)> eval;
    std::function<double(double)> d1;
    std::function<double(double)> d2;

    /// Lipschitz constant of d2 over the working range.
    double lip_d2 = 0.0;
    /// True when d2 is nonnegative over the whole working range.
    bool convex = false;
    /// Profile values outside this interval raise range_error.
    std::array<double, 2> working_range{-8.0, 8.0};

    std::string kind;
    std::vector<double> coeffs;

    void require_in_range(double u, double xi) const;
};

/// Build one of the named fluxes. Supported kinds: "quadratic_half" (u^2/2),
/// "quadratic" (u^2), "cubic" (u^3), "cubic_third" (u^3/3), and "polynomial"
/// with ascending coefficients. Throws config_error for unknown kinds,
/// malformed coefficients, or a flux with f'(0) < 0 on the given range.
Flux make_flux(const std::string& kind,
               std::array<double, 2> working_range = {-8.0, 8.0},
               const std::vector<double>& coeffs = {});

struct ValidationIssue {
    std::string invariant;
    double margin = 0.0;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool ok() const { return issues.empty(); }
};

/// Check a flux object for internal consistency: d1 and d2 really are the
/// derivatives of eval (finite-difference probes at `samples` points),
/// d1(0) >= 0, lip_d2 bounds the observed variation of d2, and the convexity
/// flag matches the sampled sign of d2.
ValidationReport validate_flux(const Flux& fx, int samples = 257);

/// JSON round trip: {"kind": ..., "coeffs": [...], "range": [lo, hi]}.
Flux flux_from_json(const std::string& text);
std::string flux_to_json(const Flux& fx);

}  // namespace awave
