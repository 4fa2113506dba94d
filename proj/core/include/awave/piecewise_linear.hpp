#pragma once

#include <cstddef>
#include <vector>

namespace awave {

/// Continuous piecewise-linear function given by node positions (strictly
/// increasing) and node values. Evaluation extrapolates with the boundary
/// values, matching profiles that are constant outside their support.
struct PiecewiseLinearFn {
    std::vector<double> x;
    std::vector<double> v;

    std::size_t n_cells() const { return x.empty() ? 0 : x.size() - 1; }

    double operator()(double xq) const;

    /// Slope on cell i, i.e. on [x[i], x[i+1]].
    double slope(std::size_t i) const;

    /// Derivative at xq taken from the containing cell (left-continuous at
    /// interior nodes, zero outside the node range).
    double derivative(double xq) const;
};

/// Exact integral of |a - b| over [lo, hi], splitting cells at sign changes
/// of the difference.
double l1_diff(const PiecewiseLinearFn& a, const PiecewiseLinearFn& b, double lo,
               double hi);

/// Exact integral of (a - b)' squared over [lo, hi]; the integrand is
/// piecewise constant on the union grid.
double l2_diff_derivative_sq(const PiecewiseLinearFn& a, const PiecewiseLinearFn& b,
                             double lo, double hi);

}  // namespace awave
