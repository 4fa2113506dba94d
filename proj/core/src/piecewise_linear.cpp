#include "awave/piecewise_linear.hpp"

#include <algorithm>
#include <cmath>

namespace awave {

double PiecewiseLinearFn::operator()(double xq) const {
    if (x.empty()) return 0.0;
    if (xq <= x.front()) return v.front();
    if (xq >= x.back()) return v.back();
    auto it = std::upper_bound(x.begin(), x.end(), xq);
    std::size_t i = static_cast<std::size_t>(it - x.begin()) - 1;
    double w = (xq - x[i]) / (x[i + 1] - x[i]);
    return v[i] + w * (v[i + 1] - v[i]);
}

double PiecewiseLinearFn::slope(std::size_t i) const {
    return (v[i + 1] - v[i]) / (x[i + 1] - x[i]);
}

double PiecewiseLinearFn::derivative(double xq) const {
    if (x.size() < 2) return 0.0;
    if (xq <= x.front() || xq > x.back()) return 0.0;
    auto it = std::lower_bound(x.begin(), x.end(), xq);
    std::size_t i = static_cast<std::size_t>(it - x.begin());
    if (i > 0) --i;
    if (i + 1 >= x.size()) i = x.size() - 2;
    return slope(i);
}

namespace {

std::vector<double> union_grid(const PiecewiseLinearFn& a, const PiecewiseLinearFn& b,
                               double lo, double hi) {
    std::vector<double> g;
    g.push_back(lo);
    for (double xa : a.x)
        if (xa > lo && xa < hi) g.push_back(xa);
    for (double xb : b.x)
        if (xb > lo && xb < hi) g.push_back(xb);
    g.push_back(hi);
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end(),
                        [](double p, double q) { return std::fabs(p - q) < 1e-15; }),
            g.end());
    return g;
}

}  // namespace

double l1_diff(const PiecewiseLinearFn& a, const PiecewiseLinearFn& b, double lo,
               double hi) {
    if (!(hi > lo)) return 0.0;
    std::vector<double> g = union_grid(a, b, lo, hi);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
        double x0 = g[i], x1 = g[i + 1];
        double d0 = a(x0) - b(x0);
        double d1 = a(x1) - b(x1);
        if (d0 * d1 >= 0.0) {
            total += 0.5 * (std::fabs(d0) + std::fabs(d1)) * (x1 - x0);
        } else {
            // The difference is linear on the cell; split at its root.
            double xr = x0 + (x1 - x0) * d0 / (d0 - d1);
            total += 0.5 * std::fabs(d0) * (xr - x0);
            total += 0.5 * std::fabs(d1) * (x1 - xr);
        }
    }
    return total;
}

double l2_diff_derivative_sq(const PiecewiseLinearFn& a, const PiecewiseLinearFn& b,
                             double lo, double hi) {
    if (!(hi > lo)) return 0.0;
    std::vector<double> g = union_grid(a, b, lo, hi);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
        double xm = 0.5 * (g[i] + g[i + 1]);
        double d = a.derivative(xm) - b.derivative(xm);
        total += d * d * (g[i + 1] - g[i]);
    }
    return total;
}

}  // namespace awave
