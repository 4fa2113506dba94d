#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace awave::detail {

// Polynomials are coefficient vectors in ascending order: c[0] + c[1] x + ...

inline double poly_eval(const std::vector<double>& c, double x) {
    double acc = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
    return acc;
}

inline std::vector<double> poly_derive(const std::vector<double>& c) {
    if (c.size() <= 1) return {0.0};
    std::vector<double> d(c.size() - 1);
    for (std::size_t i = 1; i < c.size(); ++i) d[i - 1] = c[i] * static_cast<double>(i);
    return d;
}

inline std::size_t poly_degree(const std::vector<double>& c) {
    std::size_t deg = 0;
    for (std::size_t i = 0; i < c.size(); ++i)
        if (c[i] != 0.0) deg = i;
    return deg;
}

// All real roots of c inside [a, b], found by recursing on critical points.
// The polynomial is monotone between consecutive critical points, so a sign
// change on such a subinterval brackets exactly one root for bisection.
inline std::vector<double> poly_roots(const std::vector<double>& c, double a, double b) {
    std::size_t deg = poly_degree(c);
    if (deg == 0) return {};
    if (deg == 1) {
        double r = -c[0] / c[1];
        if (r >= a && r <= b) return {r};
        return {};
    }

    std::vector<double> crit = poly_roots(poly_derive(c), a, b);
    std::vector<double> knots;
    knots.push_back(a);
    for (double r : crit) knots.push_back(r);
    knots.push_back(b);
    std::sort(knots.begin(), knots.end());

    std::vector<double> roots;
    auto push_root = [&](double r) {
        if (!roots.empty() && std::fabs(r - roots.back()) < 1e-13 * std::max(1.0, std::fabs(r)))
            return;
        roots.push_back(r);
    };

    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        double lo = knots[i], hi = knots[i + 1];
        double flo = poly_eval(c, lo), fhi = poly_eval(c, hi);
        if (flo == 0.0) push_root(lo);
        if (flo * fhi < 0.0) {
            for (int it = 0; it < 200; ++it) {
                double mid = 0.5 * (lo + hi);
                double fm = poly_eval(c, mid);
                if (fm == 0.0) { lo = hi = mid; break; }
                if (flo * fm < 0.0) { hi = mid; fhi = fm; }
                else { lo = mid; flo = fm; }
            }
            push_root(0.5 * (lo + hi));
        }
        if (i + 2 == knots.size() && fhi == 0.0) push_root(hi);
    }
    return roots;
}

// Extrema of a polynomial over [a, b]: evaluate at endpoints and at the
// critical points of the derivative.
inline double poly_max_over(const std::vector<double>& c, double a, double b) {
    double best = std::max(poly_eval(c, a), poly_eval(c, b));
    for (double r : poly_roots(poly_derive(c), a, b))
        best = std::max(best, poly_eval(c, r));
    return best;
}

inline double poly_min_over(const std::vector<double>& c, double a, double b) {
    double best = std::min(poly_eval(c, a), poly_eval(c, b));
    for (double r : poly_roots(poly_derive(c), a, b))
        best = std::min(best, poly_eval(c, r));
    return best;
}

inline double poly_max_abs_over(const std::vector<double>& c, double a, double b) {
    return std::max(std::fabs(poly_max_over(c, a, b)), std::fabs(poly_min_over(c, a, b)));
}

}  // namespace awave::detail
