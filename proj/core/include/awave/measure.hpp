#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "awave/errors.hpp"

namespace awave {

/// Point mass of a measure: position and (positive) mass.
struct Atom {
    double x = 0.0;
    double mass = 0.0;
};

/// Finite nonnegative measure on the half-line: a piecewise-constant density
/// on a breakpoint grid plus a finite list of atoms. Construction
/// canonicalizes the representation: atom positions become breakpoints (cells
/// are split), atoms at one position are merged, and cumulative masses are
/// precomputed so cdf and quantile are binary searches.
class Measure1D {
public:
    /// The zero measure.
    Measure1D() = default;

    /// Build from raw parts. breakpoints must be strictly increasing with
    /// density.size() + 1 entries; density entries must be >= 0; atom masses
    /// must be >= 0 (zero-mass atoms are dropped) at positions >= 0. Atoms
    /// outside the breakpoint window extend it with zero-density cells.
    Measure1D(std::vector<double> breakpoints, std::vector<double> density,
              std::vector<Atom> atoms = {});

    const std::vector<double>& breakpoints() const { return bp_; }
    const std::vector<double>& density() const { return dens_; }
    const std::vector<Atom>& atoms() const { return atoms_; }

    double total_mass() const { return total_; }
    bool is_zero() const { return total_ == 0.0; }

    /// Mass of [0, x], right-continuous: an atom at x is included.
    double cdf(double x) const;

    /// Generalized inverse of the cdf: inf{x : cdf(x) >= xi} for xi > 0, and
    /// sup{x : cdf(x) = 0} at xi = 0 (the start of the support, so that
    /// composing a continuous profile with quantile stays continuous at 0).
    /// Throws std::out_of_range for xi outside [0, total_mass()].
    double quantile(double xi) const;

private:
    std::vector<double> bp_;
    std::vector<double> dens_;
    std::vector<Atom> atoms_;
    // Per-breakpoint data: atom mass sitting at bp_[i] and cdf(bp_[i]).
    std::vector<double> atom_at_bp_;
    std::vector<double> cum_at_bp_;
    double total_ = 0.0;
};

/// Flat-metric distance sup{∫φ d(mu-nu) : |φ| <= 1, |φ'| <= 1}, computed
/// exactly for grid test functions: the union support is binned with the
/// given step, and the resulting linear program (|φ_i| <= 1,
/// |φ_{i+1}-φ_i| <= grid_step) is solved by dynamic programming over concave
/// piecewise-linear value functions. The result is exact for the binned
/// masses and within O(grid_step) of the continuum supremum.
double flat_distance(const Measure1D& mu, const Measure1D& nu, double grid_step);

/// Push-forward of Lebesgue measure on the xi interval through xi -> y.
/// xi_grid is nondecreasing (a repeated value marks a jump of y: the image
/// interval gets an explicit zero-density cell); y_vals is nondecreasing with
/// the same length; uxi_vals holds per-cell values of U_xi. Cells with
/// |U_xi| <= sing_eps (default 1e-6 * max(1, max |U_xi|)) put their xi-length
/// into an atom at the cell's mass-weighted position; runs of such cells are
/// consolidated, and atoms closer than merge_tol (default scaled 1e-9) are
/// merged. Other cells contribute density dxi/dy on their image interval.
/// Total output mass equals the xi-interval length to rounding.
Measure1D pushforward_decompose(const std::vector<double>& xi_grid,
                                const std::vector<double>& y_vals,
                                const std::vector<double>& uxi_vals,
                                double sing_eps = -1.0, double merge_tol = -1.0);

/// JSON round trip: {"breakpoints":[...], "density":[...], "atoms":[[x,m],...]}.
Measure1D measure_from_json(const std::string& text);
std::string measure_to_json(const Measure1D& mu);

}  // namespace awave
