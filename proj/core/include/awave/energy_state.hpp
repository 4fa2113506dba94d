#pragma once

#include <cstddef>
#include <vector>

#include "awave/measure.hpp"
#include "awave/piecewise_linear.hpp"

namespace awave {

/// Jump of the characteristic position map: at energy coordinate xi the
/// position advances by size, an interval of x carrying no energy.
struct SingGap {
    double xi = 0.0;
    double size = 0.0;
};

/// Solver state in energy coordinates at time t: profile values U on a
/// uniform grid over [0, xi_bar], the base position of the first
/// characteristic, and the jumps of the position map. Physical positions are
/// derived, never stored: pos(xi_i) = ybase + sum of U_xi^2 dxi over earlier
/// cells + sum of gaps at xi_j < xi_i.
struct EnergyState {
    double t = 0.0;
    double xi_bar = 0.0;
    std::size_t n_cells = 0;
    /// n_cells + 1 node values with U[0] = 0 (boundary condition at x = 0).
    std::vector<double> U;
    double ybase = 0.0;
    /// Sorted by xi; sizes > 0.
    std::vector<SingGap> sing_gaps;

    double dxi() const { return n_cells == 0 ? 0.0 : xi_bar / static_cast<double>(n_cells); }
    double xi(std::size_t i) const {
        return n_cells == 0 ? 0.0
                            : xi_bar * static_cast<double>(i) / static_cast<double>(n_cells);
    }
    /// Cell derivative (U[i+1] - U[i]) / dxi, zero for a degenerate grid.
    double uxi(std::size_t cell) const {
        double d = dxi();
        return d == 0.0 ? 0.0 : (U[cell + 1] - U[cell]) / d;
    }
};

/// Reconstructed physical-space solution at one time.
struct PhysicalSnapshot {
    double t = 0.0;
    PiecewiseLinearFn u;
    Measure1D mu;
};

/// Node positions pos(xi_i) (left limits: a gap sitting exactly at xi_i is
/// not included in pos(xi_i)). Nondecreasing by construction.
std::vector<double> positions(const EnergyState& st);

/// Transform initial data to energy coordinates: xi_bar = total mass of mu0,
/// U_i = u0(quantile(mu0, xi_i)), ybase = quantile(mu0, 0), and one gap per
/// interior null interval of mu0. n_cells is adjusted upward until every atom
/// mass of mu0 is an integer multiple of dxi within 0.1%. Throws config_error
/// when u0(0) != 0, when the density of mu0 is inconsistent with (u0_x)^2, or
/// when no aligned grid is found.
EnergyState to_energy(const PiecewiseLinearFn& u0, const Measure1D& mu0,
                      std::size_t n_cells);

/// sup{xi : y(t, xi) <= x}, clamped to [0, xi_bar]; returns 0 left of the
/// first characteristic.
double xi_of_x(const EnergyState& st, double x);

/// Reconstruct (u, mu) at the state's time: u through the position map with
/// constant stretches across gaps, mu as the push-forward of Lebesgue measure
/// on [0, xi_bar] (cells where U_xi vanishes concentrate into atoms).
PhysicalSnapshot to_physical(const EnergyState& st);

}  // namespace awave
