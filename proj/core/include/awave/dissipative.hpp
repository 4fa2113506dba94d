#pragma once

#include <cstdint>
#include <vector>

#include "awave/energy_state.hpp"
#include "awave/flux.hpp"

namespace awave {

/// State of the dissipative flow: one value Y per grid cell (the unclipped
/// fixed-point variable), the set J- fixed from the initial data, and a
/// latched frozen flag per cell. The physical derivative is the derived
/// variable z(): clipped to min(Y, 0) on J- cells, equal to Y elsewhere, and
/// identically 0 once a cell freezes. Frozen cells are dead: their energy is
/// dissipated and never returns.
struct DissipativeState {
    double t = 0.0;
    double xi_bar = 0.0;
    std::size_t n_cells = 0;
    /// Per-cell fixed-point variable; keeps evolving after a freeze.
    std::vector<double> Y;
    /// Latched when the derived z of a live cell reaches 0; never cleared.
    std::vector<std::uint8_t> frozen;
    /// Cell in J- = {xi : initial slope <= 0}; fixed at initialization.
    std::vector<std::uint8_t> jminus;
    /// Freeze instant per cell (quiet NaN while the cell is alive).
    std::vector<double> freeze_time;
    double ybase = 0.0;
    std::vector<SingGap> sing_gaps;

    double dxi() const { return n_cells == 0 ? 0.0 : xi_bar / static_cast<double>(n_cells); }
    double xi(std::size_t i) const {
        return n_cells == 0 ? 0.0
                            : xi_bar * static_cast<double>(i) / static_cast<double>(n_cells);
    }
    /// Derived per-cell derivative value.
    double z(std::size_t cell) const;
};

/// Initialize from a profile alone: the energy measure is slope^2 dx, xi_bar
/// its total, Y the cell-averaged slope in energy coordinates, jminus the
/// cells with nonpositive slope. Cells whose slope vanishes identically are
/// frozen from the start. Throws config_error when u0(0) != 0.
DissipativeState init_dissipative(const PiecewiseLinearFn& u0, std::size_t n_cells);

/// dY per cell with the clipped integrand: dY_k is 1/2 f'' evaluated through
/// the prefix sums of the clipped variable (frozen cells still receive dY;
/// only the derived z stays pinned at 0).
std::vector<double> d_rhs(const DissipativeState& st, const Flux& fx);

/// One forward RK4 step. After the step, live cells whose Y reached or
/// crossed 0 are frozen: sign changes are timed by linear interpolation
/// across the step, and a tangential touch (interior extremum of the cubic
/// Hermite model within 1e-6 * max(1, |Y|_inf) of 0) freezes at the
/// extremum. Throws config_error for h <= 0: the flow is forward-only.
DissipativeState d_step(const DissipativeState& st, const Flux& fx, double h);

/// Repeated d_step with an exact landing on t_target (>= st.t).
DissipativeState d_evolve(const DissipativeState& st, const Flux& fx,
                          double t_target, double h);

/// Remaining energy: dxi * number of live cells with nonzero z. Nonincreasing
/// along d_evolve; drops exactly at freezing events.
double d_energy(const DissipativeState& st);

/// Reconstruct (u, mu): U is the prefix sum of z * dxi, positions advance by
/// z^2 * dxi plus the gaps. Frozen cells contribute no length, no slope, and
/// no measure: the output mass equals d_energy(st).
PhysicalSnapshot d_to_physical(const DissipativeState& st);

}  // namespace awave
