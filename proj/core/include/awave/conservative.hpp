#pragma once

#include <vector>

#include "awave/energy_state.hpp"
#include "awave/flux.hpp"

namespace awave {

/// Time derivative of the node values: dU_i = 1/2 * trapezoid of f''(U) over
/// [0, xi_i], so dU_0 = 0 exactly. Throws range_error when a node value is
/// outside the flux working range.
std::vector<double> rhs(const EnergyState& st, const Flux& fx);

/// One classical RK4 step of size h (either sign: the conservative flow is a
/// group). ybase advances by h * f'(0); xi_bar and the gaps are carried
/// unchanged. On a range error mid-stage the input state is untouched.
EnergyState step(const EnergyState& st, const Flux& fx, double h);

/// Repeated steps of magnitude h toward t_target, with a final partial step
/// landing exactly on t_target.
EnergyState evolve(const EnergyState& st, const Flux& fx, double t_target,
                   double h);

struct PicardStats {
    int iterations = 0;
    double final_delta = 0.0;
    double last_ratio = 0.0;
};

/// Fixed-point iteration of U = U0 + 1/2 ∫0^t ∫0^xi f''(U) on a fixed
/// time-by-xi grid with step h (midpoint rule in time), run until successive
/// iterates differ by less than tol in sup norm. Returns the slice at
/// t_target; an independent scheme used to cross-validate evolve. Throws
/// convergence_error when max_iter sweeps do not reach tol.
EnergyState picard_solve(const EnergyState& st, const Flux& fx, double t_target,
                         double tol, int max_iter, double h,
                         PicardStats* stats = nullptr);

}  // namespace awave
