#include "awave/conservative.hpp"

#include <cmath>

namespace awave {

namespace {

// dU over an arbitrary node-value array (used for RK4 stage states).
std::vector<double> rhs_values(const std::vector<double>& U, const EnergyState& st,
                               const Flux& fx) {
    const std::size_t n = U.size();
    std::vector<double> dU(n, 0.0);
    if (n == 0) return dU;
    const double dxi = st.dxi();
    for (std::size_t i = 0; i < n; ++i) fx.require_in_range(U[i], st.xi(i));
    double trapz = 0.0;
    double g_prev = fx.d2(U[0]);
    dU[0] = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        double g = fx.d2(U[i]);
        trapz += dxi * 0.5 * (g_prev + g);
        dU[i] = 0.5 * trapz;
        g_prev = g;
    }
    return dU;
}

}  // namespace

std::vector<double> rhs(const EnergyState& st, const Flux& fx) {
    return rhs_values(st.U, st, fx);
}

EnergyState step(const EnergyState& st, const Flux& fx, double h) {
    const std::size_t n = st.U.size();
    std::vector<double> k1 = rhs_values(st.U, st, fx);
    std::vector<double> tmp(n);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = st.U[i] + 0.5 * h * k1[i];
    std::vector<double> k2 = rhs_values(tmp, st, fx);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = st.U[i] + 0.5 * h * k2[i];
    std::vector<double> k3 = rhs_values(tmp, st, fx);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = st.U[i] + h * k3[i];
    std::vector<double> k4 = rhs_values(tmp, st, fx);

    EnergyState out = st;
    for (std::size_t i = 0; i < n; ++i)
        out.U[i] = st.U[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    out.t = st.t + h;
    out.ybase = st.ybase + h * fx.d1(0.0);
    return out;
}

EnergyState evolve(const EnergyState& st, const Flux& fx, double t_target, double h) {
    if (!(h > 0.0)) throw config_error("evolve needs a positive step size");
    const double span = t_target - st.t;
    const double ttol = 1e-12 * std::max(1.0, std::fabs(t_target));
    EnergyState cur = st;
    if (std::fabs(span) <= ttol) {
        cur.t = t_target;
        return cur;
    }
    const double dir = span > 0.0 ? 1.0 : -1.0;
    const auto full = static_cast<long long>(std::floor(std::fabs(span) / h + 1e-9));
    for (long long k = 0; k < full; ++k) cur = step(cur, fx, dir * h);
    double rem = t_target - (st.t + dir * h * static_cast<double>(full));
    if (std::fabs(rem) > ttol) cur = step(cur, fx, rem);
    cur.t = t_target;
    return cur;
}

EnergyState picard_solve(const EnergyState& st, const Flux& fx, double t_target,
                         double tol, int max_iter, double h, PicardStats* stats) {
    if (!(h > 0.0)) throw config_error("picard_solve needs a positive step size");
    if (!(tol > 0.0)) throw config_error("picard_solve needs a positive tolerance");
    if (t_target < st.t) throw config_error("picard_solve is forward-only");

    const double span = t_target - st.t;
    const std::size_t n = st.U.size();
    EnergyState out = st;
    out.t = t_target;
    out.ybase = st.ybase + span * fx.d1(0.0);
    if (stats) *stats = {};
    if (span <= 1e-12 * std::max(1.0, std::fabs(t_target)) || n == 0) return out;

    const auto M = static_cast<std::size_t>(std::ceil(span / h - 1e-12));
    const double tau = span / static_cast<double>(M);
    const double dxi = st.dxi();

    // W[m] holds the iterate at time level m; every level starts at the
    // initial data.
    std::vector<std::vector<double>> W(M + 1, st.U);
    std::vector<std::vector<double>> next(M + 1, st.U);
    std::vector<double> mid(n), trapz(n), accum(n);

    double prev_delta = 0.0;
    int iter = 0;
    for (;;) {
        ++iter;
        std::fill(accum.begin(), accum.end(), 0.0);
        double delta = 0.0;
        for (std::size_t j = 0; j < M; ++j) {
            for (std::size_t i = 0; i < n; ++i) {
                mid[i] = 0.5 * (W[j][i] + W[j + 1][i]);
                fx.require_in_range(mid[i], st.xi(i));
            }
            trapz[0] = 0.0;
            double g_prev = fx.d2(mid[0]);
            for (std::size_t i = 1; i < n; ++i) {
                double g = fx.d2(mid[i]);
                trapz[i] = trapz[i - 1] + dxi * 0.5 * (g_prev + g);
                g_prev = g;
            }
            for (std::size_t i = 0; i < n; ++i) {
                accum[i] += tau * trapz[i];
                double v = st.U[i] + 0.5 * accum[i];
                delta = std::max(delta, std::fabs(v - W[j + 1][i]));
                next[j + 1][i] = v;
            }
        }
        std::swap(W, next);
        if (stats) {
            stats->iterations = iter;
            stats->final_delta = delta;
            stats->last_ratio = prev_delta > 0.0 ? delta / prev_delta : 0.0;
        }
        if (delta < tol) break;
        if (iter >= max_iter) {
            double ratio = prev_delta > 0.0 ? delta / prev_delta : 0.0;
            throw convergence_error("picard_solve did not converge", iter, ratio);
        }
        prev_delta = delta;
    }

    out.U = W[M];
    out.U[0] = 0.0;
    return out;
}

}  // namespace awave
