#include "awave/dissipative.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace awave {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> d_rhs_values(const std::vector<double>& Y,
                                 const DissipativeState& st, const Flux& fx) {
    const std::size_t n = Y.size();
    std::vector<double> dY(n, 0.0);
    const double dxi = st.dxi();
    double v_prev = 0.0;
    fx.require_in_range(v_prev, 0.0);
    double g_prev = fx.d2(v_prev);
    for (std::size_t k = 0; k < n; ++k) {
        double phi = st.jminus[k] ? std::min(Y[k], 0.0) : Y[k];
        double v = v_prev + phi * dxi;
        fx.require_in_range(v, st.xi(k + 1));
        double g = fx.d2(v);
        dY[k] = 0.25 * (g_prev + g);
        v_prev = v;
        g_prev = g;
    }
    return dY;
}

}  // namespace

double DissipativeState::z(std::size_t cell) const {
    if (frozen[cell]) return 0.0;
    if (jminus[cell]) return std::min(Y[cell], 0.0);
    return Y[cell];
}

DissipativeState init_dissipative(const PiecewiseLinearFn& u0, std::size_t n_cells) {
    if (u0.x.empty() || u0.x.size() != u0.v.size())
        throw config_error("profile needs matching, nonempty node and value lists");

    std::vector<double> dens(u0.n_cells(), 0.0);
    for (std::size_t i = 0; i < u0.n_cells(); ++i) {
        double s = u0.slope(i);
        dens[i] = s * s;
    }
    Measure1D m(u0.x, dens);
    EnergyState es = to_energy(u0, m, n_cells);

    DissipativeState st;
    st.t = 0.0;
    st.xi_bar = es.xi_bar;
    st.n_cells = es.n_cells;
    st.ybase = es.ybase;
    st.sing_gaps = es.sing_gaps;
    st.Y.resize(st.n_cells);
    st.frozen.assign(st.n_cells, 0);
    st.jminus.assign(st.n_cells, 0);
    st.freeze_time.assign(st.n_cells, kNaN);
    for (std::size_t k = 0; k < st.n_cells; ++k) {
        st.Y[k] = es.uxi(k);
        st.jminus[k] = st.Y[k] <= 0.0 ? 1 : 0;
        if (st.Y[k] == 0.0) {
            st.frozen[k] = 1;
            st.freeze_time[k] = 0.0;
        }
    }
    return st;
}

std::vector<double> d_rhs(const DissipativeState& st, const Flux& fx) {
    return d_rhs_values(st.Y, st, fx);
}

DissipativeState d_step(const DissipativeState& st, const Flux& fx, double h) {
    if (!(h > 0.0)) throw config_error("dissipative flow is forward-only");
    const std::size_t n = st.Y.size();

    std::vector<double> k1 = d_rhs_values(st.Y, st, fx);
    std::vector<double> tmp(n);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = st.Y[i] + 0.5 * h * k1[i];
    std::vector<double> k2 = d_rhs_values(tmp, st, fx);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = st.Y[i] + 0.5 * h * k2[i];
    std::vector<double> k3 = d_rhs_values(tmp, st, fx);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = st.Y[i] + h * k3[i];
    std::vector<double> k4 = d_rhs_values(tmp, st, fx);

    DissipativeState out = st;
    for (std::size_t i = 0; i < n; ++i)
        out.Y[i] = st.Y[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    out.t = st.t + h;
    out.ybase = st.ybase + h * fx.d1(0.0);

    double ynorm = 0.0;
    for (std::size_t i = 0; i < n; ++i) ynorm = std::max(ynorm, std::fabs(st.Y[i]));
    const double theta = 1e-6 * std::max(1.0, ynorm);

    for (std::size_t i = 0; i < n; ++i) {
        if (st.frozen[i]) continue;
        const double ya = st.Y[i], yb = out.Y[i];
        double t_freeze = kNaN;
        if (std::fabs(ya) <= theta) {
            t_freeze = st.t;
        } else if (std::fabs(yb) <= theta) {
            t_freeze = st.t + h;
        } else if (ya * yb < 0.0) {
            t_freeze = st.t + h * ya / (ya - yb);
        } else {
            // Tangential touch: the value can dip to 0 inside the step while
            // both endpoints keep their sign. Model the step with the cubic
            // Hermite interpolant (endpoint values and slopes are free from
            // the RK4 stages) and freeze if an interior extremum reaches 0
            // within theta.
            const double da = k1[i], db = k4[i];
            const double a0 = ya;
            const double a1 = h * da;
            const double a2 = -3.0 * ya + 3.0 * yb - 2.0 * h * da - h * db;
            const double a3 = 2.0 * ya - 2.0 * yb + h * da + h * db;
            const double A = 3.0 * a3, B = 2.0 * a2, C = a1;
            double roots[2];
            int nroots = 0;
            if (std::fabs(A) < 1e-300) {
                if (B != 0.0) roots[nroots++] = -C / B;
            } else {
                double disc = B * B - 4.0 * A * C;
                if (disc >= 0.0) {
                    double sq = std::sqrt(disc);
                    double q = -0.5 * (B + std::copysign(sq, B));
                    roots[nroots++] = q / A;
                    if (q != 0.0) roots[nroots++] = C / q;
                }
            }
            std::sort(roots, roots + nroots);
            for (int r = 0; r < nroots; ++r) {
                double tau = roots[r];
                if (!(tau > 0.0 && tau < 1.0)) continue;
                double val = ((a3 * tau + a2) * tau + a1) * tau + a0;
                if (std::fabs(val) <= theta) {
                    t_freeze = st.t + tau * h;
                    break;
                }
            }
        }
        if (!std::isnan(t_freeze)) {
            out.frozen[i] = 1;
            out.freeze_time[i] = t_freeze;
        }
    }
    return out;
}

DissipativeState d_evolve(const DissipativeState& st, const Flux& fx, double t_target,
                          double h) {
    if (!(h > 0.0)) throw config_error("d_evolve needs a positive step size");
    const double ttol = 1e-12 * std::max(1.0, std::fabs(t_target));
    if (t_target < st.t - ttol) throw config_error("d_evolve is forward-only");
    DissipativeState cur = st;
    double span = t_target - st.t;
    if (span <= ttol) {
        cur.t = t_target;
        return cur;
    }
    const auto full = static_cast<long long>(std::floor(span / h + 1e-9));
    for (long long k = 0; k < full; ++k) cur = d_step(cur, fx, h);
    double rem = t_target - (st.t + h * static_cast<double>(full));
    if (rem > ttol) cur = d_step(cur, fx, rem);
    cur.t = t_target;
    return cur;
}

double d_energy(const DissipativeState& st) {
    if (st.n_cells == 0 || st.xi_bar == 0.0) return 0.0;
    std::size_t live = 0;
    for (std::size_t k = 0; k < st.n_cells; ++k)
        if (!st.frozen[k] && st.z(k) != 0.0) ++live;
    return st.dxi() * static_cast<double>(live);
}

PhysicalSnapshot d_to_physical(const DissipativeState& st) {
    const double xtol = 1e-12 * std::max(1.0, st.xi_bar);
    std::vector<double> xg{0.0}, yg{st.ybase}, ux, uv{0.0};
    double cur_xi = 0.0, cur_y = st.ybase, cur_u = 0.0;
    std::size_t g = 0;
    auto push_node = [&](double cell_uxi) {
        ux.push_back(cell_uxi);
        xg.push_back(cur_xi);
        yg.push_back(cur_y);
        uv.push_back(cur_u);
    };
    while (g < st.sing_gaps.size() && st.sing_gaps[g].xi <= xtol) {
        cur_y += st.sing_gaps[g].size;
        push_node(0.0);
        ++g;
    }
    for (std::size_t k = 0; k < st.n_cells; ++k) {
        const double oxi1 = st.xi(k + 1);
        const double zz = st.z(k);
        const bool live = !st.frozen[k] && zz != 0.0;
        double seg = st.xi(k);
        while (g < st.sing_gaps.size() && st.sing_gaps[g].xi < oxi1 - xtol) {
            double xs = std::max(st.sing_gaps[g].xi, seg);
            if (xs > seg && live) {
                double len = xs - seg;
                cur_xi += len;
                cur_y += zz * zz * len;
                cur_u += zz * len;
                push_node(zz);
            }
            cur_y += st.sing_gaps[g].size;
            push_node(0.0);
            seg = xs;
            ++g;
        }
        if (live && oxi1 > seg) {
            double len = oxi1 - seg;
            cur_xi += len;
            cur_y += zz * zz * len;
            cur_u += zz * len;
            push_node(zz);
        }
    }

    PhysicalSnapshot snap;
    snap.t = st.t;
    snap.mu = pushforward_decompose(xg, yg, ux);

    const double scale = std::max({1.0, std::fabs(yg.front()), std::fabs(yg.back())});
    const double ctol = 1e-12 * scale;
    std::vector<double> nx{0.0}, nv{0.0};
    for (std::size_t k = 0; k < yg.size(); ++k) {
        if (yg[k] <= nx.back() + ctol) {
            nv.back() = uv[k];
        } else {
            nx.push_back(yg[k]);
            nv.push_back(uv[k]);
        }
    }
    snap.u = PiecewiseLinearFn{std::move(nx), std::move(nv)};
    return snap;
}

}  // namespace awave
