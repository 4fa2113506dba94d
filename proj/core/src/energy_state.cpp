#include "awave/energy_state.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace awave {

namespace {

// Position map with gap nodes inserted: xi nondecreasing (a gap duplicates
// its xi entry), y nondecreasing, one uxi per cell (0 across gaps), U value
// per node. This is the common substrate of positions, xi_of_x and
// to_physical.
struct PositionWalk {
    std::vector<double> xi, y, uxi, uval;
};

PositionWalk walk_positions(const EnergyState& st) {
    PositionWalk w;
    const double xtol = 1e-12 * std::max(1.0, st.xi_bar);
    double cur_y = st.ybase;
    std::size_t g = 0;
    w.xi.push_back(0.0);
    w.y.push_back(cur_y);
    w.uval.push_back(st.U.empty() ? 0.0 : st.U[0]);
    while (g < st.sing_gaps.size() && st.sing_gaps[g].xi <= xtol) {
        cur_y += st.sing_gaps[g].size;
        w.uxi.push_back(0.0);
        w.xi.push_back(0.0);
        w.y.push_back(cur_y);
        w.uval.push_back(w.uval.front());
        ++g;
    }
    for (std::size_t i = 0; i < st.n_cells; ++i) {
        const double xi0 = st.xi(i), xi1 = st.xi(i + 1);
        const double ux = st.uxi(i);
        double seg = xi0;
        while (g < st.sing_gaps.size() && st.sing_gaps[g].xi < xi1 - xtol) {
            double xs = std::max(st.sing_gaps[g].xi, seg);
            if (xs > seg) {
                cur_y += ux * ux * (xs - seg);
                w.uxi.push_back(ux);
                w.xi.push_back(xs);
                w.y.push_back(cur_y);
                w.uval.push_back(st.U[i] + ux * (xs - xi0));
                seg = xs;
            }
            cur_y += st.sing_gaps[g].size;
            w.uxi.push_back(0.0);
            w.xi.push_back(seg);
            w.y.push_back(cur_y);
            w.uval.push_back(st.U[i] + ux * (seg - xi0));
            ++g;
        }
        cur_y += ux * ux * (xi1 - seg);
        w.uxi.push_back(ux);
        w.xi.push_back(xi1);
        w.y.push_back(cur_y);
        w.uval.push_back(st.U[i + 1]);
    }
    return w;
}

}  // namespace

std::vector<double> positions(const EnergyState& st) {
    std::vector<double> pos(st.U.size());
    if (pos.empty()) return pos;
    const double xtol = 1e-12 * std::max(1.0, st.xi_bar);
    const double dxi = st.dxi();
    double acc = st.ybase;
    std::size_t g = 0;
    pos[0] = acc;
    for (std::size_t i = 0; i + 1 < st.U.size(); ++i) {
        double du = st.U[i + 1] - st.U[i];
        if (dxi > 0.0) acc += du * du / dxi;
        while (g < st.sing_gaps.size() && st.sing_gaps[g].xi < st.xi(i + 1) - xtol) {
            acc += st.sing_gaps[g].size;
            ++g;
        }
        pos[i + 1] = acc;
    }
    return pos;
}

EnergyState to_energy(const PiecewiseLinearFn& u0, const Measure1D& mu0,
                      std::size_t n_cells) {
    if (n_cells < 2) throw config_error("to_energy needs at least 2 grid cells");
    if (u0.x.empty() || u0.x.size() != u0.v.size())
        throw config_error("profile needs matching, nonempty node and value lists");
    for (std::size_t i = 0; i + 1 < u0.x.size(); ++i)
        if (!(u0.x[i] < u0.x[i + 1]))
            throw config_error("profile nodes must be strictly increasing");

    double uscale = 1.0;
    for (double v : u0.v) uscale = std::max(uscale, std::fabs(v));
    if (std::fabs(u0(0.0)) > 1e-9 * uscale)
        throw config_error("profile must vanish at x = 0");

    // The absolutely continuous part of mu0 must be the square of the profile
    // slope, cell by cell on the union grid of both representations.
    {
        const auto& bp = mu0.breakpoints();
        double x_end = u0.x.back();
        if (!bp.empty()) x_end = std::max(x_end, bp.back());
        std::vector<double> grid{0.0};
        for (double xn : u0.x)
            if (xn > 0.0 && xn < x_end) grid.push_back(xn);
        for (double xb : bp)
            if (xb > 0.0 && xb < x_end) grid.push_back(xb);
        if (x_end > 0.0) grid.push_back(x_end);
        std::sort(grid.begin(), grid.end());
        const double postol = 1e-12 * std::max(1.0, x_end);
        for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
            if (grid[i + 1] - grid[i] <= postol) continue;
            double mid = 0.5 * (grid[i] + grid[i + 1]);
            double rho = 0.0;
            if (!bp.empty() && mid > bp.front() && mid < bp.back()) {
                auto it = std::upper_bound(bp.begin(), bp.end(), mid);
                rho = mu0.density()[static_cast<std::size_t>(it - bp.begin()) - 1];
            }
            double slope = u0.derivative(mid);
            double err = std::fabs(rho - slope * slope);
            if (err > 1e-6 * std::max({1.0, rho, slope * slope})) {
                std::ostringstream msg;
                msg << "measure density " << rho << " near x=" << mid
                    << " is inconsistent with profile slope squared " << slope * slope;
                throw config_error(msg.str());
            }
        }
    }

    const double total = mu0.total_mass();

    // Grow the grid until every atom mass is an integer number of cells.
    // First look for an exact-to-rounding alignment; only if none exists in
    // the search window settle for the 0.1% tolerance.
    std::size_t N = n_cells;
    if (!mu0.atoms().empty() && total > 0.0) {
        auto aligned = [&](std::size_t cand, double rel_tol) {
            double dxi = total / static_cast<double>(cand);
            for (const Atom& a : mu0.atoms()) {
                double k = std::round(a.mass / dxi);
                if (k < 1.0 || std::fabs(a.mass - k * dxi) > rel_tol * a.mass)
                    return false;
            }
            return true;
        };
        bool found = false;
        for (double rel_tol : {1e-12, 1e-3}) {
            for (std::size_t cand = n_cells; cand <= 64 * n_cells; ++cand) {
                if (aligned(cand, rel_tol)) {
                    N = cand;
                    found = true;
                    break;
                }
            }
            if (found) break;
        }
        if (!found)
            throw config_error(
                "no grid size within 64x of n_cells aligns the atom masses; "
                "increase n_cells");
    }

    EnergyState st;
    st.t = 0.0;
    st.xi_bar = total;
    st.n_cells = N;
    st.U.assign(N + 1, 0.0);
    st.ybase = mu0.quantile(0.0);
    if (total > 0.0) {
        for (std::size_t i = 0; i <= N; ++i) st.U[i] = u0(mu0.quantile(st.xi(i)));
        if (std::fabs(st.U[0]) > 1e-9 * uscale)
            throw config_error("profile does not vanish at the start of the support");
        st.U[0] = 0.0;
    }

    // Interior null intervals of mu0 become position-map jumps.
    {
        const auto& bp = mu0.breakpoints();
        const double postol = 1e-12 * std::max(1.0, bp.empty() ? 0.0 : bp.back());
        std::vector<std::pair<double, double>> mass_intervals;
        for (std::size_t i = 0; i + 1 < bp.size(); ++i)
            if (mu0.density()[i] > 0.0) mass_intervals.push_back({bp[i], bp[i + 1]});
        for (const Atom& a : mu0.atoms()) mass_intervals.push_back({a.x, a.x});
        std::sort(mass_intervals.begin(), mass_intervals.end());
        std::vector<std::pair<double, double>> merged;
        for (const auto& iv : mass_intervals) {
            if (!merged.empty() && iv.first <= merged.back().second + postol)
                merged.back().second = std::max(merged.back().second, iv.second);
            else
                merged.push_back(iv);
        }
        for (std::size_t i = 0; i + 1 < merged.size(); ++i) {
            double a = merged[i].second, b = merged[i + 1].first;
            if (b - a > postol)
                st.sing_gaps.push_back({mu0.cdf(a), b - a});
        }
    }
    return st;
}

double xi_of_x(const EnergyState& st, double x) {
    PositionWalk w = walk_positions(st);
    if (x < w.y.front()) return 0.0;
    if (x >= w.y.back()) return st.xi_bar;
    auto it = std::upper_bound(w.y.begin(), w.y.end(), x);
    std::size_t k = static_cast<std::size_t>(it - w.y.begin()) - 1;
    double dy = w.y[k + 1] - w.y[k];
    double dxi = w.xi[k + 1] - w.xi[k];
    if (dxi <= 0.0 || dy <= 0.0) return w.xi[k];
    return w.xi[k] + (x - w.y[k]) * dxi / dy;
}

PhysicalSnapshot to_physical(const EnergyState& st) {
    PositionWalk w = walk_positions(st);
    PhysicalSnapshot snap;
    snap.t = st.t;
    snap.mu = pushforward_decompose(w.xi, w.y, w.uxi);

    const double scale = std::max({1.0, std::fabs(w.y.front()), std::fabs(w.y.back())});
    const double ctol = 1e-12 * scale;
    std::vector<double> nx{0.0}, nv{0.0};
    for (std::size_t k = 0; k < w.y.size(); ++k) {
        if (w.y[k] <= nx.back() + ctol) {
            nv.back() = w.uval[k];
        } else {
            nx.push_back(w.y[k]);
            nv.push_back(w.uval[k]);
        }
    }
    snap.u = PiecewiseLinearFn{std::move(nx), std::move(nv)};
    return snap;
}

}  // namespace awave
