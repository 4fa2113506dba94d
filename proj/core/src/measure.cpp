#include "awave/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace awave {

namespace {

double position_scale(const std::vector<double>& bp, const std::vector<Atom>& atoms) {
    double scale = 1.0;
    for (double x : bp) scale = std::max(scale, std::fabs(x));
    for (const Atom& a : atoms) scale = std::max(scale, std::fabs(a.x));
    return scale;
}

}  // namespace

Measure1D::Measure1D(std::vector<double> breakpoints, std::vector<double> density,
                     std::vector<Atom> atoms) {
    if (breakpoints.empty()) {
        if (!density.empty())
            throw config_error("measure density given without breakpoints");
    } else if (density.size() + 1 != breakpoints.size()) {
        throw config_error("measure needs density.size() + 1 == breakpoints.size()");
    }
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
        if (!(breakpoints[i] < breakpoints[i + 1]))
            throw config_error("measure breakpoints must be strictly increasing");
    for (double d : density)
        if (!(d >= 0.0)) throw config_error("measure density must be nonnegative");
    for (const Atom& a : atoms) {
        if (!(a.mass >= 0.0)) throw config_error("atom mass must be nonnegative");
        if (!(a.x >= 0.0)) throw config_error("atom position must be nonnegative");
    }
    atoms.erase(std::remove_if(atoms.begin(), atoms.end(),
                               [](const Atom& a) { return a.mass == 0.0; }),
                atoms.end());
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& a, const Atom& b) { return a.x < b.x; });

    const double snap = 1e-12 * position_scale(breakpoints, atoms);

    // Merge atoms that coincide at the snap resolution.
    std::vector<Atom> merged;
    for (const Atom& a : atoms) {
        if (!merged.empty() && a.x - merged.back().x <= snap) {
            Atom& m = merged.back();
            m.x = (m.x * m.mass + a.x * a.mass) / (m.mass + a.mass);
            m.mass += a.mass;
        } else {
            merged.push_back(a);
        }
    }

    // Atom positions become breakpoints; cells split, window extends.
    std::vector<double> bp = breakpoints;
    for (Atom& a : merged) {
        auto it = std::lower_bound(bp.begin(), bp.end(), a.x);
        if (it != bp.end() && *it - a.x <= snap) {
            a.x = *it;
            continue;
        }
        if (it != bp.begin() && a.x - *(it - 1) <= snap) {
            a.x = *(it - 1);
            continue;
        }
        bp.insert(it, a.x);
    }

    std::vector<double> dens(bp.empty() ? 0 : bp.size() - 1, 0.0);
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
        double mid = 0.5 * (bp[i] + bp[i + 1]);
        auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), mid);
        if (it == breakpoints.begin() || it == breakpoints.end()) continue;
        dens[i] = density[static_cast<std::size_t>(it - breakpoints.begin()) - 1];
    }

    bp_ = std::move(bp);
    dens_ = std::move(dens);
    atoms_ = std::move(merged);

    atom_at_bp_.assign(bp_.size(), 0.0);
    for (const Atom& a : atoms_) {
        auto it = std::lower_bound(bp_.begin(), bp_.end(), a.x);
        atom_at_bp_[static_cast<std::size_t>(it - bp_.begin())] += a.mass;
    }
    cum_at_bp_.assign(bp_.size(), 0.0);
    double cum = 0.0;
    for (std::size_t i = 0; i < bp_.size(); ++i) {
        if (i > 0) cum += dens_[i - 1] * (bp_[i] - bp_[i - 1]);
        cum += atom_at_bp_[i];
        cum_at_bp_[i] = cum;
    }
    total_ = cum;
}

double Measure1D::cdf(double x) const {
    if (bp_.empty() || x < bp_.front()) return 0.0;
    if (x >= bp_.back()) return total_;
    auto it = std::upper_bound(bp_.begin(), bp_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - bp_.begin()) - 1;
    return cum_at_bp_[i] + dens_[i] * (x - bp_[i]);
}

double Measure1D::quantile(double xi) const {
    const double slack = 1e-12 * std::max(1.0, total_);
    if (xi < -slack || xi > total_ + slack)
        throw std::out_of_range("quantile argument outside [0, total mass]");
    xi = std::clamp(xi, 0.0, total_);
    if (bp_.empty()) return 0.0;

    if (xi == 0.0) {
        // sup{x : cdf(x) = 0}: the first point carrying mass.
        for (std::size_t i = 0; i < bp_.size(); ++i) {
            if (atom_at_bp_[i] > 0.0) return bp_[i];
            if (i + 1 < bp_.size() && dens_[i] > 0.0) return bp_[i];
        }
        return bp_.front();
    }

    auto it = std::lower_bound(cum_at_bp_.begin(), cum_at_bp_.end(), xi);
    std::size_t j = static_cast<std::size_t>(it - cum_at_bp_.begin());
    if (j >= bp_.size()) j = bp_.size() - 1;
    if (j == 0) return bp_.front();
    double c_prev = cum_at_bp_[j - 1];
    double ramp = dens_[j - 1] * (bp_[j] - bp_[j - 1]);
    if (dens_[j - 1] > 0.0 && c_prev + ramp >= xi)
        return bp_[j - 1] + (xi - c_prev) / dens_[j - 1];
    return bp_[j];
}

namespace {

// Concave piecewise-linear function as a knot list, used by the flat-metric
// dynamic program. All three transforms below preserve concavity exactly.
struct ConcavePL {
    std::vector<double> xs, ys;

    double eval(double x) const {
        if (x <= xs.front()) return ys.front();
        if (x >= xs.back()) return ys.back();
        auto it = std::upper_bound(xs.begin(), xs.end(), x);
        std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
        double dx = xs[i + 1] - xs[i];
        if (dx <= 0.0) return ys[i];
        double w = (x - xs[i]) / dx;
        return ys[i] + w * (ys[i + 1] - ys[i]);
    }

    // x -> max over [x-s, x+s]: knots left of the peak shift left, knots
    // right of it shift right, the peak becomes a plateau.
    void spread(double s) {
        std::size_t peak = 0;
        for (std::size_t i = 1; i < ys.size(); ++i)
            if (ys[i] > ys[peak]) peak = i;
        std::vector<double> nx, ny;
        nx.reserve(xs.size() + 1);
        ny.reserve(ys.size() + 1);
        for (std::size_t i = 0; i <= peak; ++i) {
            nx.push_back(xs[i] - s);
            ny.push_back(ys[i]);
        }
        for (std::size_t i = peak; i < xs.size(); ++i) {
            nx.push_back(xs[i] + s);
            ny.push_back(ys[i]);
        }
        xs = std::move(nx);
        ys = std::move(ny);
    }

    void clip(double lo, double hi) {
        double ylo = eval(lo), yhi = eval(hi);
        std::vector<double> nx{lo}, ny{ylo};
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (xs[i] > lo && xs[i] < hi) {
                nx.push_back(xs[i]);
                ny.push_back(ys[i]);
            }
        }
        nx.push_back(hi);
        ny.push_back(yhi);
        xs = std::move(nx);
        ys = std::move(ny);
    }

    void add_linear(double coeff) {
        for (std::size_t i = 0; i < xs.size(); ++i) ys[i] += coeff * xs[i];
    }

    double max_value() const { return *std::max_element(ys.begin(), ys.end()); }
};

}  // namespace

double flat_distance(const Measure1D& mu, const Measure1D& nu, double grid_step) {
    if (!(grid_step > 0.0)) throw config_error("flat_distance needs grid_step > 0");
    if (mu.is_zero() && nu.is_zero()) return 0.0;

    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    auto widen = [&](const Measure1D& m) {
        if (m.breakpoints().empty()) return;
        lo = std::min(lo, m.breakpoints().front());
        hi = std::max(hi, m.breakpoints().back());
    };
    widen(mu);
    widen(nu);
    if (!(lo <= hi)) return 0.0;

    const double delta = grid_step;
    const long P = std::max<long>(1, static_cast<long>(std::ceil((hi - lo) / delta - 1e-12)));

    std::vector<double> c(static_cast<std::size_t>(P), 0.0);
    auto bin_index = [&](double x) {
        long k = static_cast<long>(std::floor((x - lo) / delta));
        return static_cast<std::size_t>(std::clamp(k, 0L, P - 1));
    };
    auto add_measure = [&](const Measure1D& m, double sign) {
        const auto& bp = m.breakpoints();
        const auto& dn = m.density();
        for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
            if (dn[i] == 0.0) continue;
            std::size_t k0 = bin_index(bp[i]), k1 = bin_index(bp[i + 1]);
            for (std::size_t k = k0; k <= k1; ++k) {
                double a = std::max(bp[i], lo + static_cast<double>(k) * delta);
                double b = std::min(bp[i + 1], lo + static_cast<double>(k + 1) * delta);
                if (b > a) c[k] += sign * dn[i] * (b - a);
            }
        }
        for (const Atom& a : m.atoms()) c[bin_index(a.x)] += sign * a.mass;
    };
    add_measure(mu, +1.0);
    add_measure(nu, -1.0);

    // Maximize sum c_i phi_i over |phi_i| <= 1, |phi_{i+1} - phi_i| <= delta:
    // V_i(phi) = best value with the i-th variable pinned at phi is concave
    // piecewise linear, so each transition is spread + clip + a linear term.
    ConcavePL v{{-1.0, 1.0}, {0.0, 0.0}};
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (i > 0) {
            v.spread(delta);
            v.clip(-1.0, 1.0);
        }
        v.add_linear(c[i]);
    }
    return std::max(0.0, v.max_value());
}

Measure1D pushforward_decompose(const std::vector<double>& xi_grid,
                                const std::vector<double>& y_vals,
                                const std::vector<double>& uxi_vals,
                                double sing_eps, double merge_tol) {
    const std::size_t n = xi_grid.size();
    if (y_vals.size() != n)
        throw std::invalid_argument("pushforward: xi_grid and y_vals length mismatch");
    if (n == 0) return {};
    if (n >= 1 && uxi_vals.size() + 1 != n)
        throw std::invalid_argument("pushforward: need one uxi value per cell");
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (xi_grid[i + 1] < xi_grid[i])
            throw std::invalid_argument("pushforward: xi_grid must be nondecreasing");
        if (y_vals[i + 1] < y_vals[i])
            throw std::invalid_argument("pushforward: y_vals must be nondecreasing");
    }

    double max_uxi = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (xi_grid[i + 1] > xi_grid[i])
            max_uxi = std::max(max_uxi, std::fabs(uxi_vals[i]));
    const double eps = sing_eps < 0.0 ? 1e-6 * std::max(1.0, max_uxi) : sing_eps;
    const double span = y_vals.back() - y_vals.front();
    const double mtol = merge_tol < 0.0 ? 1e-9 * std::max(1.0, span) : merge_tol;

    std::vector<double> bp, dens;
    std::vector<Atom> atoms;
    auto push_cell = [&](double a, double b, double d) {
        if (bp.empty()) {
            bp.push_back(a);
        } else if (a > bp.back()) {
            dens.push_back(0.0);
            bp.push_back(a);
        }
        if (b > bp.back()) {
            dens.push_back(d);
            bp.push_back(b);
        }
    };
    double run_mass = 0.0, run_moment = 0.0;
    auto flush_run = [&]() {
        if (run_mass > 0.0) atoms.push_back({run_moment / run_mass, run_mass});
        run_mass = run_moment = 0.0;
    };

    for (std::size_t i = 0; i + 1 < n; ++i) {
        double dxi = xi_grid[i + 1] - xi_grid[i];
        double dy = y_vals[i + 1] - y_vals[i];
        if (dxi <= 0.0) {
            if (dy > 0.0) {
                flush_run();
                push_cell(y_vals[i], y_vals[i + 1], 0.0);
            }
            continue;
        }
        if (std::fabs(uxi_vals[i]) <= eps || dy <= 0.0) {
            run_mass += dxi;
            run_moment += dxi * 0.5 * (y_vals[i] + y_vals[i + 1]);
        } else {
            flush_run();
            push_cell(y_vals[i], y_vals[i + 1], dxi / dy);
        }
    }
    flush_run();

    std::vector<Atom> merged;
    for (const Atom& a : atoms) {
        if (!merged.empty() && a.x - merged.back().x <= mtol) {
            Atom& m = merged.back();
            m.x = (m.x * m.mass + a.x * a.mass) / (m.mass + a.mass);
            m.mass += a.mass;
        } else {
            merged.push_back(a);
        }
    }
    return Measure1D(std::move(bp), std::move(dens), std::move(merged));
}

Measure1D measure_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw config_error(std::string("measure JSON parse failure: ") + e.what());
    }
    if (!j.is_object()) throw config_error("measure JSON must be an object");
    std::vector<double> bp, dens;
    std::vector<Atom> atoms;
    if (j.contains("breakpoints")) bp = j.at("breakpoints").get<std::vector<double>>();
    if (j.contains("density")) dens = j.at("density").get<std::vector<double>>();
    if (j.contains("atoms")) {
        for (const auto& e : j.at("atoms")) {
            if (!e.is_array() || e.size() != 2)
                throw config_error("measure atom entries must be [position, mass]");
            atoms.push_back({e[0].get<double>(), e[1].get<double>()});
        }
    }
    return Measure1D(std::move(bp), std::move(dens), std::move(atoms));
}

std::string measure_to_json(const Measure1D& mu) {
    nlohmann::json j;
    j["breakpoints"] = mu.breakpoints();
    j["density"] = mu.density();
    auto arr = nlohmann::json::array();
    for (const Atom& a : mu.atoms()) arr.push_back({a.x, a.mass});
    j["atoms"] = arr;
    return j.dump(2);
}

}  // namespace awave
