#include "awave/scenario.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include "awave/conservative.hpp"
#include "awave/dissipative.hpp"
#include "awave/energy_state.hpp"

namespace awave {

namespace fs = std::filesystem;

std::string format_double(double v) {
    if (v == 0.0) v = std::fabs(v);
    std::array<char, 32> buf;
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

namespace {

std::string mode_name(RunMode m) {
    switch (m) {
        case RunMode::conservative: return "conservative";
        case RunMode::dissipative: return "dissipative";
        case RunMode::both: return "both";
    }
    return "conservative";
}

RunMode mode_from_name(const std::string& s) {
    if (s == "conservative") return RunMode::conservative;
    if (s == "dissipative") return RunMode::dissipative;
    if (s == "both") return RunMode::both;
    throw config_error("unknown mode \"" + s +
                       "\" (expected conservative, dissipative or both)");
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw config_error("cannot open for writing: " + p.string());
    f << content;
    f.close();
    if (!f) throw std::runtime_error("failed writing " + p.string());
}

std::string read_file(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) throw config_error("cannot read " + p.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

double parse_num(std::string_view field, const std::string& where) {
    double v = 0.0;
    auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size())
        throw config_error("bad numeric field \"" + std::string(field) + "\" in " +
                           where);
    return v;
}

std::string profile_csv(const PhysicalSnapshot& s) {
    std::string out = "t,x,u\n";
    const std::string ts = format_double(s.t);
    for (std::size_t i = 0; i < s.u.x.size(); ++i) {
        out += ts;
        out += ',';
        out += format_double(s.u.x[i]);
        out += ',';
        out += format_double(s.u.v[i]);
        out += '\n';
    }
    return out;
}

PiecewiseLinearFn parse_profile_csv(const std::string& text, const std::string& where) {
    PiecewiseLinearFn u;
    std::istringstream in(text);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        std::size_t c1 = line.find(',');
        std::size_t c2 = c1 == std::string::npos ? std::string::npos
                                                 : line.find(',', c1 + 1);
        if (c2 == std::string::npos)
            throw config_error("profile row needs three columns in " + where);
        std::string_view sv(line);
        u.x.push_back(parse_num(sv.substr(c1 + 1, c2 - c1 - 1), where));
        u.v.push_back(parse_num(sv.substr(c2 + 1), where));
    }
    if (u.x.empty()) throw config_error("profile file has no rows: " + where);
    return u;
}

struct InitialData {
    PiecewiseLinearFn u0;
    Measure1D mu0;
};

InitialData make_initial(const ScenarioConfig& cfg) {
    if (cfg.u_nodes.size() != cfg.u_values.size())
        throw config_error("u_nodes and u_values must have matching lengths");
    if (cfg.u_nodes.size() == 1)
        throw config_error("initial profile needs at least two nodes (or none)");
    InitialData init;
    if (cfg.u_nodes.empty()) {
        init.u0.x = {0.0, 1.0};
        init.u0.v = {0.0, 0.0};
    } else {
        for (std::size_t i = 0; i + 1 < cfg.u_nodes.size(); ++i)
            if (!(cfg.u_nodes[i] < cfg.u_nodes[i + 1]))
                throw config_error("u_nodes must be strictly increasing");
        init.u0.x = cfg.u_nodes;
        init.u0.v = cfg.u_values;
    }
    std::vector<double> dens(init.u0.x.size() - 1);
    for (std::size_t i = 0; i + 1 < init.u0.x.size(); ++i) {
        double s = init.u0.slope(i);
        dens[i] = s * s;
    }
    init.mu0 = Measure1D(init.u0.x, std::move(dens), cfg.extra_atoms);
    return init;
}

std::vector<double> schedule(const ScenarioConfig& cfg) {
    std::vector<double> ts = cfg.output_times;
    if (ts.empty()) {
        ts.push_back(0.0);
        if (cfg.t_end != 0.0) ts.push_back(cfg.t_end);
    }
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    if (cfg.t_end < 0.0) std::reverse(ts.begin(), ts.end());

    const double lo = std::min(0.0, cfg.t_end);
    const double hi = std::max(0.0, cfg.t_end);
    const double tol = 1e-12 * std::max(1.0, std::fabs(cfg.t_end));
    for (double t : ts)
        if (t < lo - tol || t > hi + tol)
            throw config_error("output time " + format_double(t) +
                               " lies outside [" + format_double(lo) + ", " +
                               format_double(hi) + "]");
    return ts;
}

void run_one_mode(const ScenarioConfig& cfg, const InitialData& init,
                  const std::vector<double>& times, RunMode m,
                  const fs::path& root, RunResult& rr) {
    const std::string mn = mode_name(m);
    const fs::path dir = root / mn;
    fs::create_directories(dir);

    std::vector<PhysicalSnapshot> snaps;
    std::vector<double> total_energy;
    std::vector<double> frozen_frac;
    std::size_t n_eff = cfg.n_cells;
    double xi_bar = 0.0;

    if (init.mu0.is_zero()) {
        double uscale = 1.0;
        for (double v : init.u0.v) uscale = std::max(uscale, std::fabs(v));
        if (std::fabs(init.u0(0.0)) > 1e-9 * uscale)
            throw config_error("profile must vanish at x = 0");
        for (double t : times) {
            PhysicalSnapshot s;
            s.t = t;
            s.u = PiecewiseLinearFn{{0.0}, {0.0}};
            snaps.push_back(std::move(s));
            total_energy.push_back(0.0);
            if (m == RunMode::dissipative) frozen_frac.push_back(0.0);
        }
    } else if (m == RunMode::conservative) {
        EnergyState st = to_energy(init.u0, init.mu0, cfg.n_cells);
        n_eff = st.n_cells;
        xi_bar = st.xi_bar;
        for (double t : times) {
            st = evolve(st, cfg.flux, t, cfg.h);
            snaps.push_back(to_physical(st));
            total_energy.push_back(snaps.back().mu.total_mass());
        }
    } else {
        DissipativeState st = init_dissipative(init.u0, cfg.n_cells);
        n_eff = st.n_cells;
        xi_bar = st.xi_bar;
        for (double t : times) {
            st = d_evolve(st, cfg.flux, t, cfg.h);
            snaps.push_back(d_to_physical(st));
            total_energy.push_back(d_energy(st));
            std::size_t nfrozen = 0;
            for (std::size_t k = 0; k < st.n_cells; ++k)
                if (st.frozen[k]) ++nfrozen;
            frozen_frac.push_back(st.n_cells == 0
                                      ? 0.0
                                      : static_cast<double>(nfrozen) /
                                            static_cast<double>(st.n_cells));
        }
    }

    nlohmann::json meta;
    meta["name"] = cfg.name;
    meta["provenance"] = mn;
    meta["flux"] = nlohmann::json::parse(flux_to_json(cfg.flux));
    meta["n_cells"] = n_eff;
    meta["h"] = cfg.h;
    meta["xi_bar"] = xi_bar;
    meta["times"] = times;
    write_file(dir / "meta.json", meta.dump(2));
    rr.files.push_back(mn + "/meta.json");

    char stem[48];
    for (std::size_t k = 0; k < snaps.size(); ++k) {
        std::snprintf(stem, sizeof(stem), "profile_%03zu.csv", k);
        write_file(dir / stem, profile_csv(snaps[k]));
        rr.files.push_back(mn + "/" + stem);
        std::snprintf(stem, sizeof(stem), "measure_%03zu.json", k);
        write_file(dir / stem, measure_to_json(snaps[k].mu));
        rr.files.push_back(mn + "/" + stem);
    }

    std::string energy = m == RunMode::dissipative
                             ? "t,E_total,E_ac,E_atoms,frozen_fraction\n"
                             : "t,E_total,E_ac,E_atoms\n";
    for (std::size_t k = 0; k < snaps.size(); ++k) {
        double atoms = 0.0;
        for (const Atom& a : snaps[k].mu.atoms()) atoms += a.mass;
        energy += format_double(snaps[k].t);
        energy += ',';
        energy += format_double(total_energy[k]);
        energy += ',';
        energy += format_double(total_energy[k] - atoms);
        energy += ',';
        energy += format_double(atoms);
        if (m == RunMode::dissipative) {
            energy += ',';
            energy += format_double(frozen_frac[k]);
        }
        energy += '\n';
    }
    write_file(dir / "energy.csv", energy);
    rr.files.push_back(mn + "/energy.csv");

    if (cfg.checks) {
        // The stored snapshots sit at the requested output times, which may
        // be too sparse for the time quadratures inside the checks. Re-run
        // the same initial state on a uniform dense grid spanning the same
        // window and verify that trajectory instead.
        std::vector<double> check_times;
        const double tfirst = times.front();
        const double tlast = times.back();
        const double span = tlast - tfirst;
        const int kDense = 200;
        if (std::fabs(span) < 1e-12 * std::max(1.0, std::fabs(tlast))) {
            check_times.push_back(tfirst);
        } else {
            check_times.reserve(kDense + 1);
            for (int k = 0; k <= kDense; ++k)
                check_times.push_back(tfirst + span * static_cast<double>(k) /
                                                   static_cast<double>(kDense));
        }
        std::vector<PhysicalSnapshot> check_snaps;
        check_snaps.reserve(check_times.size());
        if (init.mu0.is_zero()) {
            for (double t : check_times) {
                PhysicalSnapshot s;
                s.t = t;
                s.u = PiecewiseLinearFn{{0.0}, {0.0}};
                check_snaps.push_back(std::move(s));
            }
        } else if (m == RunMode::conservative) {
            EnergyState st = to_energy(init.u0, init.mu0, cfg.n_cells);
            for (double t : check_times) {
                st = evolve(st, cfg.flux, t, cfg.h);
                check_snaps.push_back(to_physical(st));
            }
        } else {
            DissipativeState st = init_dissipative(init.u0, cfg.n_cells);
            for (double t : check_times) {
                st = d_evolve(st, cfg.flux, t, cfg.h);
                check_snaps.push_back(d_to_physical(st));
            }
        }
        Trajectory tr;
        tr.snapshots = std::move(check_snaps);
        std::sort(tr.snapshots.begin(), tr.snapshots.end(),
                  [](const PhysicalSnapshot& a, const PhysicalSnapshot& b) {
                      return a.t < b.t;
                  });
        tr.flux = cfg.flux;
        tr.provenance = mn;
        tr.n_cells = n_eff;
        tr.h = cfg.h;
        tr.xi_bar = xi_bar;
        std::vector<CheckResult> results = run_standard_checks(tr);
        for (const CheckResult& r : results) {
            if (!r.pass) {
                rr.checks_passed = false;
                ++rr.checks_failed;
            }
        }
        nlohmann::json rep;
        rep["nonconvex_warning"] = m == RunMode::dissipative && !cfg.flux.convex;
        rep["checks"] = nlohmann::json::parse(report_to_json(results));
        write_file(dir / "report.json", rep.dump(2));
        rr.files.push_back(mn + "/report.json");
    }
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& cfg) {
    if (cfg.n_cells < 2) throw config_error("n_cells must be at least 2");
    if (!(cfg.h > 0.0)) throw config_error("time step h must be positive");
    if (!cfg.flux.eval || !cfg.flux.d1 || !cfg.flux.d2)
        throw config_error("config has no flux");

    const std::vector<double> times = schedule(cfg);
    const double ttol = 1e-12 * std::max(1.0, std::fabs(cfg.t_end));
    bool negative = cfg.t_end < -ttol;
    for (double t : times) negative = negative || t < -ttol;
    if (negative && cfg.mode != RunMode::conservative)
        throw config_error("negative times require conservative mode");

    const InitialData init = make_initial(cfg);

    const fs::path root(cfg.out_dir);
    fs::create_directories(root);
    RunResult rr;
    write_file(root / "config.json", scenario_to_json(cfg));
    rr.files.push_back("config.json");

    if (cfg.mode != RunMode::dissipative)
        run_one_mode(cfg, init, times, RunMode::conservative, root, rr);
    if (cfg.mode != RunMode::conservative)
        run_one_mode(cfg, init, times, RunMode::dissipative, root, rr);
    return rr;
}

ScenarioConfig scenario_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw config_error(std::string("config JSON parse failure: ") + e.what());
    }
    if (!j.is_object()) throw config_error("config JSON must be an object");
    try {
        ScenarioConfig c;
        c.name = j.value("name", std::string("scenario"));
        if (!j.contains("flux")) throw config_error("config needs a \"flux\" object");
        c.flux = flux_from_json(j.at("flux").dump());
        if (j.contains("initial")) {
            const auto& ji = j.at("initial");
            c.u_nodes = ji.value("u_nodes", std::vector<double>{});
            c.u_values = ji.value("u_values", std::vector<double>{});
            if (ji.contains("extra_atoms")) {
                for (const auto& e : ji.at("extra_atoms")) {
                    if (!e.is_array() || e.size() != 2)
                        throw config_error(
                            "extra_atoms entries must be [position, mass]");
                    c.extra_atoms.push_back({e[0].get<double>(), e[1].get<double>()});
                }
            }
        }
        c.n_cells = j.value("n_cells", std::size_t{1000});
        c.h = j.value("h", 1e-3);
        if (!j.contains("t_end")) throw config_error("config needs t_end");
        c.t_end = j.at("t_end").get<double>();
        c.output_times = j.value("output_times", std::vector<double>{});
        c.mode = mode_from_name(j.value("mode", std::string("conservative")));
        c.checks = j.value("checks", false);
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("config JSON field error: ") + e.what());
    }
}

std::string scenario_to_json(const ScenarioConfig& cfg) {
    nlohmann::json j;
    j["name"] = cfg.name;
    j["flux"] = nlohmann::json::parse(flux_to_json(cfg.flux));
    nlohmann::json ji;
    ji["u_nodes"] = cfg.u_nodes;
    ji["u_values"] = cfg.u_values;
    auto arr = nlohmann::json::array();
    for (const Atom& a : cfg.extra_atoms) arr.push_back({a.x, a.mass});
    ji["extra_atoms"] = arr;
    j["initial"] = ji;
    j["n_cells"] = cfg.n_cells;
    j["h"] = cfg.h;
    j["t_end"] = cfg.t_end;
    j["output_times"] = cfg.output_times;
    j["mode"] = mode_name(cfg.mode);
    j["checks"] = cfg.checks;
    return j.dump(2);
}

ScenarioConfig build_example1() {
    ScenarioConfig c;
    c.name = "example1";
    c.flux = make_flux("quadratic");
    c.u_nodes = {0.0, 1.0};
    c.u_values = {0.0, -1.0};
    c.n_cells = 1000;
    c.h = 1e-3;
    c.t_end = 2.0;
    c.output_times = {0.0, 0.5, 0.9, 1.0, 1.5, 2.0};
    c.mode = RunMode::both;
    c.checks = true;
    c.out_dir = "example1_out";
    return c;
}

Example2Set build_example2(double t0, const std::vector<double>& eps_list,
                           const std::function<double(double)>& phi_in) {
    if (!(t0 > 0.0)) throw config_error("t0 must be positive");
    std::function<double(double)> phi = phi_in;
    if (!phi) {
        phi = [](double xi) {
            if (xi <= 0.0 || xi >= 1.0) return 0.0;
            double s = 2.0 * xi - 1.0;
            double w = 1.0 - s * s;
            return w * w * w;
        };
    }
    const Flux fx = make_flux("cubic");
    const double h = 1e-3;

    const PiecewiseLinearFn tent{{0.0, 1.0, 2.0}, {0.0, 1.0, 0.0}};
    const Measure1D mu_t0({0.0, 1.0, 2.0}, {1.0, 1.0}, {{2.0, 1.0}});
    EnergyState at_t0 = to_energy(tent, mu_t0, 1000);
    at_t0.t = t0;
    const EnergyState base0 = evolve(at_t0, fx, 0.0, h);

    // The construction is meaningful only while the profile keeps rarefying;
    // sample the orbit and require a positive time derivative at every
    // interior node.
    for (int k = 0; k <= 10; ++k) {
        EnergyState sk = evolve(base0, fx, t0 * static_cast<double>(k) / 10.0, h);
        std::vector<double> r = rhs(sk, fx);
        for (std::size_t i = 1; i < r.size(); ++i)
            if (!(r[i] > 0.0))
                throw config_error(
                    "t0 too large: the transported profile stops rarefying "
                    "inside (0, t0]; choose a smaller t0");
    }

    const PhysicalSnapshot p0 = to_physical(base0);

    ScenarioConfig base;
    base.name = "example2";
    base.flux = fx;
    base.u_nodes = p0.u.x;
    base.u_values = p0.u.v;
    base.extra_atoms = p0.mu.atoms();
    base.n_cells = base0.n_cells;
    base.h = h;
    base.t_end = 2.0 * t0;
    base.output_times = {0.0,      0.5 * t0, 0.9 * t0, t0,
                         1.1 * t0, 1.5 * t0, 2.0 * t0};
    base.mode = RunMode::both;
    base.checks = true;
    base.out_dir = "example2_out/base";

    Example2Set set;
    set.unperturbed = base;
    for (double eps : eps_list) {
        if (!(eps > 0.0))
            throw config_error("perturbation sizes must be positive");
        EnergyState se = base0;
        for (std::size_t i = 0; i < se.U.size(); ++i) {
            double xi = se.xi(i);
            double p = phi(xi);
            if (p < 0.0)
                throw config_error("perturbation bump must be nonnegative");
            if (xi > 1.0 && p != 0.0)
                throw config_error(
                    "perturbation bump must be supported inside [0, 1]");
            se.U[i] += eps * p;
        }
        se.U[0] = 0.0;
        PhysicalSnapshot pe = to_physical(se);
        ScenarioConfig ce = base;
        ce.name = "example2_eps" + format_double(eps);
        ce.u_nodes = pe.u.x;
        ce.u_values = pe.u.v;
        ce.extra_atoms = pe.mu.atoms();
        ce.mode = RunMode::conservative;
        ce.out_dir = "example2_out/" + ce.name;
        set.perturbed.push_back(std::move(ce));
    }
    return set;
}

Trajectory load_trajectory(const std::string& dir) {
    const fs::path d(dir);
    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(read_file(d / "meta.json"));
    } catch (const nlohmann::json::parse_error& e) {
        throw config_error(std::string("meta.json parse failure: ") + e.what());
    }
    Trajectory tr;
    try {
        tr.provenance = meta.value("provenance", std::string("conservative"));
        tr.n_cells = meta.value("n_cells", std::size_t{0});
        tr.h = meta.value("h", 0.0);
        tr.xi_bar = meta.value("xi_bar", 0.0);
        if (!meta.contains("flux"))
            throw config_error("meta.json has no flux entry");
        tr.flux = flux_from_json(meta.at("flux").dump());
        const auto times = meta.at("times").get<std::vector<double>>();
        char stem[48];
        for (std::size_t k = 0; k < times.size(); ++k) {
            PhysicalSnapshot s;
            s.t = times[k];
            std::snprintf(stem, sizeof(stem), "profile_%03zu.csv", k);
            s.u = parse_profile_csv(read_file(d / stem), (d / stem).string());
            std::snprintf(stem, sizeof(stem), "measure_%03zu.json", k);
            s.mu = measure_from_json(read_file(d / stem));
            tr.snapshots.push_back(std::move(s));
        }
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("meta.json field error: ") + e.what());
    }
    std::sort(tr.snapshots.begin(), tr.snapshots.end(),
              [](const PhysicalSnapshot& a, const PhysicalSnapshot& b) {
                  return a.t < b.t;
              });
    return tr;
}

}  // namespace awave
