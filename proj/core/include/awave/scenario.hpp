#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "awave/flux.hpp"
#include "awave/measure.hpp"
#include "awave/piecewise_linear.hpp"
#include "awave/verify.hpp"

namespace awave {

enum class RunMode { conservative, dissipative, both };

/// Complete description of one solver run: flux, initial data (profile plus
/// extra atoms for the singular part of the initial measure), grids, output
/// schedule and destination.
struct ScenarioConfig {
    std::string name = "scenario";
    Flux flux;
    /// Initial profile nodes/values; empty means u == 0 on [0, 1].
    std::vector<double> u_nodes;
    std::vector<double> u_values;
    /// Atoms added to the initial energy measure on top of slope^2 dx.
    std::vector<Atom> extra_atoms;
    std::size_t n_cells = 1000;
    double h = 1e-3;
    double t_end = 1.0;
    /// Times to reconstruct and write; defaults to {0, t_end} when empty.
    /// Negative times are allowed in conservative mode only.
    std::vector<double> output_times;
    RunMode mode = RunMode::conservative;
    /// Run the standard verification checks and write report.json.
    bool checks = false;
    std::string out_dir = "out";
    /// Escalate failed checks to a nonzero exit (CLI --strict).
    bool strict = false;
};

/// JSON round trip for the config file format:
/// {"name", "flux": {...}, "initial": {"u_nodes", "u_values", "extra_atoms"},
///  "n_cells", "h", "t_end", "output_times", "mode", "checks"}.
/// Throws config_error on malformed input.
ScenarioConfig scenario_from_json(const std::string& text);
std::string scenario_to_json(const ScenarioConfig& cfg);

struct RunResult {
    bool checks_passed = true;
    int checks_failed = 0;
    /// Paths written, relative to the output directory.
    std::vector<std::string> files;
};

/// Executes the scenario and writes, per requested mode subdirectory:
/// meta.json, profile_XXX.csv (columns t,x,u), measure_XXX.json, energy.csv
/// (t,E_total,E_ac,E_atoms plus frozen_fraction in dissipative mode) and
/// optionally report.json. Identical configs produce byte-identical files.
RunResult run_scenario(const ScenarioConfig& cfg);

/// Quadratic-flux ramp scenario: f(u) = u^2, u(0,x) = -x up to x = 1 and -1
/// beyond, run in both modes to t = 2.
ScenarioConfig build_example1();

struct Example2Set {
    ScenarioConfig unperturbed;
    std::vector<ScenarioConfig> perturbed;
};

/// Cubic-flux tent scenario: the tent-plus-atom state is prescribed at time
/// t0 and transported backward to t = 0 to obtain initial data; perturbed
/// variants add eps * phi to the energy-coordinate profile (phi defaults to
/// the smooth bump (1 - (2 xi - 1)^2)^3 on [0, 1]). Throws config_error when
/// the backward orbit violates the rarefaction assumption dU/dt > 0 or when
/// phi is negative or supported outside [0, 1].
Example2Set build_example2(double t0 = 0.1,
                           const std::vector<double>& eps_list = {0.1, 0.05,
                                                                  0.025},
                           const std::function<double(double)>& phi = {});

/// Reads back one mode subdirectory written by run_scenario.
Trajectory load_trajectory(const std::string& dir);

/// Shortest round-trip decimal formatting, locale independent.
std::string format_double(double v);

}  // namespace awave
