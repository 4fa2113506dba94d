#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "awave/scenario.hpp"
#include "oracles.hpp"

using namespace awave;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / ("awave_scenario_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ScenarioConfig small_ramp_config(const fs::path& dir) {
    ScenarioConfig cfg;
    cfg.name = "small_ramp";
    cfg.flux = make_flux("quadratic");
    cfg.u_nodes = {0.0, 1.0};
    cfg.u_values = {0.0, -1.0};
    cfg.n_cells = 40;
    cfg.h = 0.05;
    cfg.t_end = 0.5;
    cfg.output_times = {0.0, 0.25, 0.5};
    cfg.mode = RunMode::both;
    cfg.checks = true;
    cfg.out_dir = dir.string();
    return cfg;
}

}  // namespace

TEST_CASE("scenario: JSON round trip preserves the configuration") {
    ScenarioConfig cfg;
    cfg.name = "demo";
    cfg.flux = make_flux("cubic");
    cfg.u_nodes = {0.0, 1.0, 2.0};
    cfg.u_values = {0.0, 1.0, 0.0};
    cfg.extra_atoms = {{2.0, 1.0}};
    cfg.n_cells = 64;
    cfg.h = 0.005;
    cfg.t_end = 0.25;
    cfg.output_times = {0.0, 0.1, 0.25};
    cfg.mode = RunMode::both;
    cfg.checks = true;

    ScenarioConfig back = scenario_from_json(scenario_to_json(cfg));
    CHECK(back.name == cfg.name);
    CHECK(back.flux.kind == "cubic");
    CHECK(back.u_nodes == cfg.u_nodes);
    CHECK(back.u_values == cfg.u_values);
    REQUIRE(back.extra_atoms.size() == 1);
    CHECK(back.extra_atoms[0].x == 2.0);
    CHECK(back.extra_atoms[0].mass == 1.0);
    CHECK(back.n_cells == cfg.n_cells);
    CHECK(back.h == cfg.h);
    CHECK(back.t_end == cfg.t_end);
    CHECK(back.output_times == cfg.output_times);
    CHECK(back.mode == RunMode::both);
    CHECK(back.checks == cfg.checks);
}

TEST_CASE("scenario: JSON parsing rejects malformed configs") {
    CHECK_THROWS_AS(scenario_from_json("not json"), config_error);
    CHECK_THROWS_AS(scenario_from_json("{\"t_end\": 1.0}"), config_error);
    CHECK_THROWS_AS(scenario_from_json("{\"flux\": {\"kind\": \"quadratic\"}}"),
                    config_error);
    CHECK_THROWS_AS(
        scenario_from_json("{\"flux\": {\"kind\": \"quadratic\"}, \"t_end\": 1,"
                           " \"mode\": \"sideways\"}"),
        config_error);
    CHECK_THROWS_AS(
        scenario_from_json("{\"flux\": {\"kind\": \"quadratic\"}, \"t_end\": 1,"
                           " \"initial\": {\"extra_atoms\": [[1.0]]}}"),
        config_error);
}

TEST_CASE("scenario: run_scenario validates before writing") {
    fs::path dir = fresh_dir("validate");
    ScenarioConfig cfg = small_ramp_config(dir / "out");

    ScenarioConfig bad = cfg;
    bad.n_cells = 1;
    CHECK_THROWS_AS(run_scenario(bad), config_error);

    bad = cfg;
    bad.h = 0.0;
    CHECK_THROWS_AS(run_scenario(bad), config_error);

    bad = cfg;
    bad.flux = Flux{};
    CHECK_THROWS_AS(run_scenario(bad), config_error);

    bad = cfg;
    bad.output_times = {0.0, 2.0};
    CHECK_THROWS_AS(run_scenario(bad), config_error);

    bad = cfg;
    bad.t_end = -0.5;
    bad.output_times.clear();
    CHECK_THROWS_AS(run_scenario(bad), config_error);

    bad = cfg;
    bad.u_values = {0.0};
    CHECK_THROWS_AS(run_scenario(bad), config_error);

    bad = cfg;
    bad.u_nodes = {0.0};
    bad.u_values = {0.0};
    CHECK_THROWS_AS(run_scenario(bad), config_error);

    bad = cfg;
    bad.u_nodes = {0.0, 1.0, 0.5};
    bad.u_values = {0.0, -1.0, -0.5};
    CHECK_THROWS_AS(run_scenario(bad), config_error);

    // Nothing was written by any of the rejected configs.
    CHECK_FALSE(fs::exists(dir / "out"));
    fs::remove_all(dir);
}

TEST_CASE("scenario: a zero profile produces an all-zero run") {
    fs::path dir = fresh_dir("zero");
    ScenarioConfig cfg;
    cfg.name = "zero";
    cfg.flux = make_flux("quadratic");
    cfg.t_end = 1.0;
    cfg.output_times = {0.0, 0.5, 1.0};
    cfg.mode = RunMode::both;
    cfg.out_dir = dir.string();

    RunResult rr = run_scenario(cfg);
    CHECK(rr.checks_passed);
    CHECK(rr.files.size() == 17);
    for (const std::string& f : rr.files) CHECK(fs::exists(dir / f));

    std::string energy = slurp(dir / "conservative" / "energy.csv");
    std::istringstream lines(energy);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "t,E_total,E_ac,E_atoms");
    int rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
        CHECK(line.substr(line.find(',')) == ",0,0,0");
    }
    CHECK(rows == 3);
    fs::remove_all(dir);
}

TEST_CASE("scenario: the bundled ramp scenario runs at reduced size") {
    fs::path dir = fresh_dir("example1");
    ScenarioConfig cfg = build_example1();
    CHECK(cfg.flux.kind == "quadratic");
    CHECK(cfg.mode == RunMode::both);
    cfg.n_cells = 50;
    cfg.h = 0.01;
    cfg.checks = false;
    cfg.out_dir = dir.string();

    RunResult rr = run_scenario(cfg);
    CHECK(rr.files.size() == 29);

    Trajectory cons = load_trajectory((dir / "conservative").string());
    REQUIRE(cons.snapshots.size() == 6);
    CHECK(cons.flux.kind == "quadratic");
    CHECK(cons.n_cells == 50);
    CHECK(cons.provenance == "conservative");
    for (std::size_t k = 1; k < 6; ++k)
        CHECK(cons.snapshots[k - 1].t < cons.snapshots[k].t);

    // The quadratic-flux ramp is transported exactly at any resolution.
    const PhysicalSnapshot& rebound = cons.snapshots.back();
    CHECK(rebound.t == 2.0);
    for (double x : {0.2, 0.5, 0.9})
        CHECK(std::fabs(rebound.u(x) - oracles::ramp_u(2.0, x)) <= 1e-9);
    CHECK(std::fabs(rebound.mu.total_mass() - 1.0) <= 1e-9);

    Trajectory diss = load_trajectory((dir / "dissipative").string());
    REQUIRE(diss.snapshots.size() == 6);
    CHECK(diss.snapshots.back().mu.total_mass() == 0.0);
    CHECK(diss.snapshots.back().u(0.5) == 0.0);
    fs::remove_all(dir);
}

TEST_CASE("scenario: load_trajectory needs a written run") {
    CHECK_THROWS_AS(load_trajectory("/nonexistent/awave/run"), config_error);
}

TEST_CASE("scenario: identical configs write byte-identical files") {
    fs::path base = fresh_dir("determinism");
    ScenarioConfig a = small_ramp_config(base / "a");
    ScenarioConfig b = small_ramp_config(base / "b");

    RunResult ra = run_scenario(a);
    RunResult rb = run_scenario(b);
    CHECK(ra.checks_passed);
    CHECK(rb.checks_passed);
    REQUIRE(ra.files == rb.files);
    CHECK(ra.files.size() == 19);
    for (const std::string& f : ra.files) {
        CAPTURE(f);
        CHECK(slurp(base / "a" / f) == slurp(base / "b" / f));
    }
    fs::remove_all(base);
}

TEST_CASE("scenario: config.json written by a run loads back") {
    fs::path dir = fresh_dir("roundtrip");
    ScenarioConfig cfg = small_ramp_config(dir);
    cfg.checks = false;
    run_scenario(cfg);
    ScenarioConfig back = scenario_from_json(slurp(dir / "config.json"));
    CHECK(back.name == cfg.name);
    CHECK(back.n_cells == cfg.n_cells);
    CHECK(back.output_times == cfg.output_times);
    CHECK(back.mode == RunMode::both);
    fs::remove_all(dir);
}
