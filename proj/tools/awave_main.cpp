#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "awave/errors.hpp"
#include "awave/measure.hpp"
#include "awave/scenario.hpp"
#include "awave/verify.hpp"

namespace {

namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw awave::config_error("cannot read " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

int finish_run(const awave::ScenarioConfig& cfg, const awave::RunResult& rr) {
    std::cout << cfg.name << ": wrote " << rr.files.size() << " files under "
              << cfg.out_dir << "\n";
    if (cfg.checks && rr.checks_failed > 0)
        std::cout << cfg.name << ": " << rr.checks_failed
                  << " verification checks failed (see report.json)\n";
    if (cfg.strict && !rr.checks_passed) return 1;
    return 0;
}

int cmd_run(const std::string& config_path, const std::string& out, bool strict) {
    awave::ScenarioConfig cfg = awave::scenario_from_json(read_file(config_path));
    if (!out.empty()) cfg.out_dir = out;
    if (strict) {
        cfg.strict = true;
        cfg.checks = true;
    }
    return finish_run(cfg, awave::run_scenario(cfg));
}

int cmd_example1(const std::string& out) {
    awave::ScenarioConfig cfg = awave::build_example1();
    if (!out.empty()) cfg.out_dir = out;
    return finish_run(cfg, awave::run_scenario(cfg));
}

int cmd_example2(double t0, const std::vector<double>& eps, const std::string& out) {
    awave::Example2Set set = awave::build_example2(t0, eps);
    std::vector<awave::ScenarioConfig> cfgs{set.unperturbed};
    cfgs.insert(cfgs.end(), set.perturbed.begin(), set.perturbed.end());
    int rc = 0;
    for (awave::ScenarioConfig& cfg : cfgs) {
        if (!out.empty())
            cfg.out_dir = (fs::path(out) / fs::path(cfg.out_dir).filename()).string();
        rc = std::max(rc, finish_run(cfg, awave::run_scenario(cfg)));
    }
    return rc;
}

int cmd_verify(const std::string& dir) {
    std::vector<std::pair<std::string, std::string>> targets;
    if (fs::exists(fs::path(dir) / "meta.json")) {
        targets.emplace_back(".", dir);
    } else {
        for (const char* sub : {"conservative", "dissipative"}) {
            fs::path p = fs::path(dir) / sub;
            if (fs::exists(p / "meta.json")) targets.emplace_back(sub, p.string());
        }
    }
    if (targets.empty())
        throw awave::config_error("no trajectory found at " + dir +
                                  " (expected meta.json, possibly inside "
                                  "conservative/ or dissipative/)");
    bool all_pass = true;
    std::cout << "{\n";
    for (std::size_t i = 0; i < targets.size(); ++i) {
        awave::Trajectory tr = awave::load_trajectory(targets[i].second);
        std::vector<awave::CheckResult> results = awave::run_standard_checks(tr);
        for (const awave::CheckResult& r : results) all_pass = all_pass && r.pass;
        std::string body = awave::report_to_json(results);
        std::cout << "  \"" << targets[i].first << "\": " << body
                  << (i + 1 < targets.size() ? ",\n" : "\n");
    }
    std::cout << "}\n";
    return all_pass ? 0 : 1;
}

int cmd_distance(const std::string& m1, const std::string& m2, double step) {
    awave::Measure1D a = awave::measure_from_json(read_file(m1));
    awave::Measure1D b = awave::measure_from_json(read_file(m2));
    std::cout << awave::format_double(awave::flat_distance(a, b, step)) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Method-of-characteristics solver for an energy-conserving "
                 "variational wave model"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    bool strict = false;
    CLI::App* run = app.add_subcommand("run", "Execute a scenario config file");
    run->add_option("config", config_path, "Scenario config JSON")->required();
    run->add_flag("--strict", strict, "Exit 1 when a verification check fails");
    run->add_option("--out", out_dir, "Output directory (overrides the default)");

    std::string ex1_out;
    CLI::App* ex1 = app.add_subcommand("example1", "Quadratic-flux ramp scenario");
    ex1->add_option("--out", ex1_out, "Output directory");

    double t0 = 0.1;
    std::vector<double> eps{0.1, 0.05, 0.025};
    std::string ex2_out;
    CLI::App* ex2 = app.add_subcommand(
        "example2", "Cubic-flux tent scenario with perturbation sweep");
    ex2->add_option("--t0", t0, "Time at which the tent state is prescribed");
    ex2->add_option("--eps", eps, "Perturbation sizes")->delimiter(',');
    ex2->add_option("--out", ex2_out, "Output directory");

    std::string verify_dir;
    CLI::App* ver = app.add_subcommand("verify", "Run checks on a stored trajectory");
    ver->add_option("dir", verify_dir, "Trajectory directory")->required();

    std::string dist_m1, dist_m2;
    double dist_step = 1e-3;
    CLI::App* dist = app.add_subcommand("distance",
                                        "Flat distance between two measures");
    dist->add_option("m1", dist_m1, "First measure JSON")->required();
    dist->add_option("m2", dist_m2, "Second measure JSON")->required();
    dist->add_option("--step", dist_step, "Grid step of the test-function class");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) return cmd_run(config_path, out_dir, strict);
        if (ex1->parsed()) return cmd_example1(ex1_out);
        if (ex2->parsed()) return cmd_example2(t0, eps, ex2_out);
        if (ver->parsed()) return cmd_verify(verify_dir);
        if (dist->parsed()) return cmd_distance(dist_m1, dist_m2, dist_step);
    } catch (const awave::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
