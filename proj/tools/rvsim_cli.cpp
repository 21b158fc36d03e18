// rvsim: run, compare or validate a rendezvous scenario.
//
//   rvsim run <scenario> [--seed N] [--out-dir DIR] [--controller simplex|componentwise]
//                        [--duration-cap SECONDS]
//   rvsim compare <scenario> [--seed N] [--out-dir DIR] [--duration-cap SECONDS]
//   rvsim validate <scenario>
//
// Exit codes: 0 ok, 2 invalid scenario or arguments, 3 collision or cone
// breach, 4 timeout or propellant exhausted, 1 I/O or internal error.

#include "rvsim/report.hpp"
#include "rvsim/scenario.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace rvsim;

namespace {

struct Options {
    std::string scenario;
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
    std::string controller;
    std::optional<double> duration_cap;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

ScenarioFile load(const Options& opt) {
    ScenarioFile sc = parse_scenario(opt.scenario);
    for (const std::string& d : sc.applied_defaults) std::cerr << "default: " << d << '\n';
    if (opt.seed) sc.seed = *opt.seed;
    if (opt.controller == "simplex") sc.models.controller.type = ControllerType::Simplex;
    if (opt.controller == "componentwise") sc.models.controller.type = ControllerType::Componentwise;
    return sc;
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw IoError(p.string() + ": cannot open for writing");
    return f;
}

void check_written(std::ofstream& f, const fs::path& p) {
    f.flush();
    if (!f) throw IoError(p.string() + ": write failed");
}

fs::path prepare_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError(dir + ": " + ec.message());
    return fs::path(dir);
}

/// Adds `tag` before the extension: run.csv -> run_simplex.csv.
std::string tagged(const std::string& name, const std::string& tag) {
    const fs::path p(name);
    return (p.parent_path() / (p.stem().string() + "_" + tag + p.extension().string())).string();
}

void print_phases(const RunResult& r) {
    for (const PhaseResult& p : r.phases) {
        std::printf("%-14s %-13s %-14s t=%.1f s  CE=%.1f N s  fuel=%.3f kg  clearance=%g m  residual=%.2e\n",
                    to_string(r.controller).c_str(), p.name.c_str(), to_string(p.status).c_str(), p.elapsed,
                    p.control_effort, p.fuel, p.min_clearance, p.max_sliding_residual);
    }
}

double cap_of(const Options& opt) {
    return opt.duration_cap ? *opt.duration_cap : std::numeric_limits<double>::infinity();
}

int cmd_validate(const Options& opt) {
    const ScenarioFile sc = load(opt);
    std::cout << write_scenario(sc);
    std::cerr << opt.scenario << ": ok\n";
    return 0;
}

int cmd_run(const Options& opt) {
    const ScenarioFile sc = load(opt);
    const fs::path dir = prepare_dir(opt.out_dir);
    const fs::path tpath = dir / sc.outputs.telemetry;
    const fs::path spath = dir / sc.outputs.summary;

    std::ofstream tfile = open_out(tpath);
    TelemetryWriter tw(&tfile);
    const std::vector<PhaseSpec> phases = sc.resolve();
    const RunResult r = run_phases(sc.models, sc.initial, phases, sc.seed, tw.sink(), cap_of(opt));
    check_written(tfile, tpath);

    std::ofstream sfile = open_out(spath);
    write_summary(sfile, sc, r, tw.digest());
    check_written(sfile, spath);

    print_phases(r);
    std::cerr << "telemetry: " << tpath.string() << " (" << tw.rows() << " rows)\nsummary: " << spath.string()
              << '\n';
    return exit_code(r);
}

int cmd_compare(const Options& opt) {
    const ScenarioFile sc = load(opt);
    const fs::path dir = prepare_dir(opt.out_dir);
    const fs::path t_simplex = dir / tagged(sc.outputs.telemetry, "simplex");
    const fs::path t_cw = dir / tagged(sc.outputs.telemetry, "componentwise");
    const fs::path spath = dir / tagged(sc.outputs.summary, "comparison");

    std::ofstream f_simplex = open_out(t_simplex);
    std::ofstream f_cw = open_out(t_cw);
    TelemetryWriter w_simplex(&f_simplex);
    TelemetryWriter w_cw(&f_cw);
    const std::vector<PhaseSpec> phases = sc.resolve();
    const ComparisonReport c = compare_controllers(sc.models, sc.initial, phases, sc.seed, w_simplex.sink(),
                                                   w_cw.sink(), cap_of(opt));
    check_written(f_simplex, t_simplex);
    check_written(f_cw, t_cw);

    std::ofstream sfile = open_out(spath);
    write_comparison(sfile, sc, c, w_simplex.digest(), w_cw.digest());
    check_written(sfile, spath);

    print_phases(c.simplex);
    print_phases(c.componentwise);
    const double ce_c = c.componentwise.control_effort();
    if (ce_c > 0.0) std::printf("control effort ratio simplex/componentwise: %.3f\n", c.simplex.control_effort() / ce_c);
    std::cerr << "summary: " << spath.string() << '\n';

    const int a = exit_code(c.simplex);
    const int b = exit_code(c.componentwise);
    if (a == 3 || b == 3) return 3;
    return std::max(a, b);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spacecraft rendezvous simulator: APF guidance with sliding-mode control"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* sub, bool run_flags) {
        sub->add_option("scenario", opt.scenario, "Scenario file (YAML)")->required()->check(CLI::ExistingFile);
        if (!run_flags) return;
        sub->add_option("--seed", opt.seed, "Override the scenario seed");
        sub->add_option("--out-dir", opt.out_dir, "Directory for telemetry and summary files")->capture_default_str();
        sub->add_option("--duration-cap", opt.duration_cap, "Cap on total simulated time [s]")
            ->check(CLI::NonNegativeNumber);
    };
    CLI::App* run = app.add_subcommand("run", "Run the scenario with its configured controller");
    add_common(run, true);
    run->add_option("--controller", opt.controller, "Override the position controller")
        ->check(CLI::IsMember({"simplex", "componentwise"}));
    CLI::App* compare = app.add_subcommand("compare", "Run the scenario under both controllers");
    add_common(compare, true);
    CLI::App* validate = app.add_subcommand("validate", "Check the scenario and print the effective configuration");
    add_common(validate, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*run) return cmd_run(opt);
        if (*compare) return cmd_compare(opt);
        return cmd_validate(opt);
    } catch (const ScenarioError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
