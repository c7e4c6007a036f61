// oblique-stab: sweeps, projection diagnostics and closed-loop simulations.
//
// Exit codes: 0 success, 2 invalid configuration, 3 numerical failure.

#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitNumerical = 3;

std::string snapshot_path(const std::string& prefix, double t)
{
    return prefix + "_t" + oblique::csv::real(t) + ".csv";
}

int run(const oblique::cli::ExperimentConfig& cfg, const std::string& output)
{
    std::ofstream file;
    if (!output.empty() && output != "-") {
        file.open(output);
        if (!file) {
            throw std::invalid_argument("cannot open output '" + output + "'");
        }
    }
    std::ostream& os = file.is_open() ? static_cast<std::ostream&>(file) : std::cout;

    using namespace oblique::cli;
    if (cfg.command == "eigs") {
        cmd_eigs(cfg, os);
    } else if (cfg.command == "norm") {
        cmd_norm(cfg, os);
    } else if (cfg.command == "project") {
        cmd_project(cfg, os);
    } else if (cfg.command == "simulate") {
        const auto result = cmd_simulate(cfg, os);
        for (const auto& snap : result.snapshots) {
            const std::string path = snapshot_path(cfg.snapshot_prefix, snap.time);
            std::ofstream out(path);
            if (!out) {
                throw std::invalid_argument("cannot open snapshot file '" + path + "'");
            }
            write_snapshot(cfg, result, snap, out);
        }
    } else if (cfg.command == "suffcond") {
        cmd_suffcond(cfg, os);
    }
    os.flush();
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    oblique::cli::ExperimentConfig cfg;
    std::string output;

    CLI::App app{"Oblique projections onto indicator actuators and feedback stabilization of "
                 "1D parabolic equations."};
    app.set_config("--config", "", "Read key=value options from a file ('#' starts a comment)");
    app.add_option("command", cfg.command, "eigs | norm | project | simulate | suffcond")
        ->required()
        ->check(CLI::IsMember({"eigs", "norm", "project", "simulate", "suffcond"}));

    app.add_option("--bc", cfg.bcs, "Boundary condition(s): dirichlet, neumann")
        ->delimiter(',')
        ->capture_default_str();
    app.add_option("--scheme", cfg.schemes, "Placement scheme(s): mxe, uni, con")
        ->delimiter(',')
        ->capture_default_str();
    app.add_option("-M,--M", cfg.count, "Number of actuators")->capture_default_str();
    app.add_option("--M-min", cfg.count_min, "First M of a sweep (default 1)");
    app.add_option("--M-max", cfg.count_max, "Last M of a sweep; enables the sweep");
    app.add_option("-r,--r", cfg.fractions, "Total actuator volume fraction(s) in (0, 1)")
        ->delimiter(',')
        ->capture_default_str();
    app.add_option("-L,--L", cfg.length, "Domain length")->capture_default_str();
    app.add_option("--nu", cfg.nu, "Diffusion coefficient")->capture_default_str();
    app.add_option("--lambda", cfg.lambda, "Feedback decay rate")->capture_default_str();
    app.add_option("-N,--N", cfg.nodes, "Number of FEM nodes")->capture_default_str();
    app.add_option("-k,--k", cfg.time_step, "Time step")->capture_default_str();
    app.add_option("-T,--T", cfg.final_time, "Final time")->capture_default_str();
    app.add_option("--feed-on", cfg.feed_on, "Feedback window t0,t1 (default: whole run)")
        ->delimiter(',')
        ->expected(2);
    app.add_flag("--no-feedback", cfg.no_feedback, "Simulate the free dynamics");
    app.add_option("--reaction", cfg.reaction,
                   "Reaction: constant:V | oscillating | table:PATH (t rows, x columns)")
        ->capture_default_str();
    app.add_option("--y0", cfg.initial, "Initial state: linear:A | constant:V | sin:A")
        ->capture_default_str();
    app.add_option("--function", cfg.function, "Function to project: constant:V | bump")
        ->capture_default_str();
    app.add_option("--input", cfg.input, "CSV of x,f samples on a uniform grid (overrides --function)");
    app.add_option("--samples", cfg.samples, "Output samples for project")->capture_default_str();
    app.add_option("--a-bound", cfg.a_bound, "Bound on the reaction norm for suffcond")
        ->capture_default_str();
    app.add_option("--threads", cfg.threads, "Worker threads (0: hardware concurrency)");
    app.add_flag("--skip-infeasible", cfg.skip_infeasible,
                 "Skip uni placements violating M >= r/(1-r) instead of failing");
    app.add_option("--snapshot", cfg.snapshots, "Times at which to write state snapshots")
        ->delimiter(',');
    app.add_option("--snapshot-prefix", cfg.snapshot_prefix, "Snapshot file prefix")
        ->capture_default_str();
    app.add_option("-o,--output", output, "Output CSV (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInvalid;
    }

    try {
        return run(cfg, output);
    } catch (const oblique::NumericalError& e) {
        std::cerr << "oblique-stab: numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "oblique-stab: invalid configuration: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "oblique-stab: " << e.what() << '\n';
        return 1;
    }
}
