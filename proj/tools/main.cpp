// lambda-memory: dark-state structure and photon-storage calculator for
// degenerate three-level lambda systems.
//
//   analyze   dark/bright families, storage probability matrix w, faithful
//             verdict, and stored amplitudes for one configuration
//   scan      w and faithfulness across every initial Zeeman state (and an
//             optional ';'-separated drive list)
//   simulate  density-matrix integration of a storage / hold / retrieval
//             schedule compared against the adiabatic storage map
//
// Exit codes: 0 success, 1 internal tolerance failure, 2 invalid
// configuration or input.

#include "CLI11.hpp"
#include "lmem/cli.hpp"

#include <fstream>
#include <iostream>
#include <string>

namespace {

void add_common_options(CLI::App* cmd, lmem::cli::RunConfig& rc) {
    cmd->add_option("--ja", rc.ja, "Level-a angular momentum, e.g. \"2\" or \"3/2\"")
        ->required();
    cmd->add_option("--jb", rc.jb, "Level-b angular momentum")->required();
    cmd->add_option("--jc", rc.jc, "Level-c (upper) angular momentum")->required();
    cmd->add_option("--drive", rc.drive,
                    "Drive polarization: pi|x|y|sigma+|sigma-, or spherical components "
                    "\"q-1:q0:q+1\" with each entry \"re\" or \"re,im\" (normalized). "
                    "scan accepts a ';'-separated list [default: pi]");
    cmd->add_option("--l1", rc.l1, "Cavity mode 1 polarization [default: sigma-]");
    cmd->add_option("--l2", rc.l2, "Cavity mode 2 polarization [default: sigma+]");
    cmd->add_option("--delta", rc.delta, "Two-photon detuning [default: 0]");
    cmd->add_option("--initial", rc.initial,
                    "Initial atomic state on level b: \"m=<value>\", \"mixed\", or a "
                    "density-matrix JSON file (array of rows of [re, im] pairs) "
                    "[default: m=0]");
    cmd->add_option("--xi1", rc.xi1,
                    "Photonic qubit amplitude on mode 1, \"re\" or \"re,im\"; the "
                    "(xi1, xi2) pair is normalized [default: 1]");
    cmd->add_option("--xi2", rc.xi2, "Photonic qubit amplitude on mode 2 [default: 0]");
    cmd->add_option("--t1", rc.t1, "Storage stage duration [default: 200]");
    cmd->add_option("--tau", rc.tau, "Hold duration between stages [default: 0]");
    cmd->add_option("--t2", rc.t2, "Retrieval stage duration; 0 = storage only [default: 0]");
    cmd->add_option("--omega-a", rc.omega_a, "Peak drive amplitude [default: 1]");
    cmd->add_option("--omega-b", rc.omega_b, "Peak cavity coupling [default: 1]");
    cmd->add_option("--dt", rc.dt, "Integrator step bound [default: 0.02]");
    cmd->add_option("--shape", rc.shape, "Pulse shape: sin2 or linear [default: sin2]");
    cmd->add_option("--format", rc.format,
                    "Output format: text|json (analyze, simulate), text|csv (scan)");
    cmd->add_option("--out", rc.out,
                    "Output path: report file for analyze/scan, trajectory CSV for "
                    "simulate [default: stdout / trajectory.csv]");
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw lmem::ContractError("cannot open '" + path + "' for writing");
    f << content;
    if (!f) throw lmem::ContractError("failed while writing '" + path + "'");
}

void deliver(const std::string& path, const std::string& content) {
    if (path.empty())
        std::cout << content;
    else
        write_file(path, content);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dark-state photon storage in degenerate lambda systems"};
    app.require_subcommand(1);
    lmem::cli::RunConfig rc;
    CLI::App* analyze = app.add_subcommand(
        "analyze", "Dark/bright families and storage fidelity for one configuration");
    CLI::App* scan = app.add_subcommand(
        "scan", "Scan initial Zeeman states (and optional drive list) for faithful storage");
    CLI::App* simulate = app.add_subcommand(
        "simulate", "Integrate a pulse schedule and compare with the adiabatic map");
    add_common_options(analyze, rc);
    add_common_options(scan, rc);
    add_common_options(simulate, rc);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // help exits clean; bad arguments are config errors
    }

    try {
        rc.tol = lmem::cli::faithful_tolerance_from_env();
        if (analyze->parsed()) {
            rc.subcommand = "analyze";
            deliver(rc.out, lmem::cli::cmd_analyze(rc));
        } else if (scan->parsed()) {
            rc.subcommand = "scan";
            deliver(rc.out, lmem::cli::cmd_scan(rc));
        } else {
            rc.subcommand = "simulate";
            const lmem::cli::SimulateOutput sim = lmem::cli::cmd_simulate(rc);
            write_file(rc.out.empty() ? "trajectory.csv" : rc.out, sim.trajectory_csv);
            std::cout << sim.report;
        }
        return 0;
    } catch (const lmem::ContractError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const lmem::ToleranceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
