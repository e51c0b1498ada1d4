// Command-line front end for the drift-control library. Subcommands map
// one-to-one onto the cmd_* entry points; this file only parses flags.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "driftctl/cli.hpp"

namespace {

// start:stop:count[:log|lin]
bool parse_grid(const std::string& text, driftctl::GridSpec* out) {
    std::vector<std::string> parts;
    std::string::size_type pos = 0;
    while (true) {
        const auto next = text.find(':', pos);
        parts.push_back(text.substr(pos, next - pos));
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    if (parts.size() < 3 || parts.size() > 4) return false;
    try {
        std::size_t used = 0;
        out->start = std::stod(parts[0], &used);
        if (used != parts[0].size()) return false;
        out->stop = std::stod(parts[1], &used);
        if (used != parts[1].size()) return false;
        out->count = std::stoi(parts[2], &used);
        if (used != parts[2].size()) return false;
    } catch (const std::exception&) {
        return false;
    }
    if (parts.size() == 4) {
        if (parts[3] == "log") {
            out->log_spaced = true;
        } else if (parts[3] == "lin" || parts[3] == "linear") {
            out->log_spaced = false;
        } else {
            return false;
        }
    } else {
        out->log_spaced = false;
    }
    return true;
}

void add_cost_flags(CLI::App* cmd, driftctl::SpecFlags* spec) {
    cmd->add_option("--sigma-w", spec->sigma_w,
                    "process noise covariance (scalar, times identity)");
    cmd->add_option("--q", spec->q, "state cost weight Q (scalar)");
    cmd->add_option("--r", spec->r, "control cost weight R (scalar)");
    cmd->add_option("--sigma-q0", spec->sigma_q0,
                    "initial state covariance (scalar)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Finite-horizon control with an unknown constant drift: regret "
        "sweeps, Monte Carlo simulation, and batch drift estimation."};
    app.require_subcommand(1);
    app.footer(
        "Sweep points evaluate in parallel when built with OpenMP; set "
        "OMP_NUM_THREADS to bound the worker count. All CSV output uses "
        "full-precision scientific notation with the column order fixed "
        "per command.");

    int rc = 0;

    // ---- mr-sweep ----
    driftctl::MrSweepOptions mr;
    std::string mr_grid = "0.05:20:40:log";
    auto* mr_cmd = app.add_subcommand(
        "mr-sweep",
        "Constant-regret prior width per horizon. CSV columns: "
        "sigma_v,t,sigma_opt,mr_star,residual,iters,status. Failed points "
        "keep their row (NaN values, status 1) and turn the exit code to 2.");
    mr_cmd->add_option("--sigma-v", mr.sigma_v,
                       "sensor noise covariance values, one curve each")
        ->delimiter(',');
    mr_cmd->add_option("--t-grid", mr_grid,
                       "horizon grid, start:stop:count[:log|lin]");
    mr_cmd->add_option("--t0", mr.t0, "control start time");
    mr_cmd->add_option("--steps", mr.steps,
                       "ODE grid steps per unit horizon (min 400 total)");
    mr_cmd->add_option("--out", mr.out, "output CSV path (default stdout)");
    add_cost_flags(mr_cmd, &mr.spec);
    mr_cmd->callback([&] {
        if (!parse_grid(mr_grid, &mr.t_grid)) {
            std::cerr << "driftctl: bad --t-grid '" << mr_grid << "'\n";
            rc = 1;
            return;
        }
        rc = driftctl::cmd_mr_sweep(mr);
    });

    // ---- ar-sweep ----
    driftctl::ArSweepOptions ar;
    std::string ar_grid = "0.01:1:3:log";
    std::string ar_mode = "t0-sweep";
    auto* ar_cmd = app.add_subcommand(
        "ar-sweep",
        "Wide-prior cost gaps along a sigma^2 schedule. CSV columns: "
        "sigma_v,t,t0,y_gap,x_gap_norm,decay_ratio,status (gap values from "
        "the widest schedule entry; t0 snaps to the solver grid).");
    ar_cmd->add_option("--mode", ar_mode, "what the grid sweeps")
        ->check(CLI::IsMember({"t0-sweep", "t-sweep"}));
    ar_cmd->add_option("--sigma-v", ar.sigma_v,
                       "sensor noise covariance values")
        ->delimiter(',');
    ar_cmd->add_option("--sigma-sq-schedule", ar.sigma_sq_schedule,
                       "increasing prior widths; the last one is the limit "
                       "estimate")
        ->delimiter(',');
    ar_cmd->add_option("--grid", ar_grid,
                       "swept t0 (t0-sweep) or T (t-sweep), "
                       "start:stop:count[:log|lin]");
    ar_cmd->add_option("--t-final", ar.fixed_t, "fixed horizon for t0-sweep");
    ar_cmd->add_option("--t0", ar.fixed_t0, "fixed control start for t-sweep");
    ar_cmd->add_option("--steps", ar.steps,
                       "ODE grid steps per unit horizon (min 400 total)");
    ar_cmd->add_option("--out", ar.out, "output CSV path (default stdout)");
    add_cost_flags(ar_cmd, &ar.spec);
    ar_cmd->callback([&] {
        if (!parse_grid(ar_grid, &ar.grid)) {
            std::cerr << "driftctl: bad --grid '" << ar_grid << "'\n";
            rc = 1;
            return;
        }
        ar.mode = ar_mode == "t-sweep" ? driftctl::ArSweepMode::t_sweep
                                       : driftctl::ArSweepMode::t0_sweep;
        rc = driftctl::cmd_ar_sweep(ar);
    });

    // ---- simulate ----
    driftctl::SimulateOptions sim;
    auto* sim_cmd = app.add_subcommand(
        "simulate",
        "Monte Carlo closed-loop cost against its analytic prediction. CSV "
        "columns: mean_cost,std_error,prediction,z_score. The prediction is "
        "a'Xa+Y for the matching strategy (starred for known-a; the "
        "sigma^2=1e6 Bayesian quadratic for agnostic).");
    sim_cmd->add_option("--a", sim.a,
                        "true drift components; the length sets the dimension")
        ->delimiter(',');
    sim_cmd->add_option("--strategy", sim.strategy,
                        "bayesian:<sigma-sq> | known-a | agnostic:<n>");
    sim_cmd->add_option("--trials", sim.trials, "Monte Carlo trials");
    sim_cmd->add_option("--dt", sim.dt, "Euler-Maruyama step");
    sim_cmd->add_option("--seed", sim.seed,
                        "stream seed; output is byte-identical across runs "
                        "and thread counts for a fixed seed");
    sim_cmd->add_option("--dump-paths", sim.dump_paths,
                        "store the first k trial trajectories");
    sim_cmd->add_option("--paths-out", sim.paths_out,
                        "trajectory CSV path (columns trial,t,q_*,qhat_*,"
                        "ahat_*,u_*,y_*)");
    sim_cmd->add_option("--sigma-v", sim.spec.sigma_v,
                        "sensor noise covariance (scalar)");
    sim_cmd->add_option("--t0", sim.spec.t0, "control start time");
    sim_cmd->add_option("--t-final", sim.spec.t_final, "horizon end");
    sim_cmd->add_option("--out", sim.out, "summary CSV path (default stdout)");
    add_cost_flags(sim_cmd, &sim.spec);
    sim_cmd->callback([&] { rc = driftctl::cmd_simulate(sim); });

    // ---- estimate ----
    driftctl::EstimateOptions est;
    auto* est_cmd = app.add_subcommand(
        "estimate",
        "Batch drift estimate over one observation window. CSV columns: "
        "a_hat_*,q_hat_*,residual,error (error vs the true drift in "
        "synthetic mode, NaN with --path).");
    est_cmd->add_option("--horizon", est.horizon, "window length");
    est_cmd->add_option("--n", est.n, "grid steps over the window");
    est_cmd->add_option("--path", est.path,
                        "observation samples, one node per line, components "
                        "comma- or space-separated (n+1 lines)");
    est_cmd->add_option("--synthetic-a", est.synthetic_a,
                        "use the noiseless scalar path for this drift instead "
                        "of a file");
    est_cmd->add_option("--sigma-w", est.spec.sigma_w,
                        "process noise covariance (scalar)");
    est_cmd->add_option("--sigma-v", est.spec.sigma_v,
                        "sensor noise covariance (scalar)");
    est_cmd->add_option("--out", est.out, "output CSV path (default stdout)");
    est_cmd->callback([&] { rc = driftctl::cmd_estimate(est); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int parse_rc = app.exit(e);
        return parse_rc == 0 ? 0 : 1;
    }
    return rc;
}
