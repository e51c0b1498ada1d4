#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace driftctl {

// Command implementations behind the driftctl binary. Each takes a parsed
// option struct, writes CSV to the `out` path (stdout when empty), and
// returns the process exit code: 0 success, 2 partial sweep (some points
// failed to converge; their rows carry NaN values and status 1), 1 hard
// error. Messages go to stderr. Nothing here throws.

// start:stop:count grid, linear or log spacing
struct GridSpec {
    double start = 0.0;
    double stop = 1.0;
    int count = 1;
    bool log_spaced = false;

    std::vector<double> values() const;
};

// scalar isotropic instance shared by every command
struct SpecFlags {
    double sigma_w = 1.0;
    double sigma_v = 1.0;
    double q = 1.0;
    double r = 1.0;
    double sigma_q0 = 1.0;
    double t0 = 0.0;
    double t_final = 1.0;
};

// ==================== sweeps ====================

struct MrSweepOptions {
    std::vector<double> sigma_v = {1.0};
    GridSpec t_grid;          // swept horizon T
    double t0 = 0.0;
    int steps = 500;          // ODE grid steps per unit horizon (min 400 total)
    SpecFlags spec;           // sigma_v and t_final overridden per point
    std::string out;
};

// One warm-started constant-regret solve per (sigma_v, T); columns
// sigma_v,t,sigma_opt,mr_star,residual,iters,status.
int cmd_mr_sweep(const MrSweepOptions& opts);

enum class ArSweepMode { t0_sweep, t_sweep };

struct ArSweepOptions {
    ArSweepMode mode = ArSweepMode::t0_sweep;
    std::vector<double> sigma_v = {1.0};
    std::vector<double> sigma_sq_schedule = {1e2, 1e4, 1e6};
    GridSpec grid;            // swept variable: t0 or T per mode
    double fixed_t0 = 0.1;    // t-sweep
    double fixed_t = 10.0;    // t0-sweep
    int steps = 500;
    SpecFlags spec;
    std::string out;
};

// Wide-prior limit gaps along the schedule; columns
// sigma_v,t,t0,y_gap,x_gap_norm,decay_ratio,status.
int cmd_ar_sweep(const ArSweepOptions& opts);

// ==================== simulation ====================

struct SimulateOptions {
    std::vector<double> a = {0.0};   // defines d
    std::string strategy = "bayesian:1.0";  // bayesian:<sigma-sq> | known-a | agnostic:<n>
    int trials = 1000;
    double dt = 1e-3;
    std::uint64_t seed = 0;
    int dump_paths = 0;
    std::string paths_out = "paths.csv";
    SpecFlags spec;
    std::string out;
};

// Runs the Monte Carlo loop and writes one summary row
// mean_cost,std_error,prediction,z_score where the prediction is the
// analytic quadratic aTXa+Y of the matching strategy (the agnostic command
// is scored against the sigma^2 = 1e6 Bayesian quadratic). With
// dump_paths > 0 the first k trials go to paths_out with a leading trial
// column.
int cmd_simulate(const SimulateOptions& opts);

// ==================== estimation ====================

struct EstimateOptions {
    double horizon = 1.0;
    int n = 400;
    std::string path;         // file of y samples, one node per row
    double synthetic_a = 0.0; // used when `path` is empty
    SpecFlags spec;
    std::string out;
};

// Applies the batch weights to a stored or synthetic observation path;
// columns a_hat_1..d,q_hat_1..d,residual,error (error vs the true drift in
// synthetic mode, NaN otherwise).
int cmd_estimate(const EstimateOptions& opts);

}  // namespace driftctl
