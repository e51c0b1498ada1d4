#include "driftctl/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "driftctl/estimator.hpp"
#include "driftctl/model.hpp"
#include "driftctl/moments.hpp"
#include "driftctl/regret.hpp"
#include "driftctl/riccati.hpp"
#include "driftctl/simulator.hpp"
#include "driftctl/types.hpp"
#include "internal.hpp"

namespace driftctl {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Full-precision scientific notation; the CSV schema promises byte-identical
// output for identical inputs, so everything funnels through one formatter.
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.16e", v);
    return buf;
}

std::string fmt_int(long v) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%ld", v);
    return buf;
}

// ODE grid resolution for a horizon-T solve: `steps` nodes per unit time
// with a floor so short horizons stay resolved.
int grid_steps(int steps_per_unit, double t) {
    const double raw = std::ceil(steps_per_unit * t - 1e-9);
    return std::max(400, static_cast<int>(raw));
}

int write_csv(const std::string& out, const std::string& header,
              const std::vector<std::string>& rows) {
    std::ofstream file;
    std::ostream* os = &std::cout;
    if (!out.empty()) {
        file.open(out);
        if (!file) {
            std::cerr << "driftctl: cannot open output file '" << out << "'\n";
            return 1;
        }
        os = &file;
    }
    *os << header << '\n';
    for (const auto& row : rows) *os << row << '\n';
    os->flush();
    return os->good() ? 0 : 1;
}

bool positive(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0; });
}

}  // namespace

std::vector<double> GridSpec::values() const {
    std::vector<double> v;
    if (count < 1) return v;
    v.reserve(static_cast<std::size_t>(count));
    if (count == 1) {
        v.push_back(start);
        return v;
    }
    if (log_spaced) {
        const double la = std::log(start), lb = std::log(stop);
        for (int i = 0; i < count; ++i)
            v.push_back(std::exp(la + (lb - la) * i / (count - 1)));
    } else {
        for (int i = 0; i < count; ++i)
            v.push_back(start + (stop - start) * i / (count - 1));
    }
    v.front() = start;
    v.back() = stop;
    return v;
}

// ==================== mr-sweep ====================

int cmd_mr_sweep(const MrSweepOptions& opts) {
    if (opts.sigma_v.empty() || !positive(opts.sigma_v)) {
        std::cerr << "driftctl: --sigma-v needs a nonempty list of positive values\n";
        return 1;
    }
    if (opts.t_grid.count < 1 || opts.t_grid.start <= 0.0 ||
        opts.t_grid.stop < opts.t_grid.start) {
        std::cerr << "driftctl: bad --t-grid (need 0 < start <= stop, count >= 1)\n";
        return 1;
    }
    if (opts.steps < 1 || opts.t0 < 0.0) {
        std::cerr << "driftctl: --steps must be >= 1 and --t0 >= 0\n";
        return 1;
    }
    const std::vector<double> ts = opts.t_grid.values();
    if (opts.t0 >= ts.front()) {
        std::cerr << "driftctl: --t0 must be below the smallest horizon\n";
        return 1;
    }

    const std::size_t nc = opts.sigma_v.size();
    std::vector<std::vector<std::string>> curves(nc,
        std::vector<std::string>(ts.size()));
    std::vector<char> curve_failed(nc, 0);
    std::string hard_msg;

    // Curves are independent; within one curve each horizon warm-starts the
    // next, so the parallelism is across sigma_v only.
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(nc); ++c) {
        const double sv = opts.sigma_v[static_cast<std::size_t>(c)];
        double warm = 1.0;
        for (std::size_t j = 0; j < ts.size(); ++j) {
            const double t = ts[j];
            std::string row;
            try {
                const SystemSpec spec = isotropic_spec(
                    1, opts.spec.sigma_w, sv, opts.spec.q, opts.spec.r,
                    opts.spec.sigma_q0, opts.t0, t);
                const TimeGrid grid(0.0, t, grid_steps(opts.steps, t));
                const ConstantMrSolution sol =
                    solve_constant_mr_prior(spec, grid, warm);
                warm = std::sqrt(sol.sigma_sq);
                row = fmt(sv) + "," + fmt(t) + "," + fmt(warm) + "," +
                      fmt(sol.report.worst_case_mr) + "," + fmt(sol.residual) +
                      "," + fmt_int(sol.iters) + ",0";
            } catch (const NoConvergence& e) {
                curve_failed[static_cast<std::size_t>(c)] = 1;
                row = fmt(sv) + "," + fmt(t) + "," + fmt(kNaN) + "," +
                      fmt(kNaN) + "," + fmt(e.best_norm) + ",-1,1";
            } catch (const NonFinite&) {
                curve_failed[static_cast<std::size_t>(c)] = 1;
                row = fmt(sv) + "," + fmt(t) + "," + fmt(kNaN) + "," +
                      fmt(kNaN) + "," + fmt(kNaN) + ",-1,1";
            } catch (const std::exception& e) {
#ifdef _OPENMP
#pragma omp critical
#endif
                if (hard_msg.empty()) hard_msg = e.what();
                row = fmt(sv) + "," + fmt(t) + "," + fmt(kNaN) + "," +
                      fmt(kNaN) + "," + fmt(kNaN) + ",-1,1";
            }
            curves[static_cast<std::size_t>(c)][j] = std::move(row);
        }
    }

    if (!hard_msg.empty()) {
        std::cerr << "driftctl: " << hard_msg << '\n';
        return 1;
    }
    std::vector<std::string> rows;
    rows.reserve(nc * ts.size());
    bool partial = false;
    for (std::size_t c = 0; c < nc; ++c) {
        partial = partial || curve_failed[c];
        for (auto& r : curves[c]) rows.push_back(std::move(r));
    }
    const int rc = write_csv(opts.out,
        "sigma_v,t,sigma_opt,mr_star,residual,iters,status", rows);
    if (rc != 0) return rc;
    return partial ? 2 : 0;
}

// ==================== ar-sweep ====================

int cmd_ar_sweep(const ArSweepOptions& opts) {
    if (opts.sigma_v.empty() || !positive(opts.sigma_v)) {
        std::cerr << "driftctl: --sigma-v needs a nonempty list of positive values\n";
        return 1;
    }
    if (opts.sigma_sq_schedule.empty() || !positive(opts.sigma_sq_schedule) ||
        !std::is_sorted(opts.sigma_sq_schedule.begin(),
                        opts.sigma_sq_schedule.end())) {
        std::cerr << "driftctl: --sigma-sq-schedule must be positive and increasing\n";
        return 1;
    }
    if (opts.grid.count < 1 || opts.grid.start <= 0.0 ||
        opts.grid.stop < opts.grid.start || opts.steps < 1) {
        std::cerr << "driftctl: bad --grid (need 0 < start <= stop, count >= 1)\n";
        return 1;
    }
    const bool t0_mode = opts.mode == ArSweepMode::t0_sweep;
    const std::vector<double> gs = opts.grid.values();
    for (double g : gs) {
        const double t0 = t0_mode ? g : opts.fixed_t0;
        const double t = t0_mode ? opts.fixed_t : g;
        if (!(t0 > 0.0) || !(t0 < t)) {
            std::cerr << "driftctl: sweep needs 0 < t0 < T at every point "
                      << "(got t0=" << t0 << ", T=" << t << ")\n";
            return 1;
        }
    }

    const std::size_t nc = opts.sigma_v.size();
    const std::size_t total = nc * gs.size();
    std::vector<std::string> rows(total);
    std::vector<char> failed(total, 0);
    std::string hard_msg;

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(total); ++i) {
        const double sv = opts.sigma_v[static_cast<std::size_t>(i) / gs.size()];
        const double g = gs[static_cast<std::size_t>(i) % gs.size()];
        const double t = t0_mode ? opts.fixed_t : g;
        const TimeGrid grid(0.0, t, grid_steps(opts.steps, t));
        // Snap t0 to the solver grid so the control switch falls on a node;
        // the row reports the snapped value.
        const int k0 = std::clamp(
            static_cast<int>(std::lround((t0_mode ? g : opts.fixed_t0) / grid.h())),
            1, grid.n_steps - 1);
        const double t0 = grid.node(k0);
        std::string row;
        try {
            const SystemSpec spec = isotropic_spec(
                1, opts.spec.sigma_w, sv, opts.spec.q, opts.spec.r,
                opts.spec.sigma_q0, t0, t);
            const ArLimitReport rep =
                ar_limit(spec, grid, opts.sigma_sq_schedule);
            const ArLimitRow& last = rep.table.back();
            row = fmt(sv) + "," + fmt(t) + "," + fmt(t0) + "," +
                  fmt(rep.y_gap) + "," + fmt(last.x_gap_norm) + "," +
                  fmt(last.decay_ratio) + ",0";
        } catch (const NonFinite&) {
            failed[static_cast<std::size_t>(i)] = 1;
            row = fmt(sv) + "," + fmt(t) + "," + fmt(t0) + "," + fmt(kNaN) +
                  "," + fmt(kNaN) + "," + fmt(kNaN) + ",1";
        } catch (const std::exception& e) {
#ifdef _OPENMP
#pragma omp critical
#endif
            if (hard_msg.empty()) hard_msg = e.what();
            row = fmt(sv) + "," + fmt(t) + "," + fmt(t0) + "," + fmt(kNaN) +
                  "," + fmt(kNaN) + "," + fmt(kNaN) + ",1";
        }
        rows[static_cast<std::size_t>(i)] = std::move(row);
    }

    if (!hard_msg.empty()) {
        std::cerr << "driftctl: " << hard_msg << '\n';
        return 1;
    }
    const int rc = write_csv(opts.out,
        "sigma_v,t,t0,y_gap,x_gap_norm,decay_ratio,status", rows);
    if (rc != 0) return rc;
    return std::any_of(failed.begin(), failed.end(), [](char f) { return f; })
               ? 2 : 0;
}

// ==================== simulate ====================

namespace {

struct ParsedStrategy {
    Strategy strategy;
    double prior_sigma_sq = 1.0;  // bayesian / agnostic prediction width
};

bool parse_strategy(const std::string& text, int d, ParsedStrategy* out) {
    std::string head = text;
    std::string arg;
    const auto colon = text.find(':');
    if (colon != std::string::npos) {
        head = text.substr(0, colon);
        arg = text.substr(colon + 1);
    }
    if (head == "known-a") {
        if (!arg.empty()) return false;
        out->strategy = known_a_strategy();
        return true;
    }
    if (head == "bayesian") {
        double sigma_sq = 1.0;
        if (!arg.empty()) {
            try {
                std::size_t used = 0;
                sigma_sq = std::stod(arg, &used);
                if (used != arg.size()) return false;
            } catch (const std::exception&) {
                return false;
            }
        }
        if (!(sigma_sq > 0.0)) return false;
        PriorSpec prior{sigma_sq * MatXd::Identity(d, d)};
        out->strategy = bayesian_strategy(prior);
        out->prior_sigma_sq = sigma_sq;
        return true;
    }
    if (head == "agnostic") {
        int n_est = 50;
        if (!arg.empty()) {
            try {
                std::size_t used = 0;
                n_est = std::stoi(arg, &used);
                if (used != arg.size()) return false;
            } catch (const std::exception&) {
                return false;
            }
        }
        if (n_est < 2) return false;
        out->strategy = agnostic_strategy(n_est);
        out->prior_sigma_sq = 1e6;  // prediction reference for the summary row
        return true;
    }
    return false;
}

}  // namespace

int cmd_simulate(const SimulateOptions& opts) {
    if (opts.a.empty()) {
        std::cerr << "driftctl: --a needs at least one component\n";
        return 1;
    }
    const int d = static_cast<int>(opts.a.size());
    ParsedStrategy parsed;
    if (!parse_strategy(opts.strategy, d, &parsed)) {
        std::cerr << "driftctl: bad --strategy '" << opts.strategy
                  << "' (expected bayesian:<sigma-sq>, known-a, or agnostic:<n>)\n";
        return 1;
    }

    try {
        const SystemSpec spec = isotropic_spec(
            d, opts.spec.sigma_w, opts.spec.sigma_v, opts.spec.q, opts.spec.r,
            opts.spec.sigma_q0, opts.spec.t0, opts.spec.t_final);
        VecXd a(d);
        for (int i = 0; i < d; ++i) a(i) = opts.a[static_cast<std::size_t>(i)];

        SimConfig config;
        config.dt = opts.dt;
        config.trials = opts.trials;
        config.seed = opts.seed;
        config.strategy = parsed.strategy;
        config.keep_paths = opts.dump_paths;

        SimResult result;
        switch (parsed.strategy.kind) {
            case StrategyKind::bayesian:
                result = simulate_closed_loop(spec, config, a);
                break;
            case StrategyKind::known_a:
                result = simulate_known_a(spec, config, a);
                break;
            case StrategyKind::agnostic_additive:
                result = simulate_agnostic_additive(spec, config, a);
                break;
        }

        // Analytic prediction on the simulation grid, so the control switch
        // node matches exactly. The agnostic run is scored against the wide
        // Bayesian quadratic it approximates.
        const int n = static_cast<int>(
            std::ceil(spec.t_final / config.dt - 1e-9));
        const TimeGrid grid(0.0, spec.t_final, n);
        const ControlGain gain = solve_control_riccati(spec, grid);
        CostQuadratic quad;
        if (parsed.strategy.kind == StrategyKind::known_a) {
            const KnownACov cov = solve_known_a_riccati(spec, grid);
            quad = compute_cost_quadratic_star(
                propagate_known_a_moments(spec, gain, cov, grid), gain, spec);
        } else {
            const PriorSpec prior{parsed.prior_sigma_sq * MatXd::Identity(d, d)};
            const EstimationCov cov =
                solve_estimation_riccati(spec, prior, grid);
            quad = compute_cost_quadratic(
                propagate_bayesian_moments(spec, prior, gain, cov, grid),
                gain, spec);
        }
        const double prediction = a.dot(quad.x_mat * a) + quad.y_scalar;
        const double z = result.std_error > 0.0
            ? (result.mean_cost - prediction) / result.std_error : kNaN;

        if (opts.dump_paths > 0) {
            std::ofstream pf(opts.paths_out);
            if (!pf) {
                std::cerr << "driftctl: cannot open paths file '"
                          << opts.paths_out << "'\n";
                return 1;
            }
            pf << "trial,t";
            const char* groups[] = {"q", "qhat", "ahat", "u", "y"};
            for (const char* g : groups)
                for (int i = 1; i <= d; ++i) pf << ',' << g << '_' << i;
            pf << '\n';
            for (std::size_t p = 0; p < result.sample_paths.size(); ++p) {
                const SamplePath& path = result.sample_paths[p];
                for (int k = 0; k < path.grid.n_nodes(); ++k) {
                    pf << fmt_int(static_cast<long>(p)) << ','
                       << fmt(path.grid.node(k));
                    const VecXd* cols[] = {&path.q[static_cast<std::size_t>(k)],
                                           &path.q_hat[static_cast<std::size_t>(k)],
                                           &path.a_hat[static_cast<std::size_t>(k)],
                                           &path.u[static_cast<std::size_t>(k)],
                                           &path.y[static_cast<std::size_t>(k)]};
                    for (const VecXd* col : cols)
                        for (int i = 0; i < d; ++i) pf << ',' << fmt((*col)(i));
                    pf << '\n';
                }
            }
            if (!pf.good()) {
                std::cerr << "driftctl: write to '" << opts.paths_out
                          << "' failed\n";
                return 1;
            }
        }

        return write_csv(opts.out, "mean_cost,std_error,prediction,z_score",
                         {fmt(result.mean_cost) + "," + fmt(result.std_error) +
                          "," + fmt(prediction) + "," + fmt(z)});
    } catch (const NonFinite& e) {
        std::cerr << "driftctl: trial " << e.trial
                  << " diverged at t=" << e.when
                  << "; reduce --dt or check the instance scales\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "driftctl: " << e.what() << '\n';
        return 1;
    }
}

// ==================== estimate ====================

namespace {

// One observation sample per line, components separated by commas or
// whitespace. A single leading non-numeric line is treated as a header.
bool load_samples(const std::string& path, std::vector<VecXd>* out,
                  std::string* err) {
    std::ifstream file(path);
    if (!file) {
        *err = "cannot open path file '" + path + "'";
        return false;
    }
    std::string line;
    bool first = true;
    int d = -1;
    while (std::getline(file, line)) {
        for (char& c : line)
            if (c == ',' || c == '\t') c = ' ';
        std::istringstream ss(line);
        std::vector<double> vals;
        double v;
        while (ss >> v) vals.push_back(v);
        if (vals.empty()) {
            std::string word;
            std::istringstream rest(line);
            if (first && (rest >> word)) {
                first = false;
                continue;  // header line
            }
            continue;  // blank line
        }
        first = false;
        if (d < 0) d = static_cast<int>(vals.size());
        if (static_cast<int>(vals.size()) != d) {
            *err = "ragged row in '" + path + "'";
            return false;
        }
        VecXd row(d);
        for (int i = 0; i < d; ++i) row(i) = vals[static_cast<std::size_t>(i)];
        out->push_back(std::move(row));
    }
    if (out->empty()) {
        *err = "no samples in '" + path + "'";
        return false;
    }
    return true;
}

}  // namespace

int cmd_estimate(const EstimateOptions& opts) {
    if (opts.n < 2 || !(opts.horizon > 0.0)) {
        std::cerr << "driftctl: need --horizon > 0 and --n >= 2\n";
        return 1;
    }
    try {
        std::vector<VecXd> samples;
        int d = 1;
        const bool synthetic = opts.path.empty();
        if (!synthetic) {
            std::string err;
            if (!load_samples(opts.path, &samples, &err)) {
                std::cerr << "driftctl: " << err << '\n';
                return 1;
            }
            d = static_cast<int>(samples.front().size());
            if (static_cast<int>(samples.size()) != opts.n + 1) {
                std::cerr << "driftctl: '" << opts.path << "' has "
                          << samples.size() << " samples but --n " << opts.n
                          << " needs " << opts.n + 1 << '\n';
                return 1;
            }
        }

        const SystemSpec spec = isotropic_spec(
            d, opts.spec.sigma_w, opts.spec.sigma_v, opts.spec.q, opts.spec.r,
            opts.spec.sigma_q0, 0.0, opts.horizon);
        const EstimatorWeights weights =
            solve_weights(spec, opts.horizon, opts.n);

        Trajectory y;
        y.grid = weights.grid;
        y.values.resize(static_cast<std::size_t>(opts.n) + 1);
        for (int k = 0; k <= opts.n; ++k) {
            if (synthetic) {
                const double t = weights.grid.node(k);
                y.values[static_cast<std::size_t>(k)] =
                    VecXd::Constant(1, opts.synthetic_a * t * t / 2.0);
            } else {
                y.values[static_cast<std::size_t>(k)] =
                    samples[static_cast<std::size_t>(k)];
            }
        }

        const StateEstimate est = estimate_state(y, weights);

        // Constraint residual under the same trapezoid weights the solve used.
        const double h = weights.grid.h();
        MatXd acc = weights.kappa;
        for (int k = 0; k <= opts.n; ++k) {
            const double w = (k == 0 || k == opts.n) ? h / 2.0 : h;
            acc += w * weights.omega0[static_cast<std::size_t>(k)];
        }
        const double residual = acc.cwiseAbs().maxCoeff();
        const double error = synthetic
            ? (est.a_hat.array() - opts.synthetic_a).abs().maxCoeff() : kNaN;

        std::string header, row;
        for (int i = 1; i <= d; ++i)
            header += "a_hat_" + std::to_string(i) + ",";
        for (int i = 1; i <= d; ++i)
            header += "q_hat_" + std::to_string(i) + ",";
        header += "residual,error";
        for (int i = 0; i < d; ++i) row += fmt(est.a_hat(i)) + ",";
        for (int i = 0; i < d; ++i) row += fmt(est.q_hat(i)) + ",";
        row += fmt(residual) + "," + fmt(error);
        return write_csv(opts.out, header, {row});
    } catch (const Singular& e) {
        std::cerr << "driftctl: " << e.what()
                  << "; try a larger --n or a better-conditioned sigma-v\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "driftctl: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace driftctl
