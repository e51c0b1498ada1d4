#include "driftctl/simulator.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "driftctl/estimator.hpp"
#include "driftctl/riccati.hpp"
#include "driftctl/rng.hpp"
#include "internal.hpp"

namespace driftctl {

namespace {

// Symmetric PSD square root; tolerates semidefinite inputs (sigma_w and
// sigma_q0 may be singular).
MatXd psd_sqrt(const MatXd& m) {
    Eigen::SelfAdjointEigenSolver<MatXd> eig(m);
    VecXd lam = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * lam.asDiagonal() *
           eig.eigenvectors().transpose();
}

// Batch-estimator application at one control node, flattened for the inner
// loop: quadrature weight folded into each omega0 block, plus a linear
// interpolation map from simulation nodes onto the window grid.
struct WindowCoef {
    double t = 0.0;
    std::vector<int> left;
    std::vector<double> frac;
    std::vector<MatXd> wom;
    MatXd kappa;
    MatXd gamma_inv;
};

struct Tables {
    TimeGrid grid;
    int k0 = 0;
    std::vector<MatXd> g1, g2;      // R^{-1} S11, R^{-1} S12
    std::vector<MatXd> k1, k2;      // Bayesian filter gains
    std::vector<MatXd> k1_star;     // known-drift filter gain
    std::vector<WindowCoef> windows;  // agnostic, one per node >= k0
    MatXd sqrt_w, sqrt_v, sqrt_q0;
};

Tables prepare(const SystemSpec& spec, const SimConfig& config,
               StrategyKind kind) {
    if (!(config.dt > 0.0) || !std::isfinite(config.dt)) {
        throw std::invalid_argument("dt must be positive");
    }
    if (config.trials < 1) {
        throw std::invalid_argument("need at least one trial");
    }

    Tables tab;
    const int n = static_cast<int>(
        std::ceil(spec.t_final / config.dt - 1e-9));
    tab.grid = TimeGrid(0.0, spec.t_final, std::max(n, 1));
    tab.k0 = detail::locate_node(tab.grid, spec.t0);

    const MatXd r_inv = detail::spd_inverse(spec.r_weight);
    const MatXd sv_inv = detail::spd_inverse(spec.sigma_v);
    const ControlGain gain = solve_control_riccati(spec, tab.grid);
    const int nn = tab.grid.n_nodes();
    tab.g1.reserve(nn);
    tab.g2.reserve(nn);
    for (int k = 0; k < nn; ++k) {
        tab.g1.push_back(r_inv * gain.s11[k]);
        tab.g2.push_back(r_inv * gain.s12[k]);
    }

    switch (kind) {
        case StrategyKind::bayesian: {
            const EstimationCov cov =
                solve_estimation_riccati(spec, config.strategy.prior, tab.grid);
            tab.k1.reserve(nn);
            tab.k2.reserve(nn);
            for (int k = 0; k < nn; ++k) {
                tab.k1.push_back(cov.p11[k] * sv_inv);
                tab.k2.push_back(cov.p12[k].transpose() * sv_inv);
            }
            break;
        }
        case StrategyKind::known_a: {
            const KnownACov cov = solve_known_a_riccati(spec, tab.grid);
            tab.k1_star.reserve(nn);
            for (int k = 0; k < nn; ++k) {
                tab.k1_star.push_back(cov.p11_star[k] * sv_inv);
            }
            break;
        }
        case StrategyKind::agnostic_additive: {
            if (!(spec.t0 > 0.0)) {
                throw BadHorizon(
                    "agnostic strategy needs an observation window, t0 > 0");
            }
            const int n_est = config.strategy.estimator_steps;
            const double h_sim = tab.grid.h();
            tab.windows.reserve(nn - tab.k0);
            for (int k = tab.k0; k < nn; ++k) {
                const double t = tab.grid.node(k);
                const EstimatorWeights w = solve_weights(spec, t, n_est);
                WindowCoef wc;
                wc.t = t;
                wc.kappa = w.kappa;
                wc.gamma_inv = solve_linear(
                    w.gamma, MatXd::Identity(spec.d, spec.d));
                const double h_est = w.grid.h();
                for (int j = 0; j <= n_est; ++j) {
                    const double pos = w.grid.node(j) / h_sim;
                    int left = std::min(static_cast<int>(pos), k - 1);
                    wc.left.push_back(left);
                    wc.frac.push_back(pos - left);
                    const double quad =
                        (j == 0 || j == n_est) ? 0.5 * h_est : h_est;
                    wc.wom.push_back(quad * w.omega0[j]);
                }
                tab.windows.push_back(std::move(wc));
            }
            break;
        }
    }

    tab.sqrt_w = psd_sqrt(spec.sigma_w);
    tab.sqrt_v = psd_sqrt(spec.sigma_v);
    tab.sqrt_q0 = psd_sqrt(spec.sigma_q0);
    return tab;
}

SimResult run(const SystemSpec& raw, const SimConfig& config,
              const VecXd& a_true, StrategyKind kind) {
    const SystemSpec spec = validate_spec(raw);
    const int d = spec.d;
    if (a_true.size() != d) {
        throw DimensionMismatch("a_true dimension does not match the spec");
    }
    const Tables tab = prepare(spec, config, kind);
    const TimeGrid& grid = tab.grid;
    const int n = grid.n_steps;
    const double dt = grid.h();
    const double sdt = std::sqrt(dt);
    const int keep = std::min(config.keep_paths, config.trials);

    SimResult result;
    result.per_trial_costs.assign(config.trials, 0.0);
    result.sample_paths.resize(keep);
    std::vector<double> err_time(config.trials, -1.0);
    std::vector<char> err_flag(config.trials, 0);

#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int trial = 0; trial < config.trials; ++trial) {
        TrialStream rng(config.seed, static_cast<std::uint64_t>(trial));
        VecXd z(d), q(d), qh(d), ah(d), y(d), u(d);
        VecXd dw(d), dv(d), dy(d), innov(d), tmp(d), acc(d), ynode(d);
        VecXd ucum = VecXd::Zero(d), ycum = VecXd::Zero(d);
        std::vector<VecXd> yt;
        if (kind == StrategyKind::agnostic_additive) {
            yt.assign(n + 1, VecXd::Zero(d));
        }

        for (int i = 0; i < d; ++i) z(i) = rng.normal();
        q.noalias() = tab.sqrt_q0 * z;
        qh.setZero();
        ah = (kind == StrategyKind::known_a) ? a_true : VecXd::Zero(d);
        y.setZero();
        u.setZero();
        double cost = 0.0;

        SamplePath* path = trial < keep ? &result.sample_paths[trial] : nullptr;
        if (path != nullptr) {
            path->grid = grid;
            path->q.reserve(n + 1);
            path->q_hat.reserve(n + 1);
            path->a_hat.reserve(n + 1);
            path->u.reserve(n + 1);
            path->y.reserve(n + 1);
        }

        for (int k = 0; k <= n; ++k) {
            if (kind == StrategyKind::agnostic_additive && k >= tab.k0) {
                const WindowCoef& wc = tab.windows[k - tab.k0];
                acc.noalias() = wc.kappa * yt[k];
                for (std::size_t j = 0; j < wc.wom.size(); ++j) {
                    const int i = wc.left[j];
                    ynode = yt[i] + wc.frac[j] * (yt[i + 1] - yt[i]);
                    acc.noalias() += wc.wom[j] * ynode;
                }
                qh.noalias() = wc.gamma_inv * acc;
                qh /= wc.t;
                ah = qh / wc.t;
                qh += ucum;
            }
            if (k >= tab.k0) {
                u.noalias() = tab.g1[k] * qh;
                u.noalias() += tab.g2[k] * ah;
                u *= -1.0;
            } else {
                u.setZero();
            }
            if (path != nullptr) {
                path->q.push_back(q);
                path->q_hat.push_back(qh);
                path->a_hat.push_back(ah);
                path->u.push_back(u);
                path->y.push_back(y);
            }
            if (k == n) break;

            if (k >= tab.k0) {
                tmp.noalias() = spec.q_weight * q;
                cost += q.dot(tmp) * dt;
                tmp.noalias() = spec.r_weight * u;
                cost += u.dot(tmp) * dt;
            }

            for (int i = 0; i < d; ++i) z(i) = rng.normal();
            dw.noalias() = tab.sqrt_w * z;
            dw *= sdt;
            for (int i = 0; i < d; ++i) z(i) = rng.normal();
            dv.noalias() = tab.sqrt_v * z;
            dv *= sdt;
            dy = q * dt + dv;

            switch (kind) {
                case StrategyKind::bayesian:
                    innov = dy - qh * dt;
                    tmp.noalias() = tab.k1[k] * innov;
                    qh += dt * (ah + u) + tmp;
                    tmp.noalias() = tab.k2[k] * innov;
                    ah += tmp;
                    break;
                case StrategyKind::known_a:
                    innov = dy - qh * dt;
                    tmp.noalias() = tab.k1_star[k] * innov;
                    qh += dt * (a_true + u) + tmp;
                    break;
                case StrategyKind::agnostic_additive:
                    ycum += dt * ucum;
                    ucum += dt * u;
                    break;
            }

            q += dt * (a_true + u) + dw;
            y += dy;
            if (kind == StrategyKind::agnostic_additive) {
                yt[k + 1] = y - ycum;
            }

            if (!(q.allFinite() && qh.allFinite() && ah.allFinite() &&
                  std::isfinite(cost))) {
                err_flag[trial] = 1;
                err_time[trial] = grid.node(k + 1);
                break;
            }
        }
        result.per_trial_costs[trial] = cost;
    }

    for (int trial = 0; trial < config.trials; ++trial) {
        if (err_flag[trial]) {
            throw NonFinite("simulated trial diverged", err_time[trial], trial);
        }
    }

    // index-ordered reduction keeps the result independent of thread count
    double mean = 0.0;
    for (double c : result.per_trial_costs) mean += c;
    mean /= config.trials;
    double ssq = 0.0;
    for (double c : result.per_trial_costs) ssq += (c - mean) * (c - mean);
    result.mean_cost = mean;
    result.std_error =
        config.trials > 1
            ? std::sqrt(ssq / (config.trials - 1) / config.trials)
            : 0.0;
    return result;
}

}  // namespace

Strategy bayesian_strategy(const PriorSpec& prior) {
    Strategy s;
    s.kind = StrategyKind::bayesian;
    s.prior = prior;
    return s;
}

Strategy known_a_strategy() {
    Strategy s;
    s.kind = StrategyKind::known_a;
    return s;
}

Strategy agnostic_strategy(int estimator_steps) {
    Strategy s;
    s.kind = StrategyKind::agnostic_additive;
    s.estimator_steps = estimator_steps;
    return s;
}

SimResult simulate_closed_loop(const SystemSpec& spec, const SimConfig& config,
                               const VecXd& a_true) {
    return run(spec, config, a_true, StrategyKind::bayesian);
}

SimResult simulate_known_a(const SystemSpec& spec, const SimConfig& config,
                           const VecXd& a_true) {
    return run(spec, config, a_true, StrategyKind::known_a);
}

SimResult simulate_agnostic_additive(const SystemSpec& spec,
                                     const SimConfig& config,
                                     const VecXd& a_true) {
    return run(spec, config, a_true, StrategyKind::agnostic_additive);
}

void write_path_csv(std::ostream& os, const SamplePath& path) {
    if (path.q.empty()) return;
    const int d = static_cast<int>(path.q.front().size());
    os << "t";
    const char* names[] = {"q", "qhat", "ahat", "u", "y"};
    for (const char* name : names) {
        for (int i = 1; i <= d; ++i) os << ',' << name << '_' << i;
    }
    os << '\n';
    char buf[32];
    const std::vector<VecXd>* cols[] = {&path.q, &path.q_hat, &path.a_hat,
                                        &path.u, &path.y};
    for (int k = 0; k < path.grid.n_nodes(); ++k) {
        std::snprintf(buf, sizeof buf, "%.16e", path.grid.node(k));
        os << buf;
        for (const auto* col : cols) {
            for (int i = 0; i < d; ++i) {
                std::snprintf(buf, sizeof buf, "%.16e", (*col)[k](i));
                os << ',' << buf;
            }
        }
        os << '\n';
    }
}

}  // namespace driftctl
