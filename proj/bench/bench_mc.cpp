// Benchmark: OpenMP trial loop vs a plain serial re-implementation of the
// same recursion. Both consume the same counter-based noise streams, so
// per-trial costs must agree exactly; a mismatch means the parallel kernel
// reordered arithmetic somewhere. Run manually, not part of the test suite:
//
//   bench_mc [trials] [dt]
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <Eigen/Dense>

#include "driftctl/model.hpp"
#include "driftctl/riccati.hpp"
#include "driftctl/rng.hpp"
#include "driftctl/simulator.hpp"

using namespace driftctl;

namespace {

double now_seconds() {
    using clock = std::chrono::steady_clock;
    static const clock::time_point start = clock::now();
    return std::chrono::duration<double>(clock::now() - start).count();
}

MatXd psd_sqrt(const MatXd& m) {
    Eigen::SelfAdjointEigenSolver<MatXd> eig(m);
    VecXd lam = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * lam.asDiagonal() *
           eig.eigenvectors().transpose();
}

struct Tables {
    TimeGrid grid;
    std::vector<MatXd> g1, g2, k1, k2;
    MatXd sqrt_w, sqrt_v, sqrt_q0;
};

Tables build_tables(const SystemSpec& spec, const PriorSpec& prior,
                    double dt) {
    Tables tab;
    const int n =
        static_cast<int>(std::ceil(spec.t_final / dt - 1e-9));
    tab.grid = TimeGrid(0.0, spec.t_final, std::max(n, 1));
    const MatXd r_inv = Eigen::LLT<MatXd>(spec.r_weight)
                            .solve(MatXd::Identity(spec.d, spec.d));
    const MatXd sv_inv = Eigen::LLT<MatXd>(spec.sigma_v)
                             .solve(MatXd::Identity(spec.d, spec.d));
    const ControlGain gain = solve_control_riccati(spec, tab.grid);
    const EstimationCov cov =
        solve_estimation_riccati(spec, prior, tab.grid);
    for (int k = 0; k < tab.grid.n_nodes(); ++k) {
        tab.g1.push_back(r_inv * gain.s11[k]);
        tab.g2.push_back(r_inv * gain.s12[k]);
        tab.k1.push_back(cov.p11[k] * sv_inv);
        tab.k2.push_back(cov.p12[k].transpose() * sv_inv);
    }
    tab.sqrt_w = psd_sqrt(spec.sigma_w);
    tab.sqrt_v = psd_sqrt(spec.sigma_v);
    tab.sqrt_q0 = psd_sqrt(spec.sigma_q0);
    return tab;
}

// One trial of the Bayesian closed loop, written as in the library's inner
// loop (same expressions in the same order) but with no pragmas around it.
double serial_trial(const SystemSpec& spec, const Tables& tab,
                    const VecXd& a_true, std::uint64_t seed,
                    std::uint64_t trial) {
    const int d = spec.d;
    const int n = tab.grid.n_steps;
    const double dt = tab.grid.h();
    const double sdt = std::sqrt(dt);
    TrialStream rng(seed, trial);
    VecXd z(d), q(d), qh(d), ah(d), u(d);
    VecXd dw(d), dv(d), dy(d), innov(d), tmp(d);

    for (int i = 0; i < d; ++i) z(i) = rng.normal();
    q.noalias() = tab.sqrt_q0 * z;
    qh.setZero();
    ah.setZero();
    u.setZero();
    double cost = 0.0;

    for (int k = 0; k < n; ++k) {
        u.noalias() = tab.g1[k] * qh;
        u.noalias() += tab.g2[k] * ah;
        u *= -1.0;

        tmp.noalias() = spec.q_weight * q;
        cost += q.dot(tmp) * dt;
        tmp.noalias() = spec.r_weight * u;
        cost += u.dot(tmp) * dt;

        for (int i = 0; i < d; ++i) z(i) = rng.normal();
        dw.noalias() = tab.sqrt_w * z;
        dw *= sdt;
        for (int i = 0; i < d; ++i) z(i) = rng.normal();
        dv.noalias() = tab.sqrt_v * z;
        dv *= sdt;
        dy = q * dt + dv;

        innov = dy - qh * dt;
        tmp.noalias() = tab.k1[k] * innov;
        qh += dt * (ah + u) + tmp;
        tmp.noalias() = tab.k2[k] * innov;
        ah += tmp;

        q += dt * (a_true + u) + dw;
    }
    return cost;
}

}  // namespace

int main(int argc, char** argv) {
    const int trials = argc > 1 ? std::atoi(argv[1]) : 20000;
    const double dt = argc > 2 ? std::atof(argv[2]) : 1e-3;
    if (trials < 1 || !(dt > 0.0)) {
        std::fprintf(stderr, "usage: bench_mc [trials] [dt]\n");
        return 1;
    }
    const std::uint64_t seed = 20260822;

    const SystemSpec spec =
        validate_spec(isotropic_spec(1, 1, 1, 1, 1, 1, 0.0, 1.0));
    PriorSpec prior;
    prior.sigma_prior = MatXd::Identity(1, 1);
    const VecXd a = VecXd::Constant(1, 1.0);

    SimConfig config;
    config.dt = dt;
    config.trials = trials;
    config.seed = seed;
    config.strategy = bayesian_strategy(prior);

    int procs = 1;
#ifdef _OPENMP
    procs = omp_get_num_procs();
#endif
    std::printf("closed-loop Monte Carlo, %d trials, dt=%g, %d core(s)\n\n",
                trials, dt, procs);

    // serial reference
    const Tables tab = build_tables(spec, prior, dt);
    std::vector<double> serial_costs(trials);
    double t0 = now_seconds();
    for (int trial = 0; trial < trials; ++trial) {
        serial_costs[trial] =
            serial_trial(spec, tab, a, seed, static_cast<std::uint64_t>(trial));
    }
    const double t_serial = now_seconds() - t0;
    double mean = 0.0;
    for (double c : serial_costs) mean += c;
    mean /= trials;
    std::printf("  serial reference   %8.2f s  (%.0f trials/s)  mean %.10f\n",
                t_serial, trials / t_serial, mean);

    // library kernel at one thread and at all cores
    double t_one = 0.0, t_all = 0.0;
    SimResult wide;
    {
#ifdef _OPENMP
        omp_set_num_threads(1);
#endif
        t0 = now_seconds();
        const SimResult r = simulate_closed_loop(spec, config, a);
        t_one = now_seconds() - t0;
        std::printf("  library, 1 thread  %8.2f s  (%.0f trials/s)  mean %.10f\n",
                    t_one, trials / t_one, r.mean_cost);
    }
    {
#ifdef _OPENMP
        omp_set_num_threads(procs);
#endif
        t0 = now_seconds();
        wide = simulate_closed_loop(spec, config, a);
        t_all = now_seconds() - t0;
        std::printf("  library, %d thread(s) %6.2f s  (%.0f trials/s)  mean %.10f\n",
                    procs, t_all, trials / t_all, wide.mean_cost);
    }

    int exact = 0;
    double worst = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
        const double diff =
            std::abs(serial_costs[trial] - wide.per_trial_costs[trial]);
        exact += (diff == 0.0);
        worst = std::max(worst, diff);
    }
    std::printf("\n  speedup vs serial reference: %.2fx (1 thread), %.2fx (%d)\n",
                t_serial / t_one, t_serial / t_all, procs);
    std::printf("  per-trial agreement: %d/%d exact, worst |diff| %.3e\n",
                exact, trials, worst);

    if (worst > 1e-12 * std::max(1.0, std::abs(mean))) {
        std::fprintf(stderr, "kernel and reference disagree\n");
        return 1;
    }
    return 0;
}
