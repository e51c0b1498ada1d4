#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "driftctl/model.hpp"
#include "driftctl/types.hpp"

namespace driftctl {

// ==================== configuration ====================

enum class StrategyKind { bayesian, known_a, agnostic_additive };

// Which controller runs in the loop. `prior` is read for the Bayesian
// strategy, `estimator_steps` (batch-estimator grid size per window) for the
// agnostic one; the other fields are ignored.
struct Strategy {
    StrategyKind kind = StrategyKind::bayesian;
    PriorSpec prior;
    int estimator_steps = 50;
};

Strategy bayesian_strategy(const PriorSpec& prior);
Strategy known_a_strategy();
Strategy agnostic_strategy(int estimator_steps);

struct SimConfig {
    double dt = 1e-3;
    int trials = 1;
    std::uint64_t seed = 0;
    Strategy strategy;
    int keep_paths = 0;  // store full trajectories for the first k trials
};

// ==================== results ====================

struct SamplePath {
    TimeGrid grid;
    std::vector<VecXd> q, q_hat, a_hat, u, y;
};

struct SimResult {
    double mean_cost = 0.0;
    double std_error = 0.0;  // sample std / sqrt(trials)
    std::vector<double> per_trial_costs;
    std::vector<SamplePath> sample_paths;
};

// ==================== operations ====================

// Euler-Maruyama simulation of the closed loop under the Bayesian filter:
//   dq = (a + u) dt + dW,  dy = q dt + dV,
//   u = -R^{-1} (S11 q_hat + S12 a_hat) once t >= t0, zero before,
// with cost accumulated by left-endpoint quadrature over [t0, T). The number
// of steps is ceil(T / dt); gains and filter covariances are solved on that
// same grid, so no interpolation is involved. Each trial draws its noise from
// a counter-based stream keyed by (seed, trial index): results do not depend
// on thread count or execution order, and the same trial sees the same noise
// under every strategy.
// Throws NonFinite (with the trial index) when a trial diverges.
SimResult simulate_closed_loop(const SystemSpec& spec, const SimConfig& config,
                               const VecXd& a_true);

// Same loop with the drift revealed to the controller: a_hat == a_true and
// the filter runs the known-drift gain P*11 Sigma_V^{-1}.
SimResult simulate_known_a(const SystemSpec& spec, const SimConfig& config,
                           const VecXd& a_true);

// Same loop controlled by the batch estimates: at every node past t0 the
// weights for the window [0, t] are applied to the observed path with the
// control contribution subtracted, then u = -R^{-1} (S11 q_hat + S12 a_hat).
// Weights are precomputed once per node and shared across trials; observed
// values are interpolated linearly onto each window grid. Requires t0 > 0.
SimResult simulate_agnostic_additive(const SystemSpec& spec,
                                     const SimConfig& config,
                                     const VecXd& a_true);

// CSV dump of one stored trajectory: header row, then one line per node with
// columns t, q_1..q_d, qhat_1..d, ahat_1..d, u_1..d, y_1..d.
void write_path_csv(std::ostream& os, const SamplePath& path);

}  // namespace driftctl
