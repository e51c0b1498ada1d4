#pragma once

#include <vector>

#include "driftctl/model.hpp"
#include "driftctl/types.hpp"

namespace driftctl {

// ==================== solution containers ====================

// Filter error covariance P(t) of the augmented state, stored blockwise:
//   P = [[P11, P12], [P12ᵀ, P22]],
// solved forward from P(0) = blockdiag(sigma_q0, sigma_prior).
struct EstimationCov {
    TimeGrid grid;
    std::vector<MatXd> p11;
    std::vector<MatXd> p12;  // general d×d block, not symmetric for d > 1
    std::vector<MatXd> p22;
};

// Control Riccati solution S(t), stored blockwise like P, solved backward
// from S(T) = 0. alpha holds the scalar offset α(t) of the value function
// and stays empty until solve_alpha fills it.
struct ControlGain {
    TimeGrid grid;
    std::vector<MatXd> s11;
    std::vector<MatXd> s12;
    std::vector<MatXd> s22;
    std::vector<double> alpha;
};

// Filter covariance when the drift is known: only the q-block is nonzero.
struct KnownACov {
    TimeGrid grid;
    std::vector<MatXd> p11_star;
};

// ==================== solvers ====================

// Backward Riccati blocks on [grid.t_start, T], terminal S(T) = 0:
//   -Ṡ11 = Q - S11 R⁻¹ S11
//   -Ṡ12 = S11 - S11 R⁻¹ S12
//   -Ṡ22 = S12 + S12ᵀ - S12ᵀ R⁻¹ S12
// Integrated in reversed time so the forward RK4 stepper applies; each node
// is symmetrized (s11, s22). Does not touch alpha. S never references
// sigma_v or the prior, so it is identical across those parameters.
ControlGain solve_control_riccati(const SystemSpec& spec, const TimeGrid& grid);

// Forward Riccati blocks from t = 0:
//   Ṗ11 = P12 + P12ᵀ - P11 Σ_V⁻¹ P11 + Σ_W
//   Ṗ12 = P22 - P11 Σ_V⁻¹ P12
//   Ṗ22 = -P12ᵀ Σ_V⁻¹ P12
// with P(0) = blockdiag(sigma_q0, sigma_prior).
EstimationCov solve_estimation_riccati(const SystemSpec& spec,
                                       const PriorSpec& prior,
                                       const TimeGrid& grid);

// Forward scalar-structure Riccati for the known-drift filter:
//   Ṗ*11 = -P*11 Σ_V⁻¹ P*11 + Σ_W,  P*11(0) = sigma_q0.
KnownACov solve_known_a_riccati(const SystemSpec& spec, const TimeGrid& grid);

// Fills gain.alpha by backward trapezoidal quadrature of
//   -α̇ = Trace(P Hᵀ Σ_V⁻¹ H P S),  α(T) = 0,
// so α is nonnegative and nonincreasing. Throws GridMismatch unless gain and
// cov share a grid.
ControlGain solve_alpha(const ControlGain& gain, const EstimationCov& cov,
                        const SystemSpec& spec);

// Expected remaining cost at time t for belief mean x̂ = (q̂, â):
//   x̂ᵀ S(t) x̂ + Trace(P(t) S(t))
//     + ∫_t^T Trace(G Σ_W Gᵀ S + S B R⁻¹ Bᵀ S P) dτ,
// integral by trapezoidal quadrature on the stored grid. t must lie on the
// grid (GridMismatch otherwise).
double bayesian_cost_to_go(const VecXd& x_hat, double t,
                           const ControlGain& gain, const EstimationCov& cov,
                           const SystemSpec& spec);

}  // namespace driftctl
