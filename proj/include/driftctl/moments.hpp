#pragma once

#include <vector>

#include "driftctl/model.hpp"
#include "driftctl/riccati.hpp"
#include "driftctl/types.hpp"

namespace driftctl {

// ==================== closed-loop moments ====================

// Conditional moments of the closed loop (q, q̂, â) given the true drift a.
// The dynamics are linear and a enters additively, so the conditional means
// are linear in a and are stored as d×d propagators:
//   E[q | a] = c1·a,   E[q̂ | a] = c2·a,   E[â | a] = c3·a,
// while the fluctuation covariances do not depend on a at all. The
// known-drift variant fills only c1, c2, cov_qq, cov_qqh, cov_qhqh and
// leaves the remaining sequences empty.
struct MomentState {
    TimeGrid grid;
    std::vector<MatXd> c1, c2, c3;
    std::vector<MatXd> cov_qq;    // Σ_qq
    std::vector<MatXd> cov_qqh;   // Σ_qq̂
    std::vector<MatXd> cov_qah;   // Σ_qâ
    std::vector<MatXd> cov_qhqh;  // Σ_q̂q̂
    std::vector<MatXd> cov_qhah;  // Σ_q̂â
    std::vector<MatXd> cov_ahah;  // Σ_ââ
};

// Expected closed-loop cost as a quadratic in the drift:
//   J(a) = aᵀ · x_mat · a + y_scalar.
struct CostQuadratic {
    MatXd x_mat;
    double y_scalar = 0.0;
};

// ==================== propagation ====================

// Integrates the coupled mean and covariance ODEs of the Bayesian closed
// loop forward from zero initial moments (except Σ_qq(0) = sigma_q0). The
// control u = −R⁻¹(S11 q̂ + S12 â) acts from t0 on; before t0 every R⁻¹S
// term is dropped and only the filter runs. gain and cov must live on
// `grid`, and t0 must be a grid node, so the switch falls on a step
// boundary and the integrator never straddles the discontinuity.
MomentState propagate_bayesian_moments(const SystemSpec& spec,
                                       const PriorSpec& prior,
                                       const ControlGain& gain,
                                       const EstimationCov& cov,
                                       const TimeGrid& grid);

// Quadrature of the cost integrands over [t0, T]:
//   X = ∫ C1ᵀQC1 + (S11 C2 + S12 C3)ᵀ R⁻¹ (S11 C2 + S12 C3) dt
//   Y = ∫ Tr(Q Σ_qq) + Tr(S11ᵀR⁻¹S11 Σ_q̂q̂) + Tr(S12ᵀR⁻¹S12 Σ_ââ)
//         + 2 Tr(S12ᵀR⁻¹S11 Σ_q̂â) dt
// by the trapezoid rule on the stored grid; X is symmetrized. t0 == T is
// accepted and yields the empty integral (X = 0, Y = 0).
CostQuadratic compute_cost_quadratic(const MomentState& moments,
                                     const ControlGain& gain,
                                     const SystemSpec& spec);

// Same propagation when the drift is known to the controller: the filter
// uses P*11 and the drift estimate is exact, so c3 ≡ I and every â
// covariance vanishes. Returns the restricted field set.
MomentState propagate_known_a_moments(const SystemSpec& spec,
                                      const ControlGain& gain,
                                      const KnownACov& cov_star,
                                      const TimeGrid& grid);

// Starred cost quadratic over [t0, T]:
//   X* = ∫ C1*ᵀQC1* + (S11 C2* + S12)ᵀ R⁻¹ (S11 C2* + S12) dt
//   Y* = ∫ Tr(Q Σ*_qq) + Tr(S11ᵀR⁻¹S11 Σ*_q̂q̂) dt.
CostQuadratic compute_cost_quadratic_star(const MomentState& moments,
                                          const ControlGain& gain,
                                          const SystemSpec& spec);

}  // namespace driftctl
