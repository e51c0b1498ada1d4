#pragma once

#include <vector>

#include "driftctl/model.hpp"
#include "driftctl/numerics.hpp"
#include "driftctl/types.hpp"

namespace driftctl {

// Covariance kernel of the integrated observation process on a window [0, t],
// sampled on a uniform grid. Block (nu, mu) holds
//   S(t_nu, t_mu) = Sigma_V t_nu + Sigma_W (t_nu^2 t_mu / 2 - t_nu^3 / 6
//                                           - t_nu^2 t_mu^2 / (4 t))
// for t_nu <= t_mu, and the transposed-argument branch otherwise.
struct KernelMatrix {
    TimeGrid grid;
    std::vector<MatXd> blocks;  // (n+1) x (n+1) blocks of d x d, row-major

    const MatXd& block(int nu, int mu) const {
        return blocks[static_cast<std::size_t>(nu) * (grid.n_steps + 1) + mu];
    }
    // Dense (n+1)d x (n+1)d kernel, mainly for spectrum checks.
    MatXd assembled() const;
};

// Weight function of the flat-prior batch estimator on [0, t]: a continuous
// part omega0 sampled at the grid nodes plus a Dirac weight kappa at the
// window end. gamma is the precision-like matrix of the resulting estimate.
struct EstimatorWeights {
    TimeGrid grid;
    std::vector<MatXd> omega0;  // one d x d matrix per node
    MatXd kappa;
    MatXd gamma;
};

struct StateEstimate {
    VecXd a_hat;
    VecXd q_hat;
};

// Tabulates the covariance kernel on [0, t] with n steps. The first row and
// column vanish (the process starts pinned at zero). Requires 0 < t <= T.
KernelMatrix build_kernel(const SystemSpec& spec, double horizon, int n);

// Solves the limiting estimation equations on [0, t]:
//   -Sigma_V w(s) - (Sigma_W / 2t) int_0^t tau^2 w(tau) dtau
//       + Sigma_W int_s^t (tau - s) w(tau) dtau = I + ((2s - t)/2) Sigma_W k
// collocated at every node with trapezoidal quadrature, together with the
// constraint int_0^t w dtau = -k appended as the final block row. The
// resulting dense block system is solved in one shot; gamma is then
//   (1/2t^2) (int s^2 w(s) ds + t^2 k).
// Throws Singular when the discretized system is too ill-conditioned, which
// typically means n is too small or Sigma_V too close to singular.
EstimatorWeights solve_weights(const SystemSpec& spec, double horizon, int n);

// Applies the weights to an observed path sampled on the same grid:
//   q_hat = gamma^{-1} (1/t) (int w(s) y(s) ds + k y(t)),   a_hat = q_hat / t.
// The identity q_hat = t a_hat holds by construction. The estimator assumes
// the window is control-free; callers subtract any known control contribution
// from y beforehand.
StateEstimate estimate_state(const Trajectory& y_path, const EstimatorWeights& weights);

}  // namespace driftctl
