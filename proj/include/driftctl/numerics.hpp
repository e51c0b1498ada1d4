#pragma once

#include <functional>
#include <vector>

#include "driftctl/model.hpp"

namespace driftctl {

// Flat state vector sampled at every node of a uniform grid.
struct Trajectory {
    TimeGrid grid;
    std::vector<VecXd> values;  // grid.n_steps + 1 entries
};

using OdeField = std::function<VecXd(double t, const VecXd& y)>;
using PostStep = std::function<void(VecXd& y)>;

// Classical 4th-order Runge-Kutta with a fixed step. Deterministic: the value
// at node k depends only on y0, the field, and nodes <= k. An optional
// post_step hook runs after every accepted step (used to re-symmetrize
// matrix-valued states). Throws NonFinite with the offending time.
Trajectory integrate_fixed_step(const OdeField& field, const VecXd& y0,
                                const TimeGrid& grid,
                                const PostStep& post_step = {});

// Solves A X = B with partial pivoting. Throws Singular when a pivot falls
// below 1e-14 relative to the matrix scale or when the residual check
// ‖A X − B‖_max ≤ 1e-8 (1 + ‖B‖_max) fails.
MatXd solve_linear(const MatXd& a_mat, const MatXd& b);

// Damped Newton iteration with a forward-difference Jacobian
// (step 1e-6 (1 + |p_j|)). Returns p with ‖residual(p)‖_max ≤ tol. When the
// full step does not reduce the residual norm the step is halved, up to 30
// times. Throws NoConvergence carrying the best iterate. The optional
// out-pointers report iterations used and the final residual max-norm.
VecXd find_root(const std::function<VecXd(const VecXd&)>& residual,
                const VecXd& p0, double tol, int max_iter,
                int* iters_out = nullptr, double* resid_out = nullptr);

}  // namespace driftctl
