#pragma once

#include <string>
#include <vector>

#include "driftctl/types.hpp"

namespace driftctl {

// ==================== problem instance ====================

// Linear system with unknown constant drift on a finite horizon:
//   dq = (a + u) dt + dW,   dy = q dt + dV,
// cost = E ∫_{t0}^{t_final} (qᵀ Q q + uᵀ R u) dt. The controller observes y
// only; until t0 it observes without acting (u = 0).
struct SystemSpec {
    int d = 1;        // state dimension
    MatXd sigma_w;    // process noise covariance, SPSD (empty = identity)
    MatXd sigma_v;    // sensor noise covariance, SPD
    MatXd q_weight;   // state cost weight Q, SPSD
    MatXd r_weight;   // control cost weight R, SPD
    MatXd sigma_q0;   // initial state covariance, SPSD
    double t0 = 0.0;      // control start
    double t_final = 1.0; // horizon end
};

// Zero-mean Gaussian belief on the drift: a ~ N(0, sigma_prior).
struct PriorSpec {
    MatXd sigma_prior;
};

// Drift-augmented state x = [q; a]:
//   dx = (F x + B u) dt + G dW,   dy = H x dt + dV,
// with running state cost xᵀ Q̃ x.
struct AugmentedSystem {
    MatXd f_mat;    // 2d×2d, identity in the upper-right block
    MatXd b_mat;    // 2d×d, [I; 0]
    MatXd g_mat;    // 2d×d, [I; 0]
    MatXd h_mat;    // d×2d, [I 0]
    MatXd q_tilde;  // 2d×2d, blockdiag(Q, 0)
};

// Uniform time grid with n_steps intervals (n_steps + 1 nodes).
struct TimeGrid {
    double t_start = 0.0;
    double t_end = 1.0;
    int n_steps = 1;

    TimeGrid() = default;
    TimeGrid(double start, double end, int steps);

    double h() const { return (t_end - t_start) / n_steps; }
    int n_nodes() const { return n_steps + 1; }
    double node(int k) const { return t_start + k * h(); }
    std::vector<double> nodes() const;
    bool same_as(const TimeGrid& other) const;
};

// ==================== operations ====================

// Checks every SystemSpec invariant. Matrices symmetric to within 1e-12
// max-norm are symmetrized as (M + Mᵀ)/2; anything worse is rejected.
// An empty sigma_w defaults to the identity.
// Throws NonPositiveDefinite, BadHorizon, DimensionMismatch.
SystemSpec validate_spec(const SystemSpec& raw);

// Builds the augmented constant-coefficient system from a valid spec.
AugmentedSystem augment(const SystemSpec& spec);

// Scalar parameters times the identity, validated. Convenience for the CLI
// and tests; d = 1 gives the scalar instance.
SystemSpec isotropic_spec(int d, double sigma_w, double sigma_v, double q,
                          double r, double sigma_q0, double t0, double t_final);

// Plain-text matrix file: one row per line, whitespace-separated numbers,
// dimensions inferred. Throws DimensionMismatch on ragged rows and
// std::runtime_error on unreadable files.
MatXd load_matrix(const std::string& path);

}  // namespace driftctl
