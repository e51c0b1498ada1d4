#include "driftctl/riccati.hpp"

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "driftctl/numerics.hpp"
#include "internal.hpp"

namespace driftctl {

using detail::assemble_sym;
using detail::get_block;
using detail::locate_node;
using detail::set_block;
using detail::spd_inverse;
using detail::symmetrize_at;

ControlGain solve_control_riccati(const SystemSpec& raw, const TimeGrid& grid) {
    const SystemSpec spec = validate_spec(raw);
    const int d = spec.d;
    const MatXd r_inv = spd_inverse(spec.r_weight);

    // Reversed time τ = T − t turns the terminal-value problem into an
    // initial-value one for the forward stepper. The field is autonomous, so
    // only the node ordering has to be undone afterwards.
    auto field = [&](double, const VecXd& y) {
        MatXd s11 = get_block(y, 0, d);
        MatXd s12 = get_block(y, 1, d);
        VecXd dy(y.size());
        set_block(dy, 0, spec.q_weight - s11 * r_inv * s11);
        set_block(dy, 1, s11 - s11 * r_inv * s12);
        set_block(dy, 2,
                  s12 + s12.transpose() - s12.transpose() * r_inv * s12);
        return dy;
    };

    TimeGrid reversed(0.0, grid.t_end - grid.t_start, grid.n_steps);
    Trajectory traj = integrate_fixed_step(field, VecXd::Zero(3 * d * d),
                                           reversed, symmetrize_at({0, 2}, d));

    ControlGain gain;
    gain.grid = grid;
    gain.s11.resize(grid.n_nodes());
    gain.s12.resize(grid.n_nodes());
    gain.s22.resize(grid.n_nodes());
    for (int k = 0; k <= grid.n_steps; ++k) {
        const VecXd& y = traj.values[grid.n_steps - k];
        gain.s11[k] = get_block(y, 0, d);
        gain.s12[k] = get_block(y, 1, d);
        gain.s22[k] = get_block(y, 2, d);
    }
    return gain;
}

EstimationCov solve_estimation_riccati(const SystemSpec& raw,
                                       const PriorSpec& prior,
                                       const TimeGrid& grid) {
    const SystemSpec spec = validate_spec(raw);
    const int d = spec.d;
    if (std::abs(grid.t_start) > 1e-12) {
        throw BadHorizon("estimation covariance grid must start at t = 0");
    }
    if (prior.sigma_prior.rows() != d || prior.sigma_prior.cols() != d) {
        throw DimensionMismatch("prior covariance must be d×d");
    }
    const MatXd v_inv = spd_inverse(spec.sigma_v);

    auto field = [&](double, const VecXd& y) {
        MatXd p11 = get_block(y, 0, d);
        MatXd p12 = get_block(y, 1, d);
        MatXd p22 = get_block(y, 2, d);
        MatXd k1 = p11 * v_inv;  // Kalman gain block K₁ = P11 Σ_V⁻¹
        VecXd dy(y.size());
        set_block(dy, 0, p12 + p12.transpose() - k1 * p11 + spec.sigma_w);
        set_block(dy, 1, p22 - k1 * p12);
        set_block(dy, 2, -p12.transpose() * v_inv * p12);
        return dy;
    };

    VecXd y0 = VecXd::Zero(3 * d * d);
    set_block(y0, 0, spec.sigma_q0);
    set_block(y0, 2, 0.5 * (prior.sigma_prior + prior.sigma_prior.transpose()));
    Trajectory traj =
        integrate_fixed_step(field, y0, grid, symmetrize_at({0, 2}, d));

    EstimationCov cov;
    cov.grid = grid;
    cov.p11.resize(grid.n_nodes());
    cov.p12.resize(grid.n_nodes());
    cov.p22.resize(grid.n_nodes());
    for (int k = 0; k <= grid.n_steps; ++k) {
        cov.p11[k] = get_block(traj.values[k], 0, d);
        cov.p12[k] = get_block(traj.values[k], 1, d);
        cov.p22[k] = get_block(traj.values[k], 2, d);
    }
    return cov;
}

KnownACov solve_known_a_riccati(const SystemSpec& raw, const TimeGrid& grid) {
    const SystemSpec spec = validate_spec(raw);
    const int d = spec.d;
    if (std::abs(grid.t_start) > 1e-12) {
        throw BadHorizon("known-drift covariance grid must start at t = 0");
    }
    const MatXd v_inv = spd_inverse(spec.sigma_v);

    auto field = [&](double, const VecXd& y) {
        MatXd p = get_block(y, 0, d);
        VecXd dy(y.size());
        set_block(dy, 0, -p * v_inv * p + spec.sigma_w);
        return dy;
    };

    VecXd y0(d * d);
    set_block(y0, 0, spec.sigma_q0);
    Trajectory traj =
        integrate_fixed_step(field, y0, grid, symmetrize_at({0}, d));

    KnownACov cov;
    cov.grid = grid;
    cov.p11_star.resize(grid.n_nodes());
    for (int k = 0; k <= grid.n_steps; ++k) {
        cov.p11_star[k] = get_block(traj.values[k], 0, d);
    }
    return cov;
}

ControlGain solve_alpha(const ControlGain& gain, const EstimationCov& cov,
                        const SystemSpec& raw) {
    const SystemSpec spec = validate_spec(raw);
    if (!gain.grid.same_as(cov.grid)) {
        throw GridMismatch("control gain and estimation covariance grids differ");
    }
    const int d = spec.d;
    const int n = gain.grid.n_steps;
    const double h = gain.grid.h();
    const MatXd weight =
        assemble_sym(spd_inverse(spec.sigma_v), MatXd::Zero(d, d),
                 MatXd::Zero(d, d));  // Hᵀ Σ_V⁻¹ H on the augmented state

    std::vector<double> g(n + 1);
    for (int k = 0; k <= n; ++k) {
        MatXd p = assemble_sym(cov.p11[k], cov.p12[k], cov.p22[k]);
        MatXd s = assemble_sym(gain.s11[k], gain.s12[k], gain.s22[k]);
        g[k] = (p * weight * p * s).trace();
    }

    ControlGain out = gain;
    out.alpha.assign(n + 1, 0.0);
    for (int k = n - 1; k >= 0; --k) {
        out.alpha[k] = out.alpha[k + 1] + 0.5 * h * (g[k] + g[k + 1]);
    }
    return out;
}

double bayesian_cost_to_go(const VecXd& x_hat, double t, const ControlGain& gain,
                           const EstimationCov& cov, const SystemSpec& raw) {
    const SystemSpec spec = validate_spec(raw);
    const int d = spec.d;
    if (x_hat.size() != 2 * d) {
        throw DimensionMismatch("belief mean must have length 2d");
    }
    if (!gain.grid.same_as(cov.grid)) {
        throw GridMismatch("control gain and estimation covariance grids differ");
    }
    const TimeGrid& grid = gain.grid;
    const int k0 = locate_node(grid, t);
    const int n = grid.n_steps;

    const AugmentedSystem aug = augment(spec);
    const MatXd gwg = aug.g_mat * spec.sigma_w * aug.g_mat.transpose();
    const MatXd brb =
        aug.b_mat * spd_inverse(spec.r_weight) * aug.b_mat.transpose();

    MatXd s0 = assemble_sym(gain.s11[k0], gain.s12[k0], gain.s22[k0]);
    MatXd p0 = assemble_sym(cov.p11[k0], cov.p12[k0], cov.p22[k0]);
    double value = x_hat.dot(s0 * x_hat) + (p0 * s0).trace();

    auto integrand = [&](int k) {
        MatXd s = assemble_sym(gain.s11[k], gain.s12[k], gain.s22[k]);
        MatXd p = assemble_sym(cov.p11[k], cov.p12[k], cov.p22[k]);
        return (gwg * s).trace() + (s * brb * s * p).trace();
    };

    double prev = integrand(k0);
    for (int k = k0 + 1; k <= n; ++k) {
        const double cur = integrand(k);
        value += 0.5 * grid.h() * (prev + cur);
        prev = cur;
    }
    return value;
}

}  // namespace driftctl
