#include "driftctl/moments.hpp"

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "driftctl/numerics.hpp"
#include "internal.hpp"

namespace driftctl {

using detail::get_block;
using detail::locate_node;
using detail::set_block;
using detail::spd_inverse;

namespace {

// The moment ODE coefficients S(t) and P(t) are only stored on grid nodes,
// but RK4 also samples the field at step midpoints. Node values plus exact
// ODE slopes give a cubic Hermite midpoint reconstruction with O(h⁴) error,
// which keeps the stepper at fourth order. Tables hold values at half-step
// resolution: entry j corresponds to t = t_start + j·h/2.
std::vector<MatXd> half_fill(const std::vector<MatXd>& v,
                             const std::vector<MatXd>& dv, double h) {
    const int n = static_cast<int>(v.size()) - 1;
    std::vector<MatXd> out(2 * n + 1);
    for (int k = 0; k <= n; ++k) {
        out[2 * k] = v[k];
    }
    for (int k = 0; k < n; ++k) {
        out[2 * k + 1] =
            0.5 * (v[k] + v[k + 1]) + 0.125 * h * (dv[k] - dv[k + 1]);
    }
    return out;
}

int half_index(double t, const TimeGrid& grid) {
    const int max_j = 2 * grid.n_steps;
    int j = static_cast<int>(std::lround(2.0 * (t - grid.t_start) / grid.h()));
    if (j < 0) j = 0;
    if (j > max_j) j = max_j;
    return j;
}

struct ControlTable {
    std::vector<MatXd> s11, s12;
};

ControlTable build_control_table(const SystemSpec& spec,
                                 const ControlGain& gain) {
    const int n = gain.grid.n_steps;
    const double h = gain.grid.h();
    const MatXd r_inv = spd_inverse(spec.r_weight);
    std::vector<MatXd> ds11(n + 1), ds12(n + 1);
    for (int k = 0; k <= n; ++k) {
        // forward-time slopes of the backward Riccati blocks
        ds11[k] = -(spec.q_weight - gain.s11[k] * r_inv * gain.s11[k]);
        ds12[k] = -(gain.s11[k] - gain.s11[k] * r_inv * gain.s12[k]);
    }
    ControlTable tab;
    tab.s11 = half_fill(gain.s11, ds11, h);
    tab.s12 = half_fill(gain.s12, ds12, h);
    return tab;
}

struct FilterTable {
    std::vector<MatXd> p11, p12;  // p12 empty in the known-drift case
};

FilterTable build_filter_table(const SystemSpec& spec,
                               const EstimationCov& cov) {
    const int n = cov.grid.n_steps;
    const double h = cov.grid.h();
    const MatXd v_inv = spd_inverse(spec.sigma_v);
    std::vector<MatXd> dp11(n + 1), dp12(n + 1);
    for (int k = 0; k <= n; ++k) {
        dp11[k] = cov.p12[k] + cov.p12[k].transpose() -
                  cov.p11[k] * v_inv * cov.p11[k] + spec.sigma_w;
        dp12[k] = cov.p22[k] - cov.p11[k] * v_inv * cov.p12[k];
    }
    FilterTable tab;
    tab.p11 = half_fill(cov.p11, dp11, h);
    tab.p12 = half_fill(cov.p12, dp12, h);
    return tab;
}

FilterTable build_filter_table_star(const SystemSpec& spec,
                                    const KnownACov& cov_star) {
    const int n = cov_star.grid.n_steps;
    const double h = cov_star.grid.h();
    const MatXd v_inv = spd_inverse(spec.sigma_v);
    std::vector<MatXd> dp(n + 1);
    for (int k = 0; k <= n; ++k) {
        dp[k] = -cov_star.p11_star[k] * v_inv * cov_star.p11_star[k] +
                spec.sigma_w;
    }
    FilterTable tab;
    tab.p11 = half_fill(cov_star.p11_star, dp, h);
    return tab;
}

// Integrates `field` over [grid.node(k_on), grid.node(n)] with the control
// inactive on the first portion, splitting at the activation node so each
// RK4 step sees a smooth field.
template <typename FieldMaker>
std::vector<VecXd> run_segments(const TimeGrid& grid, int k_on,
                                const VecXd& y0, FieldMaker make_field,
                                const PostStep& post) {
    const int n = grid.n_steps;
    std::vector<VecXd> values;
    values.reserve(n + 1);
    values.push_back(y0);

    VecXd y = y0;
    if (k_on > 0) {
        TimeGrid seg(grid.t_start, grid.node(k_on), k_on);
        Trajectory traj =
            integrate_fixed_step(make_field(false), y, seg, post);
        for (int k = 1; k <= k_on; ++k) values.push_back(traj.values[k]);
        y = traj.values.back();
    }
    if (k_on < n) {
        TimeGrid seg(grid.node(k_on), grid.t_end, n - k_on);
        Trajectory traj = integrate_fixed_step(make_field(true), y, seg, post);
        for (int k = 1; k <= n - k_on; ++k) values.push_back(traj.values[k]);
    }
    return values;
}

}  // namespace

MomentState propagate_bayesian_moments(const SystemSpec& raw,
                                       const PriorSpec& prior,
                                       const ControlGain& gain,
                                       const EstimationCov& cov,
                                       const TimeGrid& grid) {
    const SystemSpec spec = validate_spec(raw);
    const int d = spec.d;
    if (!gain.grid.same_as(grid) || !cov.grid.same_as(grid)) {
        throw GridMismatch("moment propagation inputs must share one grid");
    }
    if (prior.sigma_prior.rows() != d || prior.sigma_prior.cols() != d) {
        throw DimensionMismatch("prior covariance must be d×d");
    }
    const int k_on = locate_node(grid, spec.t0);

    const ControlTable ctab = build_control_table(spec, gain);
    const FilterTable ftab = build_filter_table(spec, cov);
    const MatXd r_inv = spd_inverse(spec.r_weight);
    const MatXd v_inv = spd_inverse(spec.sigma_v);
    const MatXd eye = MatXd::Identity(d, d);

    // state layout: [C1, C2, C3 | Σ] with Σ the full 3d×3d covariance of
    // the stacked fluctuation (q̃, q̂̃, ẫ)
    auto make_field = [&](bool active) {
        return [&, active](double t, const VecXd& y) -> VecXd {
            const int j = half_index(t, grid);
            const MatXd& s11 = ctab.s11[j];
            const MatXd& s12 = ctab.s12[j];
            const MatXd& p11 = ftab.p11[j];
            const MatXd& p12 = ftab.p12[j];
            const MatXd k1 = p11 * v_inv;
            const MatXd k2 = p12.transpose() * v_inv;
            MatXd rs11 = MatXd::Zero(d, d);
            MatXd rs12 = MatXd::Zero(d, d);
            if (active) {
                rs11 = r_inv * s11;
                rs12 = r_inv * s12;
            }

            const MatXd c1 = get_block(y, 0, d);
            const MatXd c2 = get_block(y, 1, d);
            const MatXd c3 = get_block(y, 2, d);

            VecXd dy(y.size());
            set_block(dy, 0, eye - rs11 * c2 - rs12 * c3);
            set_block(dy, 1, c3 - rs11 * c2 - rs12 * c3 + k1 * (c1 - c2));
            set_block(dy, 2, k2 * (c1 - c2));

            MatXd a_mat = MatXd::Zero(3 * d, 3 * d);
            a_mat.block(0, d, d, d) = -rs11;
            a_mat.block(0, 2 * d, d, d) = -rs12;
            a_mat.block(d, 0, d, d) = k1;
            a_mat.block(d, d, d, d) = -rs11 - k1;
            a_mat.block(d, 2 * d, d, d) = eye - rs12;
            a_mat.block(2 * d, 0, d, d) = k2;
            a_mat.block(2 * d, d, d, d) = -k2;

            const MatXd sig =
                Eigen::Map<const MatXd>(y.data() + 3 * d * d, 3 * d, 3 * d);
            MatXd dsig = a_mat * sig + sig * a_mat.transpose();
            dsig.topLeftCorner(d, d) += spec.sigma_w;
            // sensor noise enters through the filter: M = [0; K1; K2]
            const MatXd kv1 = k1 * spec.sigma_v;
            const MatXd kv2 = k2 * spec.sigma_v;
            dsig.block(d, d, d, d) += kv1 * k1.transpose();
            dsig.block(d, 2 * d, d, d) += kv1 * k2.transpose();
            dsig.block(2 * d, d, d, d) += kv2 * k1.transpose();
            dsig.block(2 * d, 2 * d, d, d) += kv2 * k2.transpose();
            Eigen::Map<MatXd>(dy.data() + 3 * d * d, 3 * d, 3 * d) = dsig;
            return dy;
        };
    };

    auto post = [d](VecXd& y) {
        Eigen::Map<MatXd> sig(y.data() + 3 * d * d, 3 * d, 3 * d);
        MatXd sym = 0.5 * (sig + sig.transpose());
        sig = sym;
    };

    VecXd y0 = VecXd::Zero(12 * d * d);
    Eigen::Map<MatXd>(y0.data() + 3 * d * d, 3 * d, 3 * d)
        .topLeftCorner(d, d) = spec.sigma_q0;

    const std::vector<VecXd> values =
        run_segments(grid, k_on, y0, make_field, post);

    MomentState out;
    out.grid = grid;
    const int n = grid.n_steps;
    out.c1.resize(n + 1);
    out.c2.resize(n + 1);
    out.c3.resize(n + 1);
    out.cov_qq.resize(n + 1);
    out.cov_qqh.resize(n + 1);
    out.cov_qah.resize(n + 1);
    out.cov_qhqh.resize(n + 1);
    out.cov_qhah.resize(n + 1);
    out.cov_ahah.resize(n + 1);
    for (int k = 0; k <= n; ++k) {
        const VecXd& y = values[k];
        out.c1[k] = get_block(y, 0, d);
        out.c2[k] = get_block(y, 1, d);
        out.c3[k] = get_block(y, 2, d);
        const MatXd sig =
            Eigen::Map<const MatXd>(y.data() + 3 * d * d, 3 * d, 3 * d);
        out.cov_qq[k] = sig.block(0, 0, d, d);
        out.cov_qqh[k] = sig.block(0, d, d, d);
        out.cov_qah[k] = sig.block(0, 2 * d, d, d);
        out.cov_qhqh[k] = sig.block(d, d, d, d);
        out.cov_qhah[k] = sig.block(d, 2 * d, d, d);
        out.cov_ahah[k] = sig.block(2 * d, 2 * d, d, d);
    }
    return out;
}

MomentState propagate_known_a_moments(const SystemSpec& raw,
                                      const ControlGain& gain,
                                      const KnownACov& cov_star,
                                      const TimeGrid& grid) {
    const SystemSpec spec = validate_spec(raw);
    const int d = spec.d;
    if (!gain.grid.same_as(grid) || !cov_star.grid.same_as(grid)) {
        throw GridMismatch("moment propagation inputs must share one grid");
    }
    const int k_on = locate_node(grid, spec.t0);

    const ControlTable ctab = build_control_table(spec, gain);
    const FilterTable ftab = build_filter_table_star(spec, cov_star);
    const MatXd r_inv = spd_inverse(spec.r_weight);
    const MatXd v_inv = spd_inverse(spec.sigma_v);
    const MatXd eye = MatXd::Identity(d, d);

    // state layout: [C1*, C2* | Σ*] with Σ* the 2d×2d covariance of (q̃, q̂̃)
    auto make_field = [&](bool active) {
        return [&, active](double t, const VecXd& y) -> VecXd {
            const int j = half_index(t, grid);
            const MatXd& s11 = ctab.s11[j];
            const MatXd& s12 = ctab.s12[j];
            const MatXd kstar = ftab.p11[j] * v_inv;
            MatXd rs11 = MatXd::Zero(d, d);
            MatXd rs12 = MatXd::Zero(d, d);
            if (active) {
                rs11 = r_inv * s11;
                rs12 = r_inv * s12;
            }

            const MatXd c1 = get_block(y, 0, d);
            const MatXd c2 = get_block(y, 1, d);

            VecXd dy(y.size());
            // the exact drift estimate contributes the constant term rs12
            set_block(dy, 0, eye - rs11 * c2 - rs12);
            set_block(dy, 1, eye - rs11 * c2 - rs12 + kstar * (c1 - c2));

            MatXd a_mat = MatXd::Zero(2 * d, 2 * d);
            a_mat.block(0, d, d, d) = -rs11;
            a_mat.block(d, 0, d, d) = kstar;
            a_mat.block(d, d, d, d) = -kstar - rs11;

            const MatXd sig =
                Eigen::Map<const MatXd>(y.data() + 2 * d * d, 2 * d, 2 * d);
            MatXd dsig = a_mat * sig + sig * a_mat.transpose();
            dsig.topLeftCorner(d, d) += spec.sigma_w;
            dsig.block(d, d, d, d) += kstar * spec.sigma_v * kstar.transpose();
            Eigen::Map<MatXd>(dy.data() + 2 * d * d, 2 * d, 2 * d) = dsig;
            return dy;
        };
    };

    auto post = [d](VecXd& y) {
        Eigen::Map<MatXd> sig(y.data() + 2 * d * d, 2 * d, 2 * d);
        MatXd sym = 0.5 * (sig + sig.transpose());
        sig = sym;
    };

    VecXd y0 = VecXd::Zero(6 * d * d);
    Eigen::Map<MatXd>(y0.data() + 2 * d * d, 2 * d, 2 * d)
        .topLeftCorner(d, d) = spec.sigma_q0;

    const std::vector<VecXd> values =
        run_segments(grid, k_on, y0, make_field, post);

    MomentState out;
    out.grid = grid;
    const int n = grid.n_steps;
    out.c1.resize(n + 1);
    out.c2.resize(n + 1);
    out.cov_qq.resize(n + 1);
    out.cov_qqh.resize(n + 1);
    out.cov_qhqh.resize(n + 1);
    for (int k = 0; k <= n; ++k) {
        const VecXd& y = values[k];
        out.c1[k] = get_block(y, 0, d);
        out.c2[k] = get_block(y, 1, d);
        const MatXd sig =
            Eigen::Map<const MatXd>(y.data() + 2 * d * d, 2 * d, 2 * d);
        out.cov_qq[k] = sig.block(0, 0, d, d);
        out.cov_qqh[k] = sig.block(0, d, d, d);
        out.cov_qhqh[k] = sig.block(d, d, d, d);
    }
    return out;
}

CostQuadratic compute_cost_quadratic(const MomentState& moments,
                                     const ControlGain& gain,
                                     const SystemSpec& spec) {
    if (!moments.grid.same_as(gain.grid)) {
        throw GridMismatch("moments and gain must share one grid");
    }
    if (moments.c3.empty()) {
        throw DimensionMismatch(
            "expected the full Bayesian moment set, got the restricted one");
    }
    const TimeGrid& grid = moments.grid;
    const int n = grid.n_steps;
    const int d = static_cast<int>(spec.q_weight.rows());
    const MatXd q = 0.5 * (spec.q_weight + spec.q_weight.transpose());
    const MatXd r_inv = spd_inverse(spec.r_weight);
    const int k0 = locate_node(grid, spec.t0);

    auto x_at = [&](int k) -> MatXd {
        const MatXd u_gain =
            gain.s11[k] * moments.c2[k] + gain.s12[k] * moments.c3[k];
        return moments.c1[k].transpose() * q * moments.c1[k] +
               u_gain.transpose() * r_inv * u_gain;
    };
    auto y_at = [&](int k) -> double {
        double v = (q * moments.cov_qq[k]).trace();
        v += (gain.s11[k].transpose() * r_inv * gain.s11[k] *
              moments.cov_qhqh[k])
                 .trace();
        v += (gain.s12[k].transpose() * r_inv * gain.s12[k] *
              moments.cov_ahah[k])
                 .trace();
        v += 2.0 * (gain.s12[k].transpose() * r_inv * gain.s11[k] *
                    moments.cov_qhah[k])
                       .trace();
        return v;
    };

    CostQuadratic out;
    out.x_mat = MatXd::Zero(d, d);
    out.y_scalar = 0.0;
    if (k0 < n) {
        MatXd x_prev = x_at(k0);
        double y_prev = y_at(k0);
        for (int k = k0 + 1; k <= n; ++k) {
            const MatXd x_cur = x_at(k);
            const double y_cur = y_at(k);
            out.x_mat += 0.5 * grid.h() * (x_prev + x_cur);
            out.y_scalar += 0.5 * grid.h() * (y_prev + y_cur);
            x_prev = x_cur;
            y_prev = y_cur;
        }
    }
    out.x_mat = 0.5 * (out.x_mat + out.x_mat.transpose()).eval();
    return out;
}

CostQuadratic compute_cost_quadratic_star(const MomentState& moments,
                                          const ControlGain& gain,
                                          const SystemSpec& spec) {
    if (!moments.grid.same_as(gain.grid)) {
        throw GridMismatch("moments and gain must share one grid");
    }
    if (!moments.c3.empty() || moments.c1.empty()) {
        throw DimensionMismatch(
            "expected the restricted known-drift moment set");
    }
    const TimeGrid& grid = moments.grid;
    const int n = grid.n_steps;
    const int d = static_cast<int>(spec.q_weight.rows());
    const MatXd q = 0.5 * (spec.q_weight + spec.q_weight.transpose());
    const MatXd r_inv = spd_inverse(spec.r_weight);
    const int k0 = locate_node(grid, spec.t0);

    auto x_at = [&](int k) -> MatXd {
        const MatXd u_gain = gain.s11[k] * moments.c2[k] + gain.s12[k];
        return moments.c1[k].transpose() * q * moments.c1[k] +
               u_gain.transpose() * r_inv * u_gain;
    };
    auto y_at = [&](int k) -> double {
        return (q * moments.cov_qq[k]).trace() +
               (gain.s11[k].transpose() * r_inv * gain.s11[k] *
                moments.cov_qhqh[k])
                   .trace();
    };

    CostQuadratic out;
    out.x_mat = MatXd::Zero(d, d);
    out.y_scalar = 0.0;
    if (k0 < n) {
        MatXd x_prev = x_at(k0);
        double y_prev = y_at(k0);
        for (int k = k0 + 1; k <= n; ++k) {
            const MatXd x_cur = x_at(k);
            const double y_cur = y_at(k);
            out.x_mat += 0.5 * grid.h() * (x_prev + x_cur);
            out.y_scalar += 0.5 * grid.h() * (y_prev + y_cur);
            x_prev = x_cur;
            y_prev = y_cur;
        }
    }
    out.x_mat = 0.5 * (out.x_mat + out.x_mat.transpose()).eval();
    return out;
}

}  // namespace driftctl
