#include "driftctl/estimator.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "internal.hpp"

namespace driftctl {

namespace {

// S(t_nu, t_mu) for t_nu <= t_mu on a window of length t.
MatXd kernel_lower(const SystemSpec& spec, double tn, double tm, double t) {
    const double poly =
        0.5 * tn * tn * tm - tn * tn * tn / 6.0 - tn * tn * tm * tm / (4.0 * t);
    return tn * spec.sigma_v + poly * spec.sigma_w;
}

void check_window(const SystemSpec& spec, double horizon, int n) {
    if (!(horizon > 0.0) || horizon > spec.t_final + 1e-12) {
        throw BadHorizon("estimation window must satisfy 0 < t <= t_final");
    }
    if (n < 2) {
        throw std::invalid_argument("estimation grid needs at least 2 steps");
    }
}

// Composite trapezoid weights over all n+1 nodes of a uniform grid.
std::vector<double> trapezoid_weights(const TimeGrid& grid) {
    std::vector<double> w(grid.n_nodes(), grid.h());
    w.front() = 0.5 * grid.h();
    w.back() = 0.5 * grid.h();
    return w;
}

}  // namespace

MatXd KernelMatrix::assembled() const {
    const int d = static_cast<int>(blocks.front().rows());
    const int nn = grid.n_nodes();
    MatXd full(nn * d, nn * d);
    for (int nu = 0; nu < nn; ++nu) {
        for (int mu = 0; mu < nn; ++mu) {
            full.block(nu * d, mu * d, d, d) = block(nu, mu);
        }
    }
    return full;
}

KernelMatrix build_kernel(const SystemSpec& raw, double horizon, int n) {
    const SystemSpec spec = validate_spec(raw);
    check_window(spec, horizon, n);

    KernelMatrix kernel;
    kernel.grid = TimeGrid(0.0, horizon, n);
    kernel.blocks.reserve(static_cast<std::size_t>(n + 1) * (n + 1));
    for (int nu = 0; nu <= n; ++nu) {
        const double tn = kernel.grid.node(nu);
        for (int mu = 0; mu <= n; ++mu) {
            const double tm = kernel.grid.node(mu);
            kernel.blocks.push_back(tn <= tm
                                        ? kernel_lower(spec, tn, tm, horizon)
                                        : kernel_lower(spec, tm, tn, horizon));
        }
    }
    return kernel;
}

EstimatorWeights solve_weights(const SystemSpec& raw, double horizon, int n) {
    const SystemSpec spec = validate_spec(raw);
    check_window(spec, horizon, n);

    const int d = spec.d;
    const double t = horizon;
    EstimatorWeights weights;
    weights.grid = TimeGrid(0.0, t, n);
    const std::vector<double> w = trapezoid_weights(weights.grid);
    const double h = weights.grid.h();
    const MatXd eye = MatXd::Identity(d, d);

    // Unknown layout: omega0 at nodes 0..n, then kappa; one collocation row
    // per node plus the constraint row.
    const int nb = n + 2;
    MatXd a_mat = MatXd::Zero(nb * d, nb * d);
    MatXd b_mat = MatXd::Zero(nb * d, d);

    for (int k = 0; k <= n; ++k) {
        const double sk = weights.grid.node(k);
        for (int j = 0; j <= n; ++j) {
            const double sj = weights.grid.node(j);
            MatXd coeff = (-w[j] * sj * sj / (2.0 * t)) * spec.sigma_w;
            if (j == k) coeff -= spec.sigma_v;
            if (j >= k && k < n) {
                // trapezoid over [s_k, t]; the integrand vanishes at s_k
                const double wt = (j == k || j == n) ? 0.5 * h : h;
                coeff += wt * (sj - sk) * spec.sigma_w;
            }
            a_mat.block(k * d, j * d, d, d) = coeff;
        }
        a_mat.block(k * d, (n + 1) * d, d, d) =
            (-(2.0 * sk - t) / 2.0) * spec.sigma_w;
        b_mat.block(k * d, 0, d, d) = eye;
    }
    for (int j = 0; j <= n; ++j) {
        a_mat.block((n + 1) * d, j * d, d, d) = w[j] * eye;
    }
    a_mat.block((n + 1) * d, (n + 1) * d, d, d) = eye;

    const MatXd sol = solve_linear(a_mat, b_mat);
    weights.omega0.reserve(n + 1);
    for (int j = 0; j <= n; ++j) {
        weights.omega0.push_back(sol.block(j * d, 0, d, d));
    }
    weights.kappa = sol.block((n + 1) * d, 0, d, d);

    MatXd acc = t * t * weights.kappa;
    for (int j = 0; j <= n; ++j) {
        const double sj = weights.grid.node(j);
        acc += w[j] * sj * sj * weights.omega0[j];
    }
    weights.gamma = acc / (2.0 * t * t);
    return weights;
}

StateEstimate estimate_state(const Trajectory& y_path,
                             const EstimatorWeights& weights) {
    if (!y_path.grid.same_as(weights.grid) ||
        y_path.values.size() != weights.omega0.size()) {
        throw GridMismatch("observation path does not match the weight grid");
    }
    const int d = static_cast<int>(weights.kappa.rows());
    for (const VecXd& y : y_path.values) {
        if (y.size() != d) {
            throw DimensionMismatch("observation dimension does not match");
        }
    }

    const double t = weights.grid.t_end;
    const std::vector<double> w = trapezoid_weights(weights.grid);
    VecXd acc = weights.kappa * y_path.values.back();
    for (std::size_t j = 0; j < weights.omega0.size(); ++j) {
        acc += w[j] * (weights.omega0[j] * y_path.values[j]);
    }

    StateEstimate est;
    est.q_hat = solve_linear(weights.gamma, acc / t);
    est.a_hat = est.q_hat / t;
    return est;
}

}  // namespace driftctl
