#include "driftctl/numerics.hpp"

#include <cmath>

namespace driftctl {

Trajectory integrate_fixed_step(const OdeField& field, const VecXd& y0,
                                const TimeGrid& grid,
                                const PostStep& post_step) {
    Trajectory out;
    out.grid = grid;
    out.values.reserve(grid.n_nodes());
    out.values.push_back(y0);

    const double h = grid.h();
    VecXd y = y0;
    for (int k = 0; k < grid.n_steps; ++k) {
        const double t = grid.node(k);
        const VecXd k1 = field(t, y);
        const VecXd k2 = field(t + 0.5 * h, y + 0.5 * h * k1);
        const VecXd k3 = field(t + 0.5 * h, y + 0.5 * h * k2);
        const VecXd k4 = field(t + h, y + h * k3);
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (post_step) post_step(y);
        if (!y.allFinite()) {
            throw NonFinite("non-finite state while integrating", grid.node(k + 1));
        }
        out.values.push_back(y);
    }
    return out;
}

MatXd solve_linear(const MatXd& a_mat, const MatXd& b) {
    if (a_mat.rows() != a_mat.cols()) {
        throw DimensionMismatch("solve_linear needs a square matrix");
    }
    if (a_mat.rows() != b.rows()) {
        throw DimensionMismatch("solve_linear dimension mismatch");
    }

    Eigen::PartialPivLU<MatXd> lu(a_mat);
    const double scale = a_mat.cwiseAbs().maxCoeff();
    const double pivot_min = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (!(pivot_min > 1e-14 * scale)) {
        throw Singular("pivot below 1e-14 relative scale");
    }

    MatXd x = lu.solve(b);
    const double resid = (a_mat * x - b).cwiseAbs().maxCoeff();
    const double b_norm = b.size() ? b.cwiseAbs().maxCoeff() : 0.0;
    if (!(resid <= 1e-8 * (1.0 + b_norm))) {
        throw Singular("linear solve residual too large (ill-conditioned system)");
    }
    return x;
}

VecXd find_root(const std::function<VecXd(const VecXd&)>& residual,
                const VecXd& p0, double tol, int max_iter,
                int* iters_out, double* resid_out) {
    const auto norm = [](const VecXd& v) { return v.cwiseAbs().maxCoeff(); };

    VecXd p = p0;
    VecXd f = residual(p);
    double fnorm = norm(f);
    VecXd best = p;
    double best_norm = fnorm;

    const auto report = [&](int iters) {
        if (iters_out) *iters_out = iters;
        if (resid_out) *resid_out = fnorm;
    };

    for (int iter = 0; iter < max_iter; ++iter) {
        if (fnorm <= tol) {
            report(iter);
            return p;
        }

        const int n = static_cast<int>(p.size());
        MatXd jac(f.size(), n);
        for (int j = 0; j < n; ++j) {
            const double step = 1e-6 * (1.0 + std::abs(p[j]));
            VecXd pj = p;
            pj[j] += step;
            jac.col(j) = (residual(pj) - f) / step;
        }

        VecXd dp;
        try {
            dp = solve_linear(jac, -f);
        } catch (const Singular&) {
            throw NoConvergence("singular Jacobian in Newton iteration", best,
                               best_norm);
        }

        double lambda = 1.0;
        bool accepted = false;
        for (int halvings = 0; halvings <= 30; ++halvings) {
            const VecXd p_try = p + lambda * dp;
            const VecXd f_try = residual(p_try);
            const double f_try_norm = norm(f_try);
            if (f_try_norm < fnorm || f_try_norm <= tol) {
                p = p_try;
                f = f_try;
                fnorm = f_try_norm;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (fnorm < best_norm) {
            best = p;
            best_norm = fnorm;
        }
        if (!accepted) {
            throw NoConvergence("Newton line search stalled", best, best_norm);
        }
    }

    if (fnorm <= tol) {
        report(max_iter);
        return p;
    }
    throw NoConvergence("Newton iteration limit reached", best, best_norm);
}

}  // namespace driftctl
