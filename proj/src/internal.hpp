#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "driftctl/model.hpp"
#include "driftctl/numerics.hpp"
#include "driftctl/types.hpp"

// Helpers shared by the solver translation units. Not installed; not part of
// the public interface.

namespace driftctl {
namespace detail {

// ---- flat ODE state <-> d×d block views ----

inline MatXd get_block(const VecXd& y, int idx, int d) {
    return Eigen::Map<const MatXd>(y.data() + idx * d * d, d, d);
}

inline void set_block(VecXd& y, int idx, const MatXd& m) {
    Eigen::Map<MatXd>(y.data() + idx * static_cast<int>(m.size()), m.rows(),
                      m.cols()) = m;
}

inline PostStep symmetrize_at(std::vector<int> idx, int d) {
    return [idx, d](VecXd& y) {
        for (int k : idx) {
            Eigen::Map<MatXd> m(y.data() + k * d * d, d, d);
            MatXd sym = 0.5 * (m + m.transpose());
            m = sym;
        }
    };
}

inline MatXd spd_inverse(const MatXd& m) {
    return Eigen::LLT<MatXd>(m).solve(MatXd::Identity(m.rows(), m.cols()));
}

// [[b11, b12], [b12ᵀ, b22]]
inline MatXd assemble_sym(const MatXd& b11, const MatXd& b12,
                          const MatXd& b22) {
    const int d = static_cast<int>(b11.rows());
    MatXd full(2 * d, 2 * d);
    full.topLeftCorner(d, d) = b11;
    full.topRightCorner(d, d) = b12;
    full.bottomLeftCorner(d, d) = b12.transpose();
    full.bottomRightCorner(d, d) = b22;
    return full;
}

inline int locate_node(const TimeGrid& grid, double t) {
    const int k = static_cast<int>(std::lround((t - grid.t_start) / grid.h()));
    if (k < 0 || k > grid.n_steps ||
        std::abs(grid.node(k) - t) > 1e-9 * std::max(1.0, std::abs(t))) {
        throw GridMismatch("time does not lie on the grid");
    }
    return k;
}

}  // namespace detail
}  // namespace driftctl
