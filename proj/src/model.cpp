#include "driftctl/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace driftctl {

namespace {

constexpr double kSymTol = 1e-12;

// Symmetrize within tolerance or report the offending matrix.
MatXd require_symmetric(const MatXd& m, const std::string& name) {
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > kSymTol) {
        throw DimensionMismatch(name + " asymmetry " + std::to_string(asym) +
                                " exceeds tolerance 1e-12");
    }
    return 0.5 * (m + m.transpose());
}

void require_square(const MatXd& m, int d, const std::string& name) {
    if (m.rows() != d || m.cols() != d) {
        throw DimensionMismatch(name + " must be " + std::to_string(d) + "x" +
                                std::to_string(d));
    }
}

void require_spd(const MatXd& m, const std::string& name) {
    Eigen::LLT<MatXd> llt(m);
    if (llt.info() != Eigen::Success) {
        throw NonPositiveDefinite(name + " is not positive-definite");
    }
}

void require_spsd(const MatXd& m, const std::string& name) {
    Eigen::SelfAdjointEigenSolver<MatXd> es(m);
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if (es.eigenvalues().minCoeff() < -1e-12 * scale) {
        throw NonPositiveDefinite(name + " has a negative eigenvalue");
    }
}

}  // namespace

TimeGrid::TimeGrid(double start, double end, int steps)
    : t_start(start), t_end(end), n_steps(steps) {
    if (!(end > start) || steps < 1) {
        throw BadHorizon("time grid needs t_end > t_start and n_steps >= 1");
    }
}

std::vector<double> TimeGrid::nodes() const {
    std::vector<double> out(n_nodes());
    for (int k = 0; k < n_nodes(); ++k) out[k] = node(k);
    return out;
}

bool TimeGrid::same_as(const TimeGrid& other) const {
    return n_steps == other.n_steps &&
           std::abs(t_start - other.t_start) <= 1e-12 &&
           std::abs(t_end - other.t_end) <= 1e-12;
}

SystemSpec validate_spec(const SystemSpec& raw) {
    SystemSpec spec = raw;
    if (spec.d < 1) throw DimensionMismatch("state dimension must be positive");
    if (spec.sigma_w.size() == 0) spec.sigma_w = MatXd::Identity(spec.d, spec.d);

    require_square(spec.sigma_w, spec.d, "sigma_w");
    require_square(spec.sigma_v, spec.d, "sigma_v");
    require_square(spec.q_weight, spec.d, "q_weight");
    require_square(spec.r_weight, spec.d, "r_weight");
    require_square(spec.sigma_q0, spec.d, "sigma_q0");

    spec.sigma_w = require_symmetric(spec.sigma_w, "sigma_w");
    spec.sigma_v = require_symmetric(spec.sigma_v, "sigma_v");
    spec.q_weight = require_symmetric(spec.q_weight, "q_weight");
    spec.r_weight = require_symmetric(spec.r_weight, "r_weight");
    spec.sigma_q0 = require_symmetric(spec.sigma_q0, "sigma_q0");

    require_spd(spec.sigma_v, "sigma_v");
    require_spd(spec.r_weight, "r_weight");
    require_spsd(spec.sigma_w, "sigma_w");
    require_spsd(spec.q_weight, "q_weight");
    require_spsd(spec.sigma_q0, "sigma_q0");

    if (!(spec.t0 >= 0.0) || !(spec.t0 < spec.t_final)) {
        throw BadHorizon("need 0 <= t0 < t_final");
    }
    return spec;
}

AugmentedSystem augment(const SystemSpec& spec) {
    const int d = spec.d;
    AugmentedSystem sys;
    sys.f_mat = MatXd::Zero(2 * d, 2 * d);
    sys.f_mat.topRightCorner(d, d) = MatXd::Identity(d, d);
    sys.b_mat = MatXd::Zero(2 * d, d);
    sys.b_mat.topRows(d) = MatXd::Identity(d, d);
    sys.g_mat = sys.b_mat;
    sys.h_mat = MatXd::Zero(d, 2 * d);
    sys.h_mat.leftCols(d) = MatXd::Identity(d, d);
    sys.q_tilde = MatXd::Zero(2 * d, 2 * d);
    sys.q_tilde.topLeftCorner(d, d) = spec.q_weight;
    return sys;
}

SystemSpec isotropic_spec(int d, double sigma_w, double sigma_v, double q,
                          double r, double sigma_q0, double t0, double t_final) {
    SystemSpec spec;
    spec.d = d;
    const MatXd eye = MatXd::Identity(d, d);
    spec.sigma_w = sigma_w * eye;
    spec.sigma_v = sigma_v * eye;
    spec.q_weight = q * eye;
    spec.r_weight = r * eye;
    spec.sigma_q0 = sigma_q0 * eye;
    spec.t0 = t0;
    spec.t_final = t_final;
    return validate_spec(spec);
}

MatXd load_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open matrix file: " + path);

    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::vector<double> row;
        double v;
        while (ss >> v) row.push_back(v);
        if (!ss.eof()) {
            throw std::runtime_error("bad number in matrix file: " + path);
        }
        if (!row.empty()) rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DimensionMismatch("matrix file is empty: " + path);

    const size_t cols = rows.front().size();
    for (const auto& r : rows) {
        if (r.size() != cols) {
            throw DimensionMismatch("ragged rows in matrix file: " + path);
        }
    }
    MatXd m(rows.size(), cols);
    for (size_t i = 0; i < rows.size(); ++i) {
        for (size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

}  // namespace driftctl
