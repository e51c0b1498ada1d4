#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace driftctl {

using MatXd = Eigen::MatrixXd;
using VecXd = Eigen::VectorXd;

// ==================== error types ====================
// All failures surface as exceptions derived from std::runtime_error so the
// CLI can map them to exit codes in one place.

struct NonPositiveDefinite : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BadHorizon : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GridMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Singular : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateOptimal : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// NaN or infinity produced while integrating or simulating.
struct NonFinite : std::runtime_error {
    double when;  // time at which the value went non-finite
    long trial;   // Monte Carlo trial index, -1 outside the simulator
    NonFinite(const std::string& msg, double t, long trial_index = -1)
        : std::runtime_error(msg), when(t), trial(trial_index) {}
};

// Root finder ran out of iterations; carries the best iterate seen.
struct NoConvergence : std::runtime_error {
    VecXd best;
    double best_norm;  // residual max-norm at `best`
    NoConvergence(const std::string& msg, VecXd best_iterate, double norm)
        : std::runtime_error(msg), best(std::move(best_iterate)), best_norm(norm) {}
};

}  // namespace driftctl
