#pragma once

#include <functional>
#include <vector>

#include "driftctl/model.hpp"
#include "driftctl/moments.hpp"
#include "driftctl/types.hpp"

namespace driftctl {

// Regret of the adaptive controller against the known-drift benchmark, as a
// function of the true drift a. Both costs are quadratic in a, so every
// quantity here reduces to the two pairs (X, Y) and (X*, Y*):
//
//   multiplicative regret  MR(a) = (a' X a + Y) / (a' X* a + Y*)
//   additive regret        AR(a) = (a' X a + Y) - (a' X* a + Y*)
struct RegretReport {
    std::function<double(const VecXd& a)> mr;
    std::function<double(const VecXd& a)> ar;
    double mr_at_zero = 1.0;   // Y / Y*
    VecXd mr_at_infinity;      // generalized eigenvalues of (X, X*), ascending
    double worst_case_mr = 1.0;
};

// Prior-aware bounds on the regret of the adaptive controller. ar_upper is
// +infinity whenever X - X* has a positive direction (the additive gap then
// grows without bound in |a|).
struct BoundsReport {
    double ar_lower = 0.0;
    double ar_upper = 0.0;
    double mr_lower = 1.0;
    double mr_upper = 1.0;
};

struct ConstantMrSolution {
    PriorSpec prior;     // sigma_sq * I
    RegretReport report;
    double sigma_sq = 0.0;
    double residual = 0.0;  // scalarized residual at the returned prior
    int iters = 0;
};

struct ArLimitRow {
    double sigma_sq = 0.0;
    MatXd x_gap;               // X - X* at this prior width
    double y_gap = 0.0;        // Y - Y*
    double x_gap_norm = 0.0;   // max-abs norm of x_gap
    double decay_ratio = 0.0;  // previous x_gap_norm over this one; NaN on the first row
};

struct ArLimitReport {
    MatXd x_gap;   // at the widest prior in the schedule
    double y_gap = 0.0;
    std::vector<ArLimitRow> table;
};

// Builds the regret callables and the worst-case multiplicative regret
//   max(Y/Y*, largest generalized eigenvalue of (X, X*)).
// Along a fixed direction MR is a monotone function of |a|^2, so the supremum
// over all drifts is attained either at a = 0 or in the |a| -> infinity limit;
// the limit over directions is the generalized spectrum. Throws
// DegenerateOptimal when Y* <= 0 (the benchmark cost must be positive).
RegretReport regret_report(const CostQuadratic& bayes, const CostQuadratic& star);

// Lower and upper bounds for a drift drawn from a centered Gaussian with
// covariance prior.sigma_prior:
//   ar_lower = Tr((X - X*) Sigma) + (Y - Y*)      (the exact prior-averaged AR)
//   mr_lower = (Tr(X Sigma) + Y) / (Tr(X* Sigma) + Y*)
//   mr_upper = worst-case MR over all drifts
BoundsReport theorem1_bounds(const CostQuadratic& bayes, const CostQuadratic& star,
                             const PriorSpec& prior);

// Residual X - (Y/Y*) X* of the constant-regret condition for a given prior
// width, evaluated through the full chain (gain, estimation covariance,
// moments, cost quadratics). Zero exactly when MR(a) is independent of a.
MatXd mr_residual(const PriorSpec& sigma_prior, const SystemSpec& spec,
                  const TimeGrid& grid);

// Newton solve for the isotropic prior width sigma_sq making the regret ratio
// constant in a. Iterates on p = log(sigma_sq) so the width stays positive;
// init_sigma is the initial standard deviation. The control gain and the
// known-drift cost do not depend on the prior and are computed once. Throws
// NoConvergence when the damped Newton iteration stalls.
ConstantMrSolution solve_constant_mr_prior(const SystemSpec& spec, const TimeGrid& grid,
                                           double init_sigma);

// Evaluates the cost gaps X - X* and Y - Y* along an increasing schedule of
// isotropic prior widths. As the prior widens the adaptive controller loses
// nothing against the benchmark beyond the learning cost: X - X* decays like
// 1/sigma_sq while Y - Y* converges to the additive-regret limit, which the
// widest entry estimates. Requires t0 > 0 (throws BadHorizon): with control
// starting at time zero the gap Y - Y* diverges as the prior widens.
ArLimitReport ar_limit(const SystemSpec& spec, const TimeGrid& grid,
                       const std::vector<double>& sigma_schedule);

}  // namespace driftctl
