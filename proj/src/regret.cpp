#include "driftctl/regret.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "driftctl/numerics.hpp"
#include "driftctl/riccati.hpp"
#include "internal.hpp"

namespace driftctl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct WorstCase {
    double at_zero = 0.0;
    VecXd spectrum;
    double value = 0.0;
};

// Supremum of (a' X a + Y)/(a' X* a + Y*). Restricted to a ray a = t v the
// ratio is a Moebius function of t^2, hence monotone, so the supremum over
// all a is either Y/Y* (at the origin) or the largest generalized eigenvalue
// of (X, X*) (the |a| -> infinity limit over directions).
WorstCase worst_case_mr(const MatXd& x, double y, const MatXd& xs, double ys) {
    const int d = static_cast<int>(x.rows());
    WorstCase out;
    out.at_zero = ys > 0.0 ? y / ys : kInf;

    Eigen::LLT<MatXd> llt(xs);
    if (llt.info() != Eigen::Success) {
        // Benchmark quadratic is not positive definite; the ratio is unbounded
        // along any null direction of X*.
        out.spectrum = VecXd::Constant(d, kInf);
        out.value = kInf;
        return out;
    }
    // L^-1 X L^-T shares the generalized spectrum of (X, X*).
    const MatXd l_inv =
        llt.matrixL().solve(MatXd::Identity(d, d));
    const MatXd m = l_inv * x * l_inv.transpose();
    Eigen::SelfAdjointEigenSolver<MatXd> es(0.5 * (m + m.transpose()));
    out.spectrum = es.eigenvalues();
    out.value = std::max(out.at_zero, out.spectrum.maxCoeff());
    return out;
}

MatXd symmetrized(const MatXd& m) { return 0.5 * (m + m.transpose()); }

// Everything in the chain that does not depend on the prior width: the control
// gain and the known-drift benchmark cost.
struct PipelineCache {
    SystemSpec spec;  // validated
    TimeGrid grid;
    ControlGain gain;
    CostQuadratic star;
};

PipelineCache make_cache(const SystemSpec& raw, const TimeGrid& grid) {
    PipelineCache cache;
    cache.spec = validate_spec(raw);
    cache.grid = grid;
    cache.gain = solve_control_riccati(cache.spec, grid);
    const KnownACov cov_star = solve_known_a_riccati(cache.spec, grid);
    const MomentState star_moments =
        propagate_known_a_moments(cache.spec, cache.gain, cov_star, grid);
    cache.star = compute_cost_quadratic_star(star_moments, cache.gain, cache.spec);
    return cache;
}

CostQuadratic bayes_cost(const PipelineCache& cache, const MatXd& sigma_prior) {
    const PriorSpec prior{sigma_prior};
    const EstimationCov cov = solve_estimation_riccati(cache.spec, prior, cache.grid);
    const MomentState moments =
        propagate_bayesian_moments(cache.spec, prior, cache.gain, cov, cache.grid);
    return compute_cost_quadratic(moments, cache.gain, cache.spec);
}

}  // namespace

// ==================== regret reports ====================

RegretReport regret_report(const CostQuadratic& bayes, const CostQuadratic& star) {
    if (!(star.y_scalar > 0.0)) {
        throw DegenerateOptimal("benchmark cost Y* must be positive");
    }
    const MatXd x = symmetrized(bayes.x_mat);
    const MatXd xs = symmetrized(star.x_mat);
    const double y = bayes.y_scalar;
    const double ys = star.y_scalar;
    if (x.rows() != xs.rows()) {
        throw DimensionMismatch("cost quadratics have different drift dimensions");
    }

    RegretReport report;
    report.mr = [x, xs, y, ys](const VecXd& a) {
        return (a.dot(x * a) + y) / (a.dot(xs * a) + ys);
    };
    report.ar = [x, xs, y, ys](const VecXd& a) {
        return (a.dot(x * a) + y) - (a.dot(xs * a) + ys);
    };
    const WorstCase wc = worst_case_mr(x, y, xs, ys);
    report.mr_at_zero = wc.at_zero;
    report.mr_at_infinity = wc.spectrum;
    report.worst_case_mr = wc.value;
    return report;
}

BoundsReport theorem1_bounds(const CostQuadratic& bayes, const CostQuadratic& star,
                             const PriorSpec& prior) {
    const MatXd x = symmetrized(bayes.x_mat);
    const MatXd xs = symmetrized(star.x_mat);
    const MatXd sigma = symmetrized(prior.sigma_prior);
    const double y = bayes.y_scalar;
    const double ys = star.y_scalar;
    const MatXd gap = x - xs;

    BoundsReport bounds;
    bounds.ar_lower = (gap * sigma).trace() + (y - ys);
    Eigen::SelfAdjointEigenSolver<MatXd> es(gap);
    bounds.ar_upper = es.eigenvalues().maxCoeff() > 0.0 ? kInf : (y - ys);
    bounds.mr_lower = ((x * sigma).trace() + y) / ((xs * sigma).trace() + ys);
    bounds.mr_upper = worst_case_mr(x, y, xs, ys).value;
    return bounds;
}

// ==================== constant-ratio prior ====================

MatXd mr_residual(const PriorSpec& sigma_prior, const SystemSpec& spec,
                  const TimeGrid& grid) {
    const PipelineCache cache = make_cache(spec, grid);
    if (!(cache.star.y_scalar > 0.0)) {
        throw DegenerateOptimal("benchmark cost Y* must be positive");
    }
    const CostQuadratic bayes = bayes_cost(cache, sigma_prior.sigma_prior);
    return bayes.x_mat - (bayes.y_scalar / cache.star.y_scalar) * cache.star.x_mat;
}

ConstantMrSolution solve_constant_mr_prior(const SystemSpec& spec, const TimeGrid& grid,
                                           double init_sigma) {
    if (!(init_sigma > 0.0)) {
        throw std::invalid_argument("initial prior width must be positive");
    }
    const PipelineCache cache = make_cache(spec, grid);
    if (!(cache.star.y_scalar > 0.0)) {
        throw DegenerateOptimal("benchmark cost Y* must be positive");
    }
    const int d = cache.spec.d;
    const MatXd eye = MatXd::Identity(d, d);

    // Scalarized residual of the constant-ratio condition, as a function of
    // p = log(sigma_sq). For d > 1 the solve targets isotropic priors, so the
    // mean of the diagonal is the natural scalar reduction. A trial step that
    // overshoots to an absurd prior width can blow up the moment integration;
    // reporting a huge residual instead makes the damped Newton back off.
    const auto residual_fn = [&](const VecXd& p) {
        VecXd out(1);
        if (p(0) > 60.0) {
            out(0) = 1e100;
            return out;
        }
        try {
            const double sigma_sq = std::exp(p(0));
            const CostQuadratic bayes = bayes_cost(cache, sigma_sq * eye);
            const MatXd res =
                bayes.x_mat - (bayes.y_scalar / cache.star.y_scalar) * cache.star.x_mat;
            out(0) = res.trace() / d;
        } catch (const NonFinite&) {
            out(0) = 1e100;
        }
        return out;
    };

    VecXd p0(1);
    p0(0) = 2.0 * std::log(init_sigma);

    ConstantMrSolution sol;
    double resid = 0.0;
    const VecXd p = find_root(residual_fn, p0, 1e-9, 50, &sol.iters, &resid);
    sol.sigma_sq = std::exp(p(0));
    sol.residual = resid;
    sol.prior = PriorSpec{sol.sigma_sq * eye};
    const CostQuadratic bayes = bayes_cost(cache, sol.prior.sigma_prior);
    sol.report = regret_report(bayes, cache.star);
    return sol;
}

// ==================== wide-prior limit ====================

ArLimitReport ar_limit(const SystemSpec& raw, const TimeGrid& grid,
                       const std::vector<double>& sigma_schedule) {
    const SystemSpec spec = validate_spec(raw);
    if (!(spec.t0 > 0.0)) {
        throw BadHorizon("the wide-prior limit needs a positive observation window t0");
    }
    if (sigma_schedule.empty()) {
        throw std::invalid_argument("sigma schedule is empty");
    }
    for (std::size_t i = 1; i < sigma_schedule.size(); ++i) {
        if (!(sigma_schedule[i] > sigma_schedule[i - 1])) {
            throw std::invalid_argument("sigma schedule must be strictly increasing");
        }
    }

    const PipelineCache cache = make_cache(spec, grid);
    const MatXd eye = MatXd::Identity(spec.d, spec.d);

    ArLimitReport report;
    report.table.reserve(sigma_schedule.size());
    double prev_norm = std::numeric_limits<double>::quiet_NaN();
    for (double sigma_sq : sigma_schedule) {
        const CostQuadratic bayes = bayes_cost(cache, sigma_sq * eye);
        ArLimitRow row;
        row.sigma_sq = sigma_sq;
        row.x_gap = bayes.x_mat - cache.star.x_mat;
        row.y_gap = bayes.y_scalar - cache.star.y_scalar;
        row.x_gap_norm = row.x_gap.cwiseAbs().maxCoeff();
        row.decay_ratio = prev_norm / row.x_gap_norm;  // NaN on the first row
        prev_norm = row.x_gap_norm;
        report.table.push_back(std::move(row));
    }
    report.x_gap = report.table.back().x_gap;
    report.y_gap = report.table.back().y_gap;
    return report;
}

}  // namespace driftctl
