#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "driftctl/model.hpp"
#include "driftctl/numerics.hpp"
#include "driftctl/riccati.hpp"

using namespace driftctl;

namespace {

SystemSpec unit_spec(double t_final = 1.0) {
    return isotropic_spec(1, 1, 1, 1, 1, 1, 0.0, t_final);
}

PriorSpec scalar_prior(double sigma_sq) {
    PriorSpec prior;
    prior.sigma_prior = MatXd::Constant(1, 1, sigma_sq);
    return prior;
}

MatXd assemble(const MatXd& b11, const MatXd& b12, const MatXd& b22) {
    const int d = static_cast<int>(b11.rows());
    MatXd full(2 * d, 2 * d);
    full.topLeftCorner(d, d) = b11;
    full.topRightCorner(d, d) = b12;
    full.bottomLeftCorner(d, d) = b12.transpose();
    full.bottomRightCorner(d, d) = b22;
    return full;
}

// Closed form of the scalar estimation covariance for sigma_w = sigma_v =
// sigma_q0 = 1 and prior variance s2:
//   P(t) = [[(2t−1+e^{−2t})s2+2, 2s2(1−e^{−t})], [·, 2s2]] / D,
//   D = s2(2t−3+4e^{−t}−e^{−2t}) + 2.
MatXd estimation_closed_form(double t, double s2) {
    const double em = std::exp(-t);
    const double den = s2 * (2.0 * t - 3.0 + 4.0 * em - em * em) + 2.0;
    MatXd p(2, 2);
    p(0, 0) = (2.0 * t - 1.0 + em * em) * s2 + 2.0;
    p(0, 1) = 2.0 * s2 * (1.0 - em);
    p(1, 0) = p(0, 1);
    p(1, 1) = 2.0 * s2;
    return p / den;
}

SystemSpec anisotropic_spec_2d() {
    SystemSpec raw;
    raw.d = 2;
    raw.sigma_w = (MatXd(2, 2) << 1.0, 0.2, 0.2, 0.8).finished();
    raw.sigma_v = (MatXd(2, 2) << 0.5, 0.1, 0.1, 0.9).finished();
    raw.q_weight = (MatXd(2, 2) << 2.0, 0.3, 0.3, 1.0).finished();
    raw.r_weight = (MatXd(2, 2) << 1.0, 0.1, 0.1, 0.5).finished();
    raw.sigma_q0 = (MatXd(2, 2) << 1.0, -0.2, -0.2, 0.7).finished();
    raw.t0 = 0.0;
    raw.t_final = 1.0;
    return validate_spec(raw);
}

}  // namespace

TEST_CASE("control Riccati terminal condition and scalar closed forms") {
    const SystemSpec spec = unit_spec();
    const TimeGrid grid(0.0, 1.0, 10000);
    const ControlGain gain = solve_control_riccati(spec, grid);

    SUBCASE("S vanishes at the horizon end") {
        CHECK(gain.s11.back()(0, 0) == 0.0);
        CHECK(gain.s12.back()(0, 0) == 0.0);
        CHECK(gain.s22.back()(0, 0) == 0.0);
        CHECK(gain.alpha.empty());
    }

    SUBCASE("S11(t) = tanh(T−t), S12(t) = 1 − sech(T−t)") {
        double worst11 = 0.0, worst12 = 0.0;
        for (int k = 0; k <= grid.n_steps; ++k) {
            const double rem = grid.t_end - grid.node(k);
            worst11 = std::max(worst11,
                               std::abs(gain.s11[k](0, 0) - std::tanh(rem)));
            worst12 = std::max(
                worst12,
                std::abs(gain.s12[k](0, 0) - (1.0 - 1.0 / std::cosh(rem))));
        }
        CHECK(worst11 <= 1e-10);
        CHECK(worst12 <= 1e-10);
        CHECK(gain.s11.front()(0, 0) == doctest::Approx(0.761594).epsilon(1e-5));
        CHECK(gain.s12.front()(0, 0) == doctest::Approx(0.351945).epsilon(1e-5));
    }

    SUBCASE("S22 integrates the off-diagonal block") {
        // −Ṡ22 = 2S12 − S12² with S12 = 1 − sech(T−t); spot check against a
        // fine reference value at t = 0 produced by the solver itself on a
        // grid 10× finer.
        const TimeGrid fine(0.0, 1.0, 100000);
        const ControlGain ref = solve_control_riccati(spec, fine);
        CHECK(gain.s22.front()(0, 0) ==
              doctest::Approx(ref.s22.front()(0, 0)).epsilon(1e-10));
    }
}

TEST_CASE("blockwise control Riccati matches whole-matrix integration") {
    const SystemSpec spec = anisotropic_spec_2d();
    const int d = spec.d;
    const TimeGrid grid(0.0, 1.0, 1000);
    const ControlGain gain = solve_control_riccati(spec, grid);

    const AugmentedSystem aug = augment(spec);
    const MatXd r_inv =
        Eigen::LLT<MatXd>(spec.r_weight).solve(MatXd::Identity(d, d));
    const MatXd brb = aug.b_mat * r_inv * aug.b_mat.transpose();

    // Integrate −Ṡ = SF + FᵀS + Q̃ − S B R⁻¹ Bᵀ S as one 2d×2d matrix in
    // reversed time, mirroring the solver's construction.
    auto field = [&](double, const VecXd& y) {
        MatXd s = Eigen::Map<const MatXd>(y.data(), 2 * d, 2 * d);
        MatXd ds = s * aug.f_mat + aug.f_mat.transpose() * s + aug.q_tilde -
                   s * brb * s;
        VecXd dy(y.size());
        Eigen::Map<MatXd>(dy.data(), 2 * d, 2 * d) = ds;
        return dy;
    };
    auto symmetrize = [&](VecXd& y) {
        Eigen::Map<MatXd> s(y.data(), 2 * d, 2 * d);
        MatXd sym = 0.5 * (s + s.transpose());
        s = sym;
    };
    Trajectory traj = integrate_fixed_step(
        field, VecXd::Zero(4 * d * d), TimeGrid(0.0, 1.0, grid.n_steps),
        symmetrize);

    double worst = 0.0;
    for (int k = 0; k <= grid.n_steps; ++k) {
        MatXd whole = Eigen::Map<const MatXd>(
            traj.values[grid.n_steps - k].data(), 2 * d, 2 * d);
        MatXd blockwise = assemble(gain.s11[k], gain.s12[k], gain.s22[k]);
        worst = std::max(worst, (whole - blockwise).cwiseAbs().maxCoeff());
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("control Riccati ignores sensor noise and prior") {
    const TimeGrid grid(0.0, 1.0, 500);
    SystemSpec a = unit_spec();
    SystemSpec b = unit_spec();
    b.sigma_v = MatXd::Constant(1, 1, 7.3);
    const ControlGain ga = solve_control_riccati(a, grid);
    const ControlGain gb = solve_control_riccati(b, grid);
    for (int k = 0; k <= grid.n_steps; ++k) {
        CHECK(ga.s11[k](0, 0) == gb.s11[k](0, 0));
        CHECK(ga.s12[k](0, 0) == gb.s12[k](0, 0));
        CHECK(ga.s22[k](0, 0) == gb.s22[k](0, 0));
    }
}

TEST_CASE("estimation Riccati reproduces the scalar closed form") {
    const SystemSpec spec = unit_spec(5.0);
    const TimeGrid grid(0.0, 5.0, 50000);

    for (double s2 : {1.0, 10.0, 100.0}) {
        CAPTURE(s2);
        const EstimationCov cov =
            solve_estimation_riccati(spec, scalar_prior(s2), grid);

        CHECK(cov.p11.front()(0, 0) == doctest::Approx(1.0));
        CHECK(cov.p12.front()(0, 0) == 0.0);
        CHECK(cov.p22.front()(0, 0) == doctest::Approx(s2));

        double worst = 0.0;
        for (int k = 0; k <= grid.n_steps; ++k) {
            const MatXd exact = estimation_closed_form(grid.node(k), s2);
            worst = std::max(worst,
                             std::abs(cov.p11[k](0, 0) - exact(0, 0)));
            worst = std::max(worst,
                             std::abs(cov.p12[k](0, 0) - exact(0, 1)));
            worst = std::max(worst,
                             std::abs(cov.p22[k](0, 0) - exact(1, 1)));
        }
        CHECK(worst <= 1e-6);
    }
}

TEST_CASE("estimation Riccati spot values at t = 1") {
    const SystemSpec spec = unit_spec();
    const TimeGrid grid(0.0, 1.0, 10000);
    const EstimationCov cov =
        solve_estimation_riccati(spec, scalar_prior(1.0), grid);
    CHECK(cov.p11.back()(0, 0) == doctest::Approx(1.342080).epsilon(1e-4));
    CHECK(cov.p12.back()(0, 0) == doctest::Approx(0.541175).epsilon(1e-4));
    CHECK(cov.p22.back()(0, 0) == doctest::Approx(0.856100).epsilon(1e-4));
}

TEST_CASE("estimation covariance stays PSD and P22 decreases") {
    const SystemSpec spec = anisotropic_spec_2d();
    PriorSpec prior;
    prior.sigma_prior = (MatXd(2, 2) << 2.0, 0.5, 0.5, 1.5).finished();
    const TimeGrid grid(0.0, 1.0, 2000);
    const EstimationCov cov = solve_estimation_riccati(spec, prior, grid);

    double min_eig = 0.0;
    double max_growth = -1.0;
    for (int k = 0; k <= grid.n_steps; ++k) {
        MatXd p = assemble(cov.p11[k], cov.p12[k], cov.p22[k]);
        Eigen::SelfAdjointEigenSolver<MatXd> es(p);
        min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
        if (k > 0) {
            MatXd diff = cov.p22[k] - cov.p22[k - 1];
            Eigen::SelfAdjointEigenSolver<MatXd> ds(diff);
            max_growth = std::max(max_growth, ds.eigenvalues().maxCoeff());
        }
    }
    CHECK(min_eig >= -1e-9);
    CHECK(max_growth <= 1e-9);
}

TEST_CASE("known-drift covariance closed forms") {
    SUBCASE("unit parameters sit at the fixed point") {
        const TimeGrid grid(0.0, 2.0, 2000);
        const KnownACov cov = solve_known_a_riccati(unit_spec(2.0), grid);
        for (int k = 0; k <= grid.n_steps; ++k) {
            CHECK(std::abs(cov.p11_star[k](0, 0) - 1.0) <= 1e-12);
        }
    }

    SUBCASE("zero initial covariance gives tanh(t)") {
        const SystemSpec spec = isotropic_spec(1, 1, 1, 1, 1, 0, 0.0, 2.0);
        const TimeGrid grid(0.0, 2.0, 20000);
        const KnownACov cov = solve_known_a_riccati(spec, grid);
        double worst = 0.0;
        for (int k = 0; k <= grid.n_steps; ++k) {
            worst = std::max(worst, std::abs(cov.p11_star[k](0, 0) -
                                             std::tanh(grid.node(k))));
        }
        CHECK(worst <= 1e-10);
    }

    SUBCASE("long-time limit is sigma_v * sigma_w") {
        const SystemSpec spec =
            isotropic_spec(1, 2.0 * 2.0, 0.5 * 0.5, 1, 1, 3.0, 0.0, 20.0);
        const TimeGrid grid(0.0, 20.0, 20000);
        const KnownACov cov = solve_known_a_riccati(spec, grid);
        CHECK(cov.p11_star.back()(0, 0) == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("alpha quadrature") {
    const SystemSpec spec = unit_spec();

    SUBCASE("grid mismatch is rejected") {
        const TimeGrid g1(0.0, 1.0, 100);
        const TimeGrid g2(0.0, 1.0, 200);
        const ControlGain gain = solve_control_riccati(spec, g1);
        const EstimationCov cov =
            solve_estimation_riccati(spec, scalar_prior(1.0), g2);
        CHECK_THROWS_AS(solve_alpha(gain, cov, spec), GridMismatch);
    }

    SUBCASE("alpha is nonnegative, nonincreasing, and zero at T") {
        const TimeGrid grid(0.0, 1.0, 1000);
        const ControlGain gain = solve_alpha(
            solve_control_riccati(spec, grid),
            solve_estimation_riccati(spec, scalar_prior(1.0), grid), spec);
        REQUIRE(static_cast<int>(gain.alpha.size()) == grid.n_nodes());
        CHECK(gain.alpha.back() == 0.0);
        for (int k = 0; k < grid.n_steps; ++k) {
            CHECK(gain.alpha[k] >= gain.alpha[k + 1]);
        }
        CHECK(gain.alpha.front() > 0.0);
    }

    SUBCASE("step refinement h vs h/10 agrees to 1e-8") {
        const TimeGrid coarse(0.0, 1.0, 10000);
        const TimeGrid fine(0.0, 1.0, 100000);
        const ControlGain gc = solve_alpha(
            solve_control_riccati(spec, coarse),
            solve_estimation_riccati(spec, scalar_prior(1.0), coarse), spec);
        const ControlGain gf = solve_alpha(
            solve_control_riccati(spec, fine),
            solve_estimation_riccati(spec, scalar_prior(1.0), fine), spec);
        CHECK(std::abs(gc.alpha.front() - gf.alpha.front()) <= 1e-8);
    }
}

TEST_CASE("bayesian cost-to-go") {
    const SystemSpec spec = unit_spec();
    const TimeGrid grid(0.0, 1.0, 1000);
    const ControlGain gain = solve_alpha(
        solve_control_riccati(spec, grid),
        solve_estimation_riccati(spec, scalar_prior(1.0), grid), spec);
    const EstimationCov cov =
        solve_estimation_riccati(spec, scalar_prior(1.0), grid);

    SUBCASE("zero at the horizon end") {
        VecXd x_hat(2);
        x_hat << 1.0, 1.0;
        CHECK(bayesian_cost_to_go(x_hat, 1.0, gain, cov, spec) == 0.0);
    }

    SUBCASE("off-node time and wrong belief size are rejected") {
        VecXd x_hat = VecXd::Zero(2);
        CHECK_THROWS_AS(
            bayesian_cost_to_go(x_hat, 0.5 * grid.h(), gain, cov, spec),
            GridMismatch);
        CHECK_THROWS_AS(
            bayesian_cost_to_go(VecXd::Zero(3), 0.0, gain, cov, spec),
            DimensionMismatch);
    }

    SUBCASE("agrees with the value-function route x̂ᵀSx̂ + α + ∫Tr(P Q̃)") {
        // Identical in exact arithmetic; discretized they differ only through
        // the trapezoid error of two different smooth integrands.
        for (int k0 : {0, 250, 500, 900}) {
            const double t = grid.node(k0);
            VecXd x_hat(2);
            x_hat << 1.0, -0.5;

            MatXd s = assemble(gain.s11[k0], gain.s12[k0], gain.s22[k0]);
            double route_a = x_hat.dot(s * x_hat) + gain.alpha[k0];
            for (int k = k0; k < grid.n_steps; ++k) {
                const double f0 = (spec.q_weight * cov.p11[k]).trace();
                const double f1 = (spec.q_weight * cov.p11[k + 1]).trace();
                route_a += 0.5 * grid.h() * (f0 + f1);
            }

            const double route_b =
                bayesian_cost_to_go(x_hat, t, gain, cov, spec);
            CHECK(route_a == doctest::Approx(route_b).epsilon(1e-6));
        }
    }

    SUBCASE("zero belief leaves the pure trace terms") {
        const double val =
            bayesian_cost_to_go(VecXd::Zero(2), 0.0, gain, cov, spec);
        double expect = gain.alpha.front();
        for (int k = 0; k < grid.n_steps; ++k) {
            const double f0 = (spec.q_weight * cov.p11[k]).trace();
            const double f1 = (spec.q_weight * cov.p11[k + 1]).trace();
            expect += 0.5 * grid.h() * (f0 + f1);
        }
        CHECK(val == doctest::Approx(expect).epsilon(1e-6));
        CHECK(val > 0.0);
    }
}
