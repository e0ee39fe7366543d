#include <doctest.h>

#include <cmath>

#include "ri/ba.hpp"
#include "ri/gaussian.hpp"
#include "ri/rng.hpp"
#include "oracles.hpp"

using namespace ri;

namespace {

Eigen::MatrixXd random_spd(SeedStream& s, int n, double ridge) {
    Eigen::MatrixXd b(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) b(i, j) = s.next_gaussian();
    return b * b.transpose() + ridge * Eigen::MatrixXd::Identity(n, n);
}

}  // namespace

TEST_CASE("shrinkage factor: closed-form values and limits") {
    CHECK(stein_shrinkage_factor(PriceParam(1.0), 0.5) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(stein_shrinkage_factor(PriceParam(0.5), 1.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(stein_shrinkage_factor(PriceParam(1e12), 0.5) > 1.0 - 1e-11);
    CHECK(stein_shrinkage_factor(PriceParam(1e-9), 0.5) < 1e-8);
    // strictly increasing in lambda
    double prev = 0.0;
    for (double lambda : {0.1, 0.5, 1.0, 5.0, 50.0}) {
        const double s = stein_shrinkage_factor(PriceParam(lambda), 0.7);
        CHECK(s > prev);
        prev = s;
    }
    CHECK_THROWS_AS(stein_shrinkage_factor(PriceParam(1.0), 0.0), Error);
}

TEST_CASE("stein risk: bias-variance arithmetic and the MLE limit") {
    Eigen::VectorXd zero = Eigen::VectorXd::Zero(4);
    // theta = 0, tau2 = 0.5, lambda = 1: s = 1/2, risk = p/4
    CHECK(stein_risk(PriceParam(1.0), zero, 0.5) == doctest::Approx(1.0).epsilon(1e-12));
    // lambda -> inf: risk -> p
    Eigen::VectorXd theta(3);
    theta << 1.0, -2.0, 0.5;
    CHECK(stein_risk(PriceParam(1e14), theta, 0.5) == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("stein risk matches the Monte Carlo oracle within 3 se") {
    SeedStream s(71, 0);
    for (int trial = 0; trial < 5; ++trial) {
        const std::size_t p = 3 + (s.next_u64() % 6);
        Eigen::VectorXd theta(Eigen::Index(p));
        for (Eigen::Index i = 0; i < theta.size(); ++i) theta[i] = 2.0 * s.next_gaussian();
        const double tau2 = 0.3 + s.next_double();
        const double lambda = 0.2 + 3.0 * s.next_double();
        const double analytic = stein_risk(PriceParam(lambda), theta, tau2);
        const double shrink = stein_shrinkage_factor(PriceParam(lambda), tau2);
        const auto mc = oracles::shrinkage_risk_mc(shrink, theta, 200000, 500 + trial);
        CHECK(std::abs(analytic - mc.value) < 3.0 * mc.se);
    }
}

TEST_CASE("lambda-star: grid minimum at the origin, sparse-theta monotonicity") {
    std::vector<double> grid;
    for (int i = 0; i < 40; ++i) grid.push_back(std::pow(10.0, -3.0 + 6.0 * i / 39.0));

    // theta = 0: risk = s(lambda)^2 p is increasing, so the grid minimum wins
    const auto at_zero = stein_lambda_star(Eigen::VectorXd::Zero(5), 0.5, grid);
    CHECK(at_zero.lambda_star == doctest::Approx(grid.front()).epsilon(1e-9));

    // analytic optimum for R(s) = (1-s)^2 c + s^2 p: s* = c/(c+p),
    // lambda* = s*/(1-s*) * 1/(2 tau2) = c/p for tau2 = 1/2
    double prev_lambda = std::numeric_limits<double>::infinity();
    for (std::size_t p : {3, 5, 10, 20, 50, 100}) {
        const Eigen::VectorXd theta = oracles::sparse_theta(p);
        const auto opt = stein_lambda_star(theta, 0.5, grid);
        const double c = theta.squaredNorm();
        CHECK(opt.lambda_star == doctest::Approx(c / double(p)).epsilon(1e-4));
        CHECK(opt.lambda_star <= prev_lambda + 1e-12);
        CHECK(opt.risk < double(p));
        prev_lambda = opt.lambda_star;
    }
}

TEST_CASE("positive-part James-Stein: domination gates") {
    CHECK_THROWS_AS(js_positive_part_risk_mc(Eigen::VectorXd::Zero(2), 100, 1),
                    DimensionTooSmall);

    const auto at_zero = js_positive_part_risk_mc(Eigen::VectorXd::Zero(3), 200000, 42);
    CHECK((3.0 - at_zero.value) > 5.0 * at_zero.se);

    Eigen::VectorXd far(3);
    far << 50.0, 0.0, 0.0;
    const auto at_far = js_positive_part_risk_mc(far, 200000, 43);
    CHECK(std::abs(at_far.value - 3.0) < 3.0 * at_far.se);

    const auto sparse10 = js_positive_part_risk_mc(oracles::sparse_theta(10), 200000, 44);
    CHECK((10.0 - sparse10.value) > 5.0 * sparse10.se);
}

TEST_CASE("scalar attention: corner, interior, and limit cases") {
    // 2 lambda gamma a^2 sigma_x^2 <= 1: no-attention corner at sigma_x^2
    const auto corner = lqg_scalar_posterior_var(1.0, 1.0, 1.0, PriceParam(0.4));
    CHECK(corner.sigma2_numeric == doctest::Approx(1.0).epsilon(1e-12));

    // == 2: interior stationary point at sigma_x^2 / 2, where both forms agree
    const auto mid = lqg_scalar_posterior_var(1.0, 1.0, 1.0, PriceParam(1.0));
    CHECK(mid.sigma2_numeric == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(mid.sigma2_formula == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(mid.formulas_agree);

    // lambda -> inf: full attention
    const auto full = lqg_scalar_posterior_var(1.0, 1.0, 1.0, PriceParam(1e9));
    CHECK(full.sigma2_numeric < 1e-8);
}

TEST_CASE("scalar attention: numeric maximizer never loses to the displayed formula") {
    SeedStream s(72, 0);
    int disagreements = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const double sigma_x2 = 0.2 + 2.0 * s.next_double();
        const double gamma = 0.2 + 2.0 * s.next_double();
        const double a = 0.2 + 2.0 * s.next_double();
        const double lambda = 0.1 + 4.0 * s.next_double();
        const auto att = lqg_scalar_posterior_var(sigma_x2, gamma, a, PriceParam(lambda));
        CHECK(att.objective_numeric >= att.objective_formula - 1e-12);
        if (!att.formulas_agree) ++disagreements;

        // independent oracle: dense grid + refinement over (0, sigma_x^2]
        auto g = [&](double s2) {
            return -gamma * a * a * s2 - std::log(sigma_x2 / s2) / (2.0 * lambda);
        };
        const double oracle = oracles::grid_refine_max(g, sigma_x2 * 1e-6, sigma_x2);
        CHECK(g(att.sigma2_numeric) >= g(oracle) - 1e-9);
    }
    // the two expressions genuinely differ away from isolated parameter points
    CHECK(disagreements > 50);
}

TEST_CASE("lqg gain: scalar identity case and algebraic relations") {
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(2, 2);
    const LqgGain g = lqg_gain(eye, eye, PriceParam(1.0));
    CHECK((g.gain - 0.5 * eye).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((g.noise_cov - 0.5 * eye).cwiseAbs().maxCoeff() < 1e-12);

    SeedStream s(73, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + int(s.next_u64() % 3);
        const Eigen::MatrixXd sx = random_spd(s, n, 0.5);
        const Eigen::MatrixXd q = random_spd(s, n, 0.5);
        const double lambda = 0.2 + 3.0 * s.next_double();
        const LqgGain gg = lqg_gain(sx, q, PriceParam(lambda));

        // K + lambda Sigma_eps Q = I
        const Eigen::MatrixXd identity_check =
            gg.gain + lambda * gg.noise_cov * q - Eigen::MatrixXd::Identity(n, n);
        CHECK(identity_check.cwiseAbs().maxCoeff() < 1e-10);

        // symmetrizability K Sigma_X = Sigma_X K^T
        const Eigen::MatrixXd sym = gg.gain * sx - sx * gg.gain.transpose();
        CHECK(sym.cwiseAbs().maxCoeff() < 1e-10);

        // Sigma_eps strictly below Sigma_X
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sx - gg.noise_cov);
        CHECK(es.eigenvalues().minCoeff() > 0.0);

        // K eigenvalues inside (0,1)
        const Eigen::VectorXcd eig = gg.gain.eigenvalues();
        for (Eigen::Index i = 0; i < eig.size(); ++i) {
            CHECK(eig[i].real() > 0.0);
            CHECK(eig[i].real() < 1.0);
            CHECK(std::abs(eig[i].imag()) < 1e-10);
        }
    }
    CHECK_THROWS_AS(lqg_gain(Eigen::MatrixXd::Zero(2, 2), eye, PriceParam(1.0)), SingularMatrix);
    Eigen::MatrixXd asym(2, 2);
    asym << 1.0, 0.2, 0.1, 1.0;
    CHECK_THROWS_AS(lqg_gain(asym, eye, PriceParam(1.0)), SingularMatrix);
}

TEST_CASE("lqg gain limits: the formula as written gives K -> I as lambda -> 0") {
    // the source remark states the opposite limit; the formula itself does
    // this, and the discrepancy is surfaced rather than resolved
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(2, 2);
    const LqgGain small = lqg_gain(eye, eye, PriceParam(1e-12));
    CHECK((small.gain - eye).cwiseAbs().maxCoeff() < 1e-10);
    const LqgGain big = lqg_gain(eye, eye, PriceParam(1e12));
    CHECK(big.noise_cov.cwiseAbs().maxCoeff() < 1e-10);
    CHECK(big.gain.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("lqg mutual information: both forms returned, disagreement flagged") {
    const Eigen::MatrixXd one = Eigen::MatrixXd::Identity(1, 1);
    const LqgMutualInfo mi = lqg_mutual_info(one, one, PriceParam(1.0));
    CHECK(mi.mi_detform == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-12));
    CHECK(mi.mi_ratio == doctest::Approx(0.5 * std::log(1.5)).epsilon(1e-12));
    CHECK_FALSE(mi.consistent);
    CHECK(mi.discrepancy == doctest::Approx(mi.mi_detform - mi.mi_ratio).epsilon(1e-12));

    // lambda -> 0: detform -> 0
    const LqgMutualInfo mi0 = lqg_mutual_info(one, one, PriceParam(1e-12));
    CHECK(mi0.mi_detform < 1e-10);
}

TEST_CASE("lqg expected loss: values and limits") {
    const Eigen::MatrixXd eye2 = Eigen::MatrixXd::Identity(2, 2);
    CHECK(lqg_expected_loss(eye2, eye2, PriceParam(1.0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(lqg_expected_loss(eye2, eye2, PriceParam(1e12)) < 1e-10);
    // lambda -> 0: tr(Q Sigma_X)
    CHECK(lqg_expected_loss(eye2, eye2, PriceParam(1e-12)) == doctest::Approx(2.0).epsilon(1e-9));
    // decreasing in lambda
    double prev = std::numeric_limits<double>::infinity();
    for (double lambda : {0.1, 0.5, 1.0, 4.0, 20.0}) {
        const double v = lqg_expected_loss(eye2, eye2, PriceParam(lambda));
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("discretized solver arbitrates: matches the 1-D optimum within 2%") {
    for (double lambda : {0.75, 1.0, 2.0}) {
        const PriceParam price(lambda);
        const ScalarRdOptimum rd = lqg_scalar_rd_optimum(1.0, 1.0, price);
        const DiscretizedScalar disc = discretize_scalar_lqg(1.0, 1.0, 41, 4.0);
        const GibbsSolution ba = ba_solve(disc.prior, disc.loss, price, {1e-9, 30000, std::nullopt});
        CHECK(std::abs(ba.mutual_info / rd.mutual_info - 1.0) < 0.02);
        CHECK(std::abs(ba.expected_loss / rd.expected_loss - 1.0) < 0.02);
    }
    // at lambda = 2 the oracle sides with the rate-form values, against both
    // the trace formula tr(Q Sigma_eps) = 1/3 and the ratio MI; and the
    // detform MI = 0.5 log 3 also disagrees with the oracle's 0.5 log 4
    const Eigen::MatrixXd one = Eigen::MatrixXd::Identity(1, 1);
    const ScalarRdOptimum rd2 = lqg_scalar_rd_optimum(1.0, 1.0, PriceParam(2.0));
    CHECK(rd2.expected_loss == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(rd2.mutual_info == doctest::Approx(0.5 * std::log(4.0)).epsilon(1e-6));
    CHECK(std::abs(lqg_expected_loss(one, one, PriceParam(2.0)) - rd2.expected_loss) > 0.05);
    const LqgMutualInfo mi2 = lqg_mutual_info(one, one, PriceParam(2.0));
    CHECK(std::abs(mi2.mi_detform - rd2.mutual_info) > 0.1);
}

TEST_CASE("scalar rd optimum: corner regime below the attention threshold") {
    // 2 lambda q sigma_x^2 < 1: distortion pinned at sigma_x^2, zero rate
    const ScalarRdOptimum rd = lqg_scalar_rd_optimum(1.0, 1.0, PriceParam(0.3));
    CHECK(rd.distortion == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rd.mutual_info == doctest::Approx(0.0));
    // interior: D = 1/(2 lambda q)
    const ScalarRdOptimum rd2 = lqg_scalar_rd_optimum(2.0, 0.7, PriceParam(3.0));
    CHECK(rd2.distortion == doctest::Approx(1.0 / (2.0 * 3.0 * 0.7)).epsilon(1e-6));
}

TEST_CASE("gaussian-vs-discrete consistency holds across scale changes") {
    const PriceParam price(1.5);
    const double sigma_x2 = 2.5, q_weight = 0.6;
    const ScalarRdOptimum rd = lqg_scalar_rd_optimum(sigma_x2, q_weight, price);
    const DiscretizedScalar disc = discretize_scalar_lqg(sigma_x2, q_weight, 41, 4.0);
    const GibbsSolution ba = ba_solve(disc.prior, disc.loss, price, {1e-9, 30000, std::nullopt});
    CHECK(std::abs(ba.mutual_info / rd.mutual_info - 1.0) < 0.02);
    CHECK(std::abs(ba.expected_loss / rd.expected_loss - 1.0) < 0.02);
}
