#include "ri/gaussian.hpp"

#include <cmath>
#include <limits>

#include "ri/rng.hpp"

namespace ri {

namespace {

// Minimizes a unimodal function on [lo, hi] to the given relative tolerance.
template <typename F>
double golden_section_min(F f, double lo, double hi, double rel_tol) {
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double x1 = b - phi * (b - a);
    double x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while ((b - a) > rel_tol * (std::abs(a) + std::abs(b)) * 0.5 && (b - a) > 1e-300) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

void check_spd(const Eigen::MatrixXd& m, const char* name) {
    if (m.rows() != m.cols()) throw DimensionMismatch(std::string(name) + ": not square");
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw SingularMatrix(std::string(name) + ": not symmetric within 1e-12");
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success)
        throw SingularMatrix(std::string(name) + ": not positive definite");
}

}  // namespace

double stein_shrinkage_factor(const PriceParam& price, double tau2) {
    if (!(tau2 > 0.0)) throw Error("stein_shrinkage_factor: tau2 must be positive");
    const double lambda = price.lambda();
    return lambda / (lambda + 1.0 / (2.0 * tau2));
}

double stein_risk(const PriceParam& price, const Eigen::VectorXd& theta, double tau2) {
    const double s = stein_shrinkage_factor(price, tau2);
    const double bias2 = (s - 1.0) * (s - 1.0) * theta.squaredNorm();
    const double variance = s * s * double(theta.size());
    return bias2 + variance;
}

SteinOptimum stein_lambda_star(const Eigen::VectorXd& theta, double tau2,
                               const std::vector<double>& lambda_grid) {
    if (lambda_grid.empty()) throw Error("stein_lambda_star: empty grid");
    for (double l : lambda_grid)
        if (!(l > 0.0)) throw Error("stein_lambda_star: lambdas must be positive");

    auto risk_at = [&](double lambda) { return stein_risk(PriceParam(lambda), theta, tau2); };

    std::size_t best = 0;
    double best_risk = risk_at(lambda_grid[0]);
    for (std::size_t i = 1; i < lambda_grid.size(); ++i) {
        const double r = risk_at(lambda_grid[i]);
        if (r < best_risk) {  // strict: ties stay at the smaller lambda
            best_risk = r;
            best = i;
        }
    }
    const double lo = best > 0 ? lambda_grid[best - 1] : lambda_grid[best];
    const double hi = best + 1 < lambda_grid.size() ? lambda_grid[best + 1] : lambda_grid[best];

    SteinOptimum out;
    if (lo == hi) {
        out.lambda_star = lambda_grid[best];
    } else {
        out.lambda_star = golden_section_min(risk_at, lo, hi, 1e-6);
        if (risk_at(lambda_grid[best]) < risk_at(out.lambda_star))
            out.lambda_star = lambda_grid[best];
    }
    out.risk = risk_at(out.lambda_star);
    return out;
}

McEstimate js_positive_part_risk_mc(const Eigen::VectorXd& theta, std::size_t n_rep,
                                    std::uint64_t seed) {
    const std::size_t p = std::size_t(theta.size());
    if (p < 3) throw DimensionTooSmall("js_positive_part_risk_mc: requires dimension >= 3");
    if (n_rep < 2) throw Error("js_positive_part_risk_mc: need n_rep >= 2");

    SeedStream stream(seed, 0);
    double sum = 0.0, sum_sq = 0.0;
    Eigen::VectorXd x(p);
    for (std::size_t rep = 0; rep < n_rep; ++rep) {
        for (std::size_t i = 0; i < p; ++i) x[i] = theta[i] + stream.next_gaussian();
        const double shrink = std::max(0.0, 1.0 - double(p - 2) / x.squaredNorm());
        const double err = (shrink * x - theta).squaredNorm();
        sum += err;
        sum_sq += err * err;
    }
    McEstimate out;
    out.value = sum / double(n_rep);
    const double var = (sum_sq - double(n_rep) * out.value * out.value) / double(n_rep - 1);
    out.se = std::sqrt((var > 0.0 ? var : 0.0) / double(n_rep));
    return out;
}

ScalarAttention lqg_scalar_posterior_var(double sigma_x2, double gamma, double a,
                                         const PriceParam& price) {
    if (!(sigma_x2 > 0.0) || !(gamma > 0.0) || !(a > 0.0))
        throw Error("lqg_scalar_posterior_var: parameters must be positive");
    const double lambda = price.lambda();
    const double coef = gamma * a * a;

    auto objective = [&](double s2) {
        if (!(s2 > 0.0)) return -std::numeric_limits<double>::infinity();
        return -coef * s2 - (1.0 / (2.0 * lambda)) * std::log(sigma_x2 / s2);
    };

    ScalarAttention out;
    // g is concave in s2; stationary point at 1/(2 lambda gamma a^2), clamped
    // to the feasible interval
    const double stationary = 1.0 / (2.0 * lambda * coef);
    out.sigma2_numeric = std::min(sigma_x2, stationary);
    out.objective_numeric = objective(out.sigma2_numeric);

    out.sigma2_formula = sigma_x2 * std::max(0.0, 1.0 - 1.0 / (2.0 * lambda * coef * sigma_x2));
    out.objective_formula = objective(out.sigma2_formula);
    out.formulas_agree = std::abs(out.sigma2_numeric - out.sigma2_formula) < 1e-9;
    return out;
}

LqgGain lqg_gain(const Eigen::MatrixXd& sigma_x, const Eigen::MatrixXd& q_weight,
                 const PriceParam& price) {
    check_spd(sigma_x, "lqg_gain: SigmaX");
    check_spd(q_weight, "lqg_gain: Q");
    if (sigma_x.rows() != q_weight.rows())
        throw DimensionMismatch("lqg_gain: SigmaX/Q dimensions disagree");

    const Eigen::MatrixXd sigma_x_inv =
        Eigen::LLT<Eigen::MatrixXd>(sigma_x).solve(Eigen::MatrixXd::Identity(sigma_x.rows(), sigma_x.cols()));
    const Eigen::MatrixXd m = sigma_x_inv + price.lambda() * q_weight;
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success)
        throw SingularMatrix("lqg_gain: precision matrix not positive definite");

    LqgGain out;
    out.noise_cov = llt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols()));
    out.noise_cov = 0.5 * (out.noise_cov + out.noise_cov.transpose().eval());
    out.gain = llt.solve(sigma_x_inv);
    return out;
}

LqgMutualInfo lqg_mutual_info(const Eigen::MatrixXd& sigma_x, const Eigen::MatrixXd& q_weight,
                              const PriceParam& price) {
    check_spd(sigma_x, "lqg_mutual_info: SigmaX");
    check_spd(q_weight, "lqg_mutual_info: Q");
    if (sigma_x.rows() != q_weight.rows())
        throw DimensionMismatch("lqg_mutual_info: SigmaX/Q dimensions disagree");
    const std::size_t n = std::size_t(sigma_x.rows());

    // SigmaX^{1/2} via the symmetric eigendecomposition
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma_x);
    if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0)
        throw SingularMatrix("lqg_mutual_info: SigmaX not positive definite");
    const Eigen::MatrixXd sqrt_sigma =
        es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();

    const Eigen::MatrixXd inner = Eigen::MatrixXd::Identity(n, n) +
                                  sqrt_sigma * (price.lambda() * q_weight) * sqrt_sigma;

    LqgMutualInfo out;
    out.mi_detform = 0.5 * std::log(inner.determinant());

    const LqgGain g = lqg_gain(sigma_x, q_weight, price);
    const Eigen::MatrixXd sigma_a = g.gain * sigma_x * g.gain.transpose() + g.noise_cov;
    out.mi_ratio = 0.5 * std::log(sigma_a.determinant() / g.noise_cov.determinant());

    out.discrepancy = std::abs(out.mi_detform - out.mi_ratio);
    out.consistent = out.discrepancy <= 1e-9;
    return out;
}

double lqg_expected_loss(const Eigen::MatrixXd& sigma_x, const Eigen::MatrixXd& q_weight,
                         const PriceParam& price) {
    const LqgGain g = lqg_gain(sigma_x, q_weight, price);
    return (q_weight * g.noise_cov).trace();
}

ScalarRdOptimum lqg_scalar_rd_optimum(double sigma_x2, double q_weight, const PriceParam& price) {
    if (!(sigma_x2 > 0.0) || !(q_weight > 0.0))
        throw Error("lqg_scalar_rd_optimum: parameters must be positive");
    const double inv2l = 1.0 / (2.0 * price.lambda());

    auto total = [&](double d) { return q_weight * d + inv2l * std::log(sigma_x2 / d); };

    // convex in D: coarse log-spaced scan, then golden section on the bracket
    const int n_grid = 60;
    double best_d = sigma_x2;
    double best_val = total(sigma_x2);
    for (int i = 0; i < n_grid; ++i) {
        const double d = sigma_x2 * std::pow(10.0, -8.0 * double(i + 1) / double(n_grid));
        const double v = total(d);
        if (v < best_val) {
            best_val = v;
            best_d = d;
        }
    }
    const double lo = std::max(best_d * std::pow(10.0, -8.0 / n_grid), sigma_x2 * 1e-9);
    const double hi = std::min(best_d * std::pow(10.0, 8.0 / n_grid), sigma_x2);
    const double d_star = golden_section_min(total, lo, hi, 1e-12);

    ScalarRdOptimum out;
    out.distortion = total(d_star) <= total(sigma_x2) ? d_star : sigma_x2;
    out.expected_loss = q_weight * out.distortion;
    const double rate = 0.5 * std::log(sigma_x2 / out.distortion);
    out.mutual_info = rate > 0.0 ? rate : 0.0;
    return out;
}

DiscretizedScalar discretize_scalar_lqg(double sigma_x2, double q_weight, std::size_t n_points,
                                        double width_sigmas) {
    if (n_points < 3) throw Error("discretize_scalar_lqg: need at least three grid points");
    const double sd = std::sqrt(sigma_x2);
    std::vector<double> grid(n_points);
    for (std::size_t i = 0; i < n_points; ++i)
        grid[i] = -width_sigmas * sd + 2.0 * width_sigmas * sd * double(i) / double(n_points - 1);

    std::vector<double> w(n_points);
    double sum = 0.0;
    for (std::size_t i = 0; i < n_points; ++i) {
        w[i] = std::exp(-grid[i] * grid[i] / (2.0 * sigma_x2));
        sum += w[i];
    }
    for (double& v : w) v /= sum;

    Mat loss(n_points, n_points);
    for (std::size_t i = 0; i < n_points; ++i)
        for (std::size_t j = 0; j < n_points; ++j) {
            const double d = grid[i] - grid[j];
            loss(i, j) = q_weight * d * d;
        }
    return {Prior(std::move(w)), LossMatrix(std::move(loss)), std::move(grid)};
}

}  // namespace ri
