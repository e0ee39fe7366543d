#ifndef RI_GAUSSIAN_HPP
#define RI_GAUSSIAN_HPP

// Closed-form Gaussian specializations: Stein shrinkage under information
// pricing, the scalar quadratic attention problem, and matrix Gaussian Gibbs
// channels with their mutual-information and expected-loss formulas.
//
// The matrix formulas are computed exactly as stated by their source
// expressions. Two of them are mutually inconsistent (the two mutual-
// information forms disagree under the stated gain/noise pair, and the gain
// formula's small-lambda limit is K -> I, not K -> 0); both values are
// therefore returned side by side and a discretized solver run is the
// arbiter. See lqg_mutual_info and lqg_scalar_rd_optimum.

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "ri/gibbs.hpp"
#include "ri/prob.hpp"

namespace ri {

// s(lambda) = lambda / (lambda + 1/(2 tau^2)); strictly increasing, in (0,1).
double stein_shrinkage_factor(const PriceParam& price, double tau2);

// R = (s-1)^2 ||theta||^2 + s^2 p for the linear rule a = s X, X ~ N(theta, I_p).
double stein_risk(const PriceParam& price, const Eigen::VectorXd& theta, double tau2);

struct SteinOptimum {
    double lambda_star = 0.0;
    double risk = 0.0;
};

// Grid argmin of stein_risk refined by golden section on the bracketing
// interval (1e-6 relative); ties break toward smaller lambda.
SteinOptimum stein_lambda_star(const Eigen::VectorXd& theta, double tau2,
                               const std::vector<double>& lambda_grid);

struct McEstimate {
    double value = 0.0;
    double se = 0.0;
};

// Monte Carlo risk of the positive-part James-Stein estimator
// (1 - (p-2)/||X||^2)_+ X at theta; requires p >= 3.
McEstimate js_positive_part_risk_mc(const Eigen::VectorXd& theta, std::size_t n_rep,
                                    std::uint64_t seed);

struct ScalarAttention {
    double sigma2_numeric = 0.0;   // maximizer of the stated objective
    double sigma2_formula = 0.0;   // the displayed closed-form expression
    double objective_numeric = 0.0;
    double objective_formula = 0.0;  // -inf when the formula collapses to 0
    bool formulas_agree = false;     // |sigma2_numeric - sigma2_formula| < 1e-9
};

// Maximizes g(s2) = -gamma a^2 s2 - (1/(2 lambda)) log(sigma_x^2 / s2) over
// s2 in (0, sigma_x^2] by the first-order condition with boundary clamp, and
// also evaluates the displayed expression sigma_x^2 (1 - 1/(2 lambda gamma
// a^2 sigma_x^2))_+ for comparison. The two disagree except at isolated
// parameter points; the numeric maximizer never scores worse.
ScalarAttention lqg_scalar_posterior_var(double sigma_x2, double gamma, double a,
                                         const PriceParam& price);

struct LqgGain {
    Eigen::MatrixXd gain;       // K = (SigmaX^-1 + lambda Q)^-1 SigmaX^-1
    Eigen::MatrixXd noise_cov;  // Sigma_eps = (SigmaX^-1 + lambda Q)^-1
};

LqgGain lqg_gain(const Eigen::MatrixXd& sigma_x, const Eigen::MatrixXd& q_weight,
                 const PriceParam& price);

struct LqgMutualInfo {
    double mi_detform = 0.0;  // 0.5 log det(I + SigmaX^{1/2} lambda Q SigmaX^{1/2})
    double mi_ratio = 0.0;    // 0.5 log(det Sigma_A / det Sigma_eps) under (K, Sigma_eps)
    double discrepancy = 0.0;
    bool consistent = false;  // |mi_detform - mi_ratio| <= 1e-9
};

// Both closed-form mutual-information expressions, side by side. They are
// generally inconsistent under the stated (K, Sigma_eps); neither is silently
// preferred.
LqgMutualInfo lqg_mutual_info(const Eigen::MatrixXd& sigma_x, const Eigen::MatrixXd& q_weight,
                              const PriceParam& price);

// trace(Q Sigma_eps).
double lqg_expected_loss(const Eigen::MatrixXd& sigma_x, const Eigen::MatrixXd& q_weight,
                         const PriceParam& price);

struct ScalarRdOptimum {
    double mutual_info = 0.0;    // nats
    double expected_loss = 0.0;  // q_weight * distortion
    double distortion = 0.0;     // E[(X - A)^2]
};

// Ground truth for the scalar problem: minimizes
//   q_weight * D + (1/(2 lambda)) log(sigma_x^2 / D)
// over D in (0, sigma_x^2] numerically (grid + golden section). The log term
// is the scalar Gaussian rate needed to reach mean-square distortion D.
ScalarRdOptimum lqg_scalar_rd_optimum(double sigma_x2, double q_weight, const PriceParam& price);

struct DiscretizedScalar {
    Prior prior;
    LossMatrix loss;
    std::vector<double> grid;
};

// Discretizes the scalar quadratic problem onto n-point state/report grids
// spanning +-width_sigmas standard deviations, for cross-checks against the
// finite-alphabet solver.
DiscretizedScalar discretize_scalar_lqg(double sigma_x2, double q_weight, std::size_t n_points,
                                        double width_sigmas);

}  // namespace ri

#endif  // RI_GAUSSIAN_HPP
