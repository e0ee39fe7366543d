#ifndef RI_CHOICE_HPP
#define RI_CHOICE_HPP

// Multinomial-logit specialization: softmax channels, the curvature
// diagnostic lambda * Var(u), symmetric tri-choice analytics, predictive
// Fisher information, Monte Carlo curvature tables, and consideration-set
// sweeps over the information price.

#include <cstdint>
#include <string>
#include <vector>

#include "ri/ba.hpp"
#include "ri/gibbs.hpp"
#include "ri/prob.hpp"

namespace ri {

// p_k proportional to exp(lambda * u_k), max-shifted.
std::vector<double> softmax_channel(const std::vector<double>& u, const PriceParam& price);

// H = lambda * Var_p(u) with p the softmax channel; equals
// lambda * d^2/dlambda^2 log sum_j exp(lambda u_j).
double curvature(const std::vector<double>& u, const PriceParam& price);

// Closed form for u = (theta, 0, -theta):
// H = lambda * [theta^2 (p1 + p3) - theta^2 (p1 - p3)^2].
double tri_choice_curvature(double theta, const PriceParam& price);

// Predictive Fisher information sum_k (dp_k/dtheta)^2 / p_k for the
// symmetric tri-choice family, with analytic softmax derivatives.
double mnl_fisher_info(double theta, const PriceParam& price);

struct CurvatureTableRow {
    double lambda = 0.0;
    double mean_h = 0.0;
    double sd_h = 0.0;
    double se_h = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

// For each lambda in the grid, the mean/sd/se/95% CI of H over B utility
// vectors u ~ N(0, I_K) drawn from seeded substreams. The same B draws are
// reused across lambdas (common random numbers).
std::vector<CurvatureTableRow> mc_curvature(std::size_t n_alternatives,
                                            const std::vector<double>& lambda_grid, std::size_t b,
                                            std::uint64_t seed);

struct ConsiderationPoint {
    double lambda = 0.0;
    std::vector<std::size_t> support;
    double max_channel_entry = 0.0;
    double mutual_info = 0.0;
    std::string regime;  // "full-support" | "sparse" | "near-deterministic"
};

// Solves the information-priced problem per grid lambda on loss = -utilities
// and reports the support of each converged report marginal along with a
// coarse regime classification.
std::vector<ConsiderationPoint> consideration_sweep(const Prior& prior,
                                                    const Mat& utilities_by_state,
                                                    const std::vector<double>& lambda_grid,
                                                    double eps, const BaOptions& opts = {});

}  // namespace ri

#endif  // RI_CHOICE_HPP
