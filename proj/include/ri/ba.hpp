#ifndef RI_BA_HPP
#define RI_BA_HPP

// Deterministic Blahut-Arimoto iteration for the information-priced problem,
// capacity-constrained solving by bisection on lambda, frontier tracing, and
// support extraction from the converged report marginal.

#include <cstddef>
#include <optional>
#include <vector>

#include "ri/gibbs.hpp"
#include "ri/prob.hpp"

namespace ri {

struct BaOptions {
    double tol = 1e-10;
    std::size_t max_iter = 100000;
    // Optional warm start for the report marginal; mixed with a uniform
    // floor so previously extinguished reports can regrow.
    std::optional<std::vector<double>> warm_start;
};

// Converged (channel, marginal, log-partition) bundle at a given lambda.
// marginal == induced_marginal(prior, channel) holds by construction.
struct GibbsSolution {
    Channel channel;
    Marginal marginal;
    LogPartition logz;
    double lambda = 0.0;
    double expected_loss = 0.0;
    double mutual_info = 0.0;
    double objective_value = 0.0;
    std::size_t iterations = 0;
    double residual = 0.0;  // sup-norm of the final q update
    bool converged = true;  // false when max_iter was exhausted
    bool monotone_ok = true;
    bool dropped_zero_states = false;
};

// (lambda, information level, expected loss) on the traced frontier.
struct FrontierPoint {
    double lambda = 0.0;
    double kappa = 0.0;  // nats
    double expected_loss = 0.0;
};

struct FrontierTrace {
    std::vector<FrontierPoint> points;  // sorted by kappa
    bool loss_monotone = true;          // expected loss nonincreasing in kappa
    double min_second_difference = 0.0;  // of loss over kappa; >= -1e-6 when convex
};

// Result of the capacity-constrained solve. On the differentiable part of
// the frontier `low` is the matched solution and mix_weight == 1. At a kink
// the pair (low, high) brackets kappa and mix_weight alpha satisfies
// alpha*I_low + (1-alpha)*I_high = kappa.
struct CapacitySolution {
    explicit CapacitySolution(GibbsSolution s) : low(std::move(s)) {}
    GibbsSolution low;
    std::optional<GibbsSolution> high;
    double mix_weight = 1.0;
    bool kink = false;
    bool grid_fallback = false;      // non-monotone bracket, resolved by grid scan
    bool bracket_saturated = false;  // kappa not reachable within the lambda cap
    double mixed_mutual_info() const;
    double mixed_expected_loss() const;
};

// Alternates the Gibbs channel update and the induced-marginal update from a
// strictly positive start until the sup-norm change in q drops below tol
// (confirmed by KL(q_t || q_{t-1}) < tol^2). Zero-mass prior states are
// removed before solving and reinserted as uniform rows, flagged.
GibbsSolution ba_solve(const Prior& prior, const LossMatrix& loss, const PriceParam& price,
                       const BaOptions& opts = {});

// Bisection on lambda over an auto-expanded bracket until the converged
// mutual information matches kappa within tol_kappa. Falls back to a grid
// scan if the bracket is non-monotone; reports a mixture at kinks.
CapacitySolution solve_capacity(const Prior& prior, const LossMatrix& loss, double kappa,
                                double tol_kappa = 1e-9, double tol_fp = 1e-12);

// One ba_solve per grid point, warm-started sequentially from the previous
// converged marginal. The grid must be strictly increasing and positive.
FrontierTrace trace_frontier(const Prior& prior, const LossMatrix& loss,
                             const std::vector<double>& lambda_grid, const BaOptions& opts = {});

// Report indices with q(y) > eps.
std::vector<std::size_t> support_set(const Marginal& q, double eps);

}  // namespace ri

#endif  // RI_BA_HPP
