#ifndef RI_GIBBS_HPP
#define RI_GIBBS_HPP

// Gibbs-Boltzmann channel update against a report marginal, the per-state
// log-partition function, the information-priced objective in loss form, and
// the entropic tilt of the prior.
//
// Internal convention is loss minimization: the objective is
//   J(f) = E[l(X,Y)] + (1/lambda) I(X;Y),
// so lambda is the inverse information price (large lambda = cheap
// information). Utility-maximization problems enter via l = -U, and the
// optimal value of the utility form is -J at the optimum.

#include <utility>
#include <vector>

#include "ri/prob.hpp"

namespace ri {

// Inverse information price; the penalty coefficient on I(X;Y) is 1/lambda.
class PriceParam {
  public:
    explicit PriceParam(double lambda) : lambda_(lambda) {
        if (!(lambda > 0.0) || !std::isfinite(lambda))
            throw Error("PriceParam: lambda must be strictly positive and finite");
    }
    // Construct from the price per nat (= 1/lambda).
    static PriceParam from_price(double price) { return PriceParam(1.0 / price); }

    double lambda() const { return lambda_; }
    double penalty() const { return 1.0 / lambda_; }

  private:
    double lambda_;
};

// log Z(x) = log sum_y q(y) exp(-lambda l(x,y)), per state.
struct LogPartition {
    std::vector<double> values;
};

// f(y|x) = q(y) exp(-lambda l(x,y)) / Z(x), computed row-wise in the log
// domain with max shift. Entries where q(y) = 0 are exactly 0.
std::pair<Channel, LogPartition> gibbs_update(const LossMatrix& loss, const Marginal& q,
                                              const PriceParam& price);

// Single-state version: the Gibbs row for one loss row against a raw weight
// vector q (need not be normalized; must have some positive mass). Returns
// the row and log Z for that state.
std::pair<std::vector<double>, double> gibbs_row(const std::vector<double>& loss_row,
                                                 const std::vector<double>& q, double lambda);

// J(f) = E[l(X,Y)] + (1/lambda) I(X;Y).
double objective(const Prior& prior, const LossMatrix& loss, const Channel& f,
                 const PriceParam& price);

// E[l(X,Y)] under the joint law prior x f.
double expected_loss(const Prior& prior, const LossMatrix& loss, const Channel& f);

// Loss-form optimal value -(1/lambda) E_prior[log Z(X)]. At a converged
// fixed point this equals objective(...); the utility form flips the sign.
double optimal_value(const Prior& prior, const LogPartition& logz, const PriceParam& price);

// Tilted prior: weights proportional to exp(logZ(x)/lambda) p(x).
Prior entropic_tilt(const Prior& prior, const LogPartition& logz, const PriceParam& price);

}  // namespace ri

#endif  // RI_GIBBS_HPP
