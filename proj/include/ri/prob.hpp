#ifndef RI_PROB_HPP
#define RI_PROB_HPP

// Probability primitives on finite alphabets: simplex types, entropy, KL
// divergence, induced marginals and mutual information. All quantities are
// in nats.

#include <vector>

#include "ri/common.hpp"

namespace ri {

namespace detail {
// Validates nonnegativity and total mass within kSimplexTol, then
// renormalizes. Throws NonSimplexInput otherwise.
std::vector<double> checked_simplex(std::vector<double> w, const char* what);
}  // namespace detail

// Distribution over states x in {0..n_x-1}.
class Prior {
  public:
    explicit Prior(std::vector<double> weights)
        : weights_(detail::checked_simplex(std::move(weights), "Prior")) {}
    static Prior uniform(std::size_t n) { return Prior(std::vector<double>(n, 1.0 / double(n))); }

    std::size_t size() const { return weights_.size(); }
    double operator[](std::size_t i) const { return weights_[i]; }
    const std::vector<double>& weights() const { return weights_; }

  private:
    std::vector<double> weights_;
};

// Distribution over reports y in {0..n_y-1}.
class Marginal {
  public:
    explicit Marginal(std::vector<double> weights)
        : weights_(detail::checked_simplex(std::move(weights), "Marginal")) {}
    static Marginal uniform(std::size_t n) {
        return Marginal(std::vector<double>(n, 1.0 / double(n)));
    }

    std::size_t size() const { return weights_.size(); }
    double operator[](std::size_t i) const { return weights_[i]; }
    const std::vector<double>& weights() const { return weights_; }

  private:
    std::vector<double> weights_;
};

// Row-stochastic conditional distribution f(y|x); row x is f(.|x).
class Channel {
  public:
    explicit Channel(Mat rows);
    static Channel identity(std::size_t n);
    static Channel uniform(std::size_t n_x, std::size_t n_y);
    // Every row equal to r (state-independent channel).
    static Channel constant_row(std::size_t n_x, const std::vector<double>& r);

    std::size_t n_states() const { return rows_.rows(); }
    std::size_t n_reports() const { return rows_.cols(); }
    double operator()(std::size_t x, std::size_t y) const { return rows_(x, y); }
    const Mat& rows() const { return rows_; }
    std::vector<double> row(std::size_t x) const;

    // Composition with a post-processing channel g: (f.then(g))(z|x) =
    // sum_y f(y|x) g(z|y).
    Channel then(const Channel& g) const;

  private:
    Mat rows_;
};

// Per-(state, report) loss l(x,y); utilities enter as l = -U.
class LossMatrix {
  public:
    explicit LossMatrix(Mat entries, bool is_utility_negated = false);
    static LossMatrix from_utilities(const Mat& utilities);

    std::size_t n_states() const { return entries_.rows(); }
    std::size_t n_reports() const { return entries_.cols(); }
    double operator()(std::size_t x, std::size_t y) const { return entries_(x, y); }
    const Mat& entries() const { return entries_; }
    bool is_utility_negated() const { return is_utility_negated_; }

  private:
    Mat entries_;
    bool is_utility_negated_;
};

// H(p) = -sum p_i log p_i, with 0 log 0 := 0.
double entropy(const std::vector<double>& p);
inline double entropy(const Prior& p) { return entropy(p.weights()); }
inline double entropy(const Marginal& p) { return entropy(p.weights()); }

// KL(p||q) = sum p_i log(p_i/q_i). Throws SupportViolation if p puts mass
// where q has none; 0 log(0/0) := 0.
double kl(const std::vector<double>& p, const std::vector<double>& q);
inline double kl(const Marginal& p, const Marginal& q) { return kl(p.weights(), q.weights()); }

// q(y) = sum_x p(x) f(y|x).
Marginal induced_marginal(const Prior& prior, const Channel& f);

// I(X;Y) = sum_x p(x) KL(f(.|x) || q) with q the induced marginal.
double mutual_information(const Prior& prior, const Channel& f);

// E[log p(X|Y) - log p(X)] computed through Bayes posteriors under the joint
// law. Algebraically equal to mutual_information; exposed as an independent
// code path for cross-checking.
double refinement_gain(const Prior& prior, const Channel& f);

}  // namespace ri

#endif  // RI_PROB_HPP
