#include "ri/prob.hpp"

#include <cmath>

namespace ri {

namespace detail {

std::vector<double> checked_simplex(std::vector<double> w, const char* what) {
    if (w.empty()) throw NonSimplexInput(std::string(what) + ": empty weight vector");
    double sum = 0.0;
    for (double v : w) {
        if (!(v >= 0.0) || !std::isfinite(v))
            throw NonSimplexInput(std::string(what) + ": negative or non-finite weight");
        sum += v;
    }
    if (std::abs(sum - 1.0) > kSimplexTol)
        throw NonSimplexInput(std::string(what) + ": weights sum to " + std::to_string(sum));
    for (double& v : w) v /= sum;
    return w;
}

}  // namespace detail

Channel::Channel(Mat rows) : rows_(std::move(rows)) {
    if (rows_.rows() == 0 || rows_.cols() == 0)
        throw NonSimplexInput("Channel: empty matrix");
    for (std::size_t x = 0; x < rows_.rows(); ++x) {
        double sum = 0.0;
        for (std::size_t y = 0; y < rows_.cols(); ++y) {
            double v = rows_(x, y);
            if (!(v >= 0.0) || !std::isfinite(v))
                throw NonSimplexInput("Channel: negative or non-finite entry in row " +
                                      std::to_string(x));
            sum += v;
        }
        if (std::abs(sum - 1.0) > kSimplexTol)
            throw NonSimplexInput("Channel: row " + std::to_string(x) + " sums to " +
                                  std::to_string(sum));
        for (std::size_t y = 0; y < rows_.cols(); ++y) rows_(x, y) /= sum;
    }
}

Channel Channel::identity(std::size_t n) {
    Mat m(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return Channel(std::move(m));
}

Channel Channel::uniform(std::size_t n_x, std::size_t n_y) {
    return constant_row(n_x, std::vector<double>(n_y, 1.0 / double(n_y)));
}

Channel Channel::constant_row(std::size_t n_x, const std::vector<double>& r) {
    Mat m(n_x, r.size());
    for (std::size_t x = 0; x < n_x; ++x)
        for (std::size_t y = 0; y < r.size(); ++y) m(x, y) = r[y];
    return Channel(std::move(m));
}

std::vector<double> Channel::row(std::size_t x) const {
    return std::vector<double>(rows_.row_ptr(x), rows_.row_ptr(x) + rows_.cols());
}

Channel Channel::then(const Channel& g) const {
    if (n_reports() != g.n_states())
        throw DimensionMismatch("Channel::then: inner dimensions disagree");
    Mat out(n_states(), g.n_reports(), 0.0);
    for (std::size_t x = 0; x < n_states(); ++x)
        for (std::size_t y = 0; y < n_reports(); ++y) {
            double fxy = rows_(x, y);
            if (fxy == 0.0) continue;
            for (std::size_t z = 0; z < g.n_reports(); ++z) out(x, z) += fxy * g(y, z);
        }
    return Channel(std::move(out));
}

LossMatrix::LossMatrix(Mat entries, bool is_utility_negated)
    : entries_(std::move(entries)), is_utility_negated_(is_utility_negated) {
    if (entries_.rows() == 0 || entries_.cols() == 0)
        throw NonFiniteLoss("LossMatrix: empty matrix");
    for (double v : entries_.flat())
        if (!std::isfinite(v)) throw NonFiniteLoss("LossMatrix: non-finite entry");
}

LossMatrix LossMatrix::from_utilities(const Mat& utilities) {
    Mat neg(utilities.rows(), utilities.cols());
    for (std::size_t x = 0; x < utilities.rows(); ++x)
        for (std::size_t y = 0; y < utilities.cols(); ++y) neg(x, y) = -utilities(x, y);
    return LossMatrix(std::move(neg), /*is_utility_negated=*/true);
}

double entropy(const std::vector<double>& p) {
    double h = 0.0;
    for (double v : p)
        if (v > 0.0) h -= v * std::log(v);
    return h < 0.0 ? 0.0 : h;  // clip the -0.0 from point masses
}

double kl(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size()) throw DimensionMismatch("kl: size mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0.0) continue;
        if (q[i] == 0.0)
            throw SupportViolation("kl: p has mass at index " + std::to_string(i) +
                                   " where q is zero");
        d += p[i] * std::log(p[i] / q[i]);
    }
    return d;
}

Marginal induced_marginal(const Prior& prior, const Channel& f) {
    if (prior.size() != f.n_states())
        throw DimensionMismatch("induced_marginal: prior/channel dimensions disagree");
    std::vector<double> q(f.n_reports(), 0.0);
    for (std::size_t x = 0; x < f.n_states(); ++x) {
        double px = prior[x];
        if (px == 0.0) continue;
        for (std::size_t y = 0; y < f.n_reports(); ++y) q[y] += px * f(x, y);
    }
    return Marginal(std::move(q));
}

double mutual_information(const Prior& prior, const Channel& f) {
    Marginal q = induced_marginal(prior, f);
    double info = 0.0;
    for (std::size_t x = 0; x < f.n_states(); ++x) {
        double px = prior[x];
        if (px == 0.0) continue;
        double row_kl = 0.0;
        for (std::size_t y = 0; y < f.n_reports(); ++y) {
            double fxy = f(x, y);
            if (fxy > 0.0) row_kl += fxy * std::log(fxy / q[y]);
        }
        info += px * row_kl;
    }
    return info < 0.0 ? 0.0 : info;
}

double refinement_gain(const Prior& prior, const Channel& f) {
    if (prior.size() != f.n_states())
        throw DimensionMismatch("refinement_gain: prior/channel dimensions disagree");
    Marginal q = induced_marginal(prior, f);
    // posterior(x|y) = p(x) f(y|x) / q(y); gain = E_joint[log posterior - log prior]
    double gain = 0.0;
    for (std::size_t y = 0; y < f.n_reports(); ++y) {
        if (q[y] == 0.0) continue;
        for (std::size_t x = 0; x < f.n_states(); ++x) {
            double joint = prior[x] * f(x, y);
            if (joint == 0.0) continue;
            double posterior = joint / q[y];
            gain += joint * (std::log(posterior) - std::log(prior[x]));
        }
    }
    return gain;
}

}  // namespace ri
