#include "ri/gibbs.hpp"

#include <cmath>
#include <limits>

namespace ri {

std::pair<Channel, LogPartition> gibbs_update(const LossMatrix& loss, const Marginal& q,
                                              const PriceParam& price) {
    const std::size_t n_x = loss.n_states();
    const std::size_t n_y = loss.n_reports();
    if (q.size() != n_y) throw DimensionMismatch("gibbs_update: marginal/loss dimensions disagree");

    bool any_support = false;
    std::vector<double> logq(n_y, -std::numeric_limits<double>::infinity());
    for (std::size_t y = 0; y < n_y; ++y) {
        if (q[y] > 0.0) {
            logq[y] = std::log(q[y]);
            any_support = true;
        }
    }
    if (!any_support) throw EmptySupport("gibbs_update: marginal has empty support");

    const double lambda = price.lambda();
    Mat rows(n_x, n_y, 0.0);
    LogPartition logz;
    logz.values.resize(n_x);

    std::vector<double> w(n_y);
    for (std::size_t x = 0; x < n_x; ++x) {
        for (std::size_t y = 0; y < n_y; ++y) w[y] = logq[y] - lambda * loss(x, y);
        const double lz = log_sum_exp(w);
        logz.values[x] = lz;
        for (std::size_t y = 0; y < n_y; ++y)
            rows(x, y) = std::isfinite(w[y]) ? std::exp(w[y] - lz) : 0.0;
    }
    return {Channel(std::move(rows)), std::move(logz)};
}

std::pair<std::vector<double>, double> gibbs_row(const std::vector<double>& loss_row,
                                                 const std::vector<double>& q, double lambda) {
    if (loss_row.size() != q.size()) throw DimensionMismatch("gibbs_row: size mismatch");
    std::vector<double> w(q.size(), -std::numeric_limits<double>::infinity());
    bool any = false;
    for (std::size_t y = 0; y < q.size(); ++y) {
        if (q[y] > 0.0) {
            w[y] = std::log(q[y]) - lambda * loss_row[y];
            any = true;
        }
    }
    if (!any) throw EmptySupport("gibbs_row: weight vector has empty support");
    const double lz = log_sum_exp(w);
    std::vector<double> row(q.size(), 0.0);
    for (std::size_t y = 0; y < q.size(); ++y)
        if (std::isfinite(w[y])) row[y] = std::exp(w[y] - lz);
    return {std::move(row), lz};
}

double expected_loss(const Prior& prior, const LossMatrix& loss, const Channel& f) {
    if (prior.size() != loss.n_states() || f.n_states() != loss.n_states() ||
        f.n_reports() != loss.n_reports())
        throw DimensionMismatch("expected_loss: dimensions disagree");
    double acc = 0.0;
    for (std::size_t x = 0; x < loss.n_states(); ++x) {
        double px = prior[x];
        if (px == 0.0) continue;
        double row = 0.0;
        for (std::size_t y = 0; y < loss.n_reports(); ++y) row += f(x, y) * loss(x, y);
        acc += px * row;
    }
    return acc;
}

double objective(const Prior& prior, const LossMatrix& loss, const Channel& f,
                 const PriceParam& price) {
    return expected_loss(prior, loss, f) + price.penalty() * mutual_information(prior, f);
}

double optimal_value(const Prior& prior, const LogPartition& logz, const PriceParam& price) {
    if (prior.size() != logz.values.size())
        throw DimensionMismatch("optimal_value: prior/logZ dimensions disagree");
    double acc = 0.0;
    for (std::size_t x = 0; x < prior.size(); ++x)
        if (prior[x] > 0.0) acc += prior[x] * logz.values[x];
    return -price.penalty() * acc;
}

Prior entropic_tilt(const Prior& prior, const LogPartition& logz, const PriceParam& price) {
    if (prior.size() != logz.values.size())
        throw DimensionMismatch("entropic_tilt: prior/logZ dimensions disagree");
    const double inv_lambda = price.penalty();
    // log weights, max-shifted before exponentiation
    std::vector<double> lw(prior.size(), -std::numeric_limits<double>::infinity());
    for (std::size_t x = 0; x < prior.size(); ++x)
        if (prior[x] > 0.0) lw[x] = inv_lambda * logz.values[x] + std::log(prior[x]);
    const double lse = log_sum_exp(lw);
    std::vector<double> tilted(prior.size(), 0.0);
    for (std::size_t x = 0; x < prior.size(); ++x)
        if (std::isfinite(lw[x])) tilted[x] = std::exp(lw[x] - lse);
    return Prior(std::move(tilted));
}

}  // namespace ri
