#include "ri/choice.hpp"

#include <cmath>

#include "ri/rng.hpp"

namespace ri {

std::vector<double> softmax_channel(const std::vector<double>& u, const PriceParam& price) {
    if (u.empty()) throw Error("softmax_channel: empty utility vector");
    for (double v : u)
        if (!std::isfinite(v)) throw NonFiniteLoss("softmax_channel: non-finite utility");
    const double lambda = price.lambda();
    std::vector<double> w(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) w[k] = lambda * u[k];
    const double lz = log_sum_exp(w);
    std::vector<double> p(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) p[k] = std::exp(w[k] - lz);
    return p;
}

double curvature(const std::vector<double>& u, const PriceParam& price) {
    const std::vector<double> p = softmax_channel(u, price);
    double mean = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) mean += p[k] * u[k];
    double var = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) var += p[k] * (u[k] - mean) * (u[k] - mean);
    const double h = price.lambda() * var;
    return h < 0.0 ? 0.0 : h;
}

double tri_choice_curvature(double theta, const PriceParam& price) {
    const std::vector<double> p = softmax_channel({theta, 0.0, -theta}, price);
    const double t2 = theta * theta;
    const double diff = p[0] - p[2];
    const double var = t2 * (p[0] + p[2]) - t2 * diff * diff;
    const double h = price.lambda() * var;
    return h < 0.0 ? 0.0 : h;
}

double mnl_fisher_info(double theta, const PriceParam& price) {
    const double lambda = price.lambda();
    const std::vector<double> p = softmax_channel({theta, 0.0, -theta}, price);
    // du/dtheta = (1, 0, -1); dp_k/dtheta = lambda p_k (du_k - sum_j p_j du_j)
    const double mean_du = p[0] - p[2];
    const double du[3] = {1.0, 0.0, -1.0};
    double info = 0.0;
    for (int k = 0; k < 3; ++k) {
        const double dpk = lambda * p[k] * (du[k] - mean_du);
        if (p[k] > 0.0) info += dpk * dpk / p[k];
    }
    return info;
}

std::vector<CurvatureTableRow> mc_curvature(std::size_t n_alternatives,
                                            const std::vector<double>& lambda_grid, std::size_t b,
                                            std::uint64_t seed) {
    if (n_alternatives < 2) throw Error("mc_curvature: need at least two alternatives");
    if (b < 2) throw Error("mc_curvature: need at least two replicates");

    // one substream per replicate so draws are common across lambdas
    std::vector<std::vector<double>> draws(b, std::vector<double>(n_alternatives));
    for (std::size_t rep = 0; rep < b; ++rep) {
        SeedStream stream(seed, rep);
        for (std::size_t k = 0; k < n_alternatives; ++k) draws[rep][k] = stream.next_gaussian();
    }

    std::vector<CurvatureTableRow> rows;
    rows.reserve(lambda_grid.size());
    for (double lambda : lambda_grid) {
        const PriceParam price(lambda);
        double sum = 0.0, sum_sq = 0.0;
        for (std::size_t rep = 0; rep < b; ++rep) {
            const double h = curvature(draws[rep], price);
            sum += h;
            sum_sq += h * h;
        }
        CurvatureTableRow row;
        row.lambda = lambda;
        row.mean_h = sum / double(b);
        const double var = (sum_sq - double(b) * row.mean_h * row.mean_h) / double(b - 1);
        row.sd_h = std::sqrt(var > 0.0 ? var : 0.0);
        row.se_h = row.sd_h / std::sqrt(double(b));
        row.ci_low = row.mean_h - 1.96 * row.se_h;
        row.ci_high = row.mean_h + 1.96 * row.se_h;
        rows.push_back(row);
    }
    return rows;
}

std::vector<ConsiderationPoint> consideration_sweep(const Prior& prior,
                                                    const Mat& utilities_by_state,
                                                    const std::vector<double>& lambda_grid,
                                                    double eps, const BaOptions& opts) {
    for (std::size_t i = 1; i < lambda_grid.size(); ++i)
        if (lambda_grid[i] <= lambda_grid[i - 1])
            throw Error("consideration_sweep: grid must be strictly increasing");
    const LossMatrix loss = LossMatrix::from_utilities(utilities_by_state);
    const std::size_t n_y = loss.n_reports();

    std::vector<ConsiderationPoint> points;
    points.reserve(lambda_grid.size());
    for (double lambda : lambda_grid) {
        GibbsSolution sol = ba_solve(prior, loss, PriceParam(lambda), opts);
        ConsiderationPoint pt;
        pt.lambda = lambda;
        pt.support = support_set(sol.marginal, eps);
        pt.mutual_info = sol.mutual_info;
        for (std::size_t x = 0; x < sol.channel.n_states(); ++x)
            for (std::size_t y = 0; y < n_y; ++y)
                pt.max_channel_entry = std::max(pt.max_channel_entry, sol.channel(x, y));
        if (pt.max_channel_entry > 0.99)
            pt.regime = "near-deterministic";
        else if (pt.support.size() < n_y)
            pt.regime = "sparse";
        else
            pt.regime = "full-support";
        points.push_back(std::move(pt));
    }
    return points;
}

}  // namespace ri
