#include "ri/selftest.hpp"

#include <cmath>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "ri/ba.hpp"
#include "ri/choice.hpp"
#include "ri/prob.hpp"
#include "ri/rng.hpp"
#include "ri/sba.hpp"

namespace ri {

namespace {

std::vector<double> random_simplex(SeedStream& s, std::size_t n) {
    std::vector<double> w(n);
    double sum = 0.0;
    for (double& v : w) {
        v = -std::log(s.next_double_pos());
        sum += v;
    }
    for (double& v : w) v /= sum;
    return w;
}

Mat random_stochastic(SeedStream& s, std::size_t rows, std::size_t cols) {
    Mat m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        const std::vector<double> row = random_simplex(s, cols);
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = row[c];
    }
    return m;
}

bool check_softmax_translation() {
    SeedStream s(11, 0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> u(5);
        for (double& v : u) v = 2.0 * s.next_gaussian();
        const double shift = 3.0 * s.next_gaussian();
        std::vector<double> u_shift = u;
        for (double& v : u_shift) v += shift;
        const PriceParam price(0.2 + 3.0 * s.next_double());
        const auto p0 = softmax_channel(u, price);
        const auto p1 = softmax_channel(u_shift, price);
        for (std::size_t k = 0; k < u.size(); ++k)
            if (std::abs(p0[k] - p1[k]) > 1e-12) return false;
    }
    return true;
}

bool check_curvature_fd() {
    SeedStream s(12, 0);
    const double h = 1e-4;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> u(5);
        for (double& v : u) v = s.next_gaussian();
        const double lambda = 0.3 + 2.0 * s.next_double();
        auto log_partition = [&](double lam) {
            std::vector<double> w(u.size());
            for (std::size_t k = 0; k < u.size(); ++k) w[k] = lam * u[k];
            return log_sum_exp(w);
        };
        const double second =
            (log_partition(lambda + h) - 2.0 * log_partition(lambda) + log_partition(lambda - h)) /
            (h * h);
        const double expected = lambda * second;
        if (std::abs(curvature(u, PriceParam(lambda)) - expected) > 1e-5) return false;
    }
    return true;
}

bool check_fisher_fd() {
    SeedStream s(13, 0);
    const double h = 1e-5;
    for (int trial = 0; trial < 50; ++trial) {
        const double theta = -2.0 + 4.0 * s.next_double();
        const double lambda = 0.3 + 2.0 * s.next_double();
        const PriceParam price(lambda);
        const auto p_minus = softmax_channel({theta - h, 0.0, -(theta - h)}, price);
        const auto p_plus = softmax_channel({theta + h, 0.0, -(theta + h)}, price);
        const auto p = softmax_channel({theta, 0.0, -theta}, price);
        double fd_info = 0.0;
        for (int k = 0; k < 3; ++k) {
            const double dp = (p_plus[k] - p_minus[k]) / (2.0 * h);
            fd_info += dp * dp / p[k];
        }
        const double analytic = mnl_fisher_info(theta, price);
        const double rel = std::abs(analytic - fd_info) / std::max(1e-12, std::abs(fd_info));
        if (rel > 1e-6) return false;
    }
    return true;
}

bool check_pinsker() {
    SeedStream s(14, 0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + (s.next_u64() % 6);
        const auto p = random_simplex(s, n);
        const auto q = random_simplex(s, n);
        double l1 = 0.0;
        for (std::size_t i = 0; i < n; ++i) l1 += std::abs(p[i] - q[i]);
        if (kl(p, q) < 0.5 * l1 * l1 - 1e-12) return false;
    }
    return true;
}

bool check_data_processing() {
    SeedStream s(15, 0);
    for (int trial = 0; trial < 200; ++trial) {
        const Prior prior(random_simplex(s, 4));
        const Channel f(random_stochastic(s, 4, 4));
        const Channel g(random_stochastic(s, 4, 4));
        const double direct = mutual_information(prior, f);
        const double processed = mutual_information(prior, f.then(g));
        if (processed > direct + 1e-10) return false;
    }
    return true;
}

bool check_refinement_identity() {
    SeedStream s(16, 0);
    for (int trial = 0; trial < 100; ++trial) {
        const Prior prior(random_simplex(s, 3));
        const Channel f(random_stochastic(s, 3, 3));
        if (std::abs(refinement_gain(prior, f) - mutual_information(prior, f)) > 1e-10)
            return false;
    }
    return true;
}

bool check_seed_determinism() {
    const Prior prior({0.3, 0.45, 0.25});
    const LossMatrix loss(Mat(3, 3, {0.2, 1.1, 0.7, 0.9, 0.1, 1.3, 0.6, 0.8, 0.05}));
    const PriceParam price(2.0);
    SbaOptions opts;
    opts.log_stride = 50;
    const auto run1 = sba_run(prior, loss, price, StepSchedule(1.0, 10.0),
                              NoiseModel::gaussian(0.3), 777, 2000, opts);
    const auto run2 = sba_run(prior, loss, price, StepSchedule(1.0, 10.0),
                              NoiseModel::gaussian(0.3), 777, 2000, opts);
    if (run1.records.size() != run2.records.size()) return false;
    for (std::size_t i = 0; i < run1.records.size(); ++i)
        if (run1.records[i].sampled_state != run2.records[i].sampled_state) return false;
    for (std::size_t y = 0; y < 3; ++y)
        if (run1.final_marginal[y] != run2.final_marginal[y]) return false;

    const std::vector<double> grid{0.5, 1.0, 1.5};
    const auto t1 = mc_curvature(4, grid, 64, 99);
    const auto t2 = mc_curvature(4, grid, 64, 99);
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (t1[i].mean_h != t2[i].mean_h || t1[i].sd_h != t2[i].sd_h) return false;
    return true;
}

}  // namespace

int run_selftest(std::ostream& out) {
    const std::vector<std::pair<std::string, std::function<bool()>>> checks = {
        {"softmax translation invariance", check_softmax_translation},
        {"curvature log-partition second derivative", check_curvature_fd},
        {"fisher information finite differences", check_fisher_fd},
        {"pinsker inequality", check_pinsker},
        {"data processing inequality", check_data_processing},
        {"refinement gain equals mutual information", check_refinement_identity},
        {"seed determinism", check_seed_determinism},
    };
    int failures = 0;
    for (const auto& [name, fn] : checks) {
        bool ok = false;
        try {
            ok = fn();
        } catch (const std::exception& e) {
            out << "[FAIL] " << name << " (exception: " << e.what() << ")\n";
            ++failures;
            continue;
        }
        out << (ok ? "[ ok ] " : "[FAIL] ") << name << "\n";
        if (!ok) ++failures;
    }
    return failures;
}

}  // namespace ri
