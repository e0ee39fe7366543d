#ifndef RI_TESTS_ORACLES_HPP
#define RI_TESTS_ORACLES_HPP

// Test-side oracles, kept independent of the library code paths they check.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <vector>

#include "ri/mdp.hpp"
#include "ri/prob.hpp"
#include "ri/rng.hpp"

namespace oracles {

// Binary entropy in nats.
inline double binary_entropy(double d) {
    if (d <= 0.0 || d >= 1.0) return 0.0;
    return -d * std::log(d) - (1.0 - d) * std::log(1.0 - d);
}

// Shannon's binary-Hamming rate-distortion function, nats.
inline double hamming_rate(double d) {
    if (d >= 0.5) return 0.0;
    return std::log(2.0) - binary_entropy(d);
}

inline double nats_to_bits(double x) { return x / std::log(2.0); }

inline std::vector<double> random_simplex(ri::SeedStream& s, std::size_t n, double floor = 0.0) {
    std::vector<double> w(n);
    double sum = 0.0;
    for (double& v : w) {
        v = floor - std::log(s.next_double_pos());
        sum += v;
    }
    for (double& v : w) v /= sum;
    return w;
}

inline ri::Mat random_loss(ri::SeedStream& s, std::size_t rows, std::size_t cols) {
    ri::Mat m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = s.next_double();
    return m;
}

inline ri::Mat random_stochastic(ri::SeedStream& s, std::size_t rows, std::size_t cols) {
    ri::Mat m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        const auto row = random_simplex(s, cols);
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = row[c];
    }
    return m;
}

// Monte Carlo risk of the linear rule a = s X with X ~ N(theta, I_p).
struct McRisk {
    double value;
    double se;
};

inline McRisk shrinkage_risk_mc(double s, const Eigen::VectorXd& theta, std::size_t n_rep,
                                std::uint64_t seed) {
    ri::SeedStream stream(seed, 0);
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t rep = 0; rep < n_rep; ++rep) {
        double err = 0.0;
        for (Eigen::Index i = 0; i < theta.size(); ++i) {
            const double x = theta[i] + stream.next_gaussian();
            const double d = s * x - theta[i];
            err += d * d;
        }
        sum += err;
        sum_sq += err * err;
    }
    const double mean = sum / double(n_rep);
    const double var = (sum_sq - double(n_rep) * mean * mean) / double(n_rep - 1);
    return {mean, std::sqrt((var > 0.0 ? var : 0.0) / double(n_rep))};
}

// Exhaustive 1-D maximizer over a dense grid with local refinement; used
// against the closed-form scalar attention solution.
template <typename F>
double grid_refine_max(F f, double lo, double hi, int n_coarse = 2000, int n_refine = 4000) {
    double best_x = lo, best_v = f(lo);
    for (int i = 0; i <= n_coarse; ++i) {
        const double x = lo + (hi - lo) * double(i) / double(n_coarse);
        const double v = f(x);
        if (v > best_v) {
            best_v = v;
            best_x = x;
        }
    }
    const double span = (hi - lo) / double(n_coarse);
    const double a = std::max(lo, best_x - span);
    const double b = std::min(hi, best_x + span);
    for (int i = 0; i <= n_refine; ++i) {
        const double x = a + (b - a) * double(i) / double(n_refine);
        const double v = f(x);
        if (v > best_v) {
            best_v = v;
            best_x = x;
        }
    }
    return best_x;
}

// Fixed 3-state/2-action mixing MDP used across the dynamic tests; every
// action reaches every state so occupancies stay interior.
inline ri::FiniteMdp mixing_mdp() {
    const std::vector<double> transition = {
        // s0
        0.6, 0.3, 0.1, 0.2, 0.5, 0.3,
        // s1
        0.3, 0.4, 0.3, 0.1, 0.3, 0.6,
        // s2
        0.5, 0.25, 0.25, 0.25, 0.25, 0.5};
    const ri::Mat stage_loss(3, 2, {1.0, 0.3, 0.2, 0.8, 0.6, 0.4});
    return ri::FiniteMdp(3, 2, transition, stage_loss, {0.5, 0.0, 1.0},
                         ri::Prior({0.4, 0.35, 0.25}), 0.9);
}

// The paper-style sparse mean padded to dimension p.
inline Eigen::VectorXd sparse_theta(std::size_t p) {
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(Eigen::Index(p));
    if (p >= 1) theta[0] = 1.0;
    if (p >= 2) theta[1] = 0.5;
    if (p >= 3) theta[2] = 0.25;
    return theta;
}

}  // namespace oracles

#endif  // RI_TESTS_ORACLES_HPP
