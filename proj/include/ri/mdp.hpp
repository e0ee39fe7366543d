#ifndef RI_MDP_HPP
#define RI_MDP_HPP

// Dynamic information-priced control on finite MDPs: finite-horizon soft
// Bellman backward induction with per-stage Gibbs policies and self-
// consistent action marginals, the stationary discounted variant, and a
// classical hard-min dynamic-programming oracle.

#include <cstddef>
#include <string>
#include <vector>

#include "ri/ba.hpp"
#include "ri/gibbs.hpp"
#include "ri/prob.hpp"

namespace ri {

struct FiniteMdp {
    std::size_t n_states = 0;
    std::size_t n_actions = 0;
    std::vector<double> transition;     // [s][a][s'] flattened; each (s,a) slice a simplex
    Mat stage_loss;                     // n_states x n_actions
    std::vector<double> terminal_loss;  // n_states
    Prior initial;
    double discount = 0.0;  // in (0,1) for the stationary variant

    FiniteMdp(std::size_t n_s, std::size_t n_a, std::vector<double> trans, Mat losses,
              std::vector<double> terminal, Prior init, double beta = 0.0);

    double p(std::size_t s, std::size_t a, std::size_t s2) const {
        return transition[(s * n_actions + a) * n_states + s2];
    }

    static FiniteMdp from_json(const std::string& text);
    std::string to_json() const;
};

struct SoftStage {
    Channel policy;           // states -> actions
    Marginal action_marginal;
    Prior state_marginal;
    std::vector<double> value;  // V_t per state
    Mat q_values;               // Q_t(s,a)
    double stage_info = 0.0;    // I(S_t; A_t)
};

struct SoftPlan {
    std::vector<SoftStage> stages;       // t = 0..T-1
    std::vector<double> terminal_value;  // V_T = terminal loss
    double expected_total_loss = 0.0;    // stages + terminal
    double total_information = 0.0;      // sum_t I(S_t; A_t)
    double total_objective = 0.0;        // loss + penalty * information
    bool converged = true;
    std::size_t outer_iterations = 0;
};

// Alternates backward stage solves (each a static information-priced problem
// at the current state marginal) with forward propagation of the state
// marginals, damped 0.5, until the marginals reach a joint fixed point.
SoftPlan soft_bellman_finite(const FiniteMdp& mdp, const PriceParam& price, std::size_t horizon,
                             double tol = 1e-10, std::size_t max_outer = 500);

struct StationarySolution {
    std::vector<double> value;
    Channel policy;
    Marginal action_marginal;
    Prior occupancy;  // long-run state law under the converged policy
    bool converged = true;
    std::size_t iterations = 0;
    double max_delta_ratio = 0.0;  // largest successive sup-norm delta ratio
};

// Discounted stationary variant: value iteration with the soft Bellman
// operator, the stage prior taken as the current policy's long-run occupancy
// from `initial`.
StationarySolution soft_value_iteration(const FiniteMdp& mdp, const PriceParam& price,
                                        double tol = 1e-10, std::size_t max_iter = 10000);

struct ClassicalPlan {
    std::vector<std::vector<double>> values;       // values[t][s], t = 0..T
    std::vector<std::vector<std::size_t>> greedy;  // greedy[t][s], t = 0..T-1
};

// Hard-min backward induction; ties break toward the lowest action index.
ClassicalPlan classical_dp_finite(const FiniteMdp& mdp, std::size_t horizon);

struct ClassicalStationary {
    std::vector<double> value;
    std::vector<std::size_t> greedy;
    std::size_t iterations = 0;
};

ClassicalStationary classical_value_iteration(const FiniteMdp& mdp, double tol = 1e-12,
                                              std::size_t max_iter = 100000);

}  // namespace ri

#endif  // RI_MDP_HPP
