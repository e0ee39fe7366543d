#include "ri/mdp.hpp"

#include <cmath>

#include <json.hpp>

namespace ri {

namespace {

// p' = p M under a fixed policy: M[s][s'] = sum_a pi(a|s) P(s'|s,a)
std::vector<double> step_state_law(const FiniteMdp& mdp, const std::vector<double>& p,
                                   const Channel& policy) {
    std::vector<double> next(mdp.n_states, 0.0);
    for (std::size_t s = 0; s < mdp.n_states; ++s) {
        if (p[s] == 0.0) continue;
        for (std::size_t a = 0; a < mdp.n_actions; ++a) {
            const double w = p[s] * policy(s, a);
            if (w == 0.0) continue;
            for (std::size_t s2 = 0; s2 < mdp.n_states; ++s2) next[s2] += w * mdp.p(s, a, s2);
        }
    }
    double sum = 0.0;
    for (double v : next) sum += v;
    for (double& v : next) v /= sum;
    return next;
}

Mat stage_q_values(const FiniteMdp& mdp, const std::vector<double>& v_next, double discount) {
    Mat q(mdp.n_states, mdp.n_actions);
    for (std::size_t s = 0; s < mdp.n_states; ++s)
        for (std::size_t a = 0; a < mdp.n_actions; ++a) {
            double ev = 0.0;
            for (std::size_t s2 = 0; s2 < mdp.n_states; ++s2)
                ev += mdp.p(s, a, s2) * v_next[s2];
            q(s, a) = mdp.stage_loss(s, a) + discount * ev;
        }
    return q;
}

// Stage solve at a given state marginal: the static fixed point plus the full
// Gibbs policy (rows defined for every state, including zero-mass ones) and
// the soft value V(s) = -log Z(s) / lambda.
struct StageSolve {
    Channel policy;
    Marginal action_marginal;
    std::vector<double> value;
};

StageSolve solve_stage(const Mat& q_values, const Prior& state_marginal, const PriceParam& price,
                       double tol) {
    BaOptions opts;
    opts.tol = tol;
    const LossMatrix stage_loss{Mat(q_values)};
    GibbsSolution sol = ba_solve(state_marginal, stage_loss, price, opts);
    auto [policy, logz] = gibbs_update(stage_loss, sol.marginal, price);
    std::vector<double> value(q_values.rows());
    for (std::size_t s = 0; s < q_values.rows(); ++s) value[s] = -price.penalty() * logz.values[s];
    return {std::move(policy), std::move(sol.marginal), std::move(value)};
}

}  // namespace

FiniteMdp::FiniteMdp(std::size_t n_s, std::size_t n_a, std::vector<double> trans, Mat losses,
                     std::vector<double> terminal, Prior init, double beta)
    : n_states(n_s),
      n_actions(n_a),
      transition(std::move(trans)),
      stage_loss(std::move(losses)),
      terminal_loss(std::move(terminal)),
      initial(std::move(init)),
      discount(beta) {
    if (n_states == 0 || n_actions == 0) throw Error("FiniteMdp: empty state or action space");
    if (transition.size() != n_states * n_actions * n_states)
        throw DimensionMismatch("FiniteMdp: transition size mismatch");
    if (stage_loss.rows() != n_states || stage_loss.cols() != n_actions)
        throw DimensionMismatch("FiniteMdp: stage loss size mismatch");
    if (terminal_loss.size() != n_states)
        throw DimensionMismatch("FiniteMdp: terminal loss size mismatch");
    if (initial.size() != n_states) throw DimensionMismatch("FiniteMdp: initial law size mismatch");
    for (double v : stage_loss.flat())
        if (!std::isfinite(v)) throw NonFiniteLoss("FiniteMdp: non-finite stage loss");
    for (double v : terminal_loss)
        if (!std::isfinite(v)) throw NonFiniteLoss("FiniteMdp: non-finite terminal loss");
    for (std::size_t s = 0; s < n_states; ++s)
        for (std::size_t a = 0; a < n_actions; ++a) {
            double sum = 0.0;
            for (std::size_t s2 = 0; s2 < n_states; ++s2) {
                const double v = p(s, a, s2);
                if (!(v >= 0.0) || !std::isfinite(v))
                    throw NonSimplexInput("FiniteMdp: bad transition probability");
                sum += v;
            }
            if (std::abs(sum - 1.0) > kSimplexTol)
                throw NonSimplexInput("FiniteMdp: transition row (" + std::to_string(s) + "," +
                                      std::to_string(a) + ") sums to " + std::to_string(sum));
        }
}

FiniteMdp FiniteMdp::from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    const std::size_t n_s = j.at("n_states").get<std::size_t>();
    const std::size_t n_a = j.at("n_actions").get<std::size_t>();
    auto trans = j.at("transition").get<std::vector<double>>();
    auto loss_flat = j.at("stage_loss").get<std::vector<double>>();
    auto terminal = j.at("terminal_loss").get<std::vector<double>>();
    auto init = j.at("initial").get<std::vector<double>>();
    const double beta = j.value("discount", 0.0);
    return FiniteMdp(n_s, n_a, std::move(trans), Mat(n_s, n_a, std::move(loss_flat)),
                     std::move(terminal), Prior(std::move(init)), beta);
}

std::string FiniteMdp::to_json() const {
    nlohmann::json j;
    j["n_states"] = n_states;
    j["n_actions"] = n_actions;
    j["transition"] = transition;
    j["stage_loss"] = stage_loss.flat();
    j["terminal_loss"] = terminal_loss;
    j["initial"] = initial.weights();
    j["discount"] = discount;
    return j.dump(2);
}

SoftPlan soft_bellman_finite(const FiniteMdp& mdp, const PriceParam& price, std::size_t horizon,
                             double tol, std::size_t max_outer) {
    if (horizon < 1) throw Error("soft_bellman_finite: horizon must be >= 1");
    const std::size_t T = horizon;

    // initial guess: uniform policies, state marginals propagated from them
    std::vector<Channel> policies(T, Channel::uniform(mdp.n_states, mdp.n_actions));
    std::vector<std::vector<double>> marginals(T);
    marginals[0] = mdp.initial.weights();
    for (std::size_t t = 1; t < T; ++t)
        marginals[t] = step_state_law(mdp, marginals[t - 1], policies[t - 1]);

    SoftPlan plan;
    plan.terminal_value = mdp.terminal_loss;
    std::vector<Marginal> action_marginals(T, Marginal::uniform(mdp.n_actions));
    std::vector<std::vector<double>> values(T);
    std::vector<Mat> q_tables(T);

    bool converged = false;
    std::size_t outer = 0;
    const double stage_tol = std::min(tol, 1e-11);
    while (outer < max_outer) {
        ++outer;
        // backward pass at the current state marginals
        std::vector<double> v_next = mdp.terminal_loss;
        for (std::size_t ti = 0; ti < T; ++ti) {
            const std::size_t t = T - 1 - ti;
            q_tables[t] = stage_q_values(mdp, v_next, 1.0);
            StageSolve stage = solve_stage(q_tables[t], Prior(marginals[t]), price, stage_tol);
            policies[t] = std::move(stage.policy);
            action_marginals[t] = std::move(stage.action_marginal);
            values[t] = std::move(stage.value);
            v_next = values[t];
        }
        // forward pass: refresh state marginals under the new policies
        double change = 0.0;
        std::vector<double> fwd = mdp.initial.weights();
        for (std::size_t t = 0; t < T; ++t) {
            if (t > 0) fwd = step_state_law(mdp, marginals[t - 1], policies[t - 1]);
            // damped update keeps the backward/forward alternation stable
            std::vector<double> mixed(mdp.n_states);
            double sum = 0.0;
            for (std::size_t s = 0; s < mdp.n_states; ++s) {
                mixed[s] = 0.5 * marginals[t][s] + 0.5 * fwd[s];
                sum += mixed[s];
            }
            for (double& v : mixed) v /= sum;
            change = std::max(change, sup_norm_diff(mixed, marginals[t]));
            marginals[t] = std::move(mixed);
        }
        if (change < tol) {
            converged = true;
            break;
        }
    }

    plan.converged = converged;
    plan.outer_iterations = outer;

    double total_loss = 0.0;
    double total_info = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
        const Prior state_law(marginals[t]);
        SoftStage stage{policies[t], action_marginals[t], state_law, values[t], q_tables[t], 0.0};
        stage.stage_info = mutual_information(state_law, policies[t]);
        total_info += stage.stage_info;
        for (std::size_t s = 0; s < mdp.n_states; ++s)
            for (std::size_t a = 0; a < mdp.n_actions; ++a)
                total_loss += marginals[t][s] * policies[t](s, a) * mdp.stage_loss(s, a);
        plan.stages.push_back(std::move(stage));
    }
    std::vector<double> final_law = step_state_law(mdp, marginals[T - 1], policies[T - 1]);
    for (std::size_t s = 0; s < mdp.n_states; ++s)
        total_loss += final_law[s] * mdp.terminal_loss[s];

    plan.expected_total_loss = total_loss;
    plan.total_information = total_info;
    plan.total_objective = total_loss + price.penalty() * total_info;
    return plan;
}

StationarySolution soft_value_iteration(const FiniteMdp& mdp, const PriceParam& price, double tol,
                                        std::size_t max_iter) {
    if (!(mdp.discount > 0.0 && mdp.discount < 1.0))
        throw Error("soft_value_iteration: discount must be in (0,1)");

    StationarySolution out{std::vector<double>(mdp.n_states, 0.0),
                           Channel::uniform(mdp.n_states, mdp.n_actions),
                           Marginal::uniform(mdp.n_actions), mdp.initial};

    auto occupancy_of = [&](const Channel& policy) {
        // damped power iteration from the initial law
        std::vector<double> p = mdp.initial.weights();
        for (std::size_t i = 0; i < 100000; ++i) {
            std::vector<double> next = step_state_law(mdp, p, policy);
            for (std::size_t s = 0; s < mdp.n_states; ++s) next[s] = 0.5 * p[s] + 0.5 * next[s];
            const double d = sup_norm_diff(next, p);
            p = std::move(next);
            if (d < 1e-12) break;
        }
        return Prior(p);
    };

    double prev_delta = -1.0;
    bool converged = false;
    std::size_t iter = 0;
    const double stage_tol = std::min(tol, 1e-11);
    while (iter < max_iter) {
        ++iter;
        out.occupancy = occupancy_of(out.policy);
        const Mat q = stage_q_values(mdp, out.value, mdp.discount);
        StageSolve stage = solve_stage(q, out.occupancy, price, stage_tol);
        const double delta = sup_norm_diff(stage.value, out.value);
        out.policy = std::move(stage.policy);
        out.action_marginal = std::move(stage.action_marginal);
        out.value = std::move(stage.value);
        if (prev_delta > 1e-12 && delta > 1e-14)
            out.max_delta_ratio = std::max(out.max_delta_ratio, delta / prev_delta);
        prev_delta = delta;
        if (delta < tol) {
            converged = true;
            break;
        }
    }
    out.converged = converged;
    out.iterations = iter;
    return out;
}

ClassicalPlan classical_dp_finite(const FiniteMdp& mdp, std::size_t horizon) {
    ClassicalPlan plan;
    plan.values.assign(horizon + 1, std::vector<double>(mdp.n_states, 0.0));
    plan.greedy.assign(horizon, std::vector<std::size_t>(mdp.n_states, 0));
    plan.values[horizon] = mdp.terminal_loss;
    for (std::size_t ti = 0; ti < horizon; ++ti) {
        const std::size_t t = horizon - 1 - ti;
        const Mat q = stage_q_values(mdp, plan.values[t + 1], 1.0);
        for (std::size_t s = 0; s < mdp.n_states; ++s) {
            double best = q(s, 0);
            std::size_t best_a = 0;
            for (std::size_t a = 1; a < mdp.n_actions; ++a)
                if (q(s, a) < best) {  // strict: ties keep the lowest index
                    best = q(s, a);
                    best_a = a;
                }
            plan.values[t][s] = best;
            plan.greedy[t][s] = best_a;
        }
    }
    return plan;
}

ClassicalStationary classical_value_iteration(const FiniteMdp& mdp, double tol,
                                              std::size_t max_iter) {
    if (!(mdp.discount > 0.0 && mdp.discount < 1.0))
        throw Error("classical_value_iteration: discount must be in (0,1)");
    ClassicalStationary out{std::vector<double>(mdp.n_states, 0.0),
                            std::vector<std::size_t>(mdp.n_states, 0)};
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        const Mat q = stage_q_values(mdp, out.value, mdp.discount);
        std::vector<double> next(mdp.n_states);
        for (std::size_t s = 0; s < mdp.n_states; ++s) {
            double best = q(s, 0);
            std::size_t best_a = 0;
            for (std::size_t a = 1; a < mdp.n_actions; ++a)
                if (q(s, a) < best) {
                    best = q(s, a);
                    best_a = a;
                }
            next[s] = best;
            out.greedy[s] = best_a;
        }
        const double d = sup_norm_diff(next, out.value);
        out.value = std::move(next);
        out.iterations = iter + 1;
        if (d < tol) break;
    }
    return out;
}

}  // namespace ri
