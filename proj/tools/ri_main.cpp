// Experiment runner: named subcommands that load JSON configs, run the
// solver modules with fixed seeds, and emit CSV/JSON artifacts.
//
// Exit codes: 0 success, 1 solver-flagged non-convergence, 2 config errors.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ri/ba.hpp"
#include "ri/choice.hpp"
#include "ri/gaussian.hpp"
#include "ri/io.hpp"
#include "ri/mdp.hpp"
#include "ri/prob.hpp"
#include "ri/sba.hpp"
#include "ri/selftest.hpp"

namespace {

using nlohmann::json;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// "a:b:step" (inclusive) or a comma-separated list
std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> grid;
    if (text.find(':') != std::string::npos) {
        double start, stop, step;
        char c1, c2;
        std::istringstream ss(text);
        if (!(ss >> start >> c1 >> stop >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0.0)
            throw ConfigError("bad grid spec '" + text + "' (want start:stop:step)");
        for (double v = start; v <= stop + 1e-12 * step; v += step) grid.push_back(v);
    } else {
        std::istringstream ss(text);
        std::string cell;
        while (std::getline(ss, cell, ',')) grid.push_back(std::stod(cell));
    }
    if (grid.empty()) throw ConfigError("empty grid '" + text + "'");
    return grid;
}

std::vector<double> parse_list(const std::string& text) { return parse_grid(text); }

struct ProblemSpec {
    ri::Prior prior;
    ri::LossMatrix loss;
};

ProblemSpec load_problem(const std::string& problem_path, const std::string& preset) {
    if (!preset.empty()) {
        if (preset == "binary-hamming") {
            return {ri::Prior({0.5, 0.5}), ri::LossMatrix(ri::Mat(2, 2, {0.0, 1.0, 1.0, 0.0}))};
        }
        throw ConfigError("unknown preset '" + preset + "'");
    }
    if (problem_path.empty()) throw ConfigError("need --problem or --preset");
    const json j = json::parse(read_file(problem_path));
    if (!j.contains("prior") || !j.contains("loss"))
        throw ConfigError(problem_path + ": need fields 'prior' and 'loss'");
    auto prior = j.at("prior").get<std::vector<double>>();
    const auto& rows = j.at("loss");
    if (!rows.is_array() || rows.empty()) throw ConfigError(problem_path + ": 'loss' must be rows");
    const std::size_t n_x = rows.size();
    const std::size_t n_y = rows.at(0).size();
    ri::Mat loss(n_x, n_y);
    for (std::size_t x = 0; x < n_x; ++x) {
        auto row = rows.at(x).get<std::vector<double>>();
        if (row.size() != n_y) throw ConfigError(problem_path + ": ragged 'loss' rows");
        for (std::size_t y = 0; y < n_y; ++y) loss(x, y) = row[y];
    }
    return {ri::Prior(std::move(prior)), ri::LossMatrix(std::move(loss))};
}

// lambda / price exclusivity, resolved to lambda
double resolve_lambda(double lambda, double price) {
    const bool has_lambda = lambda > 0.0;
    const bool has_price = price > 0.0;
    if (has_lambda == has_price) throw ConfigError("specify exactly one of --lambda / --price");
    return has_lambda ? lambda : 1.0 / price;
}

std::string out_path(const std::string& outdir, const std::string& out,
                     const std::string& fallback) {
    std::string dir = outdir;
    if (dir.empty()) {
        if (const char* env = std::getenv("RI_OUTDIR")) dir = env;
    }
    std::string name = out.empty() ? fallback : out;
    if (name.find('/') != std::string::npos || dir.empty()) return name;
    return dir + "/" + name;
}

json solution_to_json(const ri::GibbsSolution& sol) {
    json j;
    j["lambda"] = sol.lambda;
    j["expected_loss"] = sol.expected_loss;
    j["mutual_info_nats"] = sol.mutual_info;
    j["objective_value"] = sol.objective_value;
    j["iterations"] = sol.iterations;
    j["residual"] = sol.residual;
    j["converged"] = sol.converged;
    j["monotone_ok"] = sol.monotone_ok;
    j["dropped_zero_states"] = sol.dropped_zero_states;
    std::vector<std::vector<double>> rows;
    for (std::size_t x = 0; x < sol.channel.n_states(); ++x) rows.push_back(sol.channel.row(x));
    j["channel"] = rows;
    j["marginal"] = sol.marginal.weights();
    j["log_partition"] = sol.logz.values;
    return j;
}

void print_summary(const ri::GibbsSolution& sol, bool bits) {
    const double conv = bits ? 1.0 / std::log(2.0) : 1.0;
    std::cout << "objective=" << ri::fmt17(sol.objective_value)
              << " I=" << ri::fmt17(sol.mutual_info * conv) << (bits ? " bits" : " nats")
              << " E[loss]=" << ri::fmt17(sol.expected_loss) << " iterations=" << sol.iterations
              << (sol.converged ? "" : " [not converged]") << "\n";
}

template <typename T>
void override_from(const json& cfg, const char* key, T& var) {
    if (cfg.contains(key)) var = cfg.at(key).get<T>();
}

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    return json::parse(read_file(path));
}

// ---------------------------------------------------------------- solve ---

int cmd_solve(const std::string& config, std::string problem, std::string preset, double lambda,
              double price, double tol, std::size_t max_iter, std::string out, std::string outdir,
              bool bits) {
    const json cfg = load_config(config);
    override_from(cfg, "problem", problem);
    override_from(cfg, "preset", preset);
    override_from(cfg, "lambda", lambda);
    override_from(cfg, "price", price);
    override_from(cfg, "tol", tol);
    override_from(cfg, "max_iter", max_iter);
    override_from(cfg, "out", out);

    const ProblemSpec p = load_problem(problem, preset);
    ri::BaOptions opts;
    opts.tol = tol;
    opts.max_iter = max_iter;
    const ri::GibbsSolution sol =
        ri::ba_solve(p.prior, p.loss, ri::PriceParam(resolve_lambda(lambda, price)), opts);

    ri::atomic_write(out_path(outdir, out, "solution.json"), solution_to_json(sol).dump(2) + "\n");
    print_summary(sol, bits);
    return sol.converged ? 0 : 1;
}

// ------------------------------------------------------------- capacity ---

int cmd_capacity(const std::string& config, std::string problem, std::string preset, double kappa,
                 double tol_kappa, double tol_fp, std::string out, std::string outdir, bool bits) {
    const json cfg = load_config(config);
    override_from(cfg, "problem", problem);
    override_from(cfg, "preset", preset);
    override_from(cfg, "kappa", kappa);
    override_from(cfg, "tol_kappa", tol_kappa);
    override_from(cfg, "tol_fp", tol_fp);
    override_from(cfg, "out", out);
    if (kappa < 0.0) throw ConfigError("need --kappa >= 0");

    const ProblemSpec p = load_problem(problem, preset);
    const ri::CapacitySolution cap = ri::solve_capacity(p.prior, p.loss, kappa, tol_kappa, tol_fp);

    json j;
    j["kappa_requested"] = kappa;
    j["kink"] = cap.kink;
    j["grid_fallback"] = cap.grid_fallback;
    j["bracket_saturated"] = cap.bracket_saturated;
    j["mix_weight"] = cap.mix_weight;
    j["mixed_mutual_info_nats"] = cap.mixed_mutual_info();
    j["mixed_expected_loss"] = cap.mixed_expected_loss();
    j["solution"] = solution_to_json(cap.low);
    if (cap.high) j["solution_high"] = solution_to_json(*cap.high);
    ri::atomic_write(out_path(outdir, out, "capacity.json"), j.dump(2) + "\n");
    print_summary(cap.low, bits);
    const bool clean = cap.low.converged && !cap.grid_fallback && !cap.bracket_saturated;
    return clean ? 0 : 1;
}

// ------------------------------------------------------------- frontier ---

int cmd_frontier(const std::string& config, std::string problem, std::string preset,
                 std::string grid, double tol, std::string out, std::string outdir, bool bits) {
    const json cfg = load_config(config);
    override_from(cfg, "problem", problem);
    override_from(cfg, "preset", preset);
    override_from(cfg, "grid", grid);
    override_from(cfg, "tol", tol);
    override_from(cfg, "out", out);
    if (grid.empty()) throw ConfigError("need --grid");

    const ProblemSpec p = load_problem(problem, preset);
    ri::BaOptions opts;
    opts.tol = tol;
    const ri::FrontierTrace trace = ri::trace_frontier(p.prior, p.loss, parse_grid(grid), opts);

    ri::CsvBuilder csv({"lambda", "kappa_nats", "expected_loss"});
    for (const auto& pt : trace.points)
        csv.add_row({ri::fmt17(pt.lambda), ri::fmt17(pt.kappa), ri::fmt17(pt.expected_loss)});
    ri::atomic_write(out_path(outdir, out, "frontier.csv"), csv.str());

    const double conv = bits ? 1.0 / std::log(2.0) : 1.0;
    std::cout << "points=" << trace.points.size()
              << " kappa_max=" << ri::fmt17(trace.points.back().kappa * conv)
              << (bits ? " bits" : " nats") << " loss_monotone=" << trace.loss_monotone
              << " min_second_difference=" << ri::fmt17(trace.min_second_difference) << "\n";
    return trace.loss_monotone && trace.min_second_difference >= -1e-6 ? 0 : 1;
}

// ------------------------------------------------------------------ sba ---

int cmd_sba(const std::string& config, std::string problem, std::string preset, double lambda,
            double price, std::int64_t seed, std::size_t steps, double a, double b, double sigma,
            std::size_t stride, std::size_t batch, std::string out, std::string outdir) {
    const json cfg = load_config(config);
    override_from(cfg, "problem", problem);
    override_from(cfg, "preset", preset);
    override_from(cfg, "lambda", lambda);
    override_from(cfg, "price", price);
    override_from(cfg, "seed", seed);
    override_from(cfg, "steps", steps);
    override_from(cfg, "a", a);
    override_from(cfg, "b", b);
    override_from(cfg, "sigma", sigma);
    override_from(cfg, "stride", stride);
    override_from(cfg, "batch", batch);
    override_from(cfg, "out", out);
    if (seed < 0) throw ConfigError("stochastic runs need --seed");

    const ProblemSpec p = load_problem(problem, preset);
    const ri::PriceParam pp(resolve_lambda(lambda, price));
    const ri::GibbsSolution ref = ri::ba_solve(p.prior, p.loss, pp, {1e-12, 100000, std::nullopt});

    ri::SbaOptions opts;
    opts.log_stride = stride;
    opts.batch_size = batch;
    opts.reference = ref.marginal.weights();
    const ri::NoiseModel noise =
        sigma > 0.0 ? ri::NoiseModel::gaussian(sigma) : ri::NoiseModel::none();
    const ri::SbaTrajectory traj = ri::sba_run(p.prior, p.loss, pp, ri::StepSchedule(a, b), noise,
                                               std::uint64_t(seed), steps, opts);

    ri::CsvBuilder csv({"t", "eta_t", "kl_to_ref", "sampled_state"});
    for (const auto& rec : traj.records)
        csv.add_row({std::to_string(rec.t), ri::fmt17(rec.eta), ri::fmt17(rec.kl_to_ref),
                     std::to_string(rec.sampled_state)});
    ri::atomic_write(out_path(outdir, out, "sba.csv"), csv.str());

    std::cout << "final_kl="
              << ri::fmt17(traj.records.empty() ? 0.0 : traj.records.back().kl_to_ref)
              << " clamp_events=" << traj.clamp_events
              << " reference_I=" << ri::fmt17(ref.mutual_info) << " steps=" << steps << "\n";
    return 0;
}

// --------------------------------------------------------------- mnl-mc ---

int cmd_mnl_mc(const std::string& config, std::size_t k, std::size_t b, std::int64_t seed,
               std::string grid, std::string out, std::string outdir) {
    const json cfg = load_config(config);
    override_from(cfg, "k", k);
    override_from(cfg, "b", b);
    override_from(cfg, "seed", seed);
    override_from(cfg, "grid", grid);
    override_from(cfg, "out", out);
    if (seed < 0) throw ConfigError("stochastic runs need --seed");
    if (grid.empty()) throw ConfigError("need --grid");

    const auto rows = ri::mc_curvature(k, parse_grid(grid), b, std::uint64_t(seed));
    ri::CsvBuilder csv({"lambda", "mean", "sd", "se", "ci_low", "ci_high"});
    for (const auto& r : rows)
        csv.add_row({ri::fmt17(r.lambda), ri::fmt17(r.mean_h), ri::fmt17(r.sd_h), ri::fmt17(r.se_h),
                     ri::fmt17(r.ci_low), ri::fmt17(r.ci_high)});
    ri::atomic_write(out_path(outdir, out, "mnl_mc.csv"), csv.str());

    std::size_t argmax = 0;
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].mean_h > rows[argmax].mean_h) argmax = i;
    std::cout << "rows=" << rows.size() << " peak_lambda=" << ri::fmt17(rows[argmax].lambda)
              << " peak_mean=" << ri::fmt17(rows[argmax].mean_h) << "\n";
    return 0;
}

// ------------------------------------------------------------ tri-choice ---

int cmd_tri_choice(const std::string& config, double lambda, double price, std::string theta_grid,
                   std::string out, std::string outdir) {
    const json cfg = load_config(config);
    override_from(cfg, "lambda", lambda);
    override_from(cfg, "price", price);
    override_from(cfg, "theta_grid", theta_grid);
    override_from(cfg, "out", out);
    if (theta_grid.empty()) throw ConfigError("need --theta-grid");

    const ri::PriceParam pp(resolve_lambda(lambda, price));
    ri::CsvBuilder csv({"theta", "curvature", "fisher_info"});
    for (double theta : parse_grid(theta_grid))
        csv.add_row({ri::fmt17(theta), ri::fmt17(ri::tri_choice_curvature(theta, pp)),
                     ri::fmt17(ri::mnl_fisher_info(theta, pp))});
    ri::atomic_write(out_path(outdir, out, "tri_choice.csv"), csv.str());
    std::cout << "lambda=" << ri::fmt17(pp.lambda()) << " rows emitted\n";
    return 0;
}

// ---------------------------------------------------------------- stein ---

Eigen::VectorXd theta_from_spec(const std::string& text, std::size_t p) {
    // "sparse" gives the (1, 0.5, 0.25, 0, ...) head; otherwise comma list
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(Eigen::Index(p));
    if (text == "sparse") {
        if (p >= 1) theta[0] = 1.0;
        if (p >= 2) theta[1] = 0.5;
        if (p >= 3) theta[2] = 0.25;
        return theta;
    }
    const auto values = parse_list(text);
    if (values.size() != p) throw ConfigError("theta list length does not match --p");
    for (std::size_t i = 0; i < p; ++i) theta[Eigen::Index(i)] = values[i];
    return theta;
}

int cmd_stein(const std::string& config, std::size_t p, std::string theta_spec, double tau2,
              std::string grid, std::string out, std::string outdir) {
    const json cfg = load_config(config);
    override_from(cfg, "p", p);
    override_from(cfg, "theta", theta_spec);
    override_from(cfg, "tau2", tau2);
    override_from(cfg, "grid", grid);
    override_from(cfg, "out", out);
    if (grid.empty()) throw ConfigError("need --grid");

    const Eigen::VectorXd theta = theta_from_spec(theta_spec, p);
    ri::CsvBuilder csv({"lambda", "risk"});
    for (double lambda : parse_grid(grid))
        csv.add_row(
            {ri::fmt17(lambda), ri::fmt17(ri::stein_risk(ri::PriceParam(lambda), theta, tau2))});
    ri::atomic_write(out_path(outdir, out, "stein_risk.csv"), csv.str());
    std::cout << "p=" << p << " tau2=" << ri::fmt17(tau2) << " rows emitted\n";
    return 0;
}

int cmd_stein_highdim(const std::string& config, std::string p_list, std::string theta_spec,
                      double tau2, std::size_t n_rep, std::int64_t seed, std::string out,
                      std::string outdir) {
    const json cfg = load_config(config);
    override_from(cfg, "p_list", p_list);
    override_from(cfg, "theta", theta_spec);
    override_from(cfg, "tau2", tau2);
    override_from(cfg, "n_rep", n_rep);
    override_from(cfg, "seed", seed);
    override_from(cfg, "out", out);
    if (seed < 0) throw ConfigError("stochastic runs need --seed");

    // coarse log-spaced grid, refined by golden section inside stein_lambda_star
    std::vector<double> lambda_grid;
    for (int i = 0; i < 40; ++i)
        lambda_grid.push_back(std::pow(10.0, -3.0 + 6.0 * double(i) / 39.0));

    ri::CsvBuilder csv({"p", "lambda_star", "risk_bpri", "risk_js", "risk_mle"});
    for (double pv : parse_list(p_list)) {
        const std::size_t p = std::size_t(pv);
        const Eigen::VectorXd theta = theta_from_spec(theta_spec, p);
        const ri::SteinOptimum opt = ri::stein_lambda_star(theta, tau2, lambda_grid);
        const ri::McEstimate js =
            ri::js_positive_part_risk_mc(theta, n_rep, std::uint64_t(seed) + p);
        csv.add_row({std::to_string(p), ri::fmt17(opt.lambda_star), ri::fmt17(opt.risk),
                     ri::fmt17(js.value), ri::fmt17(double(p))});
    }
    ri::atomic_write(out_path(outdir, out, "stein_highdim.csv"), csv.str());
    std::cout << "dimensions=" << parse_list(p_list).size() << " n_rep=" << n_rep << "\n";
    return 0;
}

// ------------------------------------------------------------------ lqg ---

int cmd_lqg(const std::string& config, double sigma_x2, double q_weight, double lambda,
            double price, double gamma, double a_coef, std::string out, std::string outdir) {
    const json cfg = load_config(config);
    override_from(cfg, "sigma_x2", sigma_x2);
    override_from(cfg, "q", q_weight);
    override_from(cfg, "lambda", lambda);
    override_from(cfg, "price", price);
    override_from(cfg, "gamma", gamma);
    override_from(cfg, "a", a_coef);
    override_from(cfg, "out", out);

    const ri::PriceParam pp(resolve_lambda(lambda, price));
    const Eigen::MatrixXd sx = Eigen::MatrixXd::Constant(1, 1, sigma_x2);
    const Eigen::MatrixXd qw = Eigen::MatrixXd::Constant(1, 1, q_weight);

    const ri::LqgGain gain = ri::lqg_gain(sx, qw, pp);
    const ri::LqgMutualInfo mi = ri::lqg_mutual_info(sx, qw, pp);
    const double formula_loss = ri::lqg_expected_loss(sx, qw, pp);
    const ri::ScalarRdOptimum rd = ri::lqg_scalar_rd_optimum(sigma_x2, q_weight, pp);
    const ri::ScalarAttention att = ri::lqg_scalar_posterior_var(sigma_x2, gamma, a_coef, pp);

    // The bridge run arbitrates the closed forms through its (I, E[loss])
    // values; those settle orders of magnitude sooner than the sup-norm
    // fixed-point residual on a 41-point grid, so it runs on a fixed budget.
    const ri::DiscretizedScalar disc = ri::discretize_scalar_lqg(sigma_x2, q_weight, 41, 4.0);
    const ri::GibbsSolution ba =
        ri::ba_solve(disc.prior, disc.loss, pp, {1e-9, 30000, std::nullopt});

    json j;
    j["lambda"] = pp.lambda();
    j["closed_form"]["gain"] = gain.gain(0, 0);
    j["closed_form"]["noise_cov"] = gain.noise_cov(0, 0);
    j["closed_form"]["mi_detform_nats"] = mi.mi_detform;
    j["closed_form"]["mi_ratio_nats"] = mi.mi_ratio;
    j["closed_form"]["mi_formulas_consistent"] = mi.consistent;
    j["closed_form"]["mi_discrepancy"] = mi.discrepancy;
    j["closed_form"]["expected_loss"] = formula_loss;
    j["rd_optimum"]["mutual_info_nats"] = rd.mutual_info;
    j["rd_optimum"]["expected_loss"] = rd.expected_loss;
    j["discretized_ba"]["mutual_info_nats"] = ba.mutual_info;
    j["discretized_ba"]["expected_loss"] = ba.expected_loss;
    j["discretized_ba"]["grid_points"] = 41;
    j["discretized_ba"]["iterations"] = ba.iterations;
    j["discretized_ba"]["fixed_point_converged"] = ba.converged;
    j["discretized_ba"]["residual"] = ba.residual;
    const bool loss_zero = rd.expected_loss == 0.0 && ba.expected_loss == 0.0;
    const bool info_zero = rd.mutual_info < 1e-9 && ba.mutual_info < 2e-3;
    const bool agree =
        (info_zero || std::abs(ba.mutual_info / rd.mutual_info - 1.0) < 0.02) &&
        (loss_zero || std::abs(ba.expected_loss / rd.expected_loss - 1.0) < 0.02);
    j["bridge_agreement_2pct"] = agree;
    j["scalar_attention"]["sigma2_numeric"] = att.sigma2_numeric;
    j["scalar_attention"]["sigma2_formula"] = att.sigma2_formula;
    j["scalar_attention"]["objective_numeric"] = att.objective_numeric;
    j["scalar_attention"]["objective_formula"] = att.objective_formula;
    j["scalar_attention"]["formulas_agree"] = att.formulas_agree;
    ri::atomic_write(out_path(outdir, out, "lqg.json"), j.dump(2) + "\n");

    std::cout << "mi_detform=" << ri::fmt17(mi.mi_detform) << " mi_ratio=" << ri::fmt17(mi.mi_ratio)
              << " consistent=" << (mi.consistent ? "yes" : "no")
              << " ba_I=" << ri::fmt17(ba.mutual_info) << " ba_loss=" << ri::fmt17(ba.expected_loss)
              << " bridge_agreement=" << (agree ? "yes" : "no") << "\n";
    return agree ? 0 : 1;
}

// -------------------------------------------------------------- bellman ---

int cmd_bellman(const std::string& config, std::string mdp_path, double lambda, double price,
                std::size_t horizon, bool stationary, double tol, std::string out,
                std::string outdir) {
    const json cfg = load_config(config);
    override_from(cfg, "mdp", mdp_path);
    override_from(cfg, "lambda", lambda);
    override_from(cfg, "price", price);
    override_from(cfg, "horizon", horizon);
    override_from(cfg, "stationary", stationary);
    override_from(cfg, "tol", tol);
    override_from(cfg, "out", out);
    if (mdp_path.empty()) throw ConfigError("need --mdp file");

    const ri::FiniteMdp mdp = ri::FiniteMdp::from_json(read_file(mdp_path));
    const ri::PriceParam pp(resolve_lambda(lambda, price));

    ri::CsvBuilder csv({"t", "state", "action", "prob", "Q", "V"});
    if (stationary) {
        const ri::StationarySolution sol = ri::soft_value_iteration(mdp, pp, tol);
        for (std::size_t s = 0; s < mdp.n_states; ++s)
            for (std::size_t a = 0; a < mdp.n_actions; ++a) {
                double q_sa = mdp.stage_loss(s, a);
                for (std::size_t s2 = 0; s2 < mdp.n_states; ++s2)
                    q_sa += mdp.discount * mdp.p(s, a, s2) * sol.value[s2];
                csv.add_row({"stationary", std::to_string(s), std::to_string(a),
                             ri::fmt17(sol.policy(s, a)), ri::fmt17(q_sa),
                             ri::fmt17(sol.value[s])});
            }
        ri::atomic_write(out_path(outdir, out, "bellman.csv"), csv.str());
        std::cout << "stationary value[0]=" << ri::fmt17(sol.value[0])
                  << " iterations=" << sol.iterations << (sol.converged ? "" : " [not converged]")
                  << "\n";
        return sol.converged ? 0 : 1;
    }

    if (horizon == 0) throw ConfigError("need --horizon >= 1 (or --stationary)");
    const ri::SoftPlan plan = ri::soft_bellman_finite(mdp, pp, horizon, tol);
    for (std::size_t t = 0; t < plan.stages.size(); ++t) {
        const auto& stage = plan.stages[t];
        for (std::size_t s = 0; s < mdp.n_states; ++s)
            for (std::size_t a = 0; a < mdp.n_actions; ++a)
                csv.add_row({std::to_string(t), std::to_string(s), std::to_string(a),
                             ri::fmt17(stage.policy(s, a)), ri::fmt17(stage.q_values(s, a)),
                             ri::fmt17(stage.value[s])});
    }
    ri::atomic_write(out_path(outdir, out, "bellman.csv"), csv.str());
    std::cout << "objective=" << ri::fmt17(plan.total_objective)
              << " I_total=" << ri::fmt17(plan.total_information)
              << " outer_iterations=" << plan.outer_iterations
              << (plan.converged ? "" : " [not converged]") << "\n";
    return plan.converged ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"information-priced decision channel solver and experiment runner"};
    app.require_subcommand(1);

    std::string config, problem, preset, grid, theta_grid, out, outdir, mdp_path;
    std::string theta_spec = "sparse", p_list = "3,5,10,20,50,100";
    double lambda = 0.0, price = 0.0, kappa = -1.0, tol = 1e-10, tol_kappa = 1e-6, tol_fp = 1e-12;
    double a_sched = 1.0, b_sched = 10.0, sigma = 0.0, tau2 = 0.5;
    double sigma_x2 = 1.0, q_weight = 1.0, gamma = 1.0, a_coef = 1.0;
    std::size_t max_iter = 100000, steps = 200000, stride = 100, batch = 1;
    std::size_t k_alt = 5, b_rep = 4000, n_rep = 200000, horizon = 0, p_dim = 3;
    std::int64_t seed = -1;
    bool bits = false, stationary = false;

    auto add_common = [&](CLI::App* sub, bool with_problem) {
        sub->add_option("--config", config, "JSON config; overrides flags");
        sub->add_option("--out", out, "output file name");
        sub->add_option("--outdir", outdir, "output directory (default $RI_OUTDIR)");
        if (with_problem) {
            sub->add_option("--problem", problem, "problem JSON with 'prior' and 'loss'");
            sub->add_option("--preset", preset, "built-in problem (binary-hamming)");
        }
    };

    auto* solve = app.add_subcommand("solve", "solve the priced problem at one lambda");
    add_common(solve, true);
    solve->add_option("--lambda", lambda);
    solve->add_option("--price", price, "information price (= 1/lambda)");
    solve->add_option("--tol", tol);
    solve->add_option("--max-iter", max_iter);
    solve->add_flag("--bits", bits, "print information in bits");

    auto* capacity = app.add_subcommand("capacity", "solve at a fixed information level");
    add_common(capacity, true);
    capacity->add_option("--kappa", kappa, "information level in nats");
    capacity->add_option("--tol-kappa", tol_kappa);
    capacity->add_option("--tol-fp", tol_fp);
    capacity->add_flag("--bits", bits);

    auto* frontier = app.add_subcommand("frontier", "trace the loss-information frontier");
    add_common(frontier, true);
    frontier->add_option("--grid", grid, "lambda grid start:stop:step or comma list");
    frontier->add_option("--tol", tol);
    frontier->add_flag("--bits", bits);

    auto* sba = app.add_subcommand("sba", "stochastic solver run with trajectory export");
    add_common(sba, true);
    sba->add_option("--lambda", lambda);
    sba->add_option("--price", price);
    sba->add_option("--seed", seed);
    sba->add_option("--steps", steps);
    sba->add_option("--a", a_sched, "step schedule numerator");
    sba->add_option("--b", b_sched, "step schedule offset");
    sba->add_option("--noise-sigma", sigma, "gaussian loss noise (0 = none)");
    sba->add_option("--stride", stride, "logging stride");
    sba->add_option("--batch", batch, "rows averaged per update");

    auto* mnl = app.add_subcommand("mnl-mc", "Monte Carlo curvature table");
    add_common(mnl, false);
    mnl->add_option("--k", k_alt, "alternatives");
    mnl->add_option("--b", b_rep, "replicates");
    mnl->add_option("--seed", seed);
    mnl->add_option("--grid", grid, "lambda grid");

    auto* tri = app.add_subcommand("tri-choice", "symmetric tri-choice diagnostics");
    add_common(tri, false);
    tri->add_option("--lambda", lambda);
    tri->add_option("--price", price);
    tri->add_option("--theta-grid", theta_grid);

    auto* stein = app.add_subcommand("stein", "analytic shrinkage risk curve");
    add_common(stein, false);
    stein->add_option("--p", p_dim, "dimension");
    stein->add_option("--theta", theta_spec, "'sparse' or comma list");
    stein->add_option("--tau2", tau2);
    stein->add_option("--grid", grid, "lambda grid");

    auto* highdim = app.add_subcommand("stein-highdim", "dimension sweep with MC comparison");
    add_common(highdim, false);
    highdim->add_option("--p-list", p_list);
    highdim->add_option("--theta", theta_spec);
    highdim->add_option("--tau2", tau2);
    highdim->add_option("--n-rep", n_rep);
    highdim->add_option("--seed", seed);

    auto* lqg = app.add_subcommand("lqg", "scalar quadratic-Gaussian cross-check");
    add_common(lqg, false);
    lqg->add_option("--sigma-x2", sigma_x2);
    lqg->add_option("--q", q_weight, "quadratic loss weight");
    lqg->add_option("--lambda", lambda);
    lqg->add_option("--price", price);
    lqg->add_option("--gamma", gamma, "attention objective weight");
    lqg->add_option("--a", a_coef, "attention objective slope");

    auto* bellman = app.add_subcommand("bellman", "soft dynamic programming on a finite MDP");
    add_common(bellman, false);
    bellman->add_option("--mdp", mdp_path, "MDP JSON file");
    bellman->add_option("--lambda", lambda);
    bellman->add_option("--price", price);
    bellman->add_option("--horizon", horizon);
    bellman->add_flag("--stationary", stationary, "discounted stationary variant");
    bellman->add_option("--tol", tol);

    auto* selftest = app.add_subcommand("selftest", "run the built-in invariant suite");
    (void)selftest;

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (solve->parsed())
            return cmd_solve(config, problem, preset, lambda, price, tol, max_iter, out, outdir,
                             bits);
        if (capacity->parsed())
            return cmd_capacity(config, problem, preset, kappa, tol_kappa, tol_fp, out, outdir,
                                bits);
        if (frontier->parsed())
            return cmd_frontier(config, problem, preset, grid, tol, out, outdir, bits);
        if (sba->parsed())
            return cmd_sba(config, problem, preset, lambda, price, seed, steps, a_sched, b_sched,
                           sigma, stride, batch, out, outdir);
        if (mnl->parsed()) return cmd_mnl_mc(config, k_alt, b_rep, seed, grid, out, outdir);
        if (tri->parsed()) return cmd_tri_choice(config, lambda, price, theta_grid, out, outdir);
        if (stein->parsed()) return cmd_stein(config, p_dim, theta_spec, tau2, grid, out, outdir);
        if (highdim->parsed())
            return cmd_stein_highdim(config, p_list, theta_spec, tau2, n_rep, seed, out, outdir);
        if (lqg->parsed())
            return cmd_lqg(config, sigma_x2, q_weight, lambda, price, gamma, a_coef, out, outdir);
        if (bellman->parsed())
            return cmd_bellman(config, mdp_path, lambda, price, horizon, stationary, tol, out,
                               outdir);
        if (selftest->parsed()) return ri::run_selftest(std::cout) == 0 ? 0 : 1;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ri::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
