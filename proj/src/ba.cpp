#include "ri/ba.hpp"

#include <algorithm>
#include <cmath>

namespace ri {

namespace {

// KL(q_new || q_old) over the support of q_new; used as the convergence
// confirmation. In BA q_new(y) > 0 implies q_old(y) > 0, so this is finite.
double kl_confirm(const std::vector<double>& q_new, const std::vector<double>& q_old) {
    double d = 0.0;
    for (std::size_t y = 0; y < q_new.size(); ++y)
        if (q_new[y] > 0.0 && q_old[y] > 0.0) d += q_new[y] * std::log(q_new[y] / q_old[y]);
    return d;
}

struct Packed {
    Prior prior;
    LossMatrix loss;
    std::vector<std::size_t> kept;  // original indices of positive-mass states
    bool dropped = false;
};

Packed drop_zero_states(const Prior& prior, const LossMatrix& loss) {
    std::vector<std::size_t> kept;
    for (std::size_t x = 0; x < prior.size(); ++x)
        if (prior[x] > 0.0) kept.push_back(x);
    if (kept.size() == prior.size()) return {prior, loss, std::move(kept), false};
    std::vector<double> w;
    Mat entries(kept.size(), loss.n_reports());
    for (std::size_t i = 0; i < kept.size(); ++i) {
        w.push_back(prior[kept[i]]);
        for (std::size_t y = 0; y < loss.n_reports(); ++y) entries(i, y) = loss(kept[i], y);
    }
    return {Prior(std::move(w)), LossMatrix(std::move(entries), loss.is_utility_negated()),
            std::move(kept), true};
}

}  // namespace

GibbsSolution ba_solve(const Prior& prior, const LossMatrix& loss, const PriceParam& price,
                       const BaOptions& opts) {
    if (prior.size() != loss.n_states())
        throw DimensionMismatch("ba_solve: prior/loss dimensions disagree");
    if (!(opts.tol > 0.0)) throw Error("ba_solve: tol must be positive");
    if (opts.max_iter < 1) throw Error("ba_solve: max_iter must be >= 1");

    const Packed packed = drop_zero_states(prior, loss);
    const Prior& p = packed.prior;
    const LossMatrix& l = packed.loss;
    const std::size_t n_y = l.n_reports();

    std::vector<double> q(n_y, 1.0 / double(n_y));
    if (opts.warm_start) {
        if (opts.warm_start->size() != n_y)
            throw DimensionMismatch("ba_solve: warm start has wrong dimension");
        // keep the start strictly interior so extinguished reports can regrow
        const double mix = 1e-8;
        for (std::size_t y = 0; y < n_y; ++y)
            q[y] = (1.0 - mix) * (*opts.warm_start)[y] + mix / double(n_y);
    }

    GibbsSolution out{Channel::identity(1), Marginal::uniform(1), LogPartition{}, price.lambda()};
    out.dropped_zero_states = packed.dropped;

    const std::size_t n_x = p.size();
    const double lambda = price.lambda();
    const double inv_lambda = price.penalty();
    const double neg_inf = -std::numeric_limits<double>::infinity();

    // hot loop on raw buffers; validated Channel/Marginal are built on exit
    Mat gibbs_rows(n_x, n_y, 0.0);
    std::vector<double> logz_vals(n_x, 0.0);
    std::vector<double> logq(n_y), w(n_y), q_new(n_y);

    double prev_value = std::numeric_limits<double>::infinity();
    double residual = std::numeric_limits<double>::infinity();
    std::size_t iter = 0;
    bool converged = false;

    while (iter < opts.max_iter) {
        ++iter;
        for (std::size_t y = 0; y < n_y; ++y) logq[y] = q[y] > 0.0 ? std::log(q[y]) : neg_inf;
        double value_acc = 0.0;
        std::fill(q_new.begin(), q_new.end(), 0.0);
        for (std::size_t x = 0; x < n_x; ++x) {
            for (std::size_t y = 0; y < n_y; ++y) w[y] = logq[y] - lambda * l(x, y);
            const double lz = log_sum_exp(w);
            logz_vals[x] = lz;
            value_acc += p[x] * lz;
            const double px = p[x];
            for (std::size_t y = 0; y < n_y; ++y) {
                const double fxy = std::isfinite(w[y]) ? std::exp(w[y] - lz) : 0.0;
                gibbs_rows(x, y) = fxy;
                q_new[y] += px * fxy;
            }
        }

        residual = sup_norm_diff(q_new, q);

        // -1/lambda E[log Z] is the extended objective right after the
        // channel half-step; alternating minimization makes it nonincreasing.
        const double value = -inv_lambda * value_acc;
        if (value > prev_value + 1e-11 * (1.0 + std::abs(prev_value))) out.monotone_ok = false;
        prev_value = value;

        if (residual < opts.tol && kl_confirm(q_new, q) < opts.tol * opts.tol) {
            q = q_new;
            converged = true;
            break;
        }
        std::swap(q, q_new);
    }

    Channel f(std::move(gibbs_rows));
    LogPartition logz{std::move(logz_vals)};
    Marginal q_marg(q);

    out.iterations = iter;
    out.residual = residual;
    out.converged = converged;
    out.logz = logz;
    out.lambda = price.lambda();
    out.expected_loss = expected_loss(p, l, f);
    out.mutual_info = mutual_information(p, f);
    out.objective_value = out.expected_loss + price.penalty() * out.mutual_info;

    if (!packed.dropped) {
        out.channel = std::move(f);
        out.marginal = std::move(q_marg);
        return out;
    }

    // Reinsert dropped states as uniform rows; their log-partition entries are
    // still evaluated at the converged marginal.
    Mat rows(prior.size(), n_y, 1.0 / double(n_y));
    LogPartition full_logz;
    full_logz.values.assign(prior.size(), 0.0);
    for (std::size_t i = 0; i < packed.kept.size(); ++i) {
        for (std::size_t y = 0; y < n_y; ++y) rows(packed.kept[i], y) = f(i, y);
        full_logz.values[packed.kept[i]] = logz.values[i];
    }
    std::vector<std::size_t> dropped;
    for (std::size_t x = 0, i = 0; x < prior.size(); ++x) {
        if (i < packed.kept.size() && packed.kept[i] == x)
            ++i;
        else
            dropped.push_back(x);
    }
    for (std::size_t x : dropped) {
        std::vector<double> w(n_y);
        for (std::size_t y = 0; y < n_y; ++y)
            w[y] = (q_marg[y] > 0.0 ? std::log(q_marg[y]) : -std::numeric_limits<double>::infinity()) -
                   price.lambda() * loss(x, y);
        full_logz.values[x] = log_sum_exp(w);
    }
    out.channel = Channel(std::move(rows));
    out.marginal = std::move(q_marg);
    out.logz = std::move(full_logz);
    return out;
}

double CapacitySolution::mixed_mutual_info() const {
    if (!high) return low.mutual_info;
    return mix_weight * low.mutual_info + (1.0 - mix_weight) * high->mutual_info;
}

double CapacitySolution::mixed_expected_loss() const {
    if (!high) return low.expected_loss;
    return mix_weight * low.expected_loss + (1.0 - mix_weight) * high->expected_loss;
}

CapacitySolution solve_capacity(const Prior& prior, const LossMatrix& loss, double kappa,
                                double tol_kappa, double tol_fp) {
    const double h_prior = entropy(prior);
    if (kappa < -1e-15 || kappa > h_prior + 1e-12)
        throw CapacityOutOfRange("solve_capacity: kappa outside [0, H(prior)]");

    BaOptions opts;
    opts.tol = tol_fp;

    auto solve_at = [&](double lambda, const std::vector<double>* warm) {
        BaOptions o = opts;
        if (warm) o.warm_start = *warm;
        return ba_solve(prior, loss, PriceParam(lambda), o);
    };

    CapacitySolution result(solve_at(1e-9, nullptr));
    if (kappa <= tol_kappa) return result;  // lambda -> 0: uninformative solution

    const double lambda_cap = 1e14;
    double lo = 1e-6, hi = 1.0;
    GibbsSolution sol_lo = solve_at(lo, nullptr);
    GibbsSolution sol_hi = solve_at(hi, nullptr);
    while (sol_lo.mutual_info > kappa && lo > 1e-12) {
        lo /= 16.0;
        sol_lo = solve_at(lo, nullptr);
    }
    while (sol_hi.mutual_info < kappa && hi < lambda_cap) {
        hi *= 16.0;
        sol_hi = solve_at(hi, &sol_hi.marginal.weights());
    }
    if (sol_hi.mutual_info < kappa - tol_kappa) {
        // kappa is below H(prior) but above the information the loss geometry
        // can ever transmit (e.g. duplicated report columns)
        result.low = std::move(sol_hi);
        result.bracket_saturated = true;
        return result;
    }

    auto grid_scan = [&]() {
        // monotonicity in lambda failed: scan a geometric grid and keep the
        // closest match
        CapacitySolution r(sol_lo);
        r.grid_fallback = true;
        double best_gap = std::abs(sol_lo.mutual_info - kappa);
        const int n_grid = 200;
        const double ratio = std::pow(hi / lo, 1.0 / double(n_grid));
        double lambda = lo;
        std::vector<double> warm = sol_lo.marginal.weights();
        for (int i = 0; i <= n_grid; ++i) {
            GibbsSolution s = solve_at(lambda, &warm);
            warm = s.marginal.weights();
            const double gap = std::abs(s.mutual_info - kappa);
            if (gap < best_gap) {
                best_gap = gap;
                r.low = std::move(s);
            }
            lambda *= ratio;
        }
        return r;
    };

    if (sol_lo.mutual_info > sol_hi.mutual_info + 1e-9) return grid_scan();

    const std::size_t max_bisect = 200;
    for (std::size_t k = 0; k < max_bisect; ++k) {
        if (std::abs(sol_lo.mutual_info - kappa) <= tol_kappa) {
            result.low = std::move(sol_lo);
            return result;
        }
        if (std::abs(sol_hi.mutual_info - kappa) <= tol_kappa) {
            result.low = std::move(sol_hi);
            return result;
        }
        if ((hi - lo) <= 1e-13 * hi) break;  // kink: bracket exhausted without a match
        const double mid = std::sqrt(lo * hi);  // bisect in log-lambda
        GibbsSolution sol_mid = solve_at(mid, &sol_lo.marginal.weights());
        if (sol_mid.mutual_info < sol_lo.mutual_info - 1e-9 ||
            sol_mid.mutual_info > sol_hi.mutual_info + 1e-9)
            return grid_scan();
        if (std::abs(sol_mid.mutual_info - kappa) <= tol_kappa) {
            result.low = std::move(sol_mid);
            return result;
        }
        if (sol_mid.mutual_info < kappa) {
            lo = mid;
            sol_lo = std::move(sol_mid);
        } else {
            hi = mid;
            sol_hi = std::move(sol_mid);
        }
    }

    // Mixture representation at the kink: alpha*I_lo + (1-alpha)*I_hi = kappa.
    const double gap = sol_hi.mutual_info - sol_lo.mutual_info;
    result.kink = true;
    result.mix_weight = gap > 0.0 ? (sol_hi.mutual_info - kappa) / gap : 1.0;
    result.mix_weight = std::clamp(result.mix_weight, 0.0, 1.0);
    result.low = std::move(sol_lo);
    result.high = std::move(sol_hi);
    return result;
}

FrontierTrace trace_frontier(const Prior& prior, const LossMatrix& loss,
                             const std::vector<double>& lambda_grid, const BaOptions& opts) {
    if (lambda_grid.empty()) throw Error("trace_frontier: empty lambda grid");
    for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
        if (!(lambda_grid[i] > 0.0)) throw Error("trace_frontier: lambdas must be positive");
        if (i > 0 && lambda_grid[i] <= lambda_grid[i - 1])
            throw Error("trace_frontier: grid must be strictly increasing");
    }

    FrontierTrace trace;
    std::optional<std::vector<double>> warm = opts.warm_start;
    for (double lambda : lambda_grid) {
        BaOptions o = opts;
        o.warm_start = warm;
        GibbsSolution sol = ba_solve(prior, loss, PriceParam(lambda), o);
        warm = sol.marginal.weights();
        trace.points.push_back({lambda, sol.mutual_info, sol.expected_loss});
    }

    std::sort(trace.points.begin(), trace.points.end(),
              [](const FrontierPoint& a, const FrontierPoint& b) { return a.kappa < b.kappa; });

    for (std::size_t i = 1; i < trace.points.size(); ++i)
        if (trace.points[i].expected_loss > trace.points[i - 1].expected_loss + 1e-12)
            trace.loss_monotone = false;

    double min_dd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < trace.points.size(); ++i) {
        const auto& a = trace.points[i - 1];
        const auto& b = trace.points[i];
        const auto& c = trace.points[i + 1];
        const double dk1 = b.kappa - a.kappa;
        const double dk2 = c.kappa - b.kappa;
        if (dk1 <= 1e-14 || dk2 <= 1e-14) continue;
        // second difference of loss as a function of kappa (convex: >= 0)
        const double slope1 = (b.expected_loss - a.expected_loss) / dk1;
        const double slope2 = (c.expected_loss - b.expected_loss) / dk2;
        min_dd = std::min(min_dd, slope2 - slope1);
    }
    trace.min_second_difference = std::isfinite(min_dd) ? min_dd : 0.0;
    return trace;
}

std::vector<std::size_t> support_set(const Marginal& q, double eps) {
    if (eps < 0.0) throw Error("support_set: eps must be nonnegative");
    std::vector<std::size_t> idx;
    for (std::size_t y = 0; y < q.size(); ++y)
        if (q[y] > eps) idx.push_back(y);
    return idx;
}

}  // namespace ri
