#include "ri/sba.hpp"

#include <cmath>

#include "ri/rng.hpp"

namespace ri {

namespace {

// KL(ref || q) over the support of ref; +inf if q misses mass there.
double kl_to(const std::vector<double>& ref, const std::vector<double>& q) {
    double d = 0.0;
    for (std::size_t y = 0; y < ref.size(); ++y) {
        if (ref[y] == 0.0) continue;
        if (q[y] <= 0.0) return std::numeric_limits<double>::infinity();
        d += ref[y] * std::log(ref[y] / q[y]);
    }
    return d;
}

}  // namespace

SbaTrajectory sba_run(const Prior& prior, const LossMatrix& loss, const PriceParam& price,
                      const StepSchedule& sched, const NoiseModel& noise, std::uint64_t seed,
                      std::size_t n_steps, const SbaOptions& opts) {
    if (prior.size() != loss.n_states())
        throw DimensionMismatch("sba_run: prior/loss dimensions disagree");
    if (n_steps < 1) throw Error("sba_run: need at least one step");
    if (opts.batch_size < 1) throw Error("sba_run: batch_size must be >= 1");
    if (opts.reference && opts.reference->size() != loss.n_reports())
        throw DimensionMismatch("sba_run: reference marginal has wrong dimension");

    const std::size_t n_y = loss.n_reports();
    const double lambda = price.lambda();

    SeedStream state_stream(seed, 0);
    SeedStream noise_stream(seed, 1);

    std::vector<double> q(n_y, 1.0 / double(n_y));
    std::vector<double> loss_row(n_y);
    std::vector<double> batch_mean(n_y);

    SbaTrajectory out{std::vector<SbaRecord>{}, Marginal::uniform(n_y),
                      Channel::uniform(prior.size(), n_y), 0};
    out.records.reserve(opts.log_stride ? n_steps / opts.log_stride + 1 : 0);

    for (std::size_t t = 0; t < n_steps; ++t) {
        const double eta = sched.eta(t);

        std::fill(batch_mean.begin(), batch_mean.end(), 0.0);
        std::size_t first_state = 0;
        for (std::size_t bi = 0; bi < opts.batch_size; ++bi) {
            const std::size_t x = state_stream.next_categorical(prior.weights());
            if (bi == 0) first_state = x;
            for (std::size_t y = 0; y < n_y; ++y) {
                double l = loss(x, y);
                if (noise.kind == NoiseModel::Kind::gaussian)
                    l += noise.sigma * noise_stream.next_gaussian();
                loss_row[y] = l;
            }
            auto [row, lz] = gibbs_row(loss_row, q, lambda);
            (void)lz;
            for (std::size_t y = 0; y < n_y; ++y) batch_mean[y] += row[y];
        }
        const double inv_b = 1.0 / double(opts.batch_size);

        bool clamped = false;
        double sum = 0.0;
        for (std::size_t y = 0; y < n_y; ++y) {
            double v = (1.0 - eta) * q[y] + eta * batch_mean[y] * inv_b;
            if (v > 0.0 && v < 1e-300) {
                v = 0.0;
                clamped = true;
            }
            q[y] = v;
            sum += v;
        }
        if (clamped) ++out.clamp_events;
        for (std::size_t y = 0; y < n_y; ++y) q[y] /= sum;

        if (opts.log_stride && (t + 1) % opts.log_stride == 0) {
            SbaRecord rec;
            rec.t = t;
            rec.eta = eta;
            rec.sampled_state = first_state;
            rec.kl_to_ref = opts.reference ? kl_to(*opts.reference, q)
                                           : std::numeric_limits<double>::quiet_NaN();
            out.records.push_back(rec);
        }
    }

    out.final_marginal = Marginal(q);
    out.final_channel = gibbs_update(loss, out.final_marginal, price).first;
    return out;
}

double mean_field_check(const Prior& prior, const LossMatrix& loss, const PriceParam& price,
                        const Marginal& q, std::size_t n_samples, std::uint64_t seed,
                        bool exact_enumeration) {
    if (prior.size() != loss.n_states() || q.size() != loss.n_reports())
        throw DimensionMismatch("mean_field_check: dimensions disagree");
    if (n_samples < 1) throw Error("mean_field_check: need n_samples >= 1");

    const std::size_t n_y = loss.n_reports();
    const double lambda = price.lambda();

    // exact mean-field map G(q)
    std::vector<double> g(n_y, 0.0);
    std::vector<double> loss_row(n_y);
    for (std::size_t x = 0; x < prior.size(); ++x) {
        if (prior[x] == 0.0) continue;
        for (std::size_t y = 0; y < n_y; ++y) loss_row[y] = loss(x, y);
        auto [row, lz] = gibbs_row(loss_row, q.weights(), lambda);
        (void)lz;
        for (std::size_t y = 0; y < n_y; ++y) g[y] += prior[x] * row[y];
    }
    std::vector<double> avg(n_y, 0.0);
    if (exact_enumeration) {
        // replace the state draws by their exact prior weights
        for (std::size_t x = 0; x < prior.size(); ++x) {
            if (prior[x] == 0.0) continue;
            for (std::size_t y = 0; y < n_y; ++y) loss_row[y] = loss(x, y);
            auto [row, lz] = gibbs_row(loss_row, q.weights(), lambda);
            (void)lz;
            for (std::size_t y = 0; y < n_y; ++y) avg[y] += prior[x] * row[y];
        }
    } else {
        SeedStream stream(seed, 0);
        for (std::size_t i = 0; i < n_samples; ++i) {
            const std::size_t x = stream.next_categorical(prior.weights());
            for (std::size_t y = 0; y < n_y; ++y) loss_row[y] = loss(x, y);
            auto [row, lz] = gibbs_row(loss_row, q.weights(), lambda);
            (void)lz;
            for (std::size_t y = 0; y < n_y; ++y) avg[y] += row[y] / double(n_samples);
        }
    }
    double dev = 0.0;
    for (std::size_t y = 0; y < n_y; ++y) dev = std::max(dev, std::abs(avg[y] - g[y]));
    return dev;
}

}  // namespace ri
