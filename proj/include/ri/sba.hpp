#ifndef RI_SBA_HPP
#define RI_SBA_HPP

// Stochastic Blahut-Arimoto: online Robbins-Monro updates of the report
// marginal from sampled states and optionally noisy losses, with diagnostics
// against the deterministic fixed point.

#include <cstdint>
#include <optional>
#include <vector>

#include "ri/gibbs.hpp"
#include "ri/prob.hpp"

namespace ri {

// eta_t = a / (t + b + 1); satisfies the Robbins-Monro conditions for a > 0.
struct StepSchedule {
    double a = 1.0;
    double b = 10.0;
    StepSchedule() = default;
    StepSchedule(double a_, double b_) : a(a_), b(b_) {
        if (!(a > 0.0) || !(b >= 0.0)) throw Error("StepSchedule: need a > 0 and b >= 0");
        if (!(eta(0) < 1.0)) throw Error("StepSchedule: eta_0 must be < 1");
    }
    double eta(std::size_t t) const { return a / (double(t) + b + 1.0); }
};

// Loss-evaluation noise, i.i.d. per report with conditional mean zero.
struct NoiseModel {
    enum class Kind { none, gaussian };
    Kind kind = Kind::none;
    double sigma = 0.0;
    static NoiseModel none() { return {}; }
    static NoiseModel gaussian(double sigma) {
        if (!(sigma > 0.0)) throw Error("NoiseModel: sigma must be positive");
        return {Kind::gaussian, sigma};
    }
};

struct SbaOptions {
    std::size_t log_stride = 100;
    // Averages this many Gibbs rows (independent state draws) before the
    // convex-combination step; 1 recovers the single-sample update.
    std::size_t batch_size = 1;
    // Reference marginal for the KL(q_ref || q_t) series, typically the
    // deterministic BA fixed point.
    std::optional<std::vector<double>> reference;
};

struct SbaRecord {
    std::size_t t = 0;       // step index of the update producing this iterate
    double eta = 0.0;        // step size used
    double kl_to_ref = 0.0;  // KL(q_ref || q_{t+1}); NaN when no reference given
    std::size_t sampled_state = 0;  // first state drawn in the step
};

struct SbaTrajectory {
    std::vector<SbaRecord> records;
    Marginal final_marginal;
    Channel final_channel;  // Gibbs channel for the noiseless loss at final_marginal
    std::size_t clamp_events = 0;  // times the tiny-mass guard fired
};

SbaTrajectory sba_run(const Prior& prior, const LossMatrix& loss, const PriceParam& price,
                      const StepSchedule& sched, const NoiseModel& noise, std::uint64_t seed,
                      std::size_t n_steps, const SbaOptions& opts = {});

// Sup-norm deviation between the Monte Carlo average of Gibbs rows at sampled
// states and the exact mean-field map G(q) = sum_x p(x) f_q(.|x). With
// exact_enumeration the sampled average is replaced by the enumeration itself
// (deviation 0 up to rounding).
double mean_field_check(const Prior& prior, const LossMatrix& loss, const PriceParam& price,
                        const Marginal& q, std::size_t n_samples, std::uint64_t seed,
                        bool exact_enumeration = false);

}  // namespace ri

#endif  // RI_SBA_HPP
