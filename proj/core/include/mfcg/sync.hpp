#ifndef MFCG_SYNC_HPP
#define MFCG_SYNC_HPP

#include "mfcg/ideal.hpp"
#include "mfcg/rng.hpp"

namespace mfcg {

/// Running rate-weighted sums of the sampling-noise increments, one
/// accumulator per updated quantity.
struct MartingaleTrace {
    MartingaleTrace() = default;
    MartingaleTrace(int nx, int na)
        : psi_mu(nx, 0.0),
          psi_locals(static_cast<size_t>(nx) * na, std::vector<double>(nx, 0.0)),
          psi_q(nx, na) {}

    std::vector<double> psi_mu;
    std::vector<std::vector<double>> psi_locals;
    QTable psi_q;
};

/// Stream ids used by the synchronous learner; one per logical sampler.
struct SyncStreams {
    static constexpr std::uint64_t global_path = 0;
    static std::uint64_t local_path(int x, int a, int na) {
        return 1 + static_cast<std::uint64_t>(x) * na + a;
    }
    static std::uint64_t q_sampler(int x, int a, int nx, int na) {
        return 1 + static_cast<std::uint64_t>(nx) * na + static_cast<std::uint64_t>(x) * na + a;
    }
};

/// Draws an action from policy_row then a successor from the kernel row;
/// both draws consume the stream in that order.
int sample_next_state(const MeanFieldModel& model, int x, const std::vector<double>& policy_row,
                      const SimplexDist& mu, const SimplexDist& mu_tilde, RandomSource& rng);

/// Single-sample Bellman residual with the action frozen to a:
/// f + gamma min_a' Q(X',a') - Q(x,a), X' ~ p(.|x,a,mu,mu_tilde).
double check_T(const MeanFieldModel& model, const SimplexDist& mu, const QTable& q,
               const SimplexDist& mu_tilde, int x, int a, RandomSource& rng);

/// Indicator-minus-nu increment for a single sampled transition from x.
std::vector<double> check_P(const MeanFieldModel& model, int x,
                            const std::vector<double>& policy_row, const SimplexDist& mu,
                            const SimplexDist& mu_tilde, const SimplexDist& nu, RandomSource& rng);

/// One synchronous step: every local distribution, the global
/// distribution, and every Q entry updated from fresh draws, all reading
/// the time-n state. Returns the per-step martingale increments
/// (sampled value minus the matching operator value).
IdealState step_sync(const MeanFieldModel& model, const IdealState& state,
                     const RateExponents& exps, std::uint64_t seed, MartingaleTrace* trace);

std::tuple<IdealState, Trajectory, MartingaleTrace> run_sync(const MeanFieldModel& model,
                                                             const RateExponents& exps,
                                                             std::int64_t n_steps,
                                                             std::uint64_t seed,
                                                             std::int64_t trace_every);

} // namespace mfcg

#endif
