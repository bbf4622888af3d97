#ifndef MFCG_ASYNC_HPP
#define MFCG_ASYNC_HPP

#include "mfcg/ideal.hpp"
#include "mfcg/rng.hpp"

namespace mfcg {

/// Joint state of the model-free three-timescale learner: one global
/// path and one path per (x,a), each with its own RNG stream.
struct AsyncState {
    QTable q;
    SimplexDist mu;
    LocalFamily locals;
    int global_path_state = 0;
    std::vector<int> local_path_states; // indexed x * n_actions + a
    // Per-process visit counters: the Q rate uses the global path's
    // counts, each local path's rate uses that path's own counts.
    VisitCounts visits;
    std::vector<VisitCounts> local_visits; // indexed x * n_actions + a
    std::int64_t step = 0;
    std::uint64_t seed = 0;

    int local_state(int x, int a) const {
        return local_path_states[static_cast<size_t>(x) * visits.na + a];
    }
};

/// Vanishing uniform mixture on the global path's behavior policy,
/// epsilon_n = (1+n)^{-omega}. The Q target takes a min over actions, so
/// the limit is unaffected; the mixture keeps every pair's visit count
/// growing, which the convergence theorem assumes of the trajectory
/// (liminf nu(x,a,n)/n > 0) but a near-argmin policy cannot deliver on
/// its own.
struct ExplorationSchedule {
    double omega = 0.4;
    bool enabled = true;

    double epsilon(std::int64_t n) const {
        return enabled ? std::pow(1.0 + static_cast<double>(n), -omega) : 0.0;
    }
};

struct AsyncStreams {
    static constexpr std::uint64_t global_path = 0;
    static std::uint64_t local_path(int x, int a, int na) {
        return 1 + static_cast<std::uint64_t>(x) * na + a;
    }
};

AsyncState init_async(const MeanFieldModel& model, std::uint64_t seed);

AsyncState step_async(const MeanFieldModel& model, const AsyncState& state,
                      const RateExponents& exps, const ExplorationSchedule& expl = {});

std::pair<AsyncState, Trajectory> run_async(const MeanFieldModel& model,
                                            const RateExponents& exps, std::int64_t n_steps,
                                            std::uint64_t seed, std::int64_t trace_every,
                                            const ExplorationSchedule& expl = {});

} // namespace mfcg

#endif
