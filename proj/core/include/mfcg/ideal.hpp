#ifndef MFCG_IDEAL_HPP
#define MFCG_IDEAL_HPP

#include "mfcg/operators.hpp"
#include "mfcg/schedules.hpp"

namespace mfcg {

/// Joint state of the deterministic three-timescale iteration.
struct IdealState {
    SimplexDist mu;
    QTable q;
    LocalFamily locals;
    std::int64_t step = 0;
};

/// One trace record: the full state at a given step.
struct TrajectoryRow {
    std::int64_t step = 0;
    SimplexDist mu;
    QTable q;
    LocalFamily locals;
};

using Trajectory = std::vector<TrajectoryRow>;

/// Converged phi-level triple plus the extracted limit solution.
struct SolutionTriple {
    SimplexDist mu_star_phi;
    QTable q_star_phi;
    LocalFamily locals_star_phi;
    PurePolicy alpha_star;
    SimplexDist mu_star;
    LocalFamily locals_star;
    QTable q_star;
};

IdealState init_ideal(const MeanFieldModel& model);

/// All three update lines applied simultaneously from the time-n values
/// with deterministic rates.
IdealState step_ideal(const MeanFieldModel& model, const IdealState& state,
                      const RateExponents& exps);

std::pair<IdealState, Trajectory> run_ideal(const MeanFieldModel& model,
                                            const RateExponents& exps, std::int64_t n_steps,
                                            std::int64_t trace_every);

/// Fixed point of the frozen-action softmin chain at (x,a) by Picard
/// iteration on the modified kernel.
SimplexDist solve_local_gase(const MeanFieldModel& model, const SimplexDist& mu, const QTable& q,
                             int x, int a, double tol = 1e-10, int max_iter = 100000);

/// Q with zero Bellman residual against its own local equilibria; the
/// |X||A| local fixed points are recomputed every sweep.
QTable solve_q_gase(const MeanFieldModel& model, const SimplexDist& mu, double tol = 1e-10,
                    int max_iter = 100000);

/// Outer fixed point of the global distribution; fills the phi-level
/// fields of the returned triple.
SolutionTriple solve_global_gase(const MeanFieldModel& model, double tol = 1e-10,
                                 int max_iter = 100000);

/// Coupled stationary system for a pure policy: each local distribution
/// is stationary for its frozen chain and mu is stationary under the
/// locals at the policy's own actions. On exit mu equals every
/// locals(x, alpha(x)) within tol.
std::pair<SimplexDist, LocalFamily> solve_mus_system(const MeanFieldModel& model,
                                                     const PurePolicy& alpha, double tol = 1e-10,
                                                     int max_iter = 100000);

/// From a converged phi-level triple: argmin policy, limit distributions
/// via solve_mus_system, and the limit Q by value iteration with those
/// distributions frozen. Verifies the strict action-gap consistency of
/// the extracted table.
SolutionTriple extract_solution(const MeanFieldModel& model, const SimplexDist& mu_star_phi,
                                const QTable& q_star_phi, const LocalFamily& locals_star_phi,
                                double tol = 1e-10);

} // namespace mfcg

#endif
