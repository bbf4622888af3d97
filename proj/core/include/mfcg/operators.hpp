#ifndef MFCG_OPERATORS_HPP
#define MFCG_OPERATORS_HPP

#include <limits>

#include "mfcg/core.hpp"

namespace mfcg {

/// Structural constants of a model: minimal kernel mass, Lipschitz
/// constants of p and f in (mu, mu_tilde), and the action gap of a
/// reference Q-table.
struct StructuralConstants {
    double c_min = 0.0;
    double c_min_phi = 0.0;
    double l_p_glob = 0.0;
    double l_p_loc = 0.0;
    double l_f_glob = 0.0;
    double l_f_loc = 0.0;
    double l_p_max = 0.0;
    double action_gap = std::numeric_limits<double>::infinity();
};

struct ErrorBounds {
    double dist_bound = 0.0; // on ||mu_phi - mu*||_1 (and the local family sum)
    double q_bound = 0.0;    // on ||Q_phi - Q*||_inf
};

struct AssumptionVerdict {
    bool holds = false;
    double lhs = 0.0;
    double threshold = 0.0;
};

struct AssumptionReport {
    AssumptionVerdict contraction_loc;  // L_p^loc  < |X| c_min / 2
    AssumptionVerdict contraction_glob; // L_p^glob < |X| c_min / 2
    AssumptionVerdict phi_bound;        // phi below both branch values
    double phi_branch_q = 0.0;
    double phi_branch_mu = 0.0;
};

/// (B_{mu,mu_tilde} Q)(x,a) = f(x,a,mu,mu_tilde)
///   + gamma * sum_{x'} p(x'|x,a,mu,mu_tilde) min_{a'} Q(x',a').
QTable bellman_apply(const MeanFieldModel& model, const SimplexDist& mu,
                     const SimplexDist& mu_tilde, const QTable& q);

/// Bellman residual with the (x,a)-specific local distribution:
/// T3(x,a) = (B_{mu,locals(x,a)} Q)(x,a) - Q(x,a).
QTable t3(const MeanFieldModel& model, const SimplexDist& mu, const QTable& q,
          const LocalFamily& locals);

/// Drift of the global distribution under the softmin policy of q, with
/// the transition at (x,a) using locals(x,a):
/// P3(y) = sum_x mu(x) sum_a softmin(q(x))(a) p(y|x,a,mu,locals(x,a)) - mu(y).
std::vector<double> p3(const MeanFieldModel& model, const SimplexDist& mu,
                       const QTable& q, const LocalFamily& locals);

/// Drift of a local distribution for the chain with action frozen to a
/// at state x.
std::vector<double> p3_tilde(const MeanFieldModel& model, int x, int a,
                             const SimplexDist& mu, const QTable& q,
                             const SimplexDist& mu_tilde);

/// Computes c_min exactly over (x,x',a) at sampled (mu, mu_tilde) pairs
/// and Lipschitz constants as empirical suprema of difference quotients
/// (lower bounds on the true constants); models that declare exact
/// constants get those instead. The action gap is evaluated on
/// reference_q when supplied.
StructuralConstants structural_constants(const MeanFieldModel& model, int sample_budget,
                                         const QTable* reference_q = nullptr);

/// Minimal margin between best and second-best Q-values across states;
/// rows that are constant contribute +inf.
double action_gap(const QTable& q);

AssumptionReport check_assumptions(const StructuralConstants& c, const MeanFieldModel& model);

/// Right-hand sides of the distribution and Q-value error bounds in
/// terms of the action gap. Requires |X| c_min - 2 L_p^max > 0.
ErrorBounds theorem_error_bounds(const StructuralConstants& c, const MeanFieldModel& model);

} // namespace mfcg

#endif
