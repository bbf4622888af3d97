#ifndef MFCG_CORE_HPP
#define MFCG_CORE_HPP

#include "mfcg/types.hpp"

namespace mfcg {

/// Boltzmann distribution over actions favoring low values,
/// softmin_phi(q)_i = exp(-phi q_i) / sum_j exp(-phi q_j).
/// The row minimum is subtracted before exponentiating so large phi
/// (e.g. 500) does not overflow.
std::vector<double> softmin_policy_row(const std::vector<double>& q_row, double phi);

/// Per-state argmin of the Q-table; ties break to the lowest action index.
PurePolicy argmin_policy(const QTable& q);

/// Copy of pi with row x replaced by the point mass at action a.
StochasticPolicy substitute_policy(const StochasticPolicy& pi, int x, int a);

/// One-step distribution flow nu -> nu P^{pi,mu,mu_tilde}:
/// out(y) = sum_{x'} nu(x') sum_a pi(a|x') p(y|x',a,mu,mu_tilde).
SimplexDist apply_kernel(const MeanFieldModel& model, const SimplexDist& nu,
                         const StochasticPolicy& pi, const SimplexDist& mu,
                         const SimplexDist& mu_tilde);

/// Like apply_kernel but with the action frozen to a at state x:
/// out(y) = sum_{x' != x} nu(x') p(y|x',pi,mu,mu_tilde) + nu(x) p(y|x,a,mu,mu_tilde).
SimplexDist apply_modified_kernel(const MeanFieldModel& model, const SimplexDist& nu,
                                  const StochasticPolicy& pi, int x, int a,
                                  const SimplexDist& mu, const SimplexDist& mu_tilde);

/// Softmin policy of a full Q-table.
StochasticPolicy softmin_policy(const QTable& q, double phi);

} // namespace mfcg

#endif
