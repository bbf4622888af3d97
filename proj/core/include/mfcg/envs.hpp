#ifndef MFCG_ENVS_HPP
#define MFCG_ENVS_HPP

#include "mfcg/ideal.hpp"

namespace mfcg {

/// Parameters of the built-in two-state/two-action benchmark model.
/// States {0,1}, actions {stay=0, move=1}; the kernel reaches the
/// action's target state with probability 1-p and the other state with
/// probability p; cost f(x,a,mu,mu_tilde) = x + c_g mu(0) + c_l mu_tilde(0).
struct TwoStateParams {
    double p = 0.1;
    double c_g = 5.0;
    double c_l = 5.0;
    double gamma = 0.5;
    double phi = 500.0;
};

inline constexpr int kActionStay = 0;
inline constexpr int kActionMove = 1;

/// Dense loadable model: kernel and cost given as tensors, optionally
/// with coefficients for affine dependence on (mu(0)-style readouts of)
/// the global and local distributions.
struct DenseModelSpec {
    SpaceDims dims;
    // kernel[x][a][y], distribution-independent
    std::vector<std::vector<std::vector<double>>> kernel;
    // base cost[x][a], plus optional per-state linear coefficients:
    // f(x,a,mu,mt) = cost[x][a] + sum_y mu(y) cost_mu[x][a][y] + sum_y mt(y) cost_mu_tilde[x][a][y]
    std::vector<std::vector<double>> cost;
    std::vector<std::vector<std::vector<double>>> cost_mu;       // may be empty
    std::vector<std::vector<std::vector<double>>> cost_mu_tilde; // may be empty
    double gamma = 0.5;
    double phi = 1.0;
    double cost_bound = 0.0;
    std::optional<LipschitzDecl> lipschitz;
};

void check_two_state(const TwoStateParams& params);

MeanFieldModel build_two_state(const TwoStateParams& params);

/// Closed-form limit solution; valid in the regime c_l > 2 gamma where
/// the optimal pure policy is (move, stay).
SolutionTriple two_state_exact(const TwoStateParams& params);

/// Closed-form limiting local distributions for an arbitrary stochastic
/// policy.
LocalFamily two_state_local_equilibria(const TwoStateParams& params, const StochasticPolicy& pi);

/// Closed-form Q-level fixed point at temperature phi for a given global
/// distribution; resolves the policy/local-equilibrium coupling by
/// fixed-point iteration to 1e-12.
QTable two_state_q_gase(const TwoStateParams& params, const SimplexDist& mu);

/// Closed-form phi-level global distribution (linear equation in one
/// unknown; the softmin policy of the Q fixed point does not depend on mu).
SimplexDist two_state_global_gase(const TwoStateParams& params);

MeanFieldModel load_dense_model(const DenseModelSpec& spec);

} // namespace mfcg

#endif
