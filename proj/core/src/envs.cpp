#include "mfcg/envs.hpp"

#include <string>

namespace mfcg {

void check_two_state(const TwoStateParams& p) {
    if (!(p.p > 0.0 && p.p < 0.5)) throw std::invalid_argument("two_state: need 0 < p < 0.5");
    if (!(p.c_g > 0.0 && p.c_l > 0.0)) throw std::invalid_argument("two_state: costs must be positive");
    if (!(p.gamma > 0.0 && p.gamma < 1.0)) throw std::invalid_argument("two_state: gamma in (0,1)");
    if (!(p.phi > 0.0)) throw std::invalid_argument("two_state: phi must be positive");
}

MeanFieldModel build_two_state(const TwoStateParams& params) {
    check_two_state(params);
    MeanFieldModel m;
    m.dims = {2, 2};
    m.gamma = params.gamma;
    m.phi = params.phi;
    m.cost_bound = 1.0 + params.c_g + params.c_l;
    m.declared = LipschitzDecl{0.0, 0.0, params.c_g / 2.0, params.c_l / 2.0};
    const double p = params.p;
    m.kernel = [p](int x, int a, const SimplexDist&, const SimplexDist&) {
        const int target = (a == kActionStay) ? x : 1 - x;
        std::vector<double> row(2, p);
        row[target] = 1.0 - p;
        return SimplexDist(std::move(row));
    };
    const double cg = params.c_g;
    const double cl = params.c_l;
    m.cost = [cg, cl](int x, int, const SimplexDist& mu, const SimplexDist& mt) {
        return static_cast<double>(x) + cg * mu[0] + cl * mt[0];
    };
    return m;
}

LocalFamily two_state_local_equilibria(const TwoStateParams& params, const StochasticPolicy& pi) {
    check_two_state(params);
    const double p = params.p;
    const double s0 = pi.row(0)[kActionStay];
    const double s1 = pi.row(1)[kActionStay];
    const double k = 1.0 - 2.0 * p;

    // mu_tilde(1) of the frozen-chain stationary distribution, per pair.
    const double m1_0s = p / (1.0 - k * s1);
    const double m1_0m = (1.0 - p) / (2.0 - 2.0 * p - k * s1);
    const double m1_1s = (1.0 - p - k * s0) / (1.0 - k * s0);
    const double m1_1m = (1.0 - p - k * s0) / (2.0 - 2.0 * p - k * s0);

    auto make = [](double m1) { return SimplexDist({1.0 - m1, m1}); };
    LocalFamily fam(2, 2, SimplexDist::uniform(2));
    fam.at(0, kActionStay) = make(m1_0s);
    fam.at(0, kActionMove) = make(m1_0m);
    fam.at(1, kActionStay) = make(m1_1s);
    fam.at(1, kActionMove) = make(m1_1m);
    return fam;
}

QTable two_state_q_gase(const TwoStateParams& params, const SimplexDist& mu) {
    check_two_state(params);
    const double p = params.p;
    const double cg = params.c_g;
    const double cl = params.c_l;
    const double g = params.gamma;
    const double mu0 = mu[0];

    QTable q(2, 2);
    for (int it = 0; it < 100000; ++it) {
        const StochasticPolicy pi = softmin_policy(q, params.phi);
        const LocalFamily fam = two_state_local_equilibria(params, pi);
        const double t_0m = fam.at(0, kActionMove)[0];
        const double t_0s = fam.at(0, kActionStay)[0];
        const double t_1s = fam.at(1, kActionStay)[0];
        const double t_1m = fam.at(1, kActionMove)[0];

        // delta = Q(1,s) - Q(0,m): the two entries share a continuation.
        const double delta = 1.0 - cl * t_0m + cl * t_1s;
        QTable next(2, 2);
        next(0, kActionMove) = (cg * mu0 + cl * t_0m + g * (1.0 - p) * delta) / (1.0 - g);
        next(1, kActionStay) = next(0, kActionMove) + delta;
        next(0, kActionStay) =
            cg * mu0 + cl * t_0s + g * next(0, kActionMove) + g * p * delta;
        next(1, kActionMove) = next(0, kActionStay) + 1.0 - cl * t_0s + cl * t_1m;

        const double d = next.max_abs_diff(q);
        q = next;
        if (d <= 1e-12) return q;
    }
    throw IterationLimitError("two_state_q_gase: no convergence", 0.0);
}

SimplexDist two_state_global_gase(const TwoStateParams& params) {
    // The global distribution shifts the Q fixed point by a constant per
    // entry, so its softmin policy is mu-independent; evaluate at uniform.
    const QTable q = two_state_q_gase(params, SimplexDist::uniform(2));
    const StochasticPolicy pi = softmin_policy(q, params.phi);
    const double p = params.p;
    const double s0 = pi.row(0)[kActionStay];
    const double m0 = pi.row(0)[kActionMove];
    const double s1 = pi.row(1)[kActionStay];
    const double m1 = pi.row(1)[kActionMove];
    const double c = p * s0 + (1.0 - p) * m0;
    const double d = c - (1.0 - p) * s1 - p * m1;
    const double mu1 = c / (1.0 + d);
    return SimplexDist({1.0 - mu1, mu1});
}

SolutionTriple two_state_exact(const TwoStateParams& params) {
    check_two_state(params);
    if (!(params.c_l > 2.0 * params.gamma))
        throw std::invalid_argument(
            "two_state_exact: closed forms require c_l > 2*gamma (pure policy (move,stay))");
    const double p = params.p;
    const double cg = params.c_g;
    const double cl = params.c_l;
    const double g = params.gamma;

    SolutionTriple sol;
    sol.alpha_star.choice = {kActionMove, kActionStay};
    sol.mu_star = SimplexDist({p, 1.0 - p});

    QTable q(2, 2);
    q(0, kActionMove) = cg * p / (1.0 - g) + (cl * p - g * p + g) / (1.0 - g);
    q(1, kActionStay) = q(0, kActionMove) + 1.0;
    q(0, kActionStay) = cg * p / (1.0 - g) + cl / 2.0 + g * (cl * p - 2.0 * g * p + g + p) / (1.0 - g);
    q(1, kActionMove) = q(0, kActionStay) + 1.0;
    sol.q_star = q;

    sol.locals_star = two_state_local_equilibria(params, sol.alpha_star.to_stochastic(2));

    sol.mu_star_phi = two_state_global_gase(params);
    sol.q_star_phi = two_state_q_gase(params, sol.mu_star_phi);
    const StochasticPolicy pi = softmin_policy(sol.q_star_phi, params.phi);
    sol.locals_star_phi = two_state_local_equilibria(params, pi);
    return sol;
}

MeanFieldModel load_dense_model(const DenseModelSpec& spec) {
    check_dims(spec.dims);
    const int nx = spec.dims.n_states;
    const int na = spec.dims.n_actions;
    auto fail = [](const std::string& msg) { throw std::invalid_argument("DenseModelSpec: " + msg); };

    if (static_cast<int>(spec.kernel.size()) != nx) fail("kernel has wrong state dimension");
    for (int x = 0; x < nx; ++x) {
        if (static_cast<int>(spec.kernel[x].size()) != na) fail("kernel has wrong action dimension");
        for (int a = 0; a < na; ++a) {
            const auto& row = spec.kernel[x][a];
            if (static_cast<int>(row.size()) != nx) fail("kernel row has wrong length");
            double s = 0.0;
            for (double v : row) {
                if (v < 0.0) fail("kernel row at (x=" + std::to_string(x) + ",a=" + std::to_string(a) +
                                  ") has a negative entry");
                s += v;
            }
            if (std::abs(s - 1.0) > 1e-10)
                fail("kernel row at (x=" + std::to_string(x) + ",a=" + std::to_string(a) +
                     ") sums to " + std::to_string(s));
        }
    }
    if (static_cast<int>(spec.cost.size()) != nx) fail("cost has wrong state dimension");
    for (const auto& r : spec.cost)
        if (static_cast<int>(r.size()) != na) fail("cost has wrong action dimension");
    const bool has_mu = !spec.cost_mu.empty();
    const bool has_mt = !spec.cost_mu_tilde.empty();
    for (const auto* coeffs : {has_mu ? &spec.cost_mu : nullptr, has_mt ? &spec.cost_mu_tilde : nullptr}) {
        if (!coeffs) continue;
        if (static_cast<int>(coeffs->size()) != nx) fail("cost coefficient tensor has wrong state dimension");
        for (const auto& per_a : *coeffs) {
            if (static_cast<int>(per_a.size()) != na) fail("cost coefficient tensor has wrong action dimension");
            for (const auto& per_y : per_a)
                if (static_cast<int>(per_y.size()) != nx) fail("cost coefficient row has wrong length");
        }
    }
    if (!(spec.gamma > 0.0 && spec.gamma < 1.0)) fail("gamma must be in (0,1)");
    if (!(spec.phi > 0.0)) fail("phi must be positive");

    MeanFieldModel m;
    m.dims = spec.dims;
    m.gamma = spec.gamma;
    m.phi = spec.phi;
    m.cost_bound = spec.cost_bound;
    if (spec.lipschitz) {
        m.declared = spec.lipschitz;
    } else if (!has_mu && !has_mt) {
        // fully distribution-independent
        m.declared = LipschitzDecl{0.0, 0.0, 0.0, 0.0};
    }
    auto kernel = spec.kernel;
    m.kernel = [kernel](int x, int a, const SimplexDist&, const SimplexDist&) {
        return SimplexDist(kernel[x][a]);
    };
    auto cost = spec.cost;
    auto cmu = spec.cost_mu;
    auto cmt = spec.cost_mu_tilde;
    m.cost = [cost, cmu, cmt, has_mu, has_mt](int x, int a, const SimplexDist& mu,
                                              const SimplexDist& mt) {
        double f = cost[x][a];
        if (has_mu)
            for (int y = 0; y < mu.size(); ++y) f += cmu[x][a][y] * mu[y];
        if (has_mt)
            for (int y = 0; y < mt.size(); ++y) f += cmt[x][a][y] * mt[y];
        return f;
    };
    return m;
}

} // namespace mfcg
