#include "mfcg/sync.hpp"

namespace mfcg {

namespace {

SimplexDist shift_dist(const SimplexDist& d, const std::vector<double>& drift, double rate) {
    std::vector<double> out(d.size());
    for (int i = 0; i < d.size(); ++i) {
        out[i] = d[i] + rate * drift[i];
        if (out[i] < 0.0 && out[i] >= -1e-12) out[i] = 0.0;
    }
    return SimplexDist(std::move(out));
}

} // namespace

int sample_next_state(const MeanFieldModel& model, int x, const std::vector<double>& policy_row,
                      const SimplexDist& mu, const SimplexDist& mu_tilde, RandomSource& rng) {
    if (static_cast<int>(policy_row.size()) != model.dims.n_actions)
        throw std::invalid_argument("sample_next_state: malformed policy row");
    StochasticPolicy::validate_row(policy_row);
    const int a = rng.sample(policy_row);
    return rng.sample(model.kernel_row(x, a, mu, mu_tilde));
}

double check_T(const MeanFieldModel& model, const SimplexDist& mu, const QTable& q,
               const SimplexDist& mu_tilde, int x, int a, RandomSource& rng) {
    const int xp = rng.sample(model.kernel_row(x, a, mu, mu_tilde));
    return model.cost(x, a, mu, mu_tilde) + model.gamma * q.row_min(xp) - q(x, a);
}

std::vector<double> check_P(const MeanFieldModel& model, int x,
                            const std::vector<double>& policy_row, const SimplexDist& mu,
                            const SimplexDist& mu_tilde, const SimplexDist& nu,
                            RandomSource& rng) {
    const int xp = sample_next_state(model, x, policy_row, mu, mu_tilde, rng);
    std::vector<double> out(nu.size());
    for (int y = 0; y < nu.size(); ++y) out[y] = (y == xp ? 1.0 : 0.0) - nu[y];
    return out;
}

IdealState step_sync(const MeanFieldModel& model, const IdealState& state,
                     const RateExponents& exps, std::uint64_t seed, MartingaleTrace* trace) {
    const int nx = model.dims.n_states;
    const int na = model.dims.n_actions;
    const std::int64_t n = state.step;
    const double rho_mt = rate_deterministic(RateKind::MuTilde, n, exps);
    const double rho_q = rate_deterministic(RateKind::Q, n, exps);
    const double rho_mu = rate_deterministic(RateKind::Mu, n, exps);

    const StochasticPolicy pi = softmin_policy(state.q, model.phi);

    IdealState next = state;
    next.step = n + 1;

    // Each sampler owns a counter-based stream; a step consumes a fixed
    // number of draws, so draw indices are a pure function of the step.
    // Local samplers: state, action, successor (3 draws per step).
    for (int x = 0; x < nx; ++x) {
        for (int a = 0; a < na; ++a) {
            RandomSource rng(seed, SyncStreams::local_path(x, a, na), 3 * static_cast<std::uint64_t>(n));
            const SimplexDist& mt = state.locals.at(x, a);
            const int cur = rng.sample(mt);
            // modified policy: frozen to a at state x
            std::vector<double> row;
            if (cur == x) {
                row.assign(na, 0.0);
                row[a] = 1.0;
            } else {
                row = pi.row(cur);
            }
            const std::vector<double> inc = check_P(model, cur, row, state.mu, mt, mt, rng);
            next.locals.at(x, a) = shift_dist(mt, inc, rho_mt);
            if (trace) {
                const auto mean = p3_tilde(model, x, a, state.mu, state.q, mt);
                auto& psi = trace->psi_locals[static_cast<size_t>(x) * na + a];
                for (int y = 0; y < nx; ++y) psi[y] += rho_mt * (inc[y] - mean[y]);
            }
        }
    }

    // Global sampler: state, action, successor.
    {
        RandomSource rng(seed, SyncStreams::global_path, 3 * static_cast<std::uint64_t>(n));
        const int cur = rng.sample(state.mu);
        // the transition at (cur, a) uses the matching local distribution
        const int act = rng.sample(pi.row(cur));
        const int xp = rng.sample(model.kernel_row(cur, act, state.mu, state.locals.at(cur, act)));
        std::vector<double> inc(nx);
        for (int y = 0; y < nx; ++y) inc[y] = (y == xp ? 1.0 : 0.0) - state.mu[y];
        next.mu = shift_dist(state.mu, inc, rho_mu);
        if (trace) {
            const auto mean = p3(model, state.mu, state.q, state.locals);
            for (int y = 0; y < nx; ++y) trace->psi_mu[y] += rho_mu * (inc[y] - mean[y]);
        }
    }

    // Q samplers: one successor draw per entry.
    QTable mean_t;
    if (trace) mean_t = t3(model, state.mu, state.q, state.locals);
    for (int x = 0; x < nx; ++x) {
        for (int a = 0; a < na; ++a) {
            RandomSource rng(seed, SyncStreams::q_sampler(x, a, nx, na), static_cast<std::uint64_t>(n));
            const double inc = check_T(model, state.mu, state.q, state.locals.at(x, a), x, a, rng);
            next.q(x, a) = state.q(x, a) + rho_q * inc;
            if (trace) trace->psi_q(x, a) += rho_q * (inc - mean_t(x, a));
        }
    }
    return next;
}

std::tuple<IdealState, Trajectory, MartingaleTrace> run_sync(const MeanFieldModel& model,
                                                             const RateExponents& exps,
                                                             std::int64_t n_steps,
                                                             std::uint64_t seed,
                                                             std::int64_t trace_every) {
    if (n_steps < 1) throw std::invalid_argument("run_sync: n_steps must be >= 1");
    if (trace_every < 1) trace_every = 1;
    IdealState s = init_ideal(model);
    MartingaleTrace mart(model.dims.n_states, model.dims.n_actions);
    Trajectory traj;
    for (std::int64_t n = 0; n < n_steps; ++n) {
        if (n % trace_every == 0) traj.push_back({s.step, s.mu, s.q, s.locals});
        s = step_sync(model, s, exps, seed, &mart);
    }
    return {std::move(s), std::move(traj), std::move(mart)};
}

} // namespace mfcg
