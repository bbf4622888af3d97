#include "mfcg/async.hpp"

namespace mfcg {

namespace {

SimplexDist toward_point_mass(const SimplexDist& d, int target, double rate) {
    std::vector<double> out(d.size());
    for (int i = 0; i < d.size(); ++i) {
        out[i] = d[i] + rate * ((i == target ? 1.0 : 0.0) - d[i]);
        if (out[i] < 0.0 && out[i] >= -1e-12) out[i] = 0.0;
    }
    return SimplexDist(std::move(out));
}

} // namespace

AsyncState init_async(const MeanFieldModel& model, std::uint64_t seed) {
    check_model(model);
    const int nx = model.dims.n_states;
    const int na = model.dims.n_actions;

    AsyncState s;
    s.seed = seed;
    s.q = QTable(nx, na);
    s.visits = VisitCounts(nx, na);
    s.local_visits.assign(static_cast<size_t>(nx) * na, VisitCounts(nx, na));
    s.step = 0;

    // Initial path states are drawn from the uniform distribution, then
    // every distribution collapses to the point mass of its own draw.
    const SimplexDist uniform = SimplexDist::uniform(nx);
    {
        RandomSource rng(seed, AsyncStreams::global_path, 0);
        s.global_path_state = rng.sample(uniform);
    }
    s.mu = SimplexDist::point_mass(nx, s.global_path_state);
    s.locals = LocalFamily(nx, na, uniform);
    s.local_path_states.resize(static_cast<size_t>(nx) * na);
    for (int x = 0; x < nx; ++x) {
        for (int a = 0; a < na; ++a) {
            RandomSource rng(seed, AsyncStreams::local_path(x, a, na), 0);
            const int x0 = rng.sample(uniform);
            s.local_path_states[static_cast<size_t>(x) * na + a] = x0;
            s.locals.at(x, a) = SimplexDist::point_mass(nx, x0);
        }
    }
    return s;
}

AsyncState step_async(const MeanFieldModel& model, const AsyncState& state,
                      const RateExponents& exps, const ExplorationSchedule& expl) {
    const int nx = model.dims.n_states;
    const int na = model.dims.n_actions;
    const std::int64_t n = state.step;
    const std::uint64_t draw_base = 1 + 2 * static_cast<std::uint64_t>(n);

    const StochasticPolicy pi = softmin_policy(state.q, model.phi);

    AsyncState next = state;
    next.step = n + 1;

    // Global path: softmin action with the exploration mixture,
    // transition with the matching local.
    RandomSource grng(state.seed, AsyncStreams::global_path, draw_base);
    const int gx = state.global_path_state;
    std::vector<double> behavior = pi.row(gx);
    const double eps = expl.epsilon(n);
    if (eps > 0.0) {
        for (double& v : behavior) v = (1.0 - eps) * v + eps / na;
    }
    const int ga = grng.sample(behavior);
    const SimplexDist& glocal = state.locals.at(gx, ga);
    const int gx_next = grng.sample(model.kernel_row(gx, ga, state.mu, glocal));
    const double cost = model.cost(gx, ga, state.mu, glocal);
    next.global_path_state = gx_next;

    // nu(x,a,n) counts the visit at time n itself.
    next.visits(gx, ga) += 1;

    // Local paths: frozen action when sitting at the pair's own state.
    for (int x = 0; x < nx; ++x) {
        for (int a = 0; a < na; ++a) {
            RandomSource rng(state.seed, AsyncStreams::local_path(x, a, na), draw_base);
            const int cur = state.local_state(x, a);
            int act;
            if (cur == x) {
                std::vector<double> frozen(na, 0.0);
                frozen[a] = 1.0;
                act = rng.sample(frozen);
            } else {
                act = rng.sample(pi.row(cur));
            }
            const int nxt = rng.sample(model.kernel_row(cur, act, state.mu, state.locals.at(x, a)));
            next.local_path_states[static_cast<size_t>(x) * na + a] = nxt;
            VisitCounts& own = next.local_visits[static_cast<size_t>(x) * na + a];
            own(cur, act) += 1;
            const double rho = rate_visit(RateKind::MuTilde, own, cur, act, exps);
            next.locals.at(x, a) = toward_point_mass(state.locals.at(x, a), nxt, rho);
        }
    }

    // Global distribution follows the global path on the slow timescale.
    next.mu = toward_point_mass(state.mu, gx_next, rate_global(n, exps));

    // Q update at the visited pair only, gated on the matching local
    // path sitting at the global path's state.
    if (state.local_state(gx, ga) == gx) {
        const double rho = rate_visit(RateKind::Q, next.visits, gx, ga, exps);
        const double target = cost + model.gamma * state.q.row_min(gx_next);
        next.q(gx, ga) = state.q(gx, ga) + rho * (target - state.q(gx, ga));
    }
    return next;
}

std::pair<AsyncState, Trajectory> run_async(const MeanFieldModel& model, const RateExponents& exps,
                                            std::int64_t n_steps, std::uint64_t seed,
                                            std::int64_t trace_every,
                                            const ExplorationSchedule& expl) {
    if (n_steps < 1) throw std::invalid_argument("run_async: n_steps must be >= 1");
    if (trace_every < 1) trace_every = 1;
    AsyncState s = init_async(model, seed);
    Trajectory traj;
    for (std::int64_t n = 0; n < n_steps; ++n) {
        if (n % trace_every == 0) traj.push_back({s.step, s.mu, s.q, s.locals});
        s = step_async(model, s, exps, expl);
    }
    return {std::move(s), std::move(traj)};
}

} // namespace mfcg
