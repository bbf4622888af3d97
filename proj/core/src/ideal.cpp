#include "mfcg/ideal.hpp"

#include <algorithm>

namespace mfcg {

namespace {

double linf(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

SimplexDist shift_dist(const SimplexDist& d, const std::vector<double>& drift, double rate) {
    std::vector<double> out(d.size());
    for (int i = 0; i < d.size(); ++i) {
        out[i] = d[i] + rate * drift[i];
        if (out[i] < 0.0 && out[i] >= -1e-12) out[i] = 0.0;
    }
    return SimplexDist(std::move(out));
}

} // namespace

IdealState init_ideal(const MeanFieldModel& model) {
    check_model(model);
    IdealState s;
    s.mu = SimplexDist::uniform(model.dims.n_states);
    s.q = QTable(model.dims.n_states, model.dims.n_actions);
    s.locals = LocalFamily(model.dims.n_states, model.dims.n_actions, s.mu);
    s.step = 0;
    return s;
}

IdealState step_ideal(const MeanFieldModel& model, const IdealState& state,
                      const RateExponents& exps) {
    const int nx = model.dims.n_states;
    const int na = model.dims.n_actions;
    const double rho_mt = rate_deterministic(RateKind::MuTilde, state.step, exps);
    const double rho_q = rate_deterministic(RateKind::Q, state.step, exps);
    const double rho_mu = rate_deterministic(RateKind::Mu, state.step, exps);

    IdealState next = state;
    next.step = state.step + 1;

    // All drifts read the time-n state.
    for (int x = 0; x < nx; ++x)
        for (int a = 0; a < na; ++a) {
            const auto drift = p3_tilde(model, x, a, state.mu, state.q, state.locals.at(x, a));
            next.locals.at(x, a) = shift_dist(state.locals.at(x, a), drift, rho_mt);
        }
    next.mu = shift_dist(state.mu, p3(model, state.mu, state.q, state.locals), rho_mu);
    const QTable drift_q = t3(model, state.mu, state.q, state.locals);
    for (size_t i = 0; i < next.q.v.size(); ++i) next.q.v[i] = state.q.v[i] + rho_q * drift_q.v[i];
    return next;
}

std::pair<IdealState, Trajectory> run_ideal(const MeanFieldModel& model, const RateExponents& exps,
                                            std::int64_t n_steps, std::int64_t trace_every) {
    if (n_steps < 1) throw std::invalid_argument("run_ideal: n_steps must be >= 1");
    if (trace_every < 1) trace_every = 1;
    IdealState s = init_ideal(model);
    Trajectory traj;
    for (std::int64_t n = 0; n < n_steps; ++n) {
        if (n % trace_every == 0) traj.push_back({s.step, s.mu, s.q, s.locals});
        s = step_ideal(model, s, exps);
    }
    return {std::move(s), std::move(traj)};
}

SimplexDist solve_local_gase(const MeanFieldModel& model, const SimplexDist& mu, const QTable& q,
                             int x, int a, double tol, int max_iter) {
    const StochasticPolicy pi = softmin_policy(q, model.phi);
    SimplexDist mt = SimplexDist::uniform(model.dims.n_states);
    double res = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iter; ++it) {
        const SimplexDist next = apply_modified_kernel(model, mt, pi, x, a, mu, mt);
        res = next.l1_distance(mt);
        mt = next;
        if (res <= tol) return mt;
    }
    throw IterationLimitError("solve_local_gase: no convergence", res);
}

QTable solve_q_gase(const MeanFieldModel& model, const SimplexDist& mu, double tol, int max_iter) {
    const int nx = model.dims.n_states;
    const int na = model.dims.n_actions;
    QTable q(nx, na);
    double res = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iter; ++it) {
        LocalFamily locals(nx, na, SimplexDist::uniform(nx));
        for (int x = 0; x < nx; ++x)
            for (int a = 0; a < na; ++a)
                locals.at(x, a) = solve_local_gase(model, mu, q, x, a, tol, max_iter);
        const QTable resid = t3(model, mu, q, locals);
        res = linf(resid.v);
        if (res <= tol) return q;
        for (size_t i = 0; i < q.v.size(); ++i) q.v[i] += resid.v[i];
    }
    throw IterationLimitError("solve_q_gase: no convergence", res);
}

SolutionTriple solve_global_gase(const MeanFieldModel& model, double tol, int max_iter) {
    check_model(model);
    const int nx = model.dims.n_states;
    const int na = model.dims.n_actions;
    SimplexDist mu = SimplexDist::uniform(nx);
    double res = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iter; ++it) {
        const QTable q = solve_q_gase(model, mu, tol, max_iter);
        LocalFamily locals(nx, na, SimplexDist::uniform(nx));
        for (int x = 0; x < nx; ++x)
            for (int a = 0; a < na; ++a)
                locals.at(x, a) = solve_local_gase(model, mu, q, x, a, tol, max_iter);
        const auto drift = p3(model, mu, q, locals);
        res = linf(drift);
        if (res <= tol) {
            SolutionTriple sol;
            sol.mu_star_phi = mu;
            sol.q_star_phi = q;
            sol.locals_star_phi = locals;
            return sol;
        }
        mu = shift_dist(mu, drift, 1.0); // one chain application per sweep
    }
    throw IterationLimitError("solve_global_gase: no convergence", res);
}

std::pair<SimplexDist, LocalFamily> solve_mus_system(const MeanFieldModel& model,
                                                     const PurePolicy& alpha, double tol,
                                                     int max_iter) {
    check_model(model);
    const int nx = model.dims.n_states;
    const int na = model.dims.n_actions;
    const StochasticPolicy pi = alpha.to_stochastic(na);

    SimplexDist mu = SimplexDist::uniform(nx);
    LocalFamily locals(nx, na, mu);
    double res = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iter; ++it) {
        // Locals: run each frozen chain to its fixed point at the current mu.
        for (int x = 0; x < nx; ++x) {
            for (int a = 0; a < na; ++a) {
                SimplexDist mt = locals.at(x, a);
                for (int inner = 0; inner < max_iter; ++inner) {
                    const SimplexDist next = apply_modified_kernel(model, mt, pi, x, a, mu, mt);
                    const double d = next.l1_distance(mt);
                    mt = next;
                    if (d <= tol) break;
                }
                locals.at(x, a) = mt;
            }
        }
        // Global: one chain application with the matched local.
        double worst = 0.0;
        SimplexDist next_mu = mu;
        {
            // mu P^{alpha, mu, locals(x, alpha(x))}; by the coupled-system
            // structure all locals at (x, alpha(x)) coincide in the limit,
            // use the one at the first state.
            const SimplexDist& matched = locals.at(0, alpha(0));
            next_mu = apply_kernel(model, mu, pi, mu, matched);
        }
        worst = next_mu.l1_distance(mu);
        for (int x = 0; x < nx; ++x)
            worst = std::max(worst, locals.at(x, alpha(x)).l1_distance(next_mu));
        mu = next_mu;
        res = worst;
        if (res <= tol) return {mu, locals};
    }
    throw IterationLimitError("solve_mus_system: no convergence", res);
}

SolutionTriple extract_solution(const MeanFieldModel& model, const SimplexDist& mu_star_phi,
                                const QTable& q_star_phi, const LocalFamily& locals_star_phi,
                                double tol) {
    SolutionTriple sol;
    sol.mu_star_phi = mu_star_phi;
    sol.q_star_phi = q_star_phi;
    sol.locals_star_phi = locals_star_phi;
    sol.alpha_star = argmin_policy(q_star_phi);
    auto [mu, locals] = solve_mus_system(model, sol.alpha_star, tol);
    sol.mu_star = mu;
    sol.locals_star = locals;

    // Value iteration with the limit distributions frozen per (x,a).
    const int nx = model.dims.n_states;
    const int na = model.dims.n_actions;
    QTable q(nx, na);
    for (int it = 0; it < 1000000; ++it) {
        QTable next(nx, na);
        std::vector<double> vmin(nx);
        for (int x = 0; x < nx; ++x) vmin[x] = q.row_min(x);
        for (int x = 0; x < nx; ++x)
            for (int a = 0; a < na; ++a) {
                const SimplexDist& mt = locals.at(x, a);
                const SimplexDist row = model.kernel_row(x, a, mu, mt);
                double cont = 0.0;
                for (int xp = 0; xp < nx; ++xp) cont += row[xp] * vmin[xp];
                next(x, a) = model.cost(x, a, mu, mt) + model.gamma * cont;
            }
        const double d = next.max_abs_diff(q);
        q = next;
        if (d <= tol * (1.0 - model.gamma)) break;
    }
    sol.q_star = q;

    // The extracted table must keep alpha* strictly optimal.
    for (int x = 0; x < nx; ++x) {
        const double best = q.row_min(x);
        for (int a = 0; a < na; ++a) {
            if (a == sol.alpha_star(x)) continue;
            if (!(q(x, a) > best))
                throw DegenerateGapError("extract_solution: degenerate action gap at extraction",
                                         action_gap(q));
        }
    }
    return sol;
}

} // namespace mfcg
