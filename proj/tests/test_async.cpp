#include "doctest.h"

#include <random>

#include "helpers.hpp"
#include "mfcg/async.hpp"

using namespace mfcg;

TEST_CASE("initial state collapses distributions to the sampled points") {
    TwoStateParams params;
    MeanFieldModel m = build_two_state(params);
    AsyncState s = init_async(m, 42);
    CHECK(s.step == 0);
    CHECK(s.mu[s.global_path_state] == 1.0);
    for (int x = 0; x < 2; ++x)
        for (int a = 0; a < 2; ++a)
            CHECK(s.locals.at(x, a)[s.local_state(x, a)] == 1.0);
    CHECK(s.visits(0, 0) == 0);
    CHECK(s.q(1, 1) == 0.0);

    AsyncState t = init_async(m, 42);
    CHECK(t.global_path_state == s.global_path_state);
    CHECK(t.local_path_states == s.local_path_states);
}

TEST_CASE("one step replayed from the raw streams") {
    TwoStateParams params;
    MeanFieldModel m = build_two_state(params);
    RateExponents e;
    ExplorationSchedule expl; // default schedule
    AsyncState s = init_async(m, 5);
    for (int i = 0; i < 10; ++i) s = step_async(m, s, e, expl);
    AsyncState next = step_async(m, s, e, expl);

    const std::int64_t n = s.step;
    const std::uint64_t draw_base = 1 + 2 * static_cast<std::uint64_t>(n);
    const StochasticPolicy pi = softmin_policy(s.q, m.phi);

    // global path: behavior action with the uniform mixture, then successor
    RandomSource grng(5, AsyncStreams::global_path, draw_base);
    std::vector<double> behavior = pi.row(s.global_path_state);
    const double eps = expl.epsilon(n);
    for (double& v : behavior) v = (1.0 - eps) * v + eps / 2.0;
    const int ga = grng.sample(behavior);
    const SimplexDist& glocal = s.locals.at(s.global_path_state, ga);
    const int gxn = grng.sample(m.kernel_row(s.global_path_state, ga, s.mu, glocal));
    CHECK(next.global_path_state == gxn);
    CHECK(next.visits(s.global_path_state, ga) == s.visits(s.global_path_state, ga) + 1);

    // mu moves toward the point mass of the new path state
    const double rho_mu = rate_global(n, e);
    for (int y = 0; y < 2; ++y) {
        const double want = s.mu[y] + rho_mu * ((y == gxn ? 1.0 : 0.0) - s.mu[y]);
        CHECK(next.mu[y] == doctest::Approx(want).epsilon(1e-15));
    }

    // local paths: frozen action at the own state, own visit counter drives the rate
    for (int x = 0; x < 2; ++x) {
        for (int a = 0; a < 2; ++a) {
            RandomSource rng(5, AsyncStreams::local_path(x, a, 2), draw_base);
            const int cur = s.local_state(x, a);
            int act;
            if (cur == x) {
                std::vector<double> frozen = {0.0, 0.0};
                frozen[a] = 1.0;
                act = rng.sample(frozen);
                CHECK(act == a);
            } else {
                act = rng.sample(pi.row(cur));
            }
            const int nxt = rng.sample(m.kernel_row(cur, act, s.mu, s.locals.at(x, a)));
            CHECK(next.local_state(x, a) == nxt);

            VisitCounts own = s.local_visits[static_cast<size_t>(x) * 2 + a];
            own(cur, act) += 1;
            const double rho = rate_visit(RateKind::MuTilde, own, cur, act, e);
            for (int y = 0; y < 2; ++y) {
                const double want =
                    s.locals.at(x, a)[y] + rho * ((y == nxt ? 1.0 : 0.0) - s.locals.at(x, a)[y]);
                CHECK(next.locals.at(x, a)[y] == doctest::Approx(want).epsilon(1e-15));
            }
        }
    }

    // Q: gated on the matching local path sitting at the global state
    if (s.local_state(s.global_path_state, ga) == s.global_path_state) {
        const double rho = rate_visit(RateKind::Q, next.visits, s.global_path_state, ga, e);
        const double target = m.cost(s.global_path_state, ga, s.mu, glocal) +
                              m.gamma * s.q.row_min(gxn);
        const double want =
            s.q(s.global_path_state, ga) + rho * (target - s.q(s.global_path_state, ga));
        CHECK(next.q(s.global_path_state, ga) == want);
    } else {
        CHECK(next.q.v == s.q.v);
    }
}

TEST_CASE("per-step invariants over a long run") {
    TwoStateParams params;
    MeanFieldModel m = build_two_state(params);
    RateExponents e;
    AsyncState s = init_async(m, 2);
    const double q_env = m.cost_bound / (1.0 - m.gamma);
    int gate_open = 0;
    const int n_steps = 20000;
    for (int n = 0; n < n_steps; ++n) {
        AsyncState next = step_async(m, s, e);
        int changed = 0;
        for (size_t i = 0; i < s.q.v.size(); ++i)
            if (next.q.v[i] != s.q.v[i]) ++changed;
        REQUIRE(changed <= 1); // asynchronous: a single entry per step
        gate_open += changed;
        s = std::move(next);
    }
    CHECK(s.step == n_steps);

    // counters account for every step
    std::int64_t total = 0;
    for (std::int64_t c : s.visits.counts) total += c;
    CHECK(total == n_steps);
    for (const auto& own : s.local_visits) {
        std::int64_t t = 0;
        for (std::int64_t c : own.counts) t += c;
        CHECK(t == n_steps);
    }

    // bounded targets keep Q inside the cost envelope
    for (double v : s.q.v) {
        CHECK(v >= 0.0);
        CHECK(v <= q_env);
    }

    // the coupling gate must stay open on a constant fraction of steps
    CHECK(gate_open > n_steps / 5);

    // with the vanishing mixture every pair keeps getting visited
    for (std::int64_t c : s.visits.counts) CHECK(c > n_steps / 1000);
}

TEST_CASE("runs are reproducible and seed-sensitive") {
    TwoStateParams params;
    MeanFieldModel m = build_two_state(params);
    RateExponents e;
    auto [f1, t1] = run_async(m, e, 3000, 77, 500);
    auto [f2, t2] = run_async(m, e, 3000, 77, 500);
    CHECK(f1.q.v == f2.q.v);
    CHECK(f1.mu.probs() == f2.mu.probs());
    CHECK(f1.visits.counts == f2.visits.counts);
    REQUIRE(t1.size() == 6);
    CHECK(t1[5].step == 2500);
    for (size_t i = 0; i < t1.size(); ++i) CHECK(t1[i].q.v == t2[i].q.v);

    auto [f3, t3] = run_async(m, e, 3000, 78, 500);
    CHECK(f1.q.v != f3.q.v);
}

TEST_CASE("disabling exploration changes the behavior policy only") {
    TwoStateParams params;
    MeanFieldModel m = build_two_state(params);
    RateExponents e;
    ExplorationSchedule off;
    off.enabled = false;
    CHECK(off.epsilon(10) == 0.0);
    ExplorationSchedule on;
    CHECK(on.epsilon(0) == 1.0);
    CHECK(on.epsilon(9999) < 0.03);

    auto [fon, ton] = run_async(m, e, 5000, 3, 5000, on);
    auto [foff, toff] = run_async(m, e, 5000, 3, 5000, off);
    CHECK(fon.q.all_finite());
    CHECK(foff.q.all_finite());
    // greedy behavior starves some pair; the mixture does not
    std::int64_t min_on = fon.visits.counts[0], min_off = foff.visits.counts[0];
    for (std::int64_t c : fon.visits.counts) min_on = std::min(min_on, c);
    for (std::int64_t c : foff.visits.counts) min_off = std::min(min_off, c);
    CHECK(min_on > min_off);
}
