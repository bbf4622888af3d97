#include "doctest.h"

#include <random>

#include "helpers.hpp"
#include "mfcg/sync.hpp"

using namespace mfcg;
using mfcg::testing::random_dense_model;
using mfcg::testing::random_dist;
using mfcg::testing::random_qtable;

namespace {

// Single-state model: every distribution is degenerate and every sampled
// increment coincides with its operator mean.
MeanFieldModel point_model() {
    DenseModelSpec s;
    s.dims = {1, 2};
    s.gamma = 0.5;
    s.phi = 2.0;
    s.kernel = {{{1.0}, {1.0}}};
    s.cost = {{1.0, 2.0}};
    s.cost_bound = 2.0;
    return load_dense_model(s);
}

} // namespace

TEST_CASE("check_T is an unbiased estimate of the Bellman residual") {
    std::mt19937_64 gen(37);
    MeanFieldModel m = random_dense_model(gen, 3, 2);
    SimplexDist mu = random_dist(gen, 3);
    SimplexDist mt = random_dist(gen, 3);
    QTable q = random_qtable(gen, 3, 2);

    QTable b = bellman_apply(m, mu, mt, q);
    const int n_samples = 100000;
    for (int x = 0; x < 3; ++x) {
        for (int a = 0; a < 2; ++a) {
            RandomSource rng(7, static_cast<std::uint64_t>(x * 2 + a));
            double sum = 0.0, sumsq = 0.0;
            for (int i = 0; i < n_samples; ++i) {
                const double v = check_T(m, mu, q, mt, x, a, rng);
                sum += v;
                sumsq += v * v;
            }
            const double mean = sum / n_samples;
            const double var = sumsq / n_samples - mean * mean;
            const double se = std::sqrt(var / n_samples) + 1e-12;
            CHECK(std::abs(mean - (b(x, a) - q(x, a))) < 4.0 * se);
        }
    }
}

TEST_CASE("check_P is an unbiased estimate of the one-step flow increment") {
    std::mt19937_64 gen(41);
    MeanFieldModel m = random_dense_model(gen, 3, 2);
    SimplexDist mu = random_dist(gen, 3);
    SimplexDist mt = random_dist(gen, 3);
    SimplexDist nu = random_dist(gen, 3);
    StochasticPolicy pi = softmin_policy(random_qtable(gen, 3, 2), m.phi);

    const int x = 1;
    // E[check_P] = p(.|x, pi) - nu, conditional on starting at x
    std::vector<double> expect(3);
    for (int a = 0; a < 2; ++a) {
        const SimplexDist row = m.kernel_row(x, a, mu, mt);
        for (int y = 0; y < 3; ++y) expect[y] += pi.row(x)[a] * row[y];
    }
    for (int y = 0; y < 3; ++y) expect[y] -= nu[y];

    RandomSource rng(11, 0);
    const int n_samples = 100000;
    std::vector<double> sum(3, 0.0);
    for (int i = 0; i < n_samples; ++i) {
        const auto inc = check_P(m, x, pi.row(x), mu, mt, nu, rng);
        for (int y = 0; y < 3; ++y) sum[y] += inc[y];
    }
    for (int y = 0; y < 3; ++y) {
        const double mean = sum[y] / n_samples;
        // indicator variance is at most 1/4
        const double se = 0.5 / std::sqrt(static_cast<double>(n_samples));
        CHECK(std::abs(mean - expect[y]) < 4.0 * se);
    }
}

TEST_CASE("single-state model degenerates to the deterministic iteration") {
    MeanFieldModel m = point_model();
    RateExponents e;
    IdealState si = init_ideal(m);
    IdealState ss = init_ideal(m);
    for (int n = 0; n < 2000; ++n) {
        si = step_ideal(m, si, e);
        ss = step_sync(m, ss, e, 99, nullptr);
        REQUIRE(si.q.v == ss.q.v); // bit-for-bit
        REQUIRE(si.mu[0] == ss.mu[0]);
    }
}

TEST_CASE("martingale accumulators vanish when sampling is degenerate") {
    MeanFieldModel m = point_model();
    RateExponents e;
    auto [fin, traj, mart] = run_sync(m, e, 500, 3, 100);
    // the sampled increments are exact; only the operator means carry
    // floating-point residue
    CHECK(std::abs(mart.psi_mu[0]) < 1e-12);
    CHECK(mart.psi_q(0, 0) == 0.0);
    CHECK(mart.psi_q(0, 1) == 0.0);
    CHECK(mart.psi_locals[0][0] == 0.0);
    CHECK(mart.psi_locals[1][0] == 0.0);
    CHECK(traj.size() == 5);
    CHECK(fin.step == 500);
}

TEST_CASE("same seed replays the identical trajectory") {
    TwoStateParams params;
    MeanFieldModel m = build_two_state(params);
    RateExponents e;
    auto [f1, t1, m1] = run_sync(m, e, 300, 1234, 1);
    auto [f2, t2, m2] = run_sync(m, e, 300, 1234, 1);
    CHECK(f1.q.v == f2.q.v);
    CHECK(f1.mu.probs() == f2.mu.probs());
    for (size_t i = 0; i < f1.locals.dists.size(); ++i)
        CHECK(f1.locals.dists[i].probs() == f2.locals.dists[i].probs());
    CHECK(m1.psi_q.v == m2.psi_q.v);

    auto [f3, t3_, m3] = run_sync(m, e, 300, 1235, 1);
    CHECK(f1.q.v != f3.q.v);
}

TEST_CASE("synchronous iterates stay in valid ranges") {
    TwoStateParams params;
    MeanFieldModel m = build_two_state(params);
    RateExponents e;
    auto [fin, traj, mart] = run_sync(m, e, 5000, 7, 1);
    CHECK(fin.q.all_finite());
    const double q_env = m.cost_bound / (1.0 - m.gamma);
    for (int x = 0; x < 2; ++x)
        for (int a = 0; a < 2; ++a) {
            CHECK(fin.q(x, a) >= 0.0);
            CHECK(fin.q(x, a) <= q_env);
        }
    for (const auto& d : fin.locals.dists) {
        double s = 0.0;
        for (int y = 0; y < d.size(); ++y) s += d[y];
        CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
    }
}
