#include "doctest.h"

#include <random>

#include "helpers.hpp"
#include "mfcg/ideal.hpp"

using namespace mfcg;
using mfcg::testing::linf;
using mfcg::testing::random_dense_model;
using mfcg::testing::random_dist;
using mfcg::testing::random_qtable;

namespace {

MeanFieldModel fixed_model() {
    DenseModelSpec s;
    s.dims = {2, 2};
    s.gamma = 0.6;
    s.phi = 1.0;
    s.kernel = {{{0.3, 0.7}, {0.8, 0.2}}, {{0.5, 0.5}, {0.1, 0.9}}};
    s.cost = {{1.0, 2.0}, {0.5, 1.5}};
    s.cost_bound = 2.0;
    return load_dense_model(s);
}

} // namespace

TEST_CASE("bellman operator reproduces hand-computed values") {
    MeanFieldModel m = fixed_model();
    QTable q(2, 2);
    q(0, 0) = 2.0; q(0, 1) = 1.0; q(1, 0) = 3.0; q(1, 1) = 0.5;
    SimplexDist u = SimplexDist::uniform(2);
    QTable b = bellman_apply(m, u, u, q);
    // frozen: f + 0.6 * (p0 * 1 + p1 * 0.5)
    CHECK(b(0, 0) == doctest::Approx(1.39).epsilon(1e-14));
    CHECK(b(0, 1) == doctest::Approx(2.54).epsilon(1e-14));
    CHECK(b(1, 0) == doctest::Approx(0.95).epsilon(1e-14));
    CHECK(b(1, 1) == doctest::Approx(1.83).epsilon(1e-14));
}

TEST_CASE("bellman operator is a gamma-contraction") {
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 200; ++trial) {
        MeanFieldModel m = random_dense_model(gen, 3, 2, 0.7);
        SimplexDist mu = random_dist(gen, 3), mt = random_dist(gen, 3);
        QTable q1 = random_qtable(gen, 3, 2), q2 = random_qtable(gen, 3, 2);
        double lhs = bellman_apply(m, mu, mt, q1).max_abs_diff(bellman_apply(m, mu, mt, q2));
        CHECK(lhs <= 0.7 * q1.max_abs_diff(q2) + 1e-12);
    }
}

TEST_CASE("t3 is the bellman residual with per-pair locals") {
    std::mt19937_64 gen(7);
    MeanFieldModel m = random_dense_model(gen, 3, 2);
    SimplexDist mu = random_dist(gen, 3);
    QTable q = random_qtable(gen, 3, 2);
    LocalFamily fam(3, 2, SimplexDist::uniform(3));
    for (int x = 0; x < 3; ++x)
        for (int a = 0; a < 2; ++a) fam.at(x, a) = random_dist(gen, 3);

    QTable res = t3(m, mu, q, fam);
    for (int x = 0; x < 3; ++x) {
        for (int a = 0; a < 2; ++a) {
            QTable b = bellman_apply(m, mu, fam.at(x, a), q);
            CHECK(res(x, a) == doctest::Approx(b(x, a) - q(x, a)).epsilon(1e-12));
        }
    }
}

TEST_CASE("p3 drift vanishes exactly at a stationary configuration") {
    std::mt19937_64 gen(9);
    MeanFieldModel m = random_dense_model(gen, 3, 2, 0.5, 1.5);
    QTable q = random_qtable(gen, 3, 2);
    StochasticPolicy pi = softmin_policy(q, m.phi);
    SimplexDist mt = random_dist(gen, 3);
    SimplexDist stat = mfcg::testing::stationary_oracle(m, pi, SimplexDist::uniform(3), mt);
    LocalFamily fam(3, 2, mt);
    std::vector<double> drift = p3(m, stat, q, fam);
    CHECK(linf(drift) < 1e-10);
}

TEST_CASE("p3_tilde matches the modified-kernel flow") {
    std::mt19937_64 gen(13);
    MeanFieldModel m = random_dense_model(gen, 3, 2);
    SimplexDist mu = random_dist(gen, 3);
    QTable q = random_qtable(gen, 3, 2);
    SimplexDist mt = random_dist(gen, 3);
    StochasticPolicy pi = softmin_policy(q, m.phi);
    for (int x = 0; x < 3; ++x) {
        for (int a = 0; a < 2; ++a) {
            std::vector<double> drift = p3_tilde(m, x, a, mu, q, mt);
            SimplexDist pushed = apply_modified_kernel(m, mt, pi, x, a, mu, mt);
            for (int y = 0; y < 3; ++y)
                CHECK(drift[y] == doctest::Approx(pushed[y] - mt[y]).epsilon(1e-12));
        }
    }
}

TEST_CASE("action gap of the benchmark limit table") {
    QTable q(2, 2);
    q(0, 0) = 4.5; q(0, 1) = 2.9; q(1, 0) = 3.9; q(1, 1) = 5.5;
    CHECK(action_gap(q) == doctest::Approx(1.6).epsilon(1e-12));

    QTable flat(2, 2);
    flat(0, 0) = 1.0; flat(0, 1) = 1.0; flat(1, 0) = 0.0; flat(1, 1) = 2.0;
    CHECK(action_gap(flat) == doctest::Approx(2.0)); // constant rows contribute +inf
    flat(1, 1) = 0.0;
    CHECK(std::isinf(action_gap(flat)));
}

TEST_CASE("structural constants of the benchmark model") {
    TwoStateParams params;
    MeanFieldModel m = build_two_state(params);
    QTable ref(2, 2);
    ref(0, 0) = 4.5; ref(0, 1) = 2.9; ref(1, 0) = 3.9; ref(1, 1) = 5.5;
    StructuralConstants c = structural_constants(m, 100, &ref);
    CHECK(c.c_min == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(c.l_p_glob == 0.0);
    CHECK(c.l_p_loc == 0.0);
    CHECK(c.l_f_glob == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(c.l_f_loc == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(c.action_gap == doctest::Approx(1.6).epsilon(1e-12));
}

TEST_CASE("assumption verdicts on the benchmark model") {
    TwoStateParams params;
    MeanFieldModel m = build_two_state(params);
    StructuralConstants c = structural_constants(m, 100);
    AssumptionReport r = check_assumptions(c, m);
    // L_p = 0 < |X| c_min / 2 = 0.1
    CHECK(r.contraction_loc.holds);
    CHECK(r.contraction_glob.holds);
    CHECK(r.contraction_loc.threshold == doctest::Approx(0.1).epsilon(1e-12));
    // phi = 500 is far above the contraction-friendly range
    CHECK_FALSE(r.phi_bound.holds);

    TwoStateParams tame = params;
    tame.phi = 1e-6;
    MeanFieldModel mt = build_two_state(tame);
    AssumptionReport rt = check_assumptions(structural_constants(mt, 100), mt);
    CHECK(rt.phi_bound.holds);
}

TEST_CASE("theorem error bounds formula and preconditions") {
    TwoStateParams params;
    MeanFieldModel m = build_two_state(params);
    QTable ref(2, 2);
    ref(0, 0) = 4.5; ref(0, 1) = 2.9; ref(1, 0) = 3.9; ref(1, 1) = 5.5;
    StructuralConstants c = structural_constants(m, 100, &ref);
    ErrorBounds b = theorem_error_bounds(c, m);
    // dist bound: 4 |A|^{3/2} e^{-phi delta} / (|X| c_min - 2 L_p^max)
    const double expect_dist = 4.0 * std::pow(2.0, 1.5) * std::exp(-500.0 * 1.6) / 0.2;
    CHECK(b.dist_bound == doctest::Approx(expect_dist));
    CHECK(b.q_bound >= 0.0);

    // infinite gap (constant-row reference) gives zero bounds
    StructuralConstants cinf = structural_constants(m, 100);
    CHECK(std::isinf(cinf.action_gap));
    ErrorBounds bz = theorem_error_bounds(cinf, m);
    CHECK(bz.dist_bound == 0.0);
    CHECK(bz.q_bound == 0.0);

    // violated denominator must be rejected
    StructuralConstants bad = c;
    bad.l_p_glob = bad.l_p_max = 0.2;
    CHECK_THROWS_AS(theorem_error_bounds(bad, m), std::invalid_argument);
}
