#ifndef MFCG_TEST_HELPERS_HPP
#define MFCG_TEST_HELPERS_HPP

#include <random>

#include "mfcg/envs.hpp"

namespace mfcg::testing {

// Random probability row via normalized exponentials; entries stay
// strictly positive, which keeps c_min > 0.
inline std::vector<double> random_row(std::mt19937_64& gen, int n, double floor = 0.02) {
    std::exponential_distribution<double> exp_dist(1.0);
    std::vector<double> row(n);
    double sum = 0.0;
    for (double& v : row) {
        v = floor + exp_dist(gen);
        sum += v;
    }
    for (double& v : row) v /= sum;
    return row;
}

inline SimplexDist random_dist(std::mt19937_64& gen, int n) {
    return SimplexDist(random_row(gen, n));
}

inline QTable random_qtable(std::mt19937_64& gen, int nx, int na, double scale = 3.0) {
    std::uniform_real_distribution<double> unif(-scale, scale);
    QTable q(nx, na);
    for (int x = 0; x < nx; ++x)
        for (int a = 0; a < na; ++a) q(x, a) = unif(gen);
    return q;
}

// Random dense model with a distribution-independent kernel and a cost
// affine in (mu, mu_tilde); Lipschitz constants of an affine readout are
// half the coefficient spread, declared exactly.
inline MeanFieldModel random_dense_model(std::mt19937_64& gen, int nx, int na,
                                         double gamma = 0.5, double phi = 2.0) {
    DenseModelSpec spec;
    spec.dims = {nx, na};
    spec.gamma = gamma;
    spec.phi = phi;
    std::uniform_real_distribution<double> unif(0.0, 2.0);

    spec.kernel.assign(nx, std::vector<std::vector<double>>(na));
    spec.cost.assign(nx, std::vector<double>(na));
    spec.cost_mu.assign(nx, std::vector<std::vector<double>>(na, std::vector<double>(nx)));
    spec.cost_mu_tilde = spec.cost_mu;
    double lf_glob = 0.0, lf_loc = 0.0, fmax = 0.0;
    for (int x = 0; x < nx; ++x) {
        for (int a = 0; a < na; ++a) {
            spec.kernel[x][a] = random_row(gen, nx);
            spec.cost[x][a] = unif(gen);
            double glo = 1e300, ghi = -1e300, llo = 1e300, lhi = -1e300;
            for (int y = 0; y < nx; ++y) {
                spec.cost_mu[x][a][y] = unif(gen);
                spec.cost_mu_tilde[x][a][y] = unif(gen);
                glo = std::min(glo, spec.cost_mu[x][a][y]);
                ghi = std::max(ghi, spec.cost_mu[x][a][y]);
                llo = std::min(llo, spec.cost_mu_tilde[x][a][y]);
                lhi = std::max(lhi, spec.cost_mu_tilde[x][a][y]);
            }
            lf_glob = std::max(lf_glob, (ghi - glo) / 2.0);
            lf_loc = std::max(lf_loc, (lhi - llo) / 2.0);
            fmax = std::max(fmax, spec.cost[x][a] + ghi + lhi);
        }
    }
    spec.cost_bound = fmax;
    spec.lipschitz = LipschitzDecl{0.0, 0.0, lf_glob, lf_loc};
    return load_dense_model(spec);
}

// Stationary distribution of the chain nu -> nu P by long-double power
// iteration, independent of the library's Picard solvers.
inline SimplexDist stationary_oracle(const MeanFieldModel& model, const StochasticPolicy& pi,
                                     const SimplexDist& mu, const SimplexDist& mu_tilde_fixed,
                                     int frozen_x = -1, int frozen_a = -1) {
    const int nx = model.dims.n_states;
    std::vector<long double> v(nx, 1.0L / nx);
    for (int it = 0; it < 200000; ++it) {
        std::vector<long double> next(nx, 0.0L);
        for (int x = 0; x < nx; ++x) {
            if (x == frozen_x) {
                const SimplexDist row = model.kernel_row(x, frozen_a, mu, mu_tilde_fixed);
                for (int y = 0; y < nx; ++y) next[y] += v[x] * static_cast<long double>(row[y]);
            } else {
                for (int a = 0; a < model.dims.n_actions; ++a) {
                    const double w = pi.row(x)[a];
                    if (w == 0.0) continue;
                    const SimplexDist row = model.kernel_row(x, a, mu, mu_tilde_fixed);
                    for (int y = 0; y < nx; ++y)
                        next[y] += v[x] * static_cast<long double>(w) *
                                   static_cast<long double>(row[y]);
                }
            }
        }
        long double diff = 0.0L;
        for (int y = 0; y < nx; ++y) diff += std::abs(next[y] - v[y]);
        v = std::move(next);
        if (diff < 1e-16L) break;
    }
    std::vector<double> out(nx);
    for (int y = 0; y < nx; ++y) out[y] = static_cast<double>(v[y]);
    return SimplexDist(std::move(out));
}

inline double linf(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

} // namespace mfcg::testing

#endif
