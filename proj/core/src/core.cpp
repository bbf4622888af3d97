#include "mfcg/core.hpp"

#include <algorithm>

namespace mfcg {

std::vector<double> softmin_policy_row(const std::vector<double>& q_row, double phi) {
    if (q_row.empty()) throw std::invalid_argument("softmin_policy_row: empty row");
    if (!(phi > 0.0)) throw std::invalid_argument("softmin_policy_row: phi must be positive");
    for (double q : q_row)
        if (!std::isfinite(q)) throw std::invalid_argument("softmin_policy_row: non-finite entry");

    const double qmin = *std::min_element(q_row.begin(), q_row.end());
    std::vector<double> out(q_row.size());
    double z = 0.0;
    for (size_t i = 0; i < q_row.size(); ++i) {
        out[i] = std::exp(-phi * (q_row[i] - qmin));
        z += out[i];
    }
    for (double& p : out) p /= z;
    return out;
}

StochasticPolicy softmin_policy(const QTable& q, double phi) {
    std::vector<std::vector<double>> rows;
    rows.reserve(q.nx);
    for (int x = 0; x < q.nx; ++x) {
        std::vector<double> row(q.na);
        for (int a = 0; a < q.na; ++a) row[a] = q(x, a);
        rows.push_back(softmin_policy_row(row, phi));
    }
    return StochasticPolicy(std::move(rows));
}

PurePolicy argmin_policy(const QTable& q) {
    if (!q.all_finite()) throw std::invalid_argument("argmin_policy: non-finite Q-table");
    PurePolicy alpha;
    alpha.choice.resize(q.nx);
    for (int x = 0; x < q.nx; ++x) {
        int best = 0;
        for (int a = 1; a < q.na; ++a)
            if (q(x, a) < q(x, best)) best = a;
        alpha.choice[x] = best;
    }
    return alpha;
}

StochasticPolicy substitute_policy(const StochasticPolicy& pi, int x, int a) {
    if (x < 0 || x >= pi.n_states()) throw std::invalid_argument("substitute_policy: state out of range");
    if (a < 0 || a >= static_cast<int>(pi.row(x).size()))
        throw std::invalid_argument("substitute_policy: action out of range");
    auto rows = pi.rows;
    std::fill(rows[x].begin(), rows[x].end(), 0.0);
    rows[x][a] = 1.0;
    return StochasticPolicy(std::move(rows));
}

namespace {

SimplexDist finish_dist(std::vector<double> acc) {
    for (double& v : acc)
        if (v < 0.0 && v >= -1e-12) v = 0.0;
    return SimplexDist(std::move(acc));
}

} // namespace

SimplexDist apply_kernel(const MeanFieldModel& model, const SimplexDist& nu,
                         const StochasticPolicy& pi, const SimplexDist& mu,
                         const SimplexDist& mu_tilde) {
    const int nx = model.dims.n_states;
    const int na = model.dims.n_actions;
    std::vector<double> acc(nx, 0.0);
    for (int xp = 0; xp < nx; ++xp) {
        const double w = nu[xp];
        if (w == 0.0) continue;
        for (int a = 0; a < na; ++a) {
            const double pa = pi.row(xp)[a];
            if (pa == 0.0) continue;
            const SimplexDist row = model.kernel_row(xp, a, mu, mu_tilde);
            for (int y = 0; y < nx; ++y) acc[y] += w * pa * row[y];
        }
    }
    return finish_dist(std::move(acc));
}

SimplexDist apply_modified_kernel(const MeanFieldModel& model, const SimplexDist& nu,
                                  const StochasticPolicy& pi, int x, int a,
                                  const SimplexDist& mu, const SimplexDist& mu_tilde) {
    if (x < 0 || x >= model.dims.n_states || a < 0 || a >= model.dims.n_actions)
        throw std::invalid_argument("apply_modified_kernel: index out of range");
    const int nx = model.dims.n_states;
    const int na = model.dims.n_actions;
    std::vector<double> acc(nx, 0.0);
    for (int xp = 0; xp < nx; ++xp) {
        const double w = nu[xp];
        if (w == 0.0) continue;
        if (xp == x) {
            const SimplexDist row = model.kernel_row(x, a, mu, mu_tilde);
            for (int y = 0; y < nx; ++y) acc[y] += w * row[y];
        } else {
            for (int ap = 0; ap < na; ++ap) {
                const double pa = pi.row(xp)[ap];
                if (pa == 0.0) continue;
                const SimplexDist row = model.kernel_row(xp, ap, mu, mu_tilde);
                for (int y = 0; y < nx; ++y) acc[y] += w * pa * row[y];
            }
        }
    }
    return finish_dist(std::move(acc));
}

} // namespace mfcg
