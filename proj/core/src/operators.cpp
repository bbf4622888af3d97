#include "mfcg/operators.hpp"

#include <random>

namespace mfcg {

QTable bellman_apply(const MeanFieldModel& model, const SimplexDist& mu,
                     const SimplexDist& mu_tilde, const QTable& q) {
    const int nx = model.dims.n_states;
    const int na = model.dims.n_actions;
    QTable out(nx, na);
    std::vector<double> vmin(nx);
    for (int x = 0; x < nx; ++x) vmin[x] = q.row_min(x);
    for (int x = 0; x < nx; ++x) {
        for (int a = 0; a < na; ++a) {
            const SimplexDist row = model.kernel_row(x, a, mu, mu_tilde);
            double cont = 0.0;
            for (int xp = 0; xp < nx; ++xp) cont += row[xp] * vmin[xp];
            out(x, a) = model.cost(x, a, mu, mu_tilde) + model.gamma * cont;
        }
    }
    return out;
}

QTable t3(const MeanFieldModel& model, const SimplexDist& mu, const QTable& q,
          const LocalFamily& locals) {
    const int nx = model.dims.n_states;
    const int na = model.dims.n_actions;
    QTable out(nx, na);
    std::vector<double> vmin(nx);
    for (int x = 0; x < nx; ++x) vmin[x] = q.row_min(x);
    for (int x = 0; x < nx; ++x) {
        for (int a = 0; a < na; ++a) {
            const SimplexDist& mt = locals.at(x, a);
            const SimplexDist row = model.kernel_row(x, a, mu, mt);
            double cont = 0.0;
            for (int xp = 0; xp < nx; ++xp) cont += row[xp] * vmin[xp];
            out(x, a) = model.cost(x, a, mu, mt) + model.gamma * cont - q(x, a);
        }
    }
    return out;
}

std::vector<double> p3(const MeanFieldModel& model, const SimplexDist& mu,
                       const QTable& q, const LocalFamily& locals) {
    const int nx = model.dims.n_states;
    const int na = model.dims.n_actions;
    const StochasticPolicy pi = softmin_policy(q, model.phi);
    std::vector<double> out(nx, 0.0);
    for (int x = 0; x < nx; ++x) {
        const double w = mu[x];
        if (w == 0.0) continue;
        for (int a = 0; a < na; ++a) {
            const double pa = pi.row(x)[a];
            if (pa == 0.0) continue;
            const SimplexDist row = model.kernel_row(x, a, mu, locals.at(x, a));
            for (int y = 0; y < nx; ++y) out[y] += w * pa * row[y];
        }
    }
    for (int y = 0; y < nx; ++y) out[y] -= mu[y];
    return out;
}

std::vector<double> p3_tilde(const MeanFieldModel& model, int x, int a,
                             const SimplexDist& mu, const QTable& q,
                             const SimplexDist& mu_tilde) {
    const StochasticPolicy pi = softmin_policy(q, model.phi);
    const SimplexDist next = apply_modified_kernel(model, mu_tilde, pi, x, a, mu, mu_tilde);
    std::vector<double> out(model.dims.n_states);
    for (int y = 0; y < model.dims.n_states; ++y) out[y] = next[y] - mu_tilde[y];
    return out;
}

double action_gap(const QTable& q) {
    double gap = std::numeric_limits<double>::infinity();
    for (int x = 0; x < q.nx; ++x) {
        const double best = q.row_min(x);
        double second = std::numeric_limits<double>::infinity();
        for (int a = 0; a < q.na; ++a)
            if (q(x, a) > best) second = std::min(second, q(x, a));
        if (std::isfinite(second)) gap = std::min(gap, second - best);
    }
    return gap;
}

namespace {

SimplexDist random_dist(int n, std::mt19937_64& gen) {
    std::exponential_distribution<double> exp1(1.0);
    std::vector<double> v(n);
    double s = 0.0;
    for (double& x : v) {
        x = exp1(gen);
        s += x;
    }
    for (double& x : v) x /= s;
    return SimplexDist(std::move(v));
}

} // namespace

StructuralConstants structural_constants(const MeanFieldModel& model, int sample_budget,
                                         const QTable* reference_q) {
    if (sample_budget < 1) throw std::invalid_argument("structural_constants: sample_budget must be >= 1");
    check_model(model);
    const int nx = model.dims.n_states;
    const int na = model.dims.n_actions;

    StructuralConstants c;
    std::mt19937_64 gen(0x5eedULL);

    c.c_min = std::numeric_limits<double>::infinity();
    double lp_glob = 0.0, lp_loc = 0.0, lf_glob = 0.0, lf_loc = 0.0;
    for (int s = 0; s < sample_budget; ++s) {
        const SimplexDist mu = random_dist(nx, gen);
        const SimplexDist mt = random_dist(nx, gen);
        const SimplexDist mu2 = random_dist(nx, gen);
        const SimplexDist mt2 = random_dist(nx, gen);
        const double dmu = mu.l1_distance(mu2);
        const double dmt = mt.l1_distance(mt2);
        for (int x = 0; x < nx; ++x) {
            for (int a = 0; a < na; ++a) {
                const SimplexDist base = model.kernel_row(x, a, mu, mt);
                for (int y = 0; y < nx; ++y) c.c_min = std::min(c.c_min, base[y]);
                if (dmu > 0.0) {
                    const SimplexDist pg = model.kernel_row(x, a, mu2, mt);
                    lp_glob = std::max(lp_glob, base.l1_distance(pg) / dmu);
                    lf_glob = std::max(lf_glob,
                        std::abs(model.cost(x, a, mu, mt) - model.cost(x, a, mu2, mt)) / dmu);
                }
                if (dmt > 0.0) {
                    const SimplexDist pl = model.kernel_row(x, a, mu, mt2);
                    lp_loc = std::max(lp_loc, base.l1_distance(pl) / dmt);
                    lf_loc = std::max(lf_loc,
                        std::abs(model.cost(x, a, mu, mt) - model.cost(x, a, mu, mt2)) / dmt);
                }
            }
        }
    }
    if (model.declared) {
        c.l_p_glob = model.declared->l_p_glob;
        c.l_p_loc = model.declared->l_p_loc;
        c.l_f_glob = model.declared->l_f_glob;
        c.l_f_loc = model.declared->l_f_loc;
    } else {
        c.l_p_glob = lp_glob;
        c.l_p_loc = lp_loc;
        c.l_f_glob = lf_glob;
        c.l_f_loc = lf_loc;
    }
    c.l_p_max = std::max(c.l_p_glob, c.l_p_loc);
    // c_min is always a valid lower bound for c_min^phi; minimizing over
    // all Q-tables is not computable, so report the bound.
    c.c_min_phi = c.c_min;
    c.action_gap = reference_q ? action_gap(*reference_q)
                               : std::numeric_limits<double>::infinity();
    return c;
}

AssumptionReport check_assumptions(const StructuralConstants& c, const MeanFieldModel& model) {
    AssumptionReport r;
    const double nx = model.dims.n_states;
    const double half = 0.5 * nx * c.c_min;
    r.contraction_loc = {c.l_p_loc < half, c.l_p_loc, half};
    r.contraction_glob = {c.l_p_glob < half, c.l_p_glob, half};

    const double l_p_total = c.l_p_glob + c.l_p_loc;
    const double l_f_total = c.l_f_glob + c.l_f_loc;
    const double na = model.dims.n_actions;
    const double g = model.gamma;
    const double fsup = model.cost_bound;
    const double branch_q =
        (nx * c.c_min - l_p_total) / na * (1.0 - g) / (l_f_total + g / (1.0 - g) * l_p_total * fsup);
    const double denom_mu = nx * c.c_min - c.l_p_glob;
    const double branch_mu =
        denom_mu * denom_mu / (model.phi * na * (denom_mu + c.l_p_loc)) * (1.0 - g) /
        (c.l_f_glob + g / (1.0 - g) * c.l_p_glob * fsup);
    r.phi_branch_q = branch_q;
    r.phi_branch_mu = branch_mu;
    const double bound = std::min(branch_q, branch_mu);
    r.phi_bound = {model.phi > 0.0 && model.phi < bound, model.phi, bound};
    return r;
}

ErrorBounds theorem_error_bounds(const StructuralConstants& c, const MeanFieldModel& model) {
    const double nx = model.dims.n_states;
    const double na = model.dims.n_actions;
    const double denom = nx * c.c_min - 2.0 * c.l_p_max;
    if (!(denom > 0.0))
        throw std::invalid_argument("theorem_error_bounds: |X| c_min - 2 L_p^max must be positive");
    const double numer = 4.0 * std::pow(na, 1.5) * std::exp(-model.phi * c.action_gap);
    const double l_f = c.l_f_glob + c.l_f_loc;
    const double g = model.gamma;
    ErrorBounds b;
    b.dist_bound = numer / denom;
    b.q_bound = (l_f + g / (1.0 - g) * c.l_p_max * model.cost_bound) * numer / ((1.0 - g) * denom);
    return b;
}

} // namespace mfcg
