#ifndef MFCG_TYPES_HPP
#define MFCG_TYPES_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mfcg {

/// Thrown when a user-supplied kernel or cost violates its contract
/// (e.g. the kernel returns something that is not a probability vector).
struct ModelContractError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown by fixed-point solvers that hit their iteration budget.
struct IterationLimitError : std::runtime_error {
    IterationLimitError(const std::string& what, double residual)
        : std::runtime_error(what), last_residual(residual) {}
    double last_residual;
};

/// Thrown by extract_solution when the extracted Q-table has no strict
/// action gap at some state.
struct DegenerateGapError : std::runtime_error {
    DegenerateGapError(const std::string& what, double gap)
        : std::runtime_error(what), gap(gap) {}
    double gap;
};

struct SpaceDims {
    int n_states = 0;
    int n_actions = 0;
};

inline void check_dims(const SpaceDims& d) {
    if (d.n_states < 1 || d.n_actions < 1)
        throw std::invalid_argument("SpaceDims: n_states and n_actions must be >= 1");
}

/// Probability vector over states. Construction clamps tiny negative
/// entries (>= -1e-12) to zero and renormalizes sums within 1e-10 of 1;
/// anything further off is rejected.
class SimplexDist {
public:
    SimplexDist() = default;

    explicit SimplexDist(std::vector<double> probs) : p_(std::move(probs)) {
        double sum = 0.0;
        for (double& v : p_) {
            if (!std::isfinite(v)) throw std::invalid_argument("SimplexDist: non-finite entry");
            if (v < 0.0) {
                if (v < -1e-12) throw std::invalid_argument("SimplexDist: negative entry");
                v = 0.0;
            }
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-10)
            throw std::invalid_argument("SimplexDist: entries sum to " + std::to_string(sum));
        if (sum != 1.0) {
            for (double& v : p_) v /= sum;
        }
    }

    static SimplexDist uniform(int n) {
        return SimplexDist(std::vector<double>(n, 1.0 / n));
    }

    static SimplexDist point_mass(int n, int x) {
        std::vector<double> p(n, 0.0);
        p.at(x) = 1.0;
        return SimplexDist(std::move(p));
    }

    int size() const { return static_cast<int>(p_.size()); }
    double operator[](int i) const { return p_[i]; }
    const std::vector<double>& probs() const { return p_; }

    double l1_distance(const SimplexDist& o) const {
        double d = 0.0;
        for (int i = 0; i < size(); ++i) d += std::abs(p_[i] - o.p_[i]);
        return d;
    }

private:
    std::vector<double> p_;
};

/// |X| x |A| table of action values (cost units).
struct QTable {
    QTable() = default;
    QTable(int n_states, int n_actions)
        : nx(n_states), na(n_actions), v(static_cast<size_t>(n_states) * n_actions, 0.0) {}

    double& operator()(int x, int a) { return v[static_cast<size_t>(x) * na + a]; }
    double operator()(int x, int a) const { return v[static_cast<size_t>(x) * na + a]; }

    double row_min(int x) const {
        double m = (*this)(x, 0);
        for (int a = 1; a < na; ++a) m = std::min(m, (*this)(x, a));
        return m;
    }

    double max_abs_diff(const QTable& o) const {
        double d = 0.0;
        for (size_t i = 0; i < v.size(); ++i) d = std::max(d, std::abs(v[i] - o.v[i]));
        return d;
    }

    bool all_finite() const {
        for (double x : v)
            if (!std::isfinite(x)) return false;
        return true;
    }

    int nx = 0;
    int na = 0;
    std::vector<double> v;
};

/// One probability row over actions per state.
struct StochasticPolicy {
    StochasticPolicy() = default;
    explicit StochasticPolicy(std::vector<std::vector<double>> policy_rows)
        : rows(std::move(policy_rows)) {
        for (const auto& r : rows) validate_row(r);
    }

    static void validate_row(const std::vector<double>& r) {
        double s = 0.0;
        for (double p : r) {
            if (!(p >= 0.0 && p <= 1.0 + 1e-12))
                throw std::invalid_argument("StochasticPolicy: entry outside [0,1]");
            s += p;
        }
        if (std::abs(s - 1.0) > 1e-10)
            throw std::invalid_argument("StochasticPolicy: row does not sum to 1");
    }

    static StochasticPolicy uniform(int n_states, int n_actions) {
        return StochasticPolicy(std::vector<std::vector<double>>(
            n_states, std::vector<double>(n_actions, 1.0 / n_actions)));
    }

    int n_states() const { return static_cast<int>(rows.size()); }
    const std::vector<double>& row(int x) const { return rows.at(x); }

    std::vector<std::vector<double>> rows;
};

/// Deterministic state -> action map.
struct PurePolicy {
    std::vector<int> choice;

    int operator()(int x) const { return choice.at(x); }
    int n_states() const { return static_cast<int>(choice.size()); }

    StochasticPolicy to_stochastic(int n_actions) const {
        std::vector<std::vector<double>> rows;
        rows.reserve(choice.size());
        for (int a : choice) {
            if (a < 0 || a >= n_actions) throw std::invalid_argument("PurePolicy: action out of range");
            std::vector<double> r(n_actions, 0.0);
            r[a] = 1.0;
            rows.push_back(std::move(r));
        }
        return StochasticPolicy(std::move(rows));
    }
};

/// One distribution per state-action pair.
struct LocalFamily {
    LocalFamily() = default;
    LocalFamily(int n_states, int n_actions, const SimplexDist& init)
        : nx(n_states), na(n_actions),
          dists(static_cast<size_t>(n_states) * n_actions, init) {}

    SimplexDist& at(int x, int a) { return dists.at(static_cast<size_t>(x) * na + a); }
    const SimplexDist& at(int x, int a) const { return dists.at(static_cast<size_t>(x) * na + a); }

    int nx = 0;
    int na = 0;
    std::vector<SimplexDist> dists;
};

/// Exact Lipschitz constants a model may declare for itself.
struct LipschitzDecl {
    double l_p_glob = 0.0;
    double l_p_loc = 0.0;
    double l_f_glob = 0.0;
    double l_f_loc = 0.0;
};

/// Evaluator of the transition kernel p(.|x,a,mu,mu_tilde) and running
/// cost f(x,a,mu,mu_tilde), plus discount and softmin temperature.
/// Kernels are callables so that genuine (mu, mu_tilde) dependence is
/// representable; dense distribution-independent models are built on top
/// of this in envs.
struct MeanFieldModel {
    SpaceDims dims;
    std::function<SimplexDist(int x, int a, const SimplexDist& mu, const SimplexDist& mu_tilde)> kernel;
    std::function<double(int x, int a, const SimplexDist& mu, const SimplexDist& mu_tilde)> cost;
    double gamma = 0.5;
    double phi = 1.0;
    double cost_bound = 0.0; // declared sup-norm bound on f
    std::optional<LipschitzDecl> declared;

    SimplexDist kernel_row(int x, int a, const SimplexDist& mu, const SimplexDist& mu_tilde) const {
        SimplexDist row;
        try {
            row = kernel(x, a, mu, mu_tilde);
        } catch (const std::invalid_argument& e) {
            throw ModelContractError(std::string("kernel returned invalid distribution: ") + e.what());
        }
        if (row.size() != dims.n_states)
            throw ModelContractError("kernel row has wrong dimension");
        return row;
    }
};

inline void check_model(const MeanFieldModel& m) {
    check_dims(m.dims);
    if (!(m.gamma > 0.0 && m.gamma < 1.0)) throw std::invalid_argument("gamma must be in (0,1)");
    if (!(m.phi > 0.0)) throw std::invalid_argument("phi must be positive");
    if (!m.kernel || !m.cost) throw std::invalid_argument("model kernel/cost not set");
}

} // namespace mfcg

#endif
