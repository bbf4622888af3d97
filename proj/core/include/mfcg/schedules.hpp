#ifndef MFCG_SCHEDULES_HPP
#define MFCG_SCHEDULES_HPP

#include <string>
#include <vector>

#include "mfcg/types.hpp"

namespace mfcg {

/// Power-law exponents of the three timescales,
/// 1/2 < omega_mu_tilde < omega_q < omega_mu < 1.
struct RateExponents {
    double omega_mu_tilde = 0.55;
    double omega_q = 0.75;
    double omega_mu = 0.95;
};

enum class RateKind { Mu, Q, MuTilde };

/// Per-pair visit counters nu(x,a,n) for the asynchronous learner.
struct VisitCounts {
    VisitCounts() = default;
    VisitCounts(int n_states, int n_actions)
        : nx(n_states), na(n_actions), counts(static_cast<size_t>(n_states) * n_actions, 0) {}

    std::int64_t& operator()(int x, int a) { return counts[static_cast<size_t>(x) * na + a]; }
    std::int64_t operator()(int x, int a) const { return counts[static_cast<size_t>(x) * na + a]; }

    int nx = 0;
    int na = 0;
    std::vector<std::int64_t> counts;
};

struct ScheduleReport {
    bool valid = false;
    std::vector<std::string> diagnostics;
};

void check_exponents(const RateExponents& e);

/// rho^mu_n = 1/(1+n)^omega_mu.
double rate_global(std::int64_t n, const RateExponents& e);

/// Visit-count rate 1/(1+nu(x,a,n))^omega for the Q or local timescale.
double rate_visit(RateKind kind, const VisitCounts& counts, int x, int a, const RateExponents& e);

/// Deterministic (synchronous/idealized) rate 1/(1+n)^omega.
double rate_deterministic(RateKind kind, std::int64_t n, const RateExponents& e);

/// Validates the strict exponent ordering. The power-law family with
/// exponents in (1/2, 1) is non-summable, square-summable, and has
/// vanishing cross-timescale ratios; those conditions hold analytically
/// once the ordering does, so no further numeric check is performed.
ScheduleReport validate_exponents(const RateExponents& e);

} // namespace mfcg

#endif
