#include "mfcg/schedules.hpp"

#include <cmath>

namespace mfcg {

namespace {

double exponent_for(RateKind kind, const RateExponents& e) {
    switch (kind) {
        case RateKind::Mu: return e.omega_mu;
        case RateKind::Q: return e.omega_q;
        case RateKind::MuTilde: return e.omega_mu_tilde;
    }
    throw std::invalid_argument("unknown rate kind");
}

} // namespace

void check_exponents(const RateExponents& e) {
    if (!(0.5 < e.omega_mu_tilde && e.omega_mu_tilde < e.omega_q && e.omega_q < e.omega_mu &&
          e.omega_mu < 1.0))
        throw std::invalid_argument(
            "RateExponents: need 1/2 < omega_mu_tilde < omega_q < omega_mu < 1");
}

double rate_global(std::int64_t n, const RateExponents& e) {
    check_exponents(e);
    if (n < 0) throw std::invalid_argument("rate_global: negative step");
    return std::pow(1.0 + static_cast<double>(n), -e.omega_mu);
}

double rate_visit(RateKind kind, const VisitCounts& counts, int x, int a, const RateExponents& e) {
    check_exponents(e);
    if (kind == RateKind::Mu)
        throw std::invalid_argument("rate_visit: the global timescale is not visit-counted");
    if (x < 0 || x >= counts.nx || a < 0 || a >= counts.na)
        throw std::invalid_argument("rate_visit: index out of range");
    return std::pow(1.0 + static_cast<double>(counts(x, a)), -exponent_for(kind, e));
}

double rate_deterministic(RateKind kind, std::int64_t n, const RateExponents& e) {
    check_exponents(e);
    if (n < 0) throw std::invalid_argument("rate_deterministic: negative step");
    return std::pow(1.0 + static_cast<double>(n), -exponent_for(kind, e));
}

ScheduleReport validate_exponents(const RateExponents& e) {
    ScheduleReport r;
    r.valid = true;
    if (!(e.omega_mu_tilde > 0.5)) {
        r.valid = false;
        r.diagnostics.push_back("omega_mu_tilde <= 1/2 breaks square-summability");
    }
    if (!(e.omega_mu_tilde < e.omega_q)) {
        r.valid = false;
        r.diagnostics.push_back("need omega_mu_tilde < omega_q (locals must be the fastest timescale)");
    }
    if (!(e.omega_q < e.omega_mu)) {
        r.valid = false;
        r.diagnostics.push_back("need omega_q < omega_mu (global distribution must be the slowest timescale)");
    }
    if (!(e.omega_mu < 1.0)) {
        r.valid = false;
        r.diagnostics.push_back("omega_mu >= 1 breaks non-summability of the slow rate");
    }
    if (r.valid)
        r.diagnostics.push_back(
            "power-law rates with exponents in (1/2,1): non-summable, square-summable, "
            "cross-timescale ratios vanish");
    return r;
}

} // namespace mfcg
