#include "railfd/fd.hpp"
#include "railfd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace railfd {

namespace {

// Recurring aggregates of the FD closed forms.
struct FdConstants {
    double c_line; // t_b0 + l/v_f, per-segment traversal time at zero demand
    double c_crit; // t_b0 + delta/v_f + tau, traversal time at minimum spacing
    double slope;  // delta*l/eta, magnitude of the congested-branch slope

    explicit FdConstants(const OperationalParams& p)
        : c_line(p.t_b0 + p.l / p.v_f),
          c_crit(p.t_b0 + p.delta / p.v_f + p.tau),
          slope(p.delta * p.l / ((p.l - p.delta) * p.t_b0 + p.tau * p.l)) {}
};

void check_ap(double a_p, const OperationalParams& p) {
    if (!(a_p >= 0) || a_p >= p.mu)
        throw std::domain_error("passenger arrival rate outside [0, mu): boarding saturation");
}

} // namespace

CriticalPoint critical_point(double a_p, const OperationalParams& p) {
    check_ap(a_p, p);
    const FdConstants c(p);
    const double slack = 1.0 - a_p / p.mu;
    return {slack / c.c_crit,
            slack * c.c_line / (c.c_crit * p.l) + a_p / (p.mu * p.l)};
}

double fd_flow(double k, double a_p, const OperationalParams& p) {
    check_ap(a_p, p);
    if (!(k >= 0)) throw std::domain_error("train density must be non-negative");
    const FdConstants c(p);
    const auto cp = critical_point(a_p, p);
    if (k < cp.k_star) return (k * p.l - a_p / p.mu) / c.c_line;
    return std::max(0.0, -c.slope * (k - cp.k_star) + cp.q_star);
}

double jam_density(double a_p, const OperationalParams& p) {
    const FdConstants c(p);
    const auto cp = critical_point(a_p, p);
    return cp.k_star + cp.q_star / c.slope;
}

std::pair<double, Regime> invert_passenger_rate(double q, double k,
                                                const OperationalParams& p) {
    if (!(q > 0) || !(k > 0))
        throw std::domain_error("invert_passenger_rate requires q > 0 and k > 0");
    const FdConstants c(p);

    // Free-flow branch solved for a_p.
    double ap_ff = p.mu * (k * p.l - q * c.c_line);
    // Congested branch is affine in a_p: q = A*a_p + B given k.
    const double a_coef = c.slope / (p.mu * p.l) * (1.0 - c.c_line / c.c_crit)
                          - 1.0 / (p.mu * c.c_crit);
    const double b_coef = -c.slope * k + c.slope * c.c_line / (c.c_crit * p.l)
                          + 1.0 / c.c_crit;
    double ap_cg = (q - b_coef) / a_coef;

    // absorb roundoff at the a_p = 0 boundary (rush edges sit exactly there)
    const double ap_tol = 1e-9 * p.mu;
    if (ap_ff < 0 && ap_ff > -ap_tol) ap_ff = 0;
    if (ap_cg < 0 && ap_cg > -ap_tol) ap_cg = 0;

    const double tol = 1e-9 * std::max(1.0, k);
    // Signed margin of each regime test; positive means the test holds.
    double m_ff = -2.0, m_cg = -2.0;
    if (ap_ff >= 0 && ap_ff < p.mu)
        m_ff = critical_point(ap_ff, p).k_star - k;
    if (ap_cg >= 0 && ap_cg < p.mu)
        m_cg = k - critical_point(ap_cg, p).k_star;

    const bool ff_ok = m_ff >= -tol && m_ff > -2.0;
    const bool cg_ok = m_cg >= -tol && m_cg > -2.0;
    if (ff_ok && cg_ok) {
        // Possible only at discretization noise near k*; prefer the branch
        // holding with margin, free-flow on a tie.
        if (m_cg > m_ff + tol) return {ap_cg, Regime::Congested};
        return {ap_ff, Regime::FreeFlow};
    }
    if (ff_ok) return {ap_ff, Regime::FreeFlow};
    if (cg_ok) return {ap_cg, Regime::Congested};
    throw InfeasibleStateError(q, k,
                               "no FD branch admits this (q, k) pair with a_p in [0, mu)");
}

double min_travel_time(const OperationalParams& p) {
    return (p.L / p.l) * (p.t_b0 + p.l / p.v_f);
}

} // namespace railfd
