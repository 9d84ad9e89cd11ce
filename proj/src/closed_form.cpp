#include "railfd/closed_form.hpp"
#include "railfd/errors.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace railfd::closed_form {

ZetaFactors zeta_factors(const CostParams& c) {
    if (!(c.alpha > c.beta))
        throw std::domain_error("zeta factors require alpha > beta");
    return {2 * (c.alpha - c.beta) / (2 * c.alpha - c.beta),
            2 * (c.alpha + c.gamma) / (2 * c.alpha + c.gamma)};
}

double eta(const OperationalParams& p) {
    return (p.l - p.delta) * p.t_b0 + p.tau * p.l;
}

StatePoint state_profiles(double t, double a_c, double t0, double tm,
                          const CostParams& c, const OperationalParams& p) {
    const auto z = zeta_factors(c);
    const double T0 = min_travel_time(p);
    const double zeta = t < tm ? z.zeta1 : z.zeta2;
    const double T = t < tm
                         ? T0 + c.beta / c.alpha * (t - t0)
                         : T0 + c.beta / c.alpha * (tm - t0) - c.gamma / c.alpha * (t - tm);
    const double q = zeta * a_c;
    return {q, q * T / p.L};
}

double arrival_rate_closed_form(double t, double a_c, double t0, double tm,
                                const CostParams& c, const OperationalParams& p,
                                Regime regime) {
    const auto z = zeta_factors(c);
    const double zeta = t < tm ? z.zeta1 : z.zeta2;
    double a_p;
    if (regime == Regime::FreeFlow) {
        const double sched = t < tm
                                 ? c.beta / c.alpha * (t - t0)
                                 : c.beta / c.alpha * (tm - t0) - c.gamma / c.alpha * (t - tm);
        a_p = p.mu * zeta * (p.l / p.L) * a_c * sched;
    } else {
        const double T0 = min_travel_time(p);
        const double T = t < tm
                             ? T0 + c.beta / c.alpha * (t - t0)
                             : T0 + c.beta / c.alpha * (tm - t0) - c.gamma / c.alpha * (t - tm);
        a_p = p.mu / (p.l - p.delta)
              * (p.l - a_c * (p.delta * zeta * (p.l / p.L) * T - eta(p) * zeta));
    }
    if (!(a_p >= 0) || a_p >= p.mu) {
        const auto sp = state_profiles(t, a_c, t0, tm, c, p);
        throw InfeasibleStateError(sp.q, sp.k, "closed-form arrival rate outside [0, mu)");
    }
    return a_p;
}

double tc_ff(double n_pax, double a_c, const CostParams& c,
             const OperationalParams& p) {
    return std::sqrt(2 * c.alpha * p.L * n_pax
                     / (p.mu * p.l * a_c * (1 / c.beta + 1 / c.gamma)));
}

Thresholds regime_thresholds(double a_c, const CostParams& c,
                             const OperationalParams& p) {
    const auto z = zeta_factors(c);
    const double T0 = min_travel_time(p);
    const double spacing_slack = (p.l - p.delta) / p.v_f - p.tau;
    auto ceiling = [&](double zeta) {
        return c.alpha * p.L * (1 + zeta * a_c * spacing_slack) / (zeta * p.l * a_c)
               - c.alpha * T0;
    };
    const double tc_fccf_max =
        c.alpha * p.L * (p.l - eta(p) * z.zeta2 * a_c) / (p.delta * z.zeta2 * p.l * a_c)
        - c.alpha * T0;
    return {ceiling(z.zeta2), ceiling(z.zeta1), tc_fccf_max};
}

QuadraticCoeffs fcf_coefficients(double a_c, const CostParams& c,
                                 const OperationalParams& p) {
    const auto z = zeta_factors(c);
    const double T0 = min_travel_time(p);
    const double et = eta(p);
    const double tcff_max = regime_thresholds(a_c, c, p).tc_ff_max;
    const double half_late = 1 + c.gamma / (2 * c.alpha);

    const double r = p.mu * c.beta / ((p.l - p.delta) * c.gamma) * half_late
                     * (p.l - et * z.zeta2 * a_c - p.delta * z.zeta2 * (p.l / p.L) * a_c * T0);
    const double s =
        p.mu * half_late * (tcff_max / c.gamma)
            * ((p.l / (2 * c.alpha * p.L)) * z.zeta2 * a_c * tcff_max
               + (p.delta / (p.l - p.delta)) * z.zeta2 * (p.l / (2 * c.alpha * p.L)) * a_c
                     * (2 * c.alpha * T0 + tcff_max))
        + p.mu * half_late * (tcff_max / c.gamma)
              * ((et / (p.l - p.delta)) * z.zeta2 * a_c - p.l / (p.l - p.delta));
    const double u = p.mu * p.l / (2 * p.L) * a_c
                     * ((c.beta / c.alpha) * (1 - c.beta / c.alpha)
                        - (p.delta * c.beta * c.beta
                           / ((p.l - p.delta) * c.alpha * c.gamma))
                              * (1 + c.gamma / c.alpha));
    return {r, s, u};
}

FcfSolution tc_fcf(double n_pax, double a_c, const CostParams& c,
                   const OperationalParams& p) {
    const auto q = fcf_coefficients(a_c, c, p);
    const double disc = q.r * q.r - 4 * q.u * (q.s - n_pax);
    if (disc < 0)
        throw std::domain_error("FCF conservation quadratic has no real solution");
    return {c.beta * (-q.r + std::sqrt(disc)) / (2 * q.u), q};
}

double tc_fcf_sensitivity(double n_pax, double a_c, const CostParams& c,
                          const OperationalParams& p) {
    const auto q = fcf_coefficients(a_c, c, p);
    const double disc = q.r * q.r + 4 * q.u * n_pax - 4 * q.u * q.s;
    if (disc < 0)
        throw std::domain_error("FCF conservation quadratic has no real solution");
    return c.beta / std::sqrt(disc);
}

double np_ff_bound(double a_c, const CostParams& c, const OperationalParams& p) {
    const double tcff_max = regime_thresholds(a_c, c, p).tc_ff_max;
    // invert the square-root cost law at the ceiling
    return tcff_max * tcff_max * p.mu * p.l * a_c * (1 / c.beta + 1 / c.gamma)
           / (2 * c.alpha * p.L);
}

double np_fcf_bound(double a_c, const CostParams& c, const OperationalParams& p) {
    const double target = regime_thresholds(a_c, c, p).tc_fcf_max;
    double lo = np_ff_bound(a_c, c, p);
    double hi = lo * 2 + 1;
    while (tc_fcf(hi, a_c, c, p).tc_e < target) {
        lo = hi;
        hi *= 2;
        if (hi > 1e12) return std::numeric_limits<double>::infinity();
    }
    while (hi - lo > 1.0) {
        const double mid = 0.5 * (lo + hi);
        (tc_fcf(mid, a_c, c, p).tc_e < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::string pattern_name(Pattern pat) {
    switch (pat) {
        case Pattern::FF: return "FF";
        case Pattern::FCF: return "FCF";
        case Pattern::FCCF: return "FCCF";
        default: return "Infeasible";
    }
}

PatternReport classify_pattern(double n_pax, double a_c, const CostParams& c,
                               const OperationalParams& p,
                               const std::function<double(double, double)>& numeric_tc) {
    PatternReport rep{};
    const auto th = regime_thresholds(a_c, c, p);
    rep.tc_ff_max = th.tc_ff_max;
    rep.tc_fcf_max = th.tc_fcf_max;
    rep.tc_fccf_max = th.tc_fccf_max;
    rep.np_ff = np_ff_bound(a_c, c, p);
    rep.np_fcf = np_fcf_bound(a_c, c, p);

    const double tc_free = tc_ff(n_pax, a_c, c, p);
    if (tc_free <= th.tc_ff_max) {
        rep.pattern = Pattern::FF;
        rep.tc_e = tc_free;
        return rep;
    }
    const double tc_mixed = tc_fcf(n_pax, a_c, c, p).tc_e;
    if (tc_mixed <= th.tc_fcf_max) {
        rep.pattern = Pattern::FCF;
        rep.tc_e = tc_mixed;
        return rep;
    }
    // FCCF has no closed-form cost; decide on the numeric value if we can.
    double tc_num = std::numeric_limits<double>::quiet_NaN();
    if (numeric_tc) {
        try {
            tc_num = numeric_tc(n_pax, a_c);
        } catch (...) {
            rep.pattern = Pattern::Infeasible;
            rep.tc_e = std::numeric_limits<double>::quiet_NaN();
            return rep;
        }
    }
    if (std::isnan(tc_num) || tc_num <= th.tc_fccf_max) {
        rep.pattern = Pattern::FCCF;
        rep.tc_e = tc_num;
    } else {
        rep.pattern = Pattern::Infeasible;
        rep.tc_e = std::numeric_limits<double>::quiet_NaN();
    }
    return rep;
}

} // namespace railfd::closed_form
