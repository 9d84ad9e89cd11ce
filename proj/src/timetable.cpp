#include "railfd/timetable.hpp"
#include "railfd/closed_form.hpp"
#include "railfd/errors.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace railfd::timetable {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
} // namespace

double omega_ratio(const CostParams& c) {
    if (!(c.alpha > c.beta))
        throw std::domain_error("omega ratio requires alpha > beta");
    return c.gamma * (c.alpha - c.beta) / (c.alpha * (c.beta + c.gamma));
}

InflowProfile build_two_level_inflow(double a1, double a2, double t0, double tm,
                                     const CostParams& c, const OperationalParams& p) {
    if (!(a1 >= a2) || !(a2 > 0))
        throw std::invalid_argument("two-level inflow requires a1 >= a2 > 0");
    const double T0 = min_travel_time(p);
    const double sw_on = t0 - T0;
    const double sw_off = tm - (T0 + c.beta / c.alpha * (tm - t0));
    if (a1 == a2) return InflowProfile::constant(a1);
    const double lead = sw_on - std::max(24.0, 2 * (tm - t0));
    return InflowProfile({{lead, a2}, {sw_on, a1}, {sw_off, a2}});
}

ScenarioOutcome evaluate_scenario(double a1, double a2, const OperationalParams& p,
                                  const CostParams& c, const Wt1Demand& d,
                                  double a0, const SolverOptions& opts) {
    if (!(a1 >= a2) || !(a2 > 0))
        throw std::invalid_argument("evaluate_scenario requires a1 >= a2 > 0");
    const double omega = omega_ratio(c);
    if (omega * a1 + (1 - omega) * a2 > a0 + 1e-9) return {};

    const EquilibriumSolver solver(p, c, opts);
    const double tm = d.t_star;
    if (d.n_pax <= 0) {
        ScenarioOutcome out;
        out.status = ScenarioOutcome::Status::Ok;
        out.solution = solver.solve_wt1(d, InflowProfile::constant(a2));
        return out;
    }

    // For a candidate rush start the condition-2 switch times are implied
    // by the candidate itself; solving with that aligned profile makes the
    // timetable/equilibrium fixed point converge at the bisection root.
    int iterations = 0;
    auto profile_for = [&](double t0) {
        return build_two_level_inflow(a1, a2, t0, tm, c, p);
    };
    auto error_at = [&](double t0) -> double {
        ++iterations;
        try {
            return solver.served_continuum(t0, tm, profile_for(t0)) - d.n_pax;
        } catch (const InfeasibleStateError&) {
            return kInf;
        }
    };

    double hi = tm - 1e-9;
    double span = 0.25;
    double lo = tm - span;
    while (error_at(lo) < 0) {
        span *= 2;
        lo = tm - span;
        if (span > 96.0) return {}; // demand unreachable under this timetable
        if (iterations > opts.max_iter)
            throw SolverError("scenario bracket search exceeded the iteration budget");
    }
    while (hi - lo > 1e-12 * std::max(1.0, std::abs(tm))) {
        const double mid = 0.5 * (lo + hi);
        (error_at(mid) > 0 ? lo : hi) = mid;
        if (iterations > opts.max_iter)
            throw SolverError("scenario bisection exceeded the iteration budget");
    }
    const double t0 = 0.5 * (lo + hi);
    const auto profile = profile_for(t0);
    double residual;
    try {
        residual = solver.served_continuum(t0, tm, profile) - d.n_pax;
    } catch (const InfeasibleStateError&) {
        return {};
    }
    if (std::abs(residual) > opts.eps_pax) {
        try {
            solver.served_continuum(lo, tm, profile_for(lo));
        } catch (const InfeasibleStateError&) {
            return {}; // physical ceiling below the demand
        }
        throw SolverError("scenario conservation residual above eps_p");
    }
    ScenarioOutcome out;
    out.status = ScenarioOutcome::Status::Ok;
    out.solution = solver.solution_at(t0, tm, d, profile, iterations);
    return out;
}

OptResult grid_optimize(const OperationalParams& p, const CostParams& c,
                        const Wt1Demand& d, double a0, double step,
                        const SolverOptions& opts) {
    if (!(step > 0)) throw std::invalid_argument("grid step must be positive");
    const double omega = omega_ratio(c);
    const double a1_cap = std::min(3 * a0, a0 / omega);

    OptResult best;
    best.tc_e = kInf;
    bool found = false;
    const int n1 = static_cast<int>(std::floor(a1_cap / step + 1e-9));
    for (int i = 1; i <= n1; ++i) {
        const double a1 = i * step;
        for (int j = 1; j <= i; ++j) {
            const double a2 = j * step;
            if (omega * a1 + (1 - omega) * a2 > a0 + 1e-9) continue;
            ScenarioOutcome outcome = evaluate_scenario(a1, a2, p, c, d, a0, opts);
            if (!outcome.ok()) {
                best.surface.push_back({a1, a2, kNaN});
                continue;
            }
            const double tc = outcome.solution.tc_e;
            best.surface.push_back({a1, a2, tc});
            // lexicographic tie-break keeps the result order-independent
            if (!found || tc < best.tc_e - 1e-6) {
                found = true;
                best.a1 = a1;
                best.a2 = a2;
                best.tc_e = tc;
                best.solution = std::move(outcome.solution);
            }
        }
    }
    if (!found) throw SolverError("no feasible grid point in the search region");
    return best;
}

double tc_ff_two_level(double a1, double a2, double n_pax, const CostParams& c,
                       const OperationalParams& p) {
    const double denom = (1 / c.beta - 1 / c.alpha) * a1 + (1 / c.gamma + 1 / c.alpha) * a2;
    return std::sqrt(2 * c.alpha * p.L * n_pax / (p.mu * p.l * denom));
}

FfConstraints appendix_constraints(double a1, double a2, double n_pax,
                                   const OperationalParams& p, const CostParams& c) {
    const auto z = closed_form::zeta_factors(c);
    const double tc = tc_ff_two_level(a1, a2, n_pax, c, p);
    const double T0 = min_travel_time(p);
    const double bracket = (p.l / p.L) * (T0 + tc / c.alpha) - (p.l - p.delta) / p.v_f + p.tau;
    return {z.zeta1 * a1 * bracket, z.zeta2 * a2 * bracket};
}

FfOptimum ff_optimum(const OperationalParams& p, const CostParams& c,
                     const Wt1Demand& d, double a0) {
    const auto z = closed_form::zeta_factors(c);
    const double ratio = z.zeta2 / z.zeta1;

    // At the binding point both constraints coincide once a1 = q/zeta1 and
    // a2 = q/zeta2 share the common equilibrium flow q; root-find on q.
    auto g_of = [&](double q) {
        return appendix_constraints(q / z.zeta1, q / z.zeta2, d.n_pax, p, c).g1;
    };
    double lo = 1e-6, hi = 1e-6;
    while (g_of(hi) < 1.0 && hi < 1e6) hi *= 2;
    for (int i = 0; i < 200 && hi - lo > 1e-13 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (g_of(mid) < 1.0 ? lo : hi) = mid;
    }
    const double q = 0.5 * (lo + hi);
    double a1 = q / z.zeta1, a2 = q / z.zeta2;

    const double omega = omega_ratio(c);
    bool binding = false;
    if (omega * a1 + (1 - omega) * a2 > a0) {
        binding = true;
        a2 = a0 / (omega * ratio + (1 - omega));
        a1 = ratio * a2;
    }
    return {a1, a2, tc_ff_two_level(a1, a2, d.n_pax, c, p), ratio, binding};
}

} // namespace railfd::timetable
