#include "railfd/equilibrium.hpp"
#include "railfd/errors.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace railfd {

namespace {

// Entry-time map e(t) = t - T(t) is piecewise linear and strictly
// increasing (slopes 1 - beta/alpha and 1 + gamma/alpha).
struct RushWindow {
    double t0, tm, ted;
    double T0;
    double slope_e; // beta/alpha
    double slope_l; // gamma/alpha

    double travel_time(double t) const {
        if (t < tm) return T0 + slope_e * (t - t0);
        return T0 + slope_e * (tm - t0) - slope_l * (t - tm);
    }
    double dT(double t) const { return t < tm ? slope_e : -slope_l; }
    double entry(double t) const { return t - travel_time(t); }

    // Inverse of the entry-time map, valid over the rush.
    double depart_of_entry(double e) const {
        const double e_m = tm - travel_time(tm);
        if (e < e_m) return t0 + (e - (t0 - T0)) / (1.0 - slope_e);
        return tm + (e - e_m) / (1.0 + slope_l);
    }
};

RushWindow make_window(double t0, double tm, const CostParams& c,
                       const OperationalParams& p) {
    RushWindow w;
    w.t0 = t0;
    w.tm = tm;
    w.T0 = min_travel_time(p);
    w.slope_e = c.beta / c.alpha;
    w.slope_l = c.gamma / c.alpha;
    w.ted = tm + (c.beta / c.gamma) * (tm - t0);
    return w;
}

// A maximal interval of the rush on which the inflow seen at entry and the
// travel-time slope are both constant, so d(t) is constant and every state
// variable is linear in t.
struct Piece {
    double ta, tb;
    double arr;    // a(e(t)) on the piece (tr/h)
    double out;    // d(t) (tr/h)
    double weight; // h_bar * d = (out/arr + 1)/2, the pax-count Jacobian
    bool kink;     // piece starts at a discontinuity of T' or of a(e(t))
};

std::vector<Piece> build_pieces(const RushWindow& w, const InflowProfile& inflow) {
    std::vector<double> cuts{w.t0, w.tm, w.ted};
    for (const auto& seg : inflow.segments()) {
        if (seg.start > w.entry(w.t0) && seg.start < w.entry(w.ted))
            cuts.push_back(w.depart_of_entry(seg.start));
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-13; }),
               cuts.end());

    std::vector<Piece> pieces;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        Piece pc;
        pc.ta = cuts[i];
        pc.tb = cuts[i + 1];
        const double mid = 0.5 * (pc.ta + pc.tb);
        pc.arr = inflow.rate_at(w.entry(mid));
        pc.out = pc.arr * (1.0 - w.dT(mid));
        pc.weight = 0.5 * (pc.out / pc.arr + 1.0);
        pc.kink = i > 0;
        pieces.push_back(pc);
    }
    return pieces;
}

struct FlowState {
    double q, k, a_p;
    Regime regime;
};

FlowState state_at(double t, const Piece& pc, const RushWindow& w,
                   const OperationalParams& p) {
    const double h_bar = 0.5 * (1.0 / pc.arr + 1.0 / pc.out);
    const double q = 1.0 / h_bar;
    const double k = q * w.travel_time(t) / p.L;
    auto [a_p, regime] = invert_passenger_rate(q, k, p);
    return {q, k, a_p, regime};
}

// Regime-switch instant inside [ta, tb] of a piece, if any. The
// free-flow/critical boundary k(t) = k*(ap_ff(t)) is affine in t.
std::optional<double> regime_crossing(const Piece& pc, double ta, double tb,
                                      const RushWindow& w, const OperationalParams& p) {
    const FlowState sa = state_at(ta, pc, w, p);
    const FlowState sb = state_at(tb, pc, w, p);
    if (sa.regime == sb.regime) return std::nullopt;
    const double c_line = p.t_b0 + p.l / p.v_f;
    const double c_crit = p.t_b0 + p.delta / p.v_f + p.tau;
    auto margin = [&](double t) {
        const double k = sa.q * w.travel_time(t) / p.L;
        const double ap_ff = p.mu * (k * p.l - sa.q * c_line);
        const double k_star =
            (1.0 - ap_ff / p.mu) * c_line / (c_crit * p.l) + ap_ff / (p.mu * p.l);
        return k - k_star;
    };
    const double ga = margin(ta), gb = margin(tb);
    return ta + (tb - ta) * (0.0 - ga) / (gb - ga);
}

// Pax served on [ta, tb] within one piece: integral of a_p(t) weight dt,
// with weight = h_bar * d carrying the dn = d dt Jacobian. a_p is linear in
// t except for at most one regime switch, located exactly.
double served_on(const Piece& pc, double ta, double tb, const RushWindow& w,
                 const OperationalParams& p) {
    const FlowState sa = state_at(ta, pc, w, p);
    const FlowState sb = state_at(tb, pc, w, p);
    auto trapz = [&](double lo, double hi, double f_lo, double f_hi) {
        return 0.5 * (f_lo + f_hi) * (hi - lo) * pc.weight;
    };
    const auto cross = regime_crossing(pc, ta, tb, w, p);
    if (!cross) return trapz(ta, tb, sa.a_p, sb.a_p);
    const FlowState sc = state_at(*cross, pc, w, p);
    return trapz(ta, *cross, sa.a_p, sc.a_p) + trapz(*cross, tb, sc.a_p, sb.a_p);
}

double served_up_to(const std::vector<Piece>& pieces, double t_stop,
                    const RushWindow& w, const OperationalParams& p) {
    double total = 0;
    for (const auto& pc : pieces) {
        if (pc.ta >= t_stop) break;
        total += served_on(pc, pc.ta, std::min(pc.tb, t_stop), w, p);
    }
    return total;
}

// Cumulative wish curve for WT2.
double wish_curve(const Wt2Demand& d, double t) {
    if (t <= d.w_start) return 0.0;
    if (t >= d.w_end) return d.n_pax;
    return d.w_rate * (t - d.w_start);
}

double wish_time_of(const Wt2Demand& d, double cum_pax) {
    const double c = std::clamp(cum_pax, 0.0, d.n_pax);
    return d.w_start + c / d.w_rate;
}

} // namespace

double travel_time_profile(double t, double t0, double tm, const CostParams& c,
                           const OperationalParams& p) {
    const RushWindow w = make_window(t0, tm, c, p);
    if (t < w.t0 - 1e-12 || t > w.ted + 1e-12)
        throw std::domain_error("t outside the rush window");
    return w.travel_time(std::clamp(t, w.t0, w.ted));
}

double outflow_profile(double t, const InflowProfile& inflow, double t0,
                       double tm, const CostParams& c, const OperationalParams& p) {
    const RushWindow w = make_window(t0, tm, c, p);
    if (t < w.t0 - 1e-12 || t > w.ted + 1e-12)
        throw std::domain_error("t outside the rush window");
    t = std::clamp(t, w.t0, w.ted);
    return inflow.rate_at(w.entry(t)) * (1.0 - w.dT(t));
}

std::vector<TrainState> train_state_series(double t0, double tm, double ted,
                                           const InflowProfile& inflow,
                                           const CostParams& c,
                                           const OperationalParams& p, double dn) {
    const RushWindow w = make_window(t0, tm, c, p);
    (void)ted; // implied by (t0, tm) and the cost identity
    const auto pieces = build_pieces(w, inflow);

    std::vector<TrainState> out;
    auto emit = [&](double n, double t, const Piece& pc, bool disc) {
        const FlowState fs = state_at(t, pc, w, p);
        TrainState s;
        s.n = n;
        s.t_dep = t;
        s.T = w.travel_time(t);
        s.t_arr = t - s.T;
        s.h_a = 1.0 / pc.arr;
        s.h_d = 1.0 / pc.out;
        s.h_bar = 0.5 * (s.h_a + s.h_d);
        s.q = fs.q;
        s.k = fs.k;
        s.s_bar = 1.0 / fs.k;
        s.a_p = fs.a_p;
        s.regime = fs.regime;
        s.discontinuity = disc;
        out.push_back(s);
    };

    double n_base = 0; // cumulative trains at the start of current piece
    double next_grid = 0;
    for (const auto& pc : pieces) {
        const double n_end = n_base + pc.out * (pc.tb - pc.ta);
        emit(n_base, pc.ta, pc, pc.kink);
        // split at the regime switch so the series stays piecewise linear
        const auto cross = regime_crossing(pc, pc.ta, pc.tb, w, p);
        while (next_grid <= n_base + 1e-12) next_grid += dn;
        double prev_t = pc.ta;
        while (next_grid < n_end - 1e-12) {
            const double t = pc.ta + (next_grid - n_base) / pc.out;
            if (cross && prev_t < *cross && *cross < t)
                emit(n_base + pc.out * (*cross - pc.ta), *cross, pc, false);
            emit(next_grid, t, pc, false);
            prev_t = t;
            next_grid += dn;
        }
        if (cross && *cross > prev_t)
            emit(n_base + pc.out * (*cross - pc.ta), *cross, pc, false);
        // left limit at the piece end; a kink node shares its n with the
        // right limit emitted by the next piece
        emit(n_end, pc.tb, pc, false);
        n_base = n_end;
    }
    return out;
}

double passengers_served(std::span<const TrainState> states) {
    double total = 0;
    for (std::size_t i = 0; i + 1 < states.size(); ++i) {
        const auto& a = states[i];
        const auto& b = states[i + 1];
        total += 0.5 * (a.a_p * a.h_bar + b.a_p * b.h_bar) * (b.n - a.n);
    }
    return total;
}

double EquilibriumSolver::served_continuum(double t0, double tm,
                                           const InflowProfile& inflow) const {
    const RushWindow w = make_window(t0, tm, cost_, params_);
    const auto pieces = build_pieces(w, inflow);
    return served_up_to(pieces, w.ted, w, params_);
}

double EquilibriumSolver::find_rush_start(double tm, double n_pax,
                                          const InflowProfile& inflow,
                                          int* iterations) const {
    // served is monotone increasing as t0 moves earlier; infeasible states
    // arise only when the rush is too long, so they sort with "too many".
    auto error_at = [&](double t0) -> double {
        ++*iterations;
        try {
            return served_continuum(t0, tm, inflow) - n_pax;
        } catch (const InfeasibleStateError&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    double hi = tm - 1e-9;
    double span = 0.25;
    double lo = tm - span;
    while (error_at(lo) < 0) {
        span *= 2;
        lo = tm - span;
        if (span > 96.0 || *iterations > opts_.max_iter)
            throw SolverError("cannot bracket rush start: demand unreachable under this inflow");
    }
    while (hi - lo > 1e-12 * std::max(1.0, std::abs(tm))) {
        const double mid = 0.5 * (lo + hi);
        if (error_at(mid) > 0) lo = mid;
        else hi = mid;
        if (*iterations > opts_.max_iter)
            throw SolverError("rush-start bisection exceeded the iteration budget");
    }
    const double t0 = 0.5 * (lo + hi);
    const double final_err = served_continuum(t0, tm, inflow) - n_pax;
    if (std::abs(final_err) > opts_.eps_pax) {
        // If the left edge of the bracket is physically infeasible, the
        // demand exceeds what any equilibrium can carry: surface that.
        served_continuum(lo, tm, inflow);
        throw SolverError("conservation residual above eps_p at the bisection limit");
    }
    return t0;
}

EquilibriumSolution EquilibriumSolver::solution_at(double t0, double tm,
                                                   const DemandSpec& d,
                                                   const InflowProfile& inflow,
                                                   int iterations) const {
    return assemble(t0, tm, d, inflow, iterations);
}

EquilibriumSolution EquilibriumSolver::assemble(double t0, double tm,
                                                const DemandSpec& d,
                                                const InflowProfile& inflow,
                                                int iterations) const {
    EquilibriumSolution sol;
    sol.t0 = t0;
    sol.tm = tm;
    const RushWindow w = make_window(t0, tm, cost_, params_);
    sol.ted = w.ted;
    sol.tc_e = cost_.beta * (tm - t0);
    sol.trains = train_state_series(t0, tm, w.ted, inflow, cost_, params_, opts_.dn);
    sol.curves = cumulative_curves(sol, inflow, cost_, params_, opts_.dt);
    sol.breakdown = cost_breakdown(sol, d, cost_, params_);
    sol.converged = true;
    sol.iterations = iterations;
    return sol;
}

EquilibriumSolution EquilibriumSolver::solve_wt1(const Wt1Demand& d,
                                                 const InflowProfile& inflow) const {
    const auto report = validate(params_, cost_);
    if (!report.ok()) throw std::invalid_argument("invalid parameters: " + report.violations.front());
    if (d.n_pax <= 0) {
        EquilibriumSolution sol;
        sol.t0 = sol.tm = sol.ted = d.t_star;
        sol.tc_e = 0;
        sol.converged = true;
        return sol;
    }
    int iterations = 0;
    const double t0 = find_rush_start(d.t_star, d.n_pax, inflow, &iterations);
    return assemble(t0, d.t_star, d, inflow, iterations);
}

EquilibriumSolution EquilibriumSolver::solve_wt2(const Wt2Demand& d,
                                                 const InflowProfile& inflow) const {
    const auto report = validate(params_, cost_);
    if (!report.ok()) throw std::invalid_argument("invalid parameters: " + report.violations.front());
    int iterations = 0;

    // Inner condition: passengers departed by tm equal passengers wishing
    // to have departed by tm (the Z-curve crossing).
    auto tm_for = [&](double t0) -> double {
        double lo = std::max(t0 + 1e-9, d.w_start);
        double hi = d.w_end;
        auto g = [&](double tm) {
            ++iterations;
            const RushWindow w = make_window(t0, tm, cost_, params_);
            const auto pieces = build_pieces(w, inflow);
            double dp;
            try {
                dp = served_up_to(pieces, tm, w, params_);
            } catch (const InfeasibleStateError&) {
                dp = std::numeric_limits<double>::infinity();
            }
            return dp - wish_curve(d, tm);
        };
        if (g(lo) < 0) return lo;
        if (g(hi) > 0) return hi;
        while (hi - lo > 1e-11) {
            const double mid = 0.5 * (lo + hi);
            (g(mid) > 0 ? lo : hi) = mid;
            if (iterations > opts_.max_iter)
                throw SolverError("WT2 t_m bisection exceeded the iteration budget");
        }
        return 0.5 * (lo + hi);
    };

    auto error_at = [&](double t0) -> double {
        const double tm = tm_for(t0);
        try {
            return served_continuum(t0, tm, inflow) - d.n_pax;
        } catch (const InfeasibleStateError&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    double hi = d.w_start - 1e-9;
    // The rush must start early enough that some pax depart before t_m;
    // bracket downward from the wish window start.
    if (error_at(hi) > 0) hi = d.w_end - 1e-9;
    double span = 0.25;
    double lo = hi - span;
    while (error_at(lo) < 0) {
        span *= 2;
        lo = hi - span;
        if (span > 96.0 || iterations > opts_.max_iter)
            throw SolverError("cannot bracket WT2 rush start");
    }
    while (hi - lo > 1e-12 * std::max(1.0, std::abs(hi))) {
        const double mid = 0.5 * (lo + hi);
        (error_at(mid) > 0 ? lo : hi) = mid;
        if (iterations > opts_.max_iter)
            throw SolverError("WT2 rush-start bisection exceeded the iteration budget");
    }
    const double t0 = 0.5 * (lo + hi);
    const double tm = tm_for(t0);
    if (std::abs(served_continuum(t0, tm, inflow) - d.n_pax) > opts_.eps_pax)
        throw SolverError("WT2 conservation residual above eps_p");
    return assemble(t0, tm, d, inflow, iterations);
}

CostBreakdown cost_breakdown(const EquilibriumSolution& sol, const DemandSpec& d,
                             const CostParams& c, const OperationalParams& p) {
    CostBreakdown b;
    if (sol.trains.empty()) return b;
    const double T0 = min_travel_time(p);
    const bool wt1 = std::holds_alternative<Wt1Demand>(d);
    const Wt1Demand* w1 = wt1 ? &std::get<Wt1Demand>(d) : nullptr;
    const Wt2Demand* w2 = wt1 ? nullptr : &std::get<Wt2Demand>(d);

    double cum_pax = 0;
    auto per_train = [&](const TrainState& s, double pax_served_so_far) {
        const double tdc = c.alpha * (s.T - T0);
        const double t_star = wt1 ? w1->t_star : wish_time_of(*w2, pax_served_so_far);
        const double sdc = s.t_dep < t_star ? c.beta * (t_star - s.t_dep)
                                            : c.gamma * (s.t_dep - t_star);
        return std::pair{tdc, sdc};
    };
    for (std::size_t i = 0; i + 1 < sol.trains.size(); ++i) {
        const auto& a = sol.trains[i];
        const auto& bb = sol.trains[i + 1];
        const double pax = 0.5 * (a.a_p * a.h_bar + bb.a_p * bb.h_bar) * (bb.n - a.n);
        const auto [tdc_a, sdc_a] = per_train(a, cum_pax);
        cum_pax += pax;
        const auto [tdc_b, sdc_b] = per_train(bb, cum_pax);
        b.sum_tdc += 0.5 * (tdc_a + tdc_b) * pax;
        b.sum_sdc += 0.5 * (sdc_a + sdc_b) * pax;
    }
    b.sum_tc = b.sum_tdc + b.sum_sdc;
    b.per_pax = cum_pax > 0 ? b.sum_tc / cum_pax : 0.0;
    return b;
}

CurveSamples cumulative_curves(const EquilibriumSolution& sol,
                               const InflowProfile& inflow, const CostParams& c,
                               const OperationalParams& p, double dt) {
    CurveSamples cs;
    if (!(sol.ted > sol.t0)) return cs;
    const RushWindow w = make_window(sol.t0, sol.tm, c, p);
    const auto pieces = build_pieces(w, inflow);

    // Cumulative train arrivals, zeroed at the entry time of the first rush
    // train.
    const double e0 = w.entry(sol.t0);
    auto cum_arrivals = [&](double t) {
        // signed integral of a(s) ds from e0 to t
        const double lo = std::min(e0, t), hi = std::max(e0, t);
        double total = 0;
        const auto& segs = inflow.segments();
        for (std::size_t i = 0; i < segs.size(); ++i) {
            const double s_lo = i == 0 ? -1e300 : segs[i].start;
            const double s_hi = i + 1 < segs.size() ? segs[i + 1].start : 1e300;
            const double a = std::max(lo, s_lo), b = std::min(hi, s_hi);
            if (b > a) total += segs[i].rate * (b - a);
        }
        return t >= e0 ? total : -total;
    };

    // Cumulative pax departures on the piece skeleton, then interpolate.
    std::vector<double> dp_nodes{0.0};
    for (const auto& pc : pieces)
        dp_nodes.push_back(dp_nodes.back() + served_on(pc, pc.ta, pc.tb, w, p));
    auto dp_at = [&](double t) {
        if (t <= sol.t0) return 0.0;
        if (t >= sol.ted) return dp_nodes.back();
        double acc = 0;
        for (std::size_t i = 0; i < pieces.size(); ++i) {
            if (t <= pieces[i].tb)
                return acc + served_on(pieces[i], pieces[i].ta, t, w, p);
            acc = dp_nodes[i + 1];
        }
        return dp_nodes.back();
    };

    const double start = e0;
    for (double t = start;; t += dt) {
        t = std::min(t, sol.ted);
        cs.t.push_back(t);
        cs.a.push_back(cum_arrivals(t));
        // train departures: FIFO D(t) = A(t - T(t)); pre-rush trains run at T0
        const double td = t < sol.t0 ? t - w.T0 : w.entry(std::min(t, sol.ted));
        cs.d.push_back(cum_arrivals(td));
        cs.d_pax.push_back(dp_at(t));
        // pax platform arrivals: A_p(e) = D_p(t(e)) under passenger FIFO
        const double e_end = w.entry(sol.ted);
        double ap_cum;
        if (t <= e0) ap_cum = 0.0;
        else if (t >= e_end) ap_cum = dp_nodes.back();
        else ap_cum = dp_at(w.depart_of_entry(t));
        cs.a_pax.push_back(ap_cum);
        if (t >= sol.ted) break;
    }
    return cs;
}

} // namespace railfd
