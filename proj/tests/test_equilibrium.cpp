#include "doctest.h"
#include "fixtures.hpp"

#include <cmath>
#include <vector>

#include "railfd/closed_form.hpp"
#include "railfd/csv.hpp"
#include "railfd/equilibrium.hpp"
#include "railfd/fd.hpp"

using namespace railfd;

namespace {

EquilibriumSolution solve_base(double n_pax = 30000.0, double a_c = 12.0) {
    EquilibriumSolver solver(base_ops(), base_costs());
    return solver.solve_wt1(Wt1Demand{4.0, n_pax}, InflowProfile::constant(a_c));
}

// Counts rising-to-falling turns of a sampled series (plateaus collapsed).
int local_maxima(const std::vector<double>& v, double eps) {
    int count = 0;
    int dir = 0; // last non-flat direction
    for (std::size_t i = 1; i < v.size(); ++i) {
        double d = v[i] - v[i - 1];
        if (std::abs(d) <= eps) continue;
        int s = d > 0 ? 1 : -1;
        if (dir == 1 && s == -1) ++count;
        dir = s;
    }
    return count;
}

} // namespace

TEST_CASE("base case matches the closed-form cost") {
    auto sol = solve_base();
    REQUIRE(sol.converged);
    auto cf = closed_form::tc_fcf(30000.0, 12.0, base_costs(), base_ops());
    CHECK(sol.tc_e == doctest::Approx(cf.tc_e).epsilon(1e-6));
    CHECK(sol.t0 < sol.tm);
    CHECK(sol.tm < sol.ted);
    CHECK(sol.tm == doctest::Approx(4.0 - 0.0).epsilon(1e-9)); // on-time at t*
}

TEST_CASE("equal trip cost across the whole series") {
    auto sol = solve_base();
    auto c = base_costs();
    const double t_free = min_travel_time(base_ops());
    for (const auto& s : sol.trains) {
        double sd = s.t_dep < 4.0 ? c.beta * (4.0 - s.t_dep) : c.gamma * (s.t_dep - 4.0);
        CHECK(std::abs(c.alpha * (s.T - t_free) + sd - sol.tc_e) <= 1e-9);
    }
}

TEST_CASE("passenger conservation") {
    auto sol = solve_base();
    CHECK(std::abs(passengers_served(sol.trains) - 30000.0) <= 100.0);
    EquilibriumSolver solver(base_ops(), base_costs());
    CHECK(solver.served_continuum(sol.t0, sol.tm, InflowProfile::constant(12.0)) ==
          doctest::Approx(30000.0).epsilon(1e-6));
}

TEST_CASE("per-train states sit exactly on the fundamental diagram") {
    auto sol = solve_base();
    auto p = base_ops();
    for (const auto& s : sol.trains) {
        CHECK(fd_flow(s.k, s.a_p, p) == doctest::Approx(s.q).epsilon(1e-9));
        CHECK(s.h_bar == doctest::Approx(0.5 * (s.h_a + s.h_d)).epsilon(1e-12));
        CHECK(s.q == doctest::Approx(1.0 / s.h_bar).epsilon(1e-12));
    }
}

TEST_CASE("entry order is preserved (FIFO)") {
    auto sol = solve_base();
    for (std::size_t i = 1; i < sol.trains.size(); ++i) {
        CHECK(sol.trains[i].t_arr >= sol.trains[i - 1].t_arr - 1e-12);
        CHECK(sol.trains[i].t_dep >= sol.trains[i - 1].t_dep - 1e-12);
    }
}

TEST_CASE("average flow obeys the transfer law on both sides of the peak") {
    auto sol = solve_base();
    auto z = closed_form::zeta_factors(base_costs());
    for (const auto& s : sol.trains) {
        if (s.t_dep < sol.tm - 1e-9)
            CHECK(s.q == doctest::Approx(z.zeta1 * 12.0).epsilon(1e-9));
        else if (s.t_dep > sol.tm + 1e-9)
            CHECK(s.q == doctest::Approx(z.zeta2 * 12.0).epsilon(1e-9));
    }
}

TEST_CASE("high demand shows two arrival-rate peaks, low demand one") {
    auto high = solve_base();
    std::vector<double> ap;
    for (const auto& s : high.trains) ap.push_back(s.a_p);
    CHECK(local_maxima(ap, 1e-6) == 2);
    // the taller peak comes before the on-time instant
    std::size_t arg = 0;
    for (std::size_t i = 0; i < ap.size(); ++i)
        if (ap[i] > ap[arg]) arg = i;
    // the taller peak is the left limit at the on-time kink
    CHECK(high.trains[arg].t_dep <= high.tm + 1e-9);

    auto low = solve_base(3000.0);
    ap.clear();
    for (const auto& s : low.trains) ap.push_back(s.a_p);
    CHECK(local_maxima(ap, 1e-6) == 1);
}

TEST_CASE("flow-density trajectory closes a counter-clockwise loop") {
    auto sol = solve_base();
    double area2 = 0;
    const auto& tr = sol.trains;
    for (std::size_t i = 0; i < tr.size(); ++i) {
        const auto& a = tr[i];
        const auto& b = tr[(i + 1) % tr.size()];
        area2 += a.k * b.q - b.k * a.q;
    }
    CHECK(area2 > 0);
}

TEST_CASE("degenerate zero demand") {
    auto sol = solve_base(0.0);
    CHECK(sol.tc_e == 0.0); // no travel delay, no schedule delay
    CHECK(sol.trains.empty());
}

TEST_CASE("series refinement leaves the solution unchanged") {
    SolverOptions coarse, fine;
    fine.dn = coarse.dn / 4;
    EquilibriumSolver sc(base_ops(), base_costs(), coarse);
    EquilibriumSolver sf(base_ops(), base_costs(), fine);
    auto a = sc.solve_wt1(Wt1Demand{4.0, 30000.0}, InflowProfile::constant(12.0));
    auto b = sf.solve_wt1(Wt1Demand{4.0, 30000.0}, InflowProfile::constant(12.0));
    CHECK(a.tc_e == doctest::Approx(b.tc_e).epsilon(1e-9));
    CHECK(a.breakdown.sum_tc == doctest::Approx(b.breakdown.sum_tc).epsilon(1e-6));
}

TEST_CASE("deterministic output") {
    auto a = solve_base();
    auto b = solve_base();
    CHECK(render_trains_csv(a.trains) == render_trains_csv(b.trains));
    CHECK(render_curves_csv(a.curves) == render_curves_csv(b.curves));
}

TEST_CASE("cumulative curves are consistent") {
    auto sol = solve_base();
    const auto& c = sol.curves;
    REQUIRE(!c.t.empty());
    for (std::size_t i = 1; i < c.t.size(); ++i) {
        CHECK(c.a[i] >= c.a[i - 1] - 1e-9);
        CHECK(c.d[i] >= c.d[i - 1] - 1e-9);
        CHECK(c.a_pax[i] >= c.a_pax[i - 1] - 1e-9);
        CHECK(c.d_pax[i] >= c.d_pax[i - 1] - 1e-9);
        CHECK(c.d[i] <= c.a[i] + 1e-9);   // departures never lead arrivals
        CHECK(c.d_pax[i] <= c.a_pax[i] + 1e-9);
    }
    CHECK(c.d_pax.back() == doctest::Approx(30000.0).epsilon(1e-2));
}

TEST_CASE("uniform wish window equilibrium") {
    // 30000 pax/h wish rate over [3.5, 4.5] h
    Wt2Demand d{3.5, 4.5, 30000.0, 30000.0};
    EquilibriumSolver solver(base_ops(), base_costs());
    auto sol = solver.solve_wt2(d, InflowProfile::constant(12.0));
    REQUIRE(sol.converged);
    CHECK(std::abs(passengers_served(sol.trains) - 30000.0) <= 100.0);
    CHECK(sol.t0 < sol.tm);
    CHECK(sol.tm < sol.ted);
    // rush must cover the wish window on both sides
    CHECK(sol.t0 <= d.w_start + 1e-9);
    CHECK(sol.ted >= d.w_end - 1e-9);
    // the zero-schedule-delay instant lies inside the wish window
    CHECK(sol.tm > d.w_start);
    CHECK(sol.tm < d.w_end);
    // spreading the wish times lowers the average cost per passenger
    auto wt1 = solve_base();
    CHECK(sol.breakdown.per_pax < wt1.tc_e);
}
