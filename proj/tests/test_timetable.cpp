#include "doctest.h"
#include "fixtures.hpp"

#include <cmath>

#include "railfd/closed_form.hpp"
#include "railfd/timetable.hpp"

using namespace railfd;
using namespace railfd::timetable;

namespace {
const Wt1Demand kDemand{4.0, 30000.0};
}

TEST_CASE("high-rate share of the rush") {
    // gamma (alpha - beta) / (alpha (beta + gamma)) = 25*12/(20*33)
    CHECK(omega_ratio(base_costs()) == doctest::Approx(5.0 / 11.0).epsilon(1e-12));
}

TEST_CASE("equal rates collapse to the constant-inflow solution") {
    auto out = evaluate_scenario(12.0, 12.0, base_ops(), base_costs(), kDemand, 18.0);
    REQUIRE(out.ok());
    auto cf = closed_form::tc_fcf(30000.0, 12.0, base_costs(), base_ops());
    CHECK(out.solution.tc_e == doctest::Approx(cf.tc_e).epsilon(1e-6));
}

TEST_CASE("two-level profile switches at the rush entry times") {
    auto prof = build_two_level_inflow(18.0, 10.0, 2.0, 4.0, base_costs(), base_ops());
    REQUIRE(prof.segments().size() == 3);
    CHECK(prof.segments()[0].rate == 10.0);
    CHECK(prof.segments()[1].rate == 18.0);
    CHECK(prof.segments()[2].rate == 10.0);
    CHECK(prof.segments()[1].start < 2.0);  // first rush train enters before t0
    CHECK(prof.segments()[2].start < 4.0);  // on-time train enters before t_m
    CHECK(prof.rate_at(prof.segments()[1].start - 0.01) == 10.0);
}

TEST_CASE("capacity violation is infeasible") {
    auto out = evaluate_scenario(19.0, 17.5, base_ops(), base_costs(), kDemand, 18.0);
    CHECK(!out.ok());
}

TEST_CASE("insufficient supply scenario costs more than the optimum region") {
    auto s2 = evaluate_scenario(12.0, 6.5, base_ops(), base_costs(), kDemand, 18.0);
    REQUIRE(s2.ok());
    CHECK(s2.solution.tc_e == doctest::Approx(18.349).epsilon(1e-3));
    auto near_opt = evaluate_scenario(18.5, 10.0, base_ops(), base_costs(), kDemand, 18.0);
    REQUIRE(near_opt.ok());
    CHECK(near_opt.solution.tc_e < s2.solution.tc_e);
}

TEST_CASE("free-flow cost law at the analytic optimum binds both constraints") {
    auto opt = ff_optimum(base_ops(), base_costs(), kDemand, 18.0);
    auto g = appendix_constraints(opt.a1, opt.a2, kDemand.n_pax, base_ops(), base_costs());
    CHECK(g.g1 == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(g.g2 == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(opt.ratio == doctest::Approx(opt.a1 / opt.a2).epsilon(1e-12));
    // ratio law: a1/a2 = zeta2/zeta1 = (18/13)/(3/4)
    CHECK(opt.ratio == doctest::Approx(24.0 / 13.0).epsilon(1e-9));
    CHECK(opt.tc_e ==
          doctest::Approx(tc_ff_two_level(opt.a1, opt.a2, kDemand.n_pax, base_costs(),
                                          base_ops()))
              .epsilon(1e-9));
}

TEST_CASE("constant inflow hits the free-flow ceiling exactly at the demand bound") {
    double np = closed_form::np_ff_bound(12.0, base_costs(), base_ops());
    auto g = appendix_constraints(12.0, 12.0, np, base_ops(), base_costs());
    CHECK(g.g2 == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(tc_ff_two_level(12.0, 12.0, np, base_costs(), base_ops()) ==
          doctest::Approx(closed_form::regime_thresholds(12.0, base_costs(), base_ops())
                              .tc_ff_max)
              .epsilon(1e-6));
}

TEST_CASE("free-flow constraints tighten with demand") {
    auto lo = appendix_constraints(15.0, 8.0, 20000.0, base_ops(), base_costs());
    auto hi = appendix_constraints(15.0, 8.0, 30000.0, base_ops(), base_costs());
    CHECK(lo.g1 < hi.g1);
    CHECK(lo.g2 < hi.g2);
}

TEST_CASE("tiny grid searches stay deterministic") {
    auto a = grid_optimize(base_ops(), base_costs(), kDemand, 18.0, 6.0);
    auto b = grid_optimize(base_ops(), base_costs(), kDemand, 18.0, 6.0);
    CHECK(a.a1 == b.a1);
    CHECK(a.a2 == b.a2);
    CHECK(a.tc_e == b.tc_e);
    CHECK(a.surface.size() == b.surface.size());
}
