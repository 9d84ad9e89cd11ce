#include "doctest.h"
#include "fixtures.hpp"

#include "railfd/errors.hpp"
#include "railfd/fd.hpp"

using namespace railfd;

TEST_CASE("minimum travel time") {
    // 18/40 h cruising + 15 dwells of 20 s = 8/15 h.
    CHECK(min_travel_time(base_ops()) == doctest::Approx(8.0 / 15.0).epsilon(1e-12));
}

TEST_CASE("critical point is affine in the passenger rate") {
    auto p = base_ops();
    auto c0 = critical_point(0.0, p);
    auto c1 = critical_point(9000.0, p);
    auto c2 = critical_point(18000.0, p);
    CHECK(c2.q_star - c1.q_star == doctest::Approx(c1.q_star - c0.q_star).epsilon(1e-12));
    CHECK(c2.k_star - c1.k_star == doctest::Approx(c1.k_star - c0.k_star).epsilon(1e-12));
    // q*(0) = 1 / (t_b0 + delta/v_f + tau) = 1800/58.
    CHECK(c0.q_star == doctest::Approx(1800.0 / 58.0).epsilon(1e-12));
    CHECK(c1.q_star < c0.q_star); // more boarding demand, less capacity
}

TEST_CASE("flow is unimodal in density with the peak at the critical point") {
    auto p = base_ops();
    const double a_p = 12000.0;
    auto cp = critical_point(a_p, p);
    CHECK(fd_flow(cp.k_star, a_p, p) == doctest::Approx(cp.q_star).epsilon(1e-12));
    // the free-flow branch carries positive flow only above the density
    // needed to board a_p passengers per hour
    const double k_min = a_p / (p.mu * p.l);
    double prev = -1;
    for (double k = k_min + 0.02; k < cp.k_star; k += 0.05) {
        double q = fd_flow(k, a_p, p);
        CHECK(q > prev);
        CHECK(q < cp.q_star + 1e-12);
        prev = q;
    }
    prev = cp.q_star + 1e-12;
    for (double k = cp.k_star; k < jam_density(a_p, p); k += 0.05) {
        double q = fd_flow(k, a_p, p);
        CHECK(q <= prev);
        prev = q;
    }
    CHECK(fd_flow(jam_density(a_p, p), a_p, p) == doctest::Approx(0.0));
    CHECK(fd_flow(jam_density(a_p, p) + 1.0, a_p, p) == 0.0); // clamped
}

TEST_CASE("passenger-rate inversion round-trips both branches") {
    auto p = base_ops();
    for (double a_p : {0.0, 4000.0, 12000.0, 20000.0, 30000.0}) {
        auto cp = critical_point(a_p, p);
        const double k_min = a_p / (p.mu * p.l); // zero-flow free-branch density
        for (double f : {0.2, 0.5, 0.8, 0.99}) {
            // free-flow side
            double k_f = k_min + f * (cp.k_star - k_min);
            auto [ap_f, reg_f] = invert_passenger_rate(fd_flow(k_f, a_p, p), k_f, p);
            CHECK(reg_f == Regime::FreeFlow);
            CHECK(ap_f == doctest::Approx(a_p).epsilon(1e-9).scale(p.mu));
            // congested side
            double k_c = cp.k_star + f * (jam_density(a_p, p) - cp.k_star) * 0.9;
            auto [ap_c, reg_c] = invert_passenger_rate(fd_flow(k_c, a_p, p), k_c, p);
            CHECK(reg_c == Regime::Congested);
            CHECK(ap_c == doctest::Approx(a_p).epsilon(1e-9).scale(p.mu));
        }
    }
}

TEST_CASE("inversion rejects states above the diagram") {
    auto p = base_ops();
    auto cp = critical_point(0.0, p);
    CHECK_THROWS_AS(invert_passenger_rate(cp.q_star * 1.5, cp.k_star, p),
                    InfeasibleStateError);
}
