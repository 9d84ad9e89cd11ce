#pragma once

#include "railfd/fd.hpp"
#include "railfd/inflow.hpp"
#include "railfd/params.hpp"

#include <optional>
#include <span>
#include <vector>

namespace railfd {

struct TrainState {
    double n;     // train index (tr, real-valued)
    double t_dep; // system departure time (h)
    double t_arr; // system arrival time t_dep - T (h)
    double T;     // travel time (h)
    double h_a;   // arrival headway (h)
    double h_d;   // departure headway (h)
    double h_bar; // average headway (h)
    double s_bar; // average spacing (km)
    double q;     // 1/h_bar (tr/h)
    double k;     // 1/s_bar (tr/km)
    double a_p;   // passenger arrival rate (pax/h)
    Regime regime;
    // True when this train sits immediately after a kink of T(t) (t_m or an
    // inflow switch); the jump from the previous state is not a trajectory.
    bool discontinuity = false;
};

struct CostBreakdown {
    double sum_tdc = 0; // total travel-delay cost ($)
    double sum_sdc = 0; // total schedule-delay cost ($)
    double sum_tc = 0;  // sum of both ($)
    double per_pax = 0; // equilibrium cost per passenger ($)
};

struct CurveSamples {
    std::vector<double> t;     // h
    std::vector<double> a;     // cumulative train arrivals A(t)
    std::vector<double> d;     // cumulative train departures D(t)
    std::vector<double> a_pax; // cumulative passenger arrivals A_p(t)
    std::vector<double> d_pax; // cumulative passenger departures D_p(t)
};

struct EquilibriumSolution {
    double t0 = 0;   // rush start (h)
    double tm = 0;   // zero-schedule-delay instant (h)
    double ted = 0;  // rush end (h)
    double tc_e = 0; // equilibrium cost ($)
    std::vector<TrainState> trains;
    CurveSamples curves;
    CostBreakdown breakdown;
    bool converged = false;
    int iterations = 0;
};

struct SolverOptions {
    double dt = 1.0 / 60.0; // time step (h)
    double dn = 0.1;        // train-index step (tr)
    double eps_pax = 100.0; // conservation tolerance (pax)
    int max_iter = 10000;
};

// Equilibrium travel time T(t) for the rush window [t0, ted]. Piecewise
// linear: slope beta/alpha before tm, -gamma/alpha after. Throws
// std::domain_error outside the window.
double travel_time_profile(double t, double t0, double tm, const CostParams& c,
                           const OperationalParams& p);

// Train outflow d(t) = a(t - T(t)) (1 - dT/dt) under FIFO.
double outflow_profile(double t, const InflowProfile& inflow, double t0,
                       double tm, const CostParams& c, const OperationalParams& p);

// Per-train equilibrium states on an index grid of step dn over the rush.
std::vector<TrainState> train_state_series(double t0, double tm, double ted,
                                           const InflowProfile& inflow,
                                           const CostParams& c,
                                           const OperationalParams& p, double dn);

// Discrete conservation sum over a series: trapezoid of a_p(n) h_bar(n) dn.
double passengers_served(std::span<const TrainState> states);

class EquilibriumSolver {
  public:
    EquilibriumSolver(OperationalParams p, CostParams c, SolverOptions o = {})
        : params_(p), cost_(c), opts_(o) {}

    EquilibriumSolution solve_wt1(const Wt1Demand& d, const InflowProfile& inflow) const;
    EquilibriumSolution solve_wt2(const Wt2Demand& d, const InflowProfile& inflow) const;

    // Exact (piecewise-analytic) continuum value of the conservation
    // integral for a candidate rush [t0, tm]. Exposed for tests.
    double served_continuum(double t0, double tm, const InflowProfile& inflow) const;

    // Builds the full solution record at an externally determined rush
    // start; the caller is responsible for the conservation residual.
    EquilibriumSolution solution_at(double t0, double tm, const DemandSpec& d,
                                    const InflowProfile& inflow, int iterations) const;

    const SolverOptions& options() const { return opts_; }

  private:
    EquilibriumSolution assemble(double t0, double tm, const DemandSpec& d,
                                 const InflowProfile& inflow, int iterations) const;
    double find_rush_start(double tm, double n_pax, const InflowProfile& inflow,
                           int* iterations) const;

    OperationalParams params_;
    CostParams cost_;
    SolverOptions opts_;
};

// Cost sums over the converged train series; WT2 passengers are charged
// against their own wish time read off the Z-curve.
CostBreakdown cost_breakdown(const EquilibriumSolution& sol, const DemandSpec& d,
                             const CostParams& c, const OperationalParams& p);

// Samples A, D, A_p, D_p on a uniform grid of step dt across the rush.
CurveSamples cumulative_curves(const EquilibriumSolution& sol,
                               const InflowProfile& inflow, const CostParams& c,
                               const OperationalParams& p, double dt);

} // namespace railfd
