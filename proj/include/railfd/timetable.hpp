#pragma once

#include "railfd/equilibrium.hpp"
#include "railfd/inflow.hpp"
#include "railfd/params.hpp"

#include <vector>

namespace railfd {
namespace timetable {

// Two-level dispatch pattern: high inflow a1 covers the fraction omega of
// the rush hour, low inflow a2 the rest and all off-rush time.
struct TwoLevelTimetable {
    double a1;         // tr/h
    double a2;         // tr/h
    double switch_on;  // h, start of the a1 period
    double switch_off; // h, end of the a1 period
    double a0;         // tr/h, dispatch capacity bound
};

// omega = gamma (alpha - beta) / (alpha (beta + gamma)), in (0, 1).
double omega_ratio(const CostParams& c);

// Absolute-time inflow profile implementing the pattern for a rush with
// known (t0, tm): a1 is active from the entry time of the first rush train
// to the entry time of the on-time train.
InflowProfile build_two_level_inflow(double a1, double a2, double t0, double tm,
                                     const CostParams& c, const OperationalParams& p);

struct ScenarioOutcome {
    enum class Status { Ok, Infeasible };
    Status status = Status::Infeasible;
    EquilibriumSolution solution; // valid only when status == Ok

    bool ok() const { return status == Status::Ok; }
};

// Solves the equilibrium under the two-level timetable whose switch times
// are aligned with the resulting rush (the inner MPEC fixed point). Returns
// Infeasible on capacity violation or when no physically valid equilibrium
// carries the demand; throws SolverError on non-convergence.
ScenarioOutcome evaluate_scenario(double a1, double a2, const OperationalParams& p,
                                  const CostParams& c, const Wt1Demand& d,
                                  double a0, const SolverOptions& opts = {});

struct SurfaceSample {
    double a1, a2;
    double tc_e; // NaN marks an infeasible grid point
};

struct OptResult {
    double a1 = 0, a2 = 0;
    double tc_e = 0;
    EquilibriumSolution solution;
    std::vector<SurfaceSample> surface;
};

// Brute-force grid search of the MPEC objective over feasible (a1, a2);
// deterministic lexicographic tie-break. Throws SolverError when every
// grid point is infeasible.
OptResult grid_optimize(const OperationalParams& p, const CostParams& c,
                        const Wt1Demand& d, double a0, double step,
                        const SolverOptions& opts = {});

struct FfOptimum {
    double a1, a2;
    double tc_e;           // free-flow cost law value at (a1, a2)
    double ratio;          // a1/a2 = zeta2/zeta1
    bool capacity_binding; // true when projected onto the capacity line
};

// Analytical free-flow optimum: ratio zeta2/zeta1 with levels from the
// binding free-flow constraints G1 = G2 = 1.
FfOptimum ff_optimum(const OperationalParams& p, const CostParams& c,
                     const Wt1Demand& d, double a0);

// Free-flow cost law for the two-level pattern.
double tc_ff_two_level(double a1, double a2, double n_pax, const CostParams& c,
                       const OperationalParams& p);

struct FfConstraints {
    double g1, g2; // free-flow operation iff both <= 1
};
FfConstraints appendix_constraints(double a1, double a2, double n_pax,
                                   const OperationalParams& p, const CostParams& c);

} // namespace timetable
} // namespace railfd
