#pragma once

#include "railfd/fd.hpp"
#include "railfd/params.hpp"

#include <functional>
#include <string>

namespace railfd {

// Analytical machinery for constant train inflow a_c.
namespace closed_form {

struct ZetaFactors {
    double zeta1; // maps inflow to average flow before t_m, in (0, 1)
    double zeta2; // same after t_m, > 1
};

// zeta1 = 2(a-b)/(2a-b), zeta2 = 2(a+g)/(2a+g). Throws std::domain_error
// when alpha <= beta.
ZetaFactors zeta_factors(const CostParams& c);

// eta = (l - delta) t_b0 + tau l, the congested-branch aggregate.
double eta(const OperationalParams& p);

struct QuadraticCoeffs {
    double r, s, u; // coefficients of the FCF conservation quadratic
};

QuadraticCoeffs fcf_coefficients(double a_c, const CostParams& c,
                                 const OperationalParams& p);

enum class Pattern { FF, FCF, FCCF, Infeasible };

std::string pattern_name(Pattern pat);

struct PatternReport {
    Pattern pattern;
    double tc_e;      // $ (NaN when Infeasible)
    double tc_ff_max; // cost ceiling for FF operation ($)
    double tc_fcf_max;
    double tc_fccf_max;
    double np_ff;  // largest demand still served entirely free-flow (pax)
    double np_fcf; // largest demand served in the FCF pattern (pax)
};

// Average (q, k) state of the train departing at t under constant inflow.
struct StatePoint {
    double q, k;
};
StatePoint state_profiles(double t, double a_c, double t0, double tm,
                          const CostParams& c, const OperationalParams& p);

// Passenger arrival rate for the train departing at t, by explicit branch
// formula. Throws InfeasibleStateError when outside [0, mu).
double arrival_rate_closed_form(double t, double a_c, double t0, double tm,
                                const CostParams& c, const OperationalParams& p,
                                Regime regime);

// Fully free-flow equilibrium cost.
double tc_ff(double n_pax, double a_c, const CostParams& c,
             const OperationalParams& p);

// Cost ceilings of the three patterns.
struct Thresholds {
    double tc_ff_max, tc_fcf_max, tc_fccf_max;
};
Thresholds regime_thresholds(double a_c, const CostParams& c,
                             const OperationalParams& p);

// FCF equilibrium cost from the conservation quadratic. Throws
// std::domain_error when the discriminant is negative.
struct FcfSolution {
    double tc_e;
    QuadraticCoeffs coeffs;
};
FcfSolution tc_fcf(double n_pax, double a_c, const CostParams& c,
                   const OperationalParams& p);

// dTC/dN_p in the FCF pattern; strictly positive where defined.
double tc_fcf_sensitivity(double n_pax, double a_c, const CostParams& c,
                          const OperationalParams& p);

// Demand level at which the FF cost reaches the FF ceiling.
double np_ff_bound(double a_c, const CostParams& c, const OperationalParams& p);

// Demand level at which the FCF cost reaches the FCF ceiling (bisection on
// the monotone quadratic, 1 pax tolerance).
double np_fcf_bound(double a_c, const CostParams& c, const OperationalParams& p);

// Classifies the operation pattern for (N_p, a_c); the FCCF cost has no
// closed form, so a numeric equilibrium cost is obtained through the
// supplied callback when needed (pass nullptr to report FCCF with NaN cost).
PatternReport classify_pattern(double n_pax, double a_c, const CostParams& c,
                               const OperationalParams& p,
                               const std::function<double(double, double)>& numeric_tc = {});

} // namespace closed_form
} // namespace railfd
