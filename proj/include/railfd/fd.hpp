#pragma once

#include "railfd/params.hpp"

#include <utility>

namespace railfd {

enum class Regime { FreeFlow, Congested };

struct FdPoint {
    double k;   // train density (tr/km)
    double q;   // train flow (tr/h)
    double a_p; // passenger arrival rate (pax/h)
    Regime regime;
};

struct CriticalPoint {
    double q_star; // tr/h
    double k_star; // tr/km
};

// Critical flow/density of the train-FD for a given passenger arrival rate.
// Both are affine in a_p. Requires 0 <= a_p < mu.
CriticalPoint critical_point(double a_p, const OperationalParams& p);

// Forward evaluation of the train-FD q = Q(k, a_p). The congested branch is
// clamped at zero beyond jam density. Requires k >= 0, 0 <= a_p < mu.
double fd_flow(double k, double a_p, const OperationalParams& p);

// Density at which the congested branch reaches q = 0.
double jam_density(double a_p, const OperationalParams& p);

// Recovers (a_p, regime) from a (q, k) pair via the branch closed forms,
// accepting only the branch whose regime test is consistent. Throws
// InfeasibleStateError when neither branch yields a_p in [0, mu) with a
// consistent regime.
std::pair<double, Regime> invert_passenger_rate(double q, double k,
                                                const OperationalParams& p);

// Minimum (uncongested, zero-demand) trip travel time T_0.
double min_travel_time(const OperationalParams& p);

} // namespace railfd
