#pragma once

#include <string>
#include <variant>
#include <vector>

namespace railfd {

// Canonical internal units: hours, kilometers, dollars; trains and
// passengers treated as real-valued continua.
struct OperationalParams {
    double l;     // inter-station distance (km)
    double L;     // trip length (km)
    double v_f;   // free-flow speed (km/h)
    double t_b0;  // buffer dwell time (h)
    double mu;    // max boarding flow rate (pax/h)
    double delta; // minimum spacing (km)
    double tau;   // reaction time (h)
};

struct CostParams {
    double alpha; // travel-delay value ($/h)
    double beta;  // earliness value ($/h)
    double gamma; // lateness value ($/h)
};

// Common desired departure time t*.
struct Wt1Demand {
    double t_star; // h
    double n_pax;  // total passengers
};

// Z-shaped cumulative wish curve with constant slope over [w_start, w_end].
struct Wt2Demand {
    double w_start; // h
    double w_end;   // h
    double w_rate;  // pax/h
    double n_pax;   // total passengers
};

using DemandSpec = std::variant<Wt1Demand, Wt2Demand>;

inline double total_pax(const DemandSpec& d) {
    return std::holds_alternative<Wt1Demand>(d)
               ? std::get<Wt1Demand>(d).n_pax
               : std::get<Wt2Demand>(d).n_pax;
}

struct ValidationReport {
    std::vector<std::string> violations;

    bool ok() const { return violations.empty(); }
};

// Checks every type invariant; failures are listed by name, never thrown.
ValidationReport validate(const OperationalParams& p, const CostParams& c);

// Demand-specific invariants (N_p > 0, WT2 rate/window consistency).
ValidationReport validate_demand(const DemandSpec& d);

} // namespace railfd
