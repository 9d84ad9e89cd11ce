#pragma once

#include <stdexcept>
#include <string>

namespace railfd {

// A (q, k) pair that no branch of the train-FD can produce with a
// passenger arrival rate in [0, mu).
struct InfeasibleStateError : std::runtime_error {
    double q;
    double k;

    InfeasibleStateError(double q_, double k_, const std::string& what)
        : std::runtime_error(what), q(q_), k(k_) {}
};

// Equilibrium search failed to converge within the iteration budget.
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace railfd
