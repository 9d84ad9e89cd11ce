#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "railfd/equilibrium.hpp"
#include "railfd/inflow.hpp"
#include "railfd/params.hpp"

namespace railfd {

// Distinct failure kinds so callers can map them to exit codes.
struct ConfigIoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigParseError : std::runtime_error {
    ConfigParseError(int line, const std::string& msg);
    int line;
};
struct ConfigValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class InflowKind { Constant, Segments, TwoLevel };

struct ExperimentConfig {
    OperationalParams ops;
    CostParams costs;
    DemandSpec demand;
    InflowKind inflow_kind = InflowKind::Constant;
    double a_c = 0.0;                 // constant inflow rate [tr/h]
    std::optional<InflowProfile> inflow_segments; // explicit piecewise profile
    double a1 = 0.0, a2 = 0.0;        // two-level rates [tr/h]
    double a0 = 0.0;                  // fleet/track capacity bound [tr/h]
    SolverOptions solver;
    std::string out_dir = ".";
};

// Flat "key = value" text; '#' starts a comment.  Times accept s/min/h
// suffixes and default to minutes; rates are per hour, lengths km.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& text);

} // namespace railfd
