#pragma once

#include "railfd/params.hpp"

// Base numerical setting used throughout the tests: 1.2 km spacing on an
// 18 km trip, 20 s buffer dwell, 36000 pax/h boarding cap.
inline railfd::OperationalParams base_ops() {
    return {1.2, 18.0, 40.0, 20.0 / 3600.0, 36000.0, 0.4, 1.0 / 60.0};
}

inline railfd::CostParams base_costs() { return {20.0, 8.0, 25.0}; }
