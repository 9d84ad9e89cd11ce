#include "railfd/params.hpp"

#include <cmath>

namespace railfd {

ValidationReport validate(const OperationalParams& p, const CostParams& c) {
    ValidationReport r;
    auto require = [&r](bool cond, const char* name) {
        if (!cond) r.violations.emplace_back(name);
    };
    require(p.l > 0, "l > 0");
    require(p.L > 0, "L > 0");
    require(p.v_f > 0, "v_f > 0");
    require(p.t_b0 > 0, "t_b0 > 0");
    require(p.mu > 0, "mu > 0");
    require(p.delta > 0, "delta > 0");
    require(p.tau > 0, "tau > 0");
    require(p.l > p.delta, "l > delta");
    require(p.L >= p.l, "L >= l");
    require(c.alpha > c.beta, "alpha > beta");
    require(c.beta > 0, "beta > 0");
    require(c.gamma > 0, "gamma > 0");
    return r;
}

ValidationReport validate_demand(const DemandSpec& d) {
    ValidationReport r;
    if (std::holds_alternative<Wt1Demand>(d)) {
        const auto& w = std::get<Wt1Demand>(d);
        if (!(w.n_pax >= 0)) r.violations.emplace_back("N_p >= 0");
    } else {
        const auto& w = std::get<Wt2Demand>(d);
        if (!(w.n_pax > 0)) r.violations.emplace_back("N_p > 0");
        if (!(w.w_end > w.w_start))
            r.violations.emplace_back("w_end > w_start");
        if (!(w.w_rate > 0)) r.violations.emplace_back("w_p > 0");
        if (std::abs(w.w_rate * (w.w_end - w.w_start) - w.n_pax) > 1.0)
            r.violations.emplace_back("w_p*(w_end - w_start) = N_p within 1 pax");
    }
    return r;
}

} // namespace railfd
