#include "railfd/config.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace railfd {

ConfigParseError::ConfigParseError(int ln, const std::string& msg)
    : std::runtime_error("line " + std::to_string(ln) + ": " + msg), line(ln) {}

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

struct RawEntry {
    std::string value;
    int line;
};

// Numeric value with optional unit suffix.  `time_value` selects the
// minute default and enables s/min/h conversion to hours.
double parse_number(const std::string& key, const RawEntry& e, bool time_value) {
    const std::string v = trim(e.value);
    const char* begin = v.c_str();
    char* end = nullptr;
    double x = std::strtod(begin, &end);
    if (end == begin)
        throw ConfigParseError(e.line, key + ": expected a number, got '" + v + "'");
    std::string suffix = trim(std::string(end));
    if (!time_value) {
        if (!suffix.empty())
            throw ConfigParseError(e.line, key + ": unexpected suffix '" + suffix + "'");
        return x;
    }
    if (suffix.empty() || suffix == "min") return x / 60.0;
    if (suffix == "s") return x / 3600.0;
    if (suffix == "h") return x;
    throw ConfigParseError(e.line, key + ": unknown time unit '" + suffix +
                                       "' (use s, min, or h)");
}

const std::vector<std::string> kRequired = {
    "l", "L", "v_f", "t_b0", "mu", "delta", "tau",
    "alpha", "beta", "gamma", "n_pax"};

} // namespace

ExperimentConfig parse_config(const std::string& text) {
    std::map<std::string, RawEntry> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string s = trim(line);
        if (s.empty()) continue;
        auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigParseError(lineno, "expected 'key = value', got '" + s + "'");
        std::string key = trim(s.substr(0, eq));
        std::string val = trim(s.substr(eq + 1));
        if (key.empty())
            throw ConfigParseError(lineno, "missing key before '='");
        kv[key] = RawEntry{val, lineno};
    }

    {
        std::string missing;
        for (const auto& k : kRequired)
            if (!kv.count(k)) missing += missing.empty() ? k : ", " + k;
        if (!missing.empty())
            throw ConfigParseError(0, "missing required keys: " + missing);
    }

    auto has = [&](const char* k) { return kv.count(k) != 0; };
    auto num = [&](const char* k) { return parse_number(k, kv.at(k), false); };
    auto tm = [&](const char* k) { return parse_number(k, kv.at(k), true); };

    ExperimentConfig cfg;
    cfg.ops = OperationalParams{num("l"),  num("L"),     num("v_f"), tm("t_b0"),
                                num("mu"), num("delta"), tm("tau")};
    cfg.costs = CostParams{num("alpha"), num("beta"), num("gamma")};

    if (has("w_start") || has("w_end") || has("w_rate")) {
        if (!has("w_start") || !has("w_end"))
            throw ConfigParseError(0, "wish-window demand needs both w_start and w_end");
        Wt2Demand d;
        d.w_start = tm("w_start");
        d.w_end = tm("w_end");
        d.n_pax = num("n_pax");
        d.w_rate = has("w_rate") ? num("w_rate")
                                 : d.n_pax / (d.w_end - d.w_start);
        cfg.demand = d;
    } else {
        if (!has("t_star"))
            throw ConfigParseError(0, "demand needs t_star (or w_start/w_end)");
        cfg.demand = Wt1Demand{tm("t_star"), num("n_pax")};
    }

    std::string kind = has("inflow") ? trim(kv.at("inflow").value) : "constant";
    if (kind == "constant") {
        cfg.inflow_kind = InflowKind::Constant;
        if (!has("a_c"))
            throw ConfigParseError(0, "constant inflow needs a_c");
        cfg.a_c = num("a_c");
    } else if (kind == "two_level") {
        cfg.inflow_kind = InflowKind::TwoLevel;
        if (!has("a1") || !has("a2"))
            throw ConfigParseError(0, "two_level inflow needs a1 and a2");
        cfg.a1 = num("a1");
        cfg.a2 = num("a2");
    } else if (kind == "segments") {
        cfg.inflow_kind = InflowKind::Segments;
        if (!has("inflow_segments"))
            throw ConfigParseError(0, "segments inflow needs inflow_segments");
        const auto& e = kv.at("inflow_segments");
        std::vector<InflowProfile::Segment> segs;
        std::istringstream ls(e.value);
        std::string item;
        while (std::getline(ls, item, ',')) {
            auto colon = item.find(':');
            if (colon == std::string::npos)
                throw ConfigParseError(e.line,
                                       "inflow_segments: expected 't:rate' pairs");
            RawEntry t{trim(item.substr(0, colon)), e.line};
            RawEntry r{trim(item.substr(colon + 1)), e.line};
            segs.push_back({parse_number("inflow_segments", t, true),
                            parse_number("inflow_segments", r, false)});
        }
        if (segs.empty())
            throw ConfigParseError(e.line, "inflow_segments: empty list");
        cfg.inflow_segments.emplace(std::move(segs));
    } else {
        throw ConfigParseError(kv.at("inflow").line,
                               "inflow: expected constant, two_level, or segments");
    }
    if (has("a0")) cfg.a0 = num("a0");

    if (has("dt")) cfg.solver.dt = tm("dt");
    if (has("dn")) cfg.solver.dn = num("dn");
    if (has("eps_pax")) cfg.solver.eps_pax = num("eps_pax");
    if (has("max_iter")) cfg.solver.max_iter = static_cast<int>(num("max_iter"));
    if (has("out_dir")) cfg.out_dir = trim(kv.at("out_dir").value);

    auto rep = validate(cfg.ops, cfg.costs);
    auto drep = validate_demand(cfg.demand);
    rep.violations.insert(rep.violations.end(), drep.violations.begin(),
                          drep.violations.end());
    if (cfg.inflow_kind == InflowKind::Constant && !(cfg.a_c > 0))
        rep.violations.emplace_back("a_c > 0");
    if (cfg.inflow_kind == InflowKind::TwoLevel && !(cfg.a1 > 0 && cfg.a2 > 0))
        rep.violations.emplace_back("a1 > 0 and a2 > 0");
    if (!(cfg.solver.dt > 0 && cfg.solver.dn > 0 && cfg.solver.eps_pax > 0 &&
          cfg.solver.max_iter > 0))
        rep.violations.emplace_back("solver knobs positive");
    if (!rep.ok()) {
        std::string msg = "invalid configuration:";
        for (const auto& v : rep.violations) msg += " [" + v + "]";
        throw ConfigValidationError(msg);
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigIoError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

} // namespace railfd
