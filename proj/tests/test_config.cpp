#include "doctest.h"

#include <cstdio>
#include <limits>
#include <string>

#include "railfd/config.hpp"
#include "railfd/csv.hpp"

using namespace railfd;

namespace {

const char* kBase =
    "l = 1.2\nL = 18\nv_f = 40\nt_b0 = 20 s\nmu = 36000\ndelta = 0.4\n"
    "tau = 1 min\nalpha = 20\nbeta = 8\ngamma = 25\n"
    "t_star = 4 h\nn_pax = 30000\ninflow = constant\na_c = 12\n";

} // namespace

TEST_CASE("base config parses with unit conversion") {
    auto cfg = parse_config(kBase);
    CHECK(cfg.ops.t_b0 == doctest::Approx(20.0 / 3600.0).epsilon(1e-12));
    CHECK(cfg.ops.tau == doctest::Approx(1.0 / 60.0).epsilon(1e-12));
    CHECK(cfg.ops.l == 1.2);
    CHECK(cfg.ops.mu == 36000.0);
    REQUIRE(std::holds_alternative<Wt1Demand>(cfg.demand));
    CHECK(std::get<Wt1Demand>(cfg.demand).t_star == 4.0);
    CHECK(cfg.inflow_kind == InflowKind::Constant);
    CHECK(cfg.a_c == 12.0);
}

TEST_CASE("bare times default to minutes") {
    std::string s = kBase;
    s += "dt = 2\n"; // minutes
    auto cfg = parse_config(s);
    CHECK(cfg.solver.dt == doctest::Approx(2.0 / 60.0).epsilon(1e-12));
}

TEST_CASE("comments and blank lines are ignored") {
    std::string s = std::string("# header\n\n") + kBase + "a_c = 12 # override comment\n";
    CHECK(parse_config(s).a_c == 12.0);
}

TEST_CASE("empty input lists the required keys") {
    try {
        parse_config("");
        FAIL("expected a parse error");
    } catch (const ConfigParseError& e) {
        std::string msg = e.what();
        CHECK(msg.find("missing required keys") != std::string::npos);
        CHECK(msg.find("alpha") != std::string::npos);
        CHECK(msg.find("n_pax") != std::string::npos);
    }
}

TEST_CASE("equal earliness and travel weights are rejected by rule name") {
    std::string s = kBase;
    s += "alpha = 8\n"; // duplicate key overrides: alpha == beta
    try {
        parse_config(s);
        FAIL("expected a validation error");
    } catch (const ConfigValidationError& e) {
        CHECK(std::string(e.what()).find("alpha > beta") != std::string::npos);
    }
}

TEST_CASE("malformed lines carry their line number") {
    try {
        parse_config("l = 1.2\nnot a key value pair\n");
        FAIL("expected a parse error");
    } catch (const ConfigParseError& e) {
        CHECK(e.line == 2);
    }
}

TEST_CASE("unknown unit suffix is rejected") {
    std::string s = kBase;
    s += "dt = 3 days\n";
    CHECK_THROWS_AS(parse_config(s), ConfigParseError);
}

TEST_CASE("segment inflow round-trips") {
    std::string s = kBase;
    s += "inflow = segments\ninflow_segments = 0 h:14, 90:18, 3 h:10\n";
    auto cfg = parse_config(s);
    REQUIRE(cfg.inflow_kind == InflowKind::Segments);
    REQUIRE(cfg.inflow_segments.has_value());
    auto segs = cfg.inflow_segments->segments();
    REQUIRE(segs.size() == 3);
    CHECK(segs[1].start == doctest::Approx(1.5).epsilon(1e-12)); // 90 min
    CHECK(segs[1].rate == 18.0);
}

TEST_CASE("wish window demand is inferred from its keys") {
    std::string s =
        "l = 1.2\nL = 18\nv_f = 40\nt_b0 = 20 s\nmu = 36000\ndelta = 0.4\n"
        "tau = 1 min\nalpha = 20\nbeta = 8\ngamma = 25\n"
        "w_start = 3 h\nw_end = 5 h\nn_pax = 30000\ninflow = constant\na_c = 12\n";
    auto cfg = parse_config(s);
    REQUIRE(std::holds_alternative<Wt2Demand>(cfg.demand));
    const auto& d = std::get<Wt2Demand>(cfg.demand);
    CHECK(d.w_rate == doctest::Approx(15000.0).epsilon(1e-12));
}

TEST_CASE("missing file raises an io error") {
    CHECK_THROWS_AS(load_config("/nonexistent/path.cfg"), ConfigIoError);
}

TEST_CASE("nine significant digit formatting is stable") {
    CHECK(format_sig9(18.2020501234) == "18.2020501");
    CHECK(format_sig9(0.0) == "0");
    CHECK(format_sig9(-1.0 / 3.0) == "-0.333333333");
    CHECK(format_sig9(std::numeric_limits<double>::infinity()) == "INF");
}
