// Command-line front end: equilibrium solves, closed-form analysis,
// timetable optimization, and parameter sweeps with deterministic CSV output.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "../vendor/CLI11.hpp"
#include "railfd/closed_form.hpp"
#include "railfd/config.hpp"
#include "railfd/csv.hpp"
#include "railfd/errors.hpp"
#include "railfd/timetable.hpp"

namespace {

constexpr const char* kVersion = "railfd 1.0.0";

// 0 success, 2 usage, 3 validation, 4 infeasible equilibrium,
// 5 non-convergence.
enum ExitCode { kOk = 0, kUsage = 2, kValidation = 3, kInfeasible = 4, kNoConverge = 5 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using namespace railfd;

InflowProfile make_inflow(const ExperimentConfig& cfg) {
    switch (cfg.inflow_kind) {
        case InflowKind::Constant: return InflowProfile::constant(cfg.a_c);
        case InflowKind::Segments: return *cfg.inflow_segments;
        case InflowKind::TwoLevel:
            throw UsageError("two_level inflow is resolved per solve; use --case wt1");
    }
    throw UsageError("unknown inflow kind");
}

// Operation pattern read off the converged series: number of maximal
// congested runs (0 = FF, 1 = FCF, 2 = FCCF).
std::string series_pattern(const std::vector<TrainState>& trains) {
    int runs = 0;
    bool in_run = false;
    for (const auto& s : trains) {
        bool cong = s.regime == Regime::Congested;
        if (cong && !in_run) ++runs;
        in_run = cong;
    }
    if (runs == 0) return "FF";
    if (runs == 1) return "FCF";
    if (runs == 2) return "FCCF";
    return "mixed";
}

void config_echo(RunManifest& m, const ExperimentConfig& cfg) {
    m.note("tool", kVersion);
    m.note("l_km", format_sig9(cfg.ops.l));
    m.note("L_km", format_sig9(cfg.ops.L));
    m.note("v_f_kmph", format_sig9(cfg.ops.v_f));
    m.note("t_b0_h", format_sig9(cfg.ops.t_b0));
    m.note("mu_paxph", format_sig9(cfg.ops.mu));
    m.note("delta_km", format_sig9(cfg.ops.delta));
    m.note("tau_h", format_sig9(cfg.ops.tau));
    m.note("alpha", format_sig9(cfg.costs.alpha));
    m.note("beta", format_sig9(cfg.costs.beta));
    m.note("gamma", format_sig9(cfg.costs.gamma));
    m.note("n_pax", format_sig9(total_pax(cfg.demand)));
    m.note("dt_h", format_sig9(cfg.solver.dt));
    m.note("dn_tr", format_sig9(cfg.solver.dn));
    m.note("eps_pax", format_sig9(cfg.solver.eps_pax));
}

std::vector<std::pair<std::string, std::string>> summary_rows(
    const EquilibriumSolution& sol, const std::string& pattern,
    const ExperimentConfig& cfg) {
    std::vector<std::pair<std::string, std::string>> kv;
    kv.emplace_back("tc_e", format_sig9(sol.tc_e));
    kv.emplace_back("t0_h", format_sig9(sol.t0));
    kv.emplace_back("tm_h", format_sig9(sol.tm));
    kv.emplace_back("ted_h", format_sig9(sol.ted));
    kv.emplace_back("pattern", pattern);
    kv.emplace_back("sum_tdc", format_sig9(sol.breakdown.sum_tdc));
    kv.emplace_back("sum_sdc", format_sig9(sol.breakdown.sum_sdc));
    kv.emplace_back("sum_tc", format_sig9(sol.breakdown.sum_tc));
    kv.emplace_back("iterations", std::to_string(sol.iterations));
    // Extras consumed by the `check` subcommand.
    kv.emplace_back("alpha", format_sig9(cfg.costs.alpha));
    kv.emplace_back("beta", format_sig9(cfg.costs.beta));
    kv.emplace_back("gamma", format_sig9(cfg.costs.gamma));
    kv.emplace_back("n_pax", format_sig9(total_pax(cfg.demand)));
    kv.emplace_back("eps_pax", format_sig9(cfg.solver.eps_pax));
    kv.emplace_back("t_free_h", format_sig9(min_travel_time(cfg.ops)));
    if (std::holds_alternative<Wt1Demand>(cfg.demand))
        kv.emplace_back("t_star_h",
                        format_sig9(std::get<Wt1Demand>(cfg.demand).t_star));
    return kv;
}

void emit_solution(const std::string& out_dir, const EquilibriumSolution& sol,
                   const ExperimentConfig& cfg) {
    std::filesystem::create_directories(out_dir);
    RunManifest manifest;
    config_echo(manifest, cfg);
    manifest.note("converged", sol.converged ? "yes" : "no");
    manifest.note("iterations", std::to_string(sol.iterations));
    auto t0 = std::chrono::system_clock::now().time_since_epoch();
    manifest.note("wall_clock_unix_s",
                  std::to_string(std::chrono::duration_cast<std::chrono::seconds>(t0).count()));
    manifest.write_file(out_dir, "trains.csv", render_trains_csv(sol.trains));
    manifest.write_file(out_dir, "curves.csv", render_curves_csv(sol.curves));
    manifest.write_file(out_dir, "summary.txt",
                        render_summary(summary_rows(sol, series_pattern(sol.trains), cfg)));
    manifest.finalize(out_dir);
}

int cmd_solve(const std::string& config_path, const std::string& case_name,
              const std::string& out_dir) {
    auto cfg = load_config(config_path);
    EquilibriumSolver solver(cfg.ops, cfg.costs, cfg.solver);
    EquilibriumSolution sol;
    if (case_name == "wt1") {
        if (!std::holds_alternative<Wt1Demand>(cfg.demand))
            throw UsageError("--case wt1 needs t_star demand in the config");
        const auto& d = std::get<Wt1Demand>(cfg.demand);
        if (cfg.inflow_kind == InflowKind::TwoLevel) {
            double cap = cfg.a0 > 0 ? cfg.a0 : std::max(cfg.a1, cfg.a2);
            auto outcome = timetable::evaluate_scenario(cfg.a1, cfg.a2, cfg.ops,
                                                        cfg.costs, d, cap, cfg.solver);
            if (!outcome.ok())
                throw InfeasibleStateError(0, 0, "two-level timetable cannot carry the demand");
            sol = outcome.solution;
        } else {
            sol = solver.solve_wt1(d, make_inflow(cfg));
        }
    } else if (case_name == "wt2") {
        if (!std::holds_alternative<Wt2Demand>(cfg.demand))
            throw UsageError("--case wt2 needs w_start/w_end demand in the config");
        sol = solver.solve_wt2(std::get<Wt2Demand>(cfg.demand), make_inflow(cfg));
    } else {
        throw UsageError("--case must be wt1 or wt2");
    }
    emit_solution(out_dir, sol, cfg);
    std::printf("tc_e = %s  rush [%s, %s]  pattern %s\n", format_sig9(sol.tc_e).c_str(),
                format_sig9(sol.t0).c_str(), format_sig9(sol.ted).c_str(),
                series_pattern(sol.trains).c_str());
    return kOk;
}

int cmd_analytic(const std::string& config_path) {
    auto cfg = load_config(config_path);
    if (cfg.inflow_kind != InflowKind::Constant)
        throw UsageError("analytic report needs constant inflow (a_c)");
    if (!std::holds_alternative<Wt1Demand>(cfg.demand))
        throw UsageError("analytic report needs t_star demand");
    const auto& d = std::get<Wt1Demand>(cfg.demand);
    auto z = closed_form::zeta_factors(cfg.costs);
    auto th = closed_form::regime_thresholds(cfg.a_c, cfg.costs, cfg.ops);
    auto numeric = [&](double np, double ac) {
        EquilibriumSolver solver(cfg.ops, cfg.costs, cfg.solver);
        return solver.solve_wt1(Wt1Demand{d.t_star, np}, InflowProfile::constant(ac)).tc_e;
    };
    auto rep = closed_form::classify_pattern(d.n_pax, cfg.a_c, cfg.costs, cfg.ops, numeric);
    std::printf("zeta1 = %s\n", format_sig9(z.zeta1).c_str());
    std::printf("zeta2 = %s\n", format_sig9(z.zeta2).c_str());
    std::printf("omega = %s\n", format_sig9(timetable::omega_ratio(cfg.costs)).c_str());
    std::printf("T0_h = %s\n", format_sig9(min_travel_time(cfg.ops)).c_str());
    std::printf("tc_ff_max = %s\n", format_sig9(th.tc_ff_max).c_str());
    std::printf("tc_fcf_max = %s\n", format_sig9(th.tc_fcf_max).c_str());
    std::printf("tc_fccf_max = %s\n", format_sig9(th.tc_fccf_max).c_str());
    std::printf("np_ff = %s\n", format_sig9(rep.np_ff).c_str());
    std::printf("np_fcf = %s\n", format_sig9(rep.np_fcf).c_str());
    std::printf("pattern = %s\n", closed_form::pattern_name(rep.pattern).c_str());
    std::printf("tc_e = %s\n", format_sig9(rep.tc_e).c_str());
    if (rep.pattern == closed_form::Pattern::FCF)
        std::printf("dtc_dnp = %s\n",
                    format_sig9(closed_form::tc_fcf_sensitivity(d.n_pax, cfg.a_c,
                                                                cfg.costs, cfg.ops))
                        .c_str());
    return kOk;
}

int cmd_optimize(const std::string& config_path, double a0, double step,
                 const std::string& out_dir,
                 const std::vector<std::string>& scenarios) {
    auto cfg = load_config(config_path);
    if (!std::holds_alternative<Wt1Demand>(cfg.demand))
        throw UsageError("optimize needs t_star demand");
    const auto& d = std::get<Wt1Demand>(cfg.demand);
    if (!(a0 > 0) || !(step > 0)) throw UsageError("--a0 and --step must be positive");

    timetable::OptResult res;
    try {
        res = timetable::grid_optimize(cfg.ops, cfg.costs, d, a0, step, cfg.solver);
    } catch (const SolverError& e) {
        std::fprintf(stderr, "optimize: %s\n", e.what());
        return kInfeasible;
    }

    std::filesystem::create_directories(out_dir);
    RunManifest manifest;
    config_echo(manifest, cfg);
    manifest.note("a0_trph", format_sig9(a0));
    manifest.note("step_trph", format_sig9(step));

    std::ostringstream surface;
    surface << "a1_trph,a2_trph,tc_usd\n";
    for (const auto& s : res.surface)
        surface << format_sig9(s.a1) << ',' << format_sig9(s.a2) << ','
                << (std::isnan(s.tc_e) ? "INF" : format_sig9(s.tc_e)) << '\n';
    manifest.write_file(out_dir, "surface.csv", surface.str());

    auto breakdown_row = [&](std::ostringstream& out, const char* name, double a1,
                             double a2) {
        auto outcome = timetable::evaluate_scenario(a1, a2, cfg.ops, cfg.costs, d,
                                                    a0 * 10, cfg.solver);
        out << name << ',' << format_sig9(a1) << ',' << format_sig9(a2) << ',';
        if (!outcome.ok()) {
            out << "INF,INF,INF,INF\n";
            return;
        }
        const auto& b = outcome.solution.breakdown;
        out << format_sig9(outcome.solution.tc_e) << ',' << format_sig9(b.sum_tdc)
            << ',' << format_sig9(b.sum_sdc) << ',' << format_sig9(b.sum_tc) << '\n';
    };
    std::ostringstream sc;
    sc << "name,a1_trph,a2_trph,tc_usd,sum_tdc_usd,sum_sdc_usd,sum_tc_usd\n";
    breakdown_row(sc, "optimum", res.a1, res.a2);
    int idx = 0;
    for (const auto& spec : scenarios) {
        auto colon = spec.find(':');
        if (colon == std::string::npos)
            throw UsageError("--scenario expects a1:a2");
        double a1 = std::stod(spec.substr(0, colon));
        double a2 = std::stod(spec.substr(colon + 1));
        breakdown_row(sc, ("S" + std::to_string(++idx)).c_str(), a1, a2);
    }
    manifest.write_file(out_dir, "scenarios.csv", sc.str());

    std::vector<std::pair<std::string, std::string>> kv;
    kv.emplace_back("a1_trph", format_sig9(res.a1));
    kv.emplace_back("a2_trph", format_sig9(res.a2));
    kv.emplace_back("tc_e", format_sig9(res.tc_e));
    kv.emplace_back("t0_h", format_sig9(res.solution.t0));
    kv.emplace_back("tm_h", format_sig9(res.solution.tm));
    kv.emplace_back("ted_h", format_sig9(res.solution.ted));
    kv.emplace_back("pattern", series_pattern(res.solution.trains));
    manifest.write_file(out_dir, "optimum.txt", render_summary(kv));
    manifest.finalize(out_dir);
    std::printf("optimum a1 = %s  a2 = %s  tc_e = %s\n", format_sig9(res.a1).c_str(),
                format_sig9(res.a2).c_str(), format_sig9(res.tc_e).c_str());
    return kOk;
}

int cmd_sweep(const std::string& config_path, const std::string& param, double from,
              double to, double step, const std::string& out_dir) {
    auto cfg = load_config(config_path);
    if (cfg.inflow_kind != InflowKind::Constant)
        throw UsageError("sweep needs constant inflow (a_c)");
    if (!std::holds_alternative<Wt1Demand>(cfg.demand))
        throw UsageError("sweep needs t_star demand");
    static const std::map<std::string, int> kParams = {
        {"Np", 0}, {"ac", 1}, {"alpha", 2}, {"beta", 3}, {"gamma", 4}};
    if (!kParams.count(param))
        throw UsageError("unknown sweep parameter '" + param +
                         "' (use Np, ac, alpha, beta, gamma)");
    if (!(step > 0) || to < from) throw UsageError("need from <= to and step > 0");

    std::ostringstream out;
    out << "param,value,tc_closed,tc_numeric,pattern\n";
    const int n_steps = static_cast<int>(std::floor((to - from) / step + 1e-9));
    for (int i = 0; i <= n_steps; ++i) {
        const double v = from + i * step;
        auto ops = cfg.ops;
        auto costs = cfg.costs;
        auto d = std::get<Wt1Demand>(cfg.demand);
        double ac = cfg.a_c;
        switch (kParams.at(param)) {
            case 0: d.n_pax = v; break;
            case 1: ac = v; break;
            case 2: costs.alpha = v; break;
            case 3: costs.beta = v; break;
            case 4: costs.gamma = v; break;
        }
        if (!validate(ops, costs).ok()) {
            out << param << ',' << format_sig9(v) << ",NAN,NAN,Infeasible\n";
            continue;
        }
        std::string tc_closed = "NAN";
        std::string pattern = "Infeasible";
        bool try_numeric = false;
        try {
            // settings where the conservation quadratic loses its real root
            // keep tc_closed = NAN (a numeric solve may still exist)
            auto rep = closed_form::classify_pattern(d.n_pax, ac, costs, ops);
            if (!std::isnan(rep.tc_e)) tc_closed = format_sig9(rep.tc_e);
            pattern = closed_form::pattern_name(rep.pattern);
            try_numeric = rep.pattern != closed_form::Pattern::Infeasible;
        } catch (const std::domain_error&) {
            try_numeric = true;
        }
        std::string tc_numeric = "NAN";
        if (try_numeric) {
            // the analytical curve can extend past the physical ceiling of
            // the congested branch; such points keep tc_numeric = NAN
            try {
                EquilibriumSolver solver(ops, costs, cfg.solver);
                auto sol = solver.solve_wt1(d, InflowProfile::constant(ac));
                tc_numeric = format_sig9(sol.tc_e);
                pattern = series_pattern(sol.trains);
            } catch (const InfeasibleStateError&) {
            } catch (const SolverError&) {
            }
        }
        out << param << ',' << format_sig9(v) << ',' << tc_closed << ','
            << tc_numeric << ',' << pattern << '\n';
    }
    std::filesystem::create_directories(out_dir);
    RunManifest manifest;
    config_echo(manifest, cfg);
    manifest.note("sweep_param", param);
    manifest.write_file(out_dir, "sweep.csv", out.str());
    manifest.finalize(out_dir);
    std::printf("sweep written: %s/sweep.csv\n", out_dir.c_str());
    return kOk;
}

// --- `check` subcommand: re-validate emitted artifacts -----------------

std::map<std::string, std::string> read_kv_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw UsageError("cannot open " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(f, line)) {
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

int cmd_check(const std::string& dir) {
    // 1. Manifest checksums.
    std::ifstream mf(dir + "/manifest.txt");
    if (!mf) throw UsageError("no manifest.txt in " + dir);
    std::string line;
    bool all_ok = true;
    while (std::getline(mf, line)) {
        if (line.rfind("file ", 0) != 0) continue;
        auto sp = line.rfind(" fnv1a64:");
        std::string name = line.substr(5, sp - 5);
        std::string want = line.substr(sp + 9);
        std::ifstream f(dir + "/" + name, std::ios::binary);
        if (!f) {
            std::printf("check: MISSING %s\n", name.c_str());
            all_ok = false;
            continue;
        }
        std::ostringstream ss;
        ss << f.rdbuf();
        char hex[20];
        std::snprintf(hex, sizeof hex, "%016llx",
                      static_cast<unsigned long long>(fnv1a64(ss.str())));
        bool ok = want == hex;
        std::printf("check: %s %s\n", ok ? "OK" : "CHECKSUM MISMATCH", name.c_str());
        all_ok &= ok;
    }

    auto kv = read_kv_file(dir + "/summary.txt");
    auto need = [&](const char* k) {
        if (!kv.count(k)) throw UsageError(std::string("summary.txt missing ") + k);
        return std::stod(kv.at(k));
    };
    const double alpha = need("alpha"), beta = need("beta"), gamma = need("gamma");
    const double n_pax = need("n_pax"), eps_pax = need("eps_pax");
    const double tc_e = need("tc_e"), t_free = need("t_free_h");

    // 2. Re-read the train series.
    std::ifstream tf(dir + "/trains.csv");
    if (!tf) throw UsageError("no trains.csv in " + dir);
    std::getline(tf, line); // header
    struct Row {
        double n, t_dep, T, h_a, h_d, a_p;
    };
    std::vector<Row> rows;
    while (std::getline(tf, line)) {
        Row r{};
        double t_arr, q, k;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf", &r.n,
                        &t_arr, &r.t_dep, &r.T, &r.h_a, &r.h_d, &q, &k, &r.a_p) != 9) {
            std::printf("check: UNREADABLE trains.csv row '%s'\n", line.c_str());
            return kValidation;
        }
        rows.push_back(r);
    }

    // 3. Conservation: trapezoid of a_p(n) h_bar(n) dn against n_pax.
    double served = 0;
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
        double f0 = rows[i].a_p * 0.5 * (rows[i].h_a + rows[i].h_d);
        double f1 = rows[i + 1].a_p * 0.5 * (rows[i + 1].h_a + rows[i + 1].h_d);
        served += 0.5 * (f0 + f1) * (rows[i + 1].n - rows[i].n);
    }
    bool conserve_ok = rows.empty() ? n_pax == 0 : std::abs(served - n_pax) <= eps_pax;
    std::printf("check: conservation %s (served %.2f of %.0f, eps %.0f)\n",
                conserve_ok ? "OK" : "VIOLATED", served, n_pax, eps_pax);
    all_ok &= conserve_ok;

    // 4. Cost constancy (equal trip cost across the series; common-wish case).
    if (kv.count("t_star_h") && !rows.empty()) {
        const double t_star = std::stod(kv.at("t_star_h"));
        double worst = 0;
        for (const auto& r : rows) {
            double sd = r.t_dep < t_star ? beta * (t_star - r.t_dep)
                                         : gamma * (r.t_dep - t_star);
            worst = std::max(worst, std::abs(alpha * (r.T - t_free) + sd - tc_e));
        }
        bool const_ok = worst <= 1e-6;
        std::printf("check: cost constancy %s (max deviation %.3g)\n",
                    const_ok ? "OK" : "VIOLATED", worst);
        all_ok &= const_ok;
    }
    if (!all_ok) return kValidation;
    std::printf("check: all invariants hold\n");
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Departure-time equilibrium of a congested rail transit line"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string config_path, case_name = "wt1", out_dir = ".", param, dir;
    double a0 = 0, step = 0, from = 0, to = 0;
    std::vector<std::string> scenarios;

    auto* solve = app.add_subcommand("solve", "Solve an equilibrium case");
    solve->add_option("--config", config_path)->required();
    solve->add_option("--case", case_name)->check(CLI::IsMember({"wt1", "wt2"}));
    solve->add_option("--out", out_dir);

    auto* analytic = app.add_subcommand("analytic", "Closed-form report");
    analytic->add_option("--config", config_path)->required();

    auto* optimize = app.add_subcommand("optimize", "Two-level timetable grid search");
    optimize->add_option("--config", config_path)->required();
    optimize->add_option("--a0", a0)->required();
    optimize->add_option("--step", step)->required();
    optimize->add_option("--out", out_dir);
    optimize->add_option("--scenario", scenarios,
                         "extra a1:a2 points for the breakdown table");

    auto* sweep = app.add_subcommand("sweep", "Parameter sweep");
    sweep->add_option("--config", config_path)->required();
    sweep->add_option("--param", param)->required();
    sweep->add_option("--from", from)->required();
    sweep->add_option("--to", to)->required();
    sweep->add_option("--step", step)->required();
    sweep->add_option("--out", out_dir);

    auto* check = app.add_subcommand("check", "Re-validate emitted artifacts");
    check->add_option("--dir", dir)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (app.got_subcommand(solve)) return cmd_solve(config_path, case_name, out_dir);
        if (app.got_subcommand(analytic)) return cmd_analytic(config_path);
        if (app.got_subcommand(optimize))
            return cmd_optimize(config_path, a0, step, out_dir, scenarios);
        if (app.got_subcommand(sweep))
            return cmd_sweep(config_path, param, from, to, step, out_dir);
        if (app.got_subcommand(check)) return cmd_check(dir);
    } catch (const UsageError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return kUsage;
    } catch (const ConfigIoError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kUsage;
    } catch (const ConfigParseError& e) {
        std::fprintf(stderr, "config parse error: %s\n", e.what());
        return kUsage;
    } catch (const ConfigValidationError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kValidation;
    } catch (const InfeasibleStateError& e) {
        std::fprintf(stderr, "infeasible equilibrium: %s\n", e.what());
        return kInfeasible;
    } catch (const SolverError& e) {
        std::fprintf(stderr, "solver did not converge: %s\n", e.what());
        return kNoConverge;
    }
    return kUsage;
}
