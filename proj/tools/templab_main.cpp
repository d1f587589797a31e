// templab: numerical laboratory for Temple-class systems with commuting
// nonlinear viscosity. Subcommands: check, solve, riemann, study,
// list-systems.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "templab/coefficients.hpp"
#include "templab/front_tracking.hpp"
#include "templab/report.hpp"
#include "templab/riemann.hpp"
#include "templab/run_config.hpp"
#include "templab/solver.hpp"
#include "templab/studies.hpp"
#include "templab/system.hpp"

namespace fs = std::filesystem;
using namespace templab;
using nlohmann::json;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitAssert = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::string default_output_root() {
    const char* env = std::getenv("TEMPLAB_OUTPUT_ROOT");
    return env ? env : ".";
}

fs::path resolve_output(const std::string& dir) {
    fs::path p(dir);
    if (p.is_relative()) p = fs::path(default_output_root()) / p;
    fs::create_directories(p);
    return p;
}

void emit_error_record(const fs::path& dir, const std::string& code,
                       const std::string& what) {
    json e;
    e["schema_version"] = kSchemaVersion;
    e["error"] = code;
    e["message"] = what;
    if (!dir.empty()) {
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (!ec) write_json(dir / "error.json", e);
    }
    std::cerr << e.dump() << "\n";
}

json manifest_for(const std::string& command, const json& resolved) {
    json m;
    m["schema_version"] = kSchemaVersion;
    m["command"] = command;
    m["config"] = resolved;
    return m;
}

std::vector<Vec> sample_lattice(const SystemSpec& sys, int samples) {
    int per_axis = std::max(2, static_cast<int>(std::ceil(
                                   std::pow(static_cast<double>(samples),
                                            1.0 / sys.domain_box.dim()))));
    std::vector<Vec> pts = sys.domain_box.lattice(per_axis);
    if (static_cast<int>(pts.size()) > samples) pts.resize(samples);
    return pts;
}

int cmd_check(const std::string& system, int samples, const std::string& out_dir) {
    SystemSpec sys = get_system(system);
    std::vector<Vec> pts = sample_lattice(sys, samples);

    EstimateReport sys_rep = check_system(sys, pts);
    EstimateReport temple_rep = check_temple(sys, pts);

    auto print_row = [](const std::string& name, bool ok, double value, double limit,
                        const char* rel) {
        std::printf("  %-28s %s   (%.3e %s %.3e)\n", name.c_str(), ok ? "PASS" : "FAIL",
                    value, rel, limit);
    };
    std::printf("system '%s' (n=%d), %zu sample states\n", sys.name.c_str(), sys.n,
                pts.size());
    bool all = true;
    for (const auto& [key, limit] : sys_rep.thresholds) {
        std::string base = key.substr(0, key.rfind('_'));
        bool is_min = key.size() > 4 && key.substr(key.size() - 4) == "_min";
        double value = sys_rep.scalars.at(base);
        bool ok = is_min ? value >= limit : value <= limit;
        print_row(base, ok, value, limit, is_min ? ">=" : "<=");
        all = all && ok;
    }
    {
        double value = temple_rep.scalars.at("max_self_bullet");
        double limit = temple_rep.thresholds.at("max_self_bullet_max");
        bool ok = value <= limit;
        print_row("temple_max_self_bullet", ok, value, limit, "<=");
        all = all && ok;
    }
    std::printf("overall: %s\n", all ? "PASS" : "FAIL");

    if (!out_dir.empty()) {
        fs::path dir = resolve_output(out_dir);
        json rep;
        rep["schema_version"] = kSchemaVersion;
        rep["system"] = sys_rep.to_json();
        rep["temple"] = temple_rep.to_json();
        rep["pass"] = all;
        write_json(dir / "report.json", rep);
    }
    return all ? kExitPass : kExitAssert;
}

int cmd_solve(const RunConfig& rc) {
    SystemSpec sys = get_system(rc.system);
    GridField u0 = build_initial(sys, rc, rc.initial);
    std::vector<GridField> traj = solve_viscous(sys, u0, rc.solve);

    fs::path dir = resolve_output(rc.output_dir);
    json man = manifest_for("solve", rc.resolved);
    json diag_series = json::array();
    json outputs = json::array();
    for (size_t k = 0; k < traj.size(); ++k) {
        char name[64];
        std::snprintf(name, sizeof(name), "fields_%03zu.csv", k);
        write_fields_csv(dir / name, traj[k]);
        outputs.push_back(name);
        EstimateReport d = diagnostics(traj[k], Vec(u0.state(0)));
        json row;
        for (const auto& [key, va] : d.scalars) row[key] = va;
        diag_series.push_back(row);
    }
    man["outputs"] = outputs;
    man["diagnostics"] = diag_series;
    write_json(dir / "manifest.json", man);
    std::printf("solve: %zu records -> %s\n", traj.size(), dir.string().c_str());
    return kExitPass;
}

int cmd_riemann(const std::string& system, const std::vector<double>& left,
                const std::vector<double>& right, int cells, const std::string& out_dir,
                const json& resolved) {
    SystemSpec sys = get_system(system);
    if (static_cast<int>(left.size()) != sys.n || static_cast<int>(right.size()) != sys.n)
        throw ConfigError("riemann: left/right must have n components");
    Vec ul = Eigen::Map<const Vec>(left.data(), sys.n);
    Vec ur = Eigen::Map<const Vec>(right.data(), sys.n);
    RiemannFan fan = solve_riemann(sys, ul, ur);

    fs::path dir = resolve_output(out_dir);
    write_json(dir / "fan.json", fan.to_json());

    // sample on xi covering all wave speeds
    double smin = 0, smax = 0;
    for (const auto& p : fan.z) {
        if (p.trivial()) continue;
        smin = std::min(smin, p.min_speed());
        smax = std::max(smax, p.max_speed());
    }
    double pad = 0.25 * std::max(1.0, smax - smin);
    GridField xi_grid = GridField::zeros(smin - pad, (smax - smin + 2 * pad) / (cells - 1),
                                         cells, sys.n, 1.0);
    for (int j = 0; j < cells; ++j) xi_grid.set_state(j, fan.eval(xi_grid.x(j)));
    write_fields_csv(dir / "fan.csv", xi_grid);

    json man = manifest_for("riemann", resolved);
    man["outputs"] = {"fan.json", "fan.csv"};
    write_json(dir / "manifest.json", man);
    std::printf("riemann: sigma =");
    for (int i = 0; i < sys.n; ++i) std::printf(" %.6g", fan.sigma[i]);
    std::printf(" -> %s\n", dir.string().c_str());
    return kExitPass;
}

// default ratio limits for bv/stability on known system classes
double default_ratio_limit(const SystemSpec& sys, bool bv) {
    if (sys.n == 1) return 1.0 + 1e-6;
    if (sys.decoupled) {
        Eigen::JacobiSVD<Mat> svd(sys.decoupled->R);
        double cond = svd.singularValues()(0) / svd.singularValues().tail(1)(0);
        return bv ? cond * (1.0 + 1e-6) : cond + 1e-6;
    }
    return 3.0;
}

int cmd_study(const RunConfig& rc) {
    SystemSpec sys = get_system(rc.system);
    if (!rc.study.is_object() || !rc.study.contains("name"))
        throw ConfigError("study config needs study.name");
    std::string name = rc.study.at("name").get<std::string>();
    const json& sj = rc.study;

    GridField u0 = build_initial(sys, rc, rc.initial);
    EstimateReport rep;

    if (name == "bv") {
        BvParams p;
        p.solve = rc.solve;
        if (sj.contains("eps_list")) p.eps_list = sj.at("eps_list").get<std::vector<double>>();
        p.delta0 = sj.value("delta0", p.delta0);
        p.records = sj.value("records", p.records);
        p.ratio_limit = sj.value("ratio_limit", default_ratio_limit(sys, true));
        rep = bv_study(sys, u0, p);
    } else if (name == "stability") {
        StabilityParams p;
        p.solve = rc.solve;
        p.eps = sj.value("eps", rc.solve.epsilon);
        p.theta_count = sj.value("theta_count", p.theta_count);
        p.ratio_limit = sj.value("ratio_limit", default_ratio_limit(sys, false));
        p.homotopy_slack_rel = sj.value("homotopy_slack_rel", p.homotopy_slack_rel);
        GridField v0 = build_initial(sys, rc, rc.initial_v);
        rep = stability_study(sys, u0, v0, p);
    } else if (name == "time-continuity") {
        TimeContinuityParams p;
        p.solve = rc.solve;
        if (sj.contains("eps_list")) p.eps_list = sj.at("eps_list").get<std::vector<double>>();
        for (const auto& pr : sj.at("time_pairs"))
            p.time_pairs.emplace_back(pr.at(0).get<double>(), pr.at(1).get<double>());
        p.residual_limit = sj.value("residual_limit", p.residual_limit);
        rep = time_continuity_study(sys, u0, p);
    } else if (name == "propagation") {
        PropagationParams p;
        p.solve = rc.solve;
        if (sj.contains("eps_list")) p.eps_list = sj.at("eps_list").get<std::vector<double>>();
        p.t = sj.value("t", p.t);
        p.a = sj.at("a").get<double>();
        p.b = sj.at("b").get<double>();
        GridField v0 = build_initial(sys, rc, rc.initial_v);
        rep = propagation_study(sys, u0, v0, p);
    } else if (name == "vanishing-viscosity") {
        VanishingViscosityParams p;
        p.solve = rc.solve;
        if (sj.contains("eps_list")) p.eps_list = sj.at("eps_list").get<std::vector<double>>();
        p.t_star = sj.value("t_star", p.t_star);
        std::function<GridField(double)> reference;
        std::string init_type = rc.initial.value("type", std::string());
        if (init_type == "riemann") {
            Vec ul = u0.state(0);
            Vec ur = u0.state(u0.cells() - 1);
            double xj = rc.initial.value("x_jump", 0.0);
            RiemannFan fan = solve_riemann(sys, ul, ur);
            reference = [fan, u0, xj](double t) { return sample_fan(fan, u0, t, xj); };
        } else if (sys.decoupled) {
            reference = [&sys, u0](double t) {
                return exact_semigroup_decoupled(sys, u0, t);
            };
        }
        rep = vanishing_viscosity_study(sys, u0, reference, p);
    } else if (name == "transversal") {
        TransversalParams p;
        p.solve = rc.solve;
        p.family_i = sj.value("family_i", 1) - 1;
        p.family_j = sj.value("family_j", 2) - 1;
        p.records = sj.value("records", p.records);
        p.margin_min = sj.value("margin_min", p.margin_min);
        rep = transversal_decay_check(sys, u0, p);
    } else if (name == "decay-uxx") {
        DecayParams p;
        p.solve = rc.solve;
        p.samples = sj.value("samples", p.samples);
        rep = decay_study_uxx(sys, u0, p);
    } else if (name == "decay-hx") {
        DecayParams p;
        p.solve = rc.solve;
        p.samples = sj.value("samples", p.samples);
        GridField h0 = build_initial(sys, rc, rc.initial_h);
        GridField base = build_initial(sys, rc, rc.initial);
        // h0 spec gives a state field; the linearized field is its deviation
        GridField dh = h0 - base;
        rep = decay_study_hx(sys, base, dh, p);
    } else if (name == "residual") {
        int halvings = sj.value("halvings", 3);
        double eps = rc.solve.epsilon;
        std::vector<double> dxs, mismatches;
        for (int lvl = 0; lvl <= halvings; ++lvl) {
            RunConfig rcl = rc;
            rcl.cells = rc.cells * (1 << lvl);
            GridField u0l = build_initial(sys, rcl, rc.initial);
            SolveConfig cfg = rc.solve;
            double dt_rec = sj.value("dt_record_per_dx", 0.2) * u0l.dx;
            cfg.record_times = {cfg.t_end - dt_rec, cfg.t_end, cfg.t_end + dt_rec};
            std::vector<GridField> traj = solve_viscous(sys, u0l, cfg);
            EstimateReport r = residual_v_equation(sys, traj, eps);
            dxs.push_back(u0l.dx);
            mismatches.push_back(r.scalars.at("mismatch_l1_total"));
        }
        rep.name = "residual:" + sys.name;
        rep.series_columns = {"dx", "mismatch_l1"};
        for (size_t k = 0; k < dxs.size(); ++k)
            rep.series.push_back({dxs[k], mismatches[k]});
        FitResult fit = power_fit(dxs, mismatches, "C*dx^p");
        rep.fit = fit;
        rep.check_ge("fit_order", fit.exponent, sj.value("order_min", 0.8));
    } else {
        throw ConfigError("unknown study '" + name + "'");
    }

    fs::path dir = resolve_output(rc.output_dir);
    json man = manifest_for("study", rc.resolved);
    man["outputs"] = {"report.json", "series.csv"};
    write_json(dir / "manifest.json", man);
    json rj = rep.to_json();
    rj["config"] = rc.resolved;
    write_json(dir / "report.json", rj);
    std::ofstream os(dir / "series.csv");
    rep.write_series_csv(os);
    std::printf("study %-22s %s -> %s\n", name.c_str(), rep.pass ? "PASS" : "FAIL",
                dir.string().c_str());
    return rep.pass ? kExitPass : kExitAssert;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for Temple-class systems with commuting viscosity"};
    app.require_subcommand(1);

    auto* list_cmd = app.add_subcommand("list-systems", "list bundled system names");

    std::string check_system_name, check_out;
    int check_samples = 100;
    auto* check_cmd = app.add_subcommand("check", "verify hypotheses on a system");
    check_cmd->add_option("--system", check_system_name, "registry name or definition file")
        ->required();
    check_cmd->add_option("--samples", check_samples, "number of sample states");
    check_cmd->add_option("--output-dir", check_out, "optional report directory");

    std::string solve_config;
    auto* solve_cmd = app.add_subcommand("solve", "integrate the viscous system");
    solve_cmd->add_option("--config", solve_config, "run config (JSON)")->required();

    std::string rie_system, rie_out = "out_riemann";
    std::vector<double> rie_left, rie_right;
    int rie_cells = 1024;
    auto* rie_cmd = app.add_subcommand("riemann", "construct the exact Riemann fan");
    rie_cmd->add_option("--system", rie_system)->required();
    rie_cmd->add_option("--left", rie_left, "left state components")->required();
    rie_cmd->add_option("--right", rie_right, "right state components")->required();
    rie_cmd->add_option("--cells", rie_cells, "xi samples for fan.csv");
    rie_cmd->add_option("--output-dir", rie_out);

    std::string study_config;
    auto* study_cmd = app.add_subcommand("study", "run an estimate study");
    study_cmd->add_option("--config", study_config, "run config (JSON)")->required();

    CLI11_PARSE(app, argc, argv);

    std::string out_hint;
    try {
        if (list_cmd->parsed()) {
            for (const std::string& name : list_system_names()) std::printf("%s\n", name.c_str());
            return kExitPass;
        }
        if (check_cmd->parsed()) {
            out_hint = check_out;
            return cmd_check(check_system_name, check_samples, check_out);
        }
        if (solve_cmd->parsed()) {
            RunConfig rc = load_run_config(solve_config);
            out_hint = rc.output_dir;
            return cmd_solve(rc);
        }
        if (rie_cmd->parsed()) {
            json resolved;
            resolved["system"] = rie_system;
            resolved["left"] = rie_left;
            resolved["right"] = rie_right;
            resolved["cells"] = rie_cells;
            out_hint = rie_out;
            return cmd_riemann(rie_system, rie_left, rie_right, rie_cells, rie_out, resolved);
        }
        if (study_cmd->parsed()) {
            RunConfig rc = load_run_config(study_config);
            out_hint = rc.output_dir;
            return cmd_study(rc);
        }
    } catch (const ConfigError& e) {
        emit_error_record(out_hint.empty() ? fs::path() : resolve_output(out_hint),
                          e.code(), e.what());
        return kExitConfig;
    } catch (const ParseError& e) {
        emit_error_record(out_hint.empty() ? fs::path() : resolve_output(out_hint),
                          e.code(), e.what());
        return kExitConfig;
    } catch (const Error& e) {
        emit_error_record(out_hint.empty() ? fs::path() : resolve_output(out_hint),
                          e.code(), e.what());
        return kExitNumerical;
    } catch (const std::exception& e) {
        emit_error_record(out_hint.empty() ? fs::path() : resolve_output(out_hint),
                          "internal_error", e.what());
        return kExitNumerical;
    }
    return kExitConfig;
}
