#include "triadyn/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "triadyn/errors.hpp"
#include "triadyn/export.hpp"
#include "triadyn/regimes.hpp"

namespace triadyn {

namespace {

using nlohmann::json;

struct Flags {
    // model
    std::optional<double> kappa, nu, c, c1, c2, c3, x0, dmu, mu1, mu2, mu3, lambda;
    std::optional<double> gamma1, gamma2, gamma3;
    // solver
    std::optional<std::string> method;
    std::optional<double> dt, t_max, eq_tol, abs_tol, rel_tol;
    std::optional<std::size_t> stride;
    // classification and search
    std::optional<double> s_frac, r_frac, tol;
    std::optional<unsigned> threads;
    // plumbing
    std::optional<std::string> convention, ic_policy, preset, config, out_dir;
    std::optional<std::string> out, out_base, format, x_init;
    std::optional<std::string> dmu_range, kappa_range, dmu_list;
    bool plot = false;
    bool with_k4 = false;
};

// Config-file values sit between CLI flags and built-in defaults.
class Settings {
  public:
    explicit Settings(const std::optional<std::string>& path) {
        if (!path) return;
        std::ifstream f(*path);
        if (!f) throw ValidationError("cannot read config file '" + *path + "'");
        try {
            f >> cfg_;
        } catch (const json::exception& e) {
            throw ValidationError("config file '" + *path + "': " + std::string(e.what()));
        }
        if (!cfg_.is_object()) throw ValidationError("config file must hold a JSON object");
    }

    template <class T>
    T get(const std::optional<T>& cli, const char* key, T fallback) const {
        const auto v = pick(cli, key);
        return v ? *v : fallback;
    }

    template <class T>
    std::optional<T> pick(const std::optional<T>& cli, const char* key) const {
        if (cli) return cli;
        if (!cfg_.contains(key)) return std::nullopt;
        try {
            return cfg_.at(key).get<T>();
        } catch (const json::exception& e) {
            throw ValidationError("config key '" + std::string(key) + "': " + e.what());
        }
    }

  private:
    json cfg_ = json::object();
};

std::vector<double> parse_number_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        const std::string tok = text.substr(pos, comma - pos);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            throw ValidationError(std::string(what) + ": bad number '" + tok + "'");
        }
        if (used != tok.size()) {
            throw ValidationError(std::string(what) + ": bad number '" + tok + "'");
        }
        out.push_back(v);
        pos = comma + 1;
    }
    return out;
}

struct AxisRange {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t n = 0;
};

// "lo:hi:n" axis syntax shared by boundaries and diagram.
AxisRange parse_axis(const std::string& text, const char* what) {
    const std::size_t p1 = text.find(':');
    const std::size_t p2 = p1 == std::string::npos ? std::string::npos : text.find(':', p1 + 1);
    if (p2 == std::string::npos || text.find(':', p2 + 1) != std::string::npos) {
        throw ValidationError(std::string(what) + ": expected lo:hi:n, got '" + text + "'");
    }
    AxisRange r;
    try {
        std::size_t used = 0;
        const std::string lo = text.substr(0, p1);
        const std::string hi = text.substr(p1 + 1, p2 - p1 - 1);
        const std::string n = text.substr(p2 + 1);
        r.lo = std::stod(lo, &used);
        if (used != lo.size()) throw std::invalid_argument(lo);
        r.hi = std::stod(hi, &used);
        if (used != hi.size()) throw std::invalid_argument(hi);
        const long long count = std::stoll(n, &used);
        if (used != n.size() || count < 1) throw std::invalid_argument(n);
        r.n = static_cast<std::size_t>(count);
    } catch (const std::exception&) {
        throw ValidationError(std::string(what) + ": expected lo:hi:n, got '" + text + "'");
    }
    return r;
}

std::vector<double> axis_grid(const AxisRange& r, const char* what) {
    if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.hi < r.lo) {
        throw ValidationError(std::string(what) + ": bad range endpoints");
    }
    if (r.n == 1) {
        if (r.hi != r.lo) {
            throw ValidationError(std::string(what) + ": single-point range must have hi == lo");
        }
        return {r.lo};
    }
    std::vector<double> g(r.n);
    const double step = (r.hi - r.lo) / static_cast<double>(r.n - 1);
    for (std::size_t i = 0; i < r.n; ++i) g[i] = r.lo + step * static_cast<double>(i);
    g.back() = r.hi;
    return g;
}

ModelParams resolve_params(const Flags& fl, const Settings& st, const ModelParams* base) {
    ModelParams p = base ? *base : ModelParams{};
    p.kappa = st.get(fl.kappa, "kappa", p.kappa);
    p.nu = st.get(fl.nu, "nu", p.nu);
    p.x0 = st.get(fl.x0, "x0", p.x0);
    p.lambda = st.get(fl.lambda, "lambda", p.lambda);
    p.gamma1 = st.get(fl.gamma1, "gamma1", p.gamma1);
    p.gamma2 = st.get(fl.gamma2, "gamma2", p.gamma2);
    p.gamma3 = st.get(fl.gamma3, "gamma3", p.gamma3);

    const auto c = st.pick(fl.c, "c");
    const auto c1 = st.pick(fl.c1, "c1");
    const auto c2 = st.pick(fl.c2, "c2");
    const auto c3 = st.pick(fl.c3, "c3");
    if (c && (c1 || c2 || c3)) {
        throw ValidationError("give either --c or --c1/--c2/--c3, not both");
    }
    if (c) {
        p.c1 = *c;
        p.c2 = 0.0;
        p.c3 = -*c;
    } else {
        if (c1) p.c1 = *c1;
        if (c2) p.c2 = *c2;
        if (c3) p.c3 = *c3;
    }

    const auto dmu = st.pick(fl.dmu, "dmu");
    const auto m1 = st.pick(fl.mu1, "mu1");
    const auto m2 = st.pick(fl.mu2, "mu2");
    const auto m3 = st.pick(fl.mu3, "mu3");
    if (dmu && (m1 || m2 || m3)) {
        throw ValidationError("give either --dmu or --mu1/--mu2/--mu3, not both");
    }
    if (dmu) {
        p.mu1 = -*dmu / 2.0;
        p.mu2 = 0.0;
        p.mu3 = *dmu / 2.0;
    } else {
        if (m1) p.mu1 = *m1;
        if (m2) p.mu2 = *m2;
        if (m3) p.mu3 = *m3;
    }
    p.validate();
    return p;
}

SolverConfig resolve_solver(const Flags& fl, const Settings& st, const SolverConfig* base) {
    SolverConfig cfg = base ? *base : SolverConfig{};
    if (const auto m = st.pick(fl.method, "method")) cfg.method = parse_method(*m);
    cfg.dt = st.get(fl.dt, "dt", cfg.dt);
    cfg.t_max = st.get(fl.t_max, "t_max", cfg.t_max);
    cfg.eq_tol = st.get(fl.eq_tol, "eq_tol", cfg.eq_tol);
    cfg.abs_tol = st.get(fl.abs_tol, "abs_tol", cfg.abs_tol);
    cfg.rel_tol = st.get(fl.rel_tol, "rel_tol", cfg.rel_tol);
    cfg.stride = st.get(fl.stride, "stride", cfg.stride);
    cfg.validate();
    return cfg;
}

ClassifyThresholds resolve_thresholds(const Flags& fl, const Settings& st) {
    ClassifyThresholds th;
    th.s_frac = st.get(fl.s_frac, "s_frac", th.s_frac);
    th.r_frac = st.get(fl.r_frac, "r_frac", th.r_frac);
    th.validate();
    return th;
}

DerivConvention resolve_convention(const Flags& fl, const Settings& st) {
    return parse_convention(st.get(fl.convention, "convention", std::string("paper")));
}

IcPolicy resolve_policy(const Flags& fl, const Settings& st, const ModelParams& p) {
    const std::string name = st.get(fl.ic_policy, "ic_policy", std::string("auto"));
    if (name == "auto") return default_ic_policy(p);
    if (name == "bias") return IcPolicy::BiasStart;
    if (name == "perturbed-center") return IcPolicy::PerturbedCenter;
    throw ValidationError("unknown ic policy '" + name +
                          "' (expected auto, bias or perturbed-center)");
}

Vec3 resolve_ic(const Flags& fl, const Settings& st, const ModelParams& p,
                const Vec3* preset_ic) {
    if (const auto text = st.pick(fl.x_init, "x_init")) {
        const auto v = parse_number_list(*text, "--x-init");
        if (v.size() != 3) throw ValidationError("--x-init needs exactly 3 values");
        return {v[0], v[1], v[2]};
    }
    if (preset_ic) return *preset_ic;
    return initial_condition(p, resolve_policy(fl, st, p));
}

// Relative output paths land in --out-dir, the config out_dir, or
// $TRIADYN_OUT_DIR, in that order.
std::filesystem::path resolve_out(const std::string& name, const Flags& fl,
                                  const Settings& st) {
    const std::filesystem::path p(name);
    if (p.is_absolute()) return p;
    std::string dir = st.get(fl.out_dir, "out_dir", std::string());
    if (dir.empty()) {
        if (const char* env = std::getenv("TRIADYN_OUT_DIR")) dir = env;
    }
    return dir.empty() ? p : std::filesystem::path(dir) / p;
}

json thresholds_json(const ClassifyThresholds& th) {
    return json{{"s_frac", th.s_frac}, {"r_frac", th.r_frac}};
}

int cmd_simulate(const Flags& fl, std::ostream& out, std::ostream& err) {
    const Settings st(fl.config);
    const ScenarioPreset* preset = nullptr;
    if (const auto name = st.pick(fl.preset, "preset")) {
        preset = find_preset(*name);
        if (!preset) {
            std::ostringstream msg;
            msg << "unknown preset '" << *name << "'; available:";
            for (const auto& sp : scenario_presets()) msg << ' ' << sp.name;
            throw ValidationError(msg.str());
        }
    }
    const ModelParams p = resolve_params(fl, st, preset ? &preset->params : nullptr);
    const SolverConfig cfg = resolve_solver(fl, st, preset ? &preset->solver : nullptr);
    const ClassifyThresholds th = resolve_thresholds(fl, st);
    const DerivConvention conv = resolve_convention(fl, st);
    const Vec3 ic = resolve_ic(fl, st, p, preset ? &preset->x_init : nullptr);
    const std::string format = st.get(fl.format, "format", std::string("csv"));
    if (format != "csv" && format != "json") {
        throw ValidationError("unknown format '" + format + "' (expected csv or json)");
    }

    const Trajectory traj = integrate(p, ic, cfg);
    const Equilibrium eq = find_equilibrium(p, ic, cfg);
    RegimeLabel label;
    const double dmu = p.delta_mu();
    if (dmu > 0.0) {
        label = classify(eq, dmu, th);
    } else {
        const RsxState rs = to_rsx(eq.x_star);
        label.r_star = rs.r;
        label.s_star = rs.s;
    }

    if (fl.out) {
        const auto path = resolve_out(*fl.out, fl, st);
        if (format == "json") {
            write_file(path, trajectory_json(traj, cfg, conv, eq, label).dump(2) + "\n");
        } else {
            write_file(path, trajectory_csv(traj, cfg, conv, eq, label));
        }
        err << "wrote " << path.string() << "\n";
    }
    if (fl.plot) {
        std::filesystem::path svg =
            fl.out ? std::filesystem::path(*fl.out).replace_extension(".svg")
                   : std::filesystem::path("trajectory.svg");
        svg = resolve_out(svg.string(), fl, st);
        write_file(svg, trajectory_svg(traj));
        err << "wrote " << svg.string() << "\n";
    }

    if (format == "json" && !fl.out) {
        out << trajectory_json(traj, cfg, conv, eq, label).dump(2) << "\n";
    } else {
        json summary{
            {"label", dmu > 0.0 ? json(to_string(label)) : json(nullptr)},
            {"r_star", label.r_star},
            {"s_star", label.s_star},
            {"converged", eq.converged},
            {"equilibrium", equilibrium_json(eq)},
            {"params", params_json(p)},
            {"thresholds", thresholds_json(th)},
        };
        out << summary.dump(2) << "\n";
    }
    if (!eq.converged) {
        err << "warning: " << eq.diagnostic << "\n";
    }
    return 0;
}

int cmd_classify(const Flags& fl, std::ostream& out, std::ostream&) {
    const Settings st(fl.config);
    const ModelParams p = resolve_params(fl, st, nullptr);
    if (!(p.delta_mu() > 0.0)) {
        throw ValidationError("classify needs delta_mu > 0 (set --dmu or --mu1/--mu3)");
    }
    const SolverConfig cfg = resolve_solver(fl, st, nullptr);
    const ClassifyThresholds th = resolve_thresholds(fl, st);
    const Vec3 ic = resolve_ic(fl, st, p, nullptr);

    const Equilibrium eq = find_equilibrium(p, ic, cfg);
    const RegimeLabel label = classify(eq, p.delta_mu(), th);
    json doc{
        {"label", to_string(label)},
        {"r_star", label.r_star},
        {"s_star", label.s_star},
        {"equilibrium", equilibrium_json(eq)},
        {"params", params_json(p)},
        {"thresholds", thresholds_json(th)},
        {"x_init", {ic[0], ic[1], ic[2]}},
    };
    out << doc.dump(2) << "\n";
    return 0;
}

int cmd_boundaries(const Flags& fl, std::ostream& out, std::ostream& err) {
    const Settings st(fl.config);
    const ModelParams p = resolve_params(fl, st, nullptr);
    const auto range_text = st.pick(fl.dmu_range, "dmu_range");
    if (!range_text) throw ValidationError("boundaries needs --dmu lo:hi:n");
    const AxisRange ar = parse_axis(*range_text, "--dmu");
    const DmuRange range{ar.lo, ar.hi, ar.n};
    const DerivConvention conv = resolve_convention(fl, st);

    std::vector<std::string> skipped;
    std::vector<BoundaryCurve> curves = boundary_curves(range, p, conv, &skipped);
    if (fl.with_k4) {
        const SolverConfig cfg = resolve_solver(fl, st, nullptr);
        const double tol = st.get(fl.tol, "tol", 0.005);
        curves.push_back(kappa4_curve(range, p, cfg, tol, &skipped));
    }

    json files = json::array();
    for (const auto& curve : curves) {
        const auto path = resolve_out(std::string("boundary_") + to_string(curve.kind) + ".csv",
                                      fl, st);
        write_file(path, boundary_csv(curve));
        files.push_back(path.string());
    }
    const auto jpath = resolve_out("boundaries.json", fl, st);
    write_file(jpath, boundaries_json(curves, skipped).dump(2) + "\n");
    files.push_back(jpath.string());

    for (const auto& s : skipped) err << "note: " << s << "\n";
    out << json{{"files", files}, {"skipped", skipped.size()}}.dump(2) << "\n";
    return 0;
}

int cmd_diagram(const Flags& fl, std::ostream& out, std::ostream& err) {
    const Settings st(fl.config);
    const ModelParams p = resolve_params(fl, st, nullptr);
    const auto dmu_text = st.pick(fl.dmu_range, "dmu_range");
    const auto kappa_text = st.pick(fl.kappa_range, "kappa_range");
    if (!dmu_text || !kappa_text) {
        throw ValidationError("diagram needs --dmu lo:hi:n and --kappa lo:hi:n");
    }
    GridSpec spec;
    spec.dmu_axis = axis_grid(parse_axis(*dmu_text, "--dmu"), "--dmu");
    spec.kappa_axis = axis_grid(parse_axis(*kappa_text, "--kappa"), "--kappa");
    spec.ic_policy = resolve_policy(fl, st, p);
    const SolverConfig cfg = resolve_solver(fl, st, nullptr);
    const ClassifyThresholds th = resolve_thresholds(fl, st);
    const DerivConvention conv = resolve_convention(fl, st);
    const unsigned threads = st.get(fl.threads, "threads", 1u);

    const DiagramGrid grid = stability_diagram(spec, p, cfg, threads, th);

    // Boundary overlays are best-effort; the grid itself is the product.
    std::vector<BoundaryCurve> overlays;
    if (p.has_leader_pattern()) {
        try {
            const DmuRange orange{spec.dmu_axis.front(), spec.dmu_axis.back(),
                                  std::max<std::size_t>(spec.dmu_axis.size(), 16)};
            std::vector<std::string> skip;
            overlays = boundary_curves(orange, p, conv, &skip);
        } catch (const Error& e) {
            err << "note: boundary overlay skipped: " << e.what() << "\n";
        }
    }

    const std::string base = st.get(fl.out_base, "out_base", std::string("diagram"));
    const auto csv_path = resolve_out(base + ".csv", fl, st);
    const auto svg_path = resolve_out(base + ".svg", fl, st);
    write_file(csv_path, diagram_csv(grid, p, conv, th));
    write_file(svg_path, diagram_svg(grid, overlays));

    std::size_t unresolved = 0;
    json counts = json::object();
    for (const auto& lab : grid.labels) {
        const std::string name = to_string(lab);
        counts[name] = counts.value(name, 0) + 1;
        if (lab.kind == Regime::Unresolved) ++unresolved;
    }
    out << json{{"files", {csv_path.string(), svg_path.string()}},
                {"cells", grid.labels.size()},
                {"counts", counts},
                {"unresolved", unresolved}}
               .dump(2)
        << "\n";
    return 0;
}

int cmd_kappa4(const Flags& fl, std::ostream& out, std::ostream& err) {
    const Settings st(fl.config);
    const ModelParams p = resolve_params(fl, st, nullptr);
    const auto list_text = st.pick(fl.dmu_list, "dmu_list");
    if (!list_text) throw ValidationError("kappa4 needs --dmu-list d1,d2,...");
    const std::vector<double> dmus = parse_number_list(*list_text, "--dmu-list");
    if (dmus.empty()) throw ValidationError("--dmu-list must not be empty");
    const SolverConfig cfg = resolve_solver(fl, st, nullptr);
    const ClassifyThresholds th = resolve_thresholds(fl, st);
    const double tol = st.get(fl.tol, "tol", 0.005);

    struct Row {
        double dmu;
        std::optional<Kappa4Result> res;
        std::string error;
    };
    std::vector<Row> rows;
    for (double dmu : dmus) {
        Row row{dmu, std::nullopt, ""};
        try {
            row.res = kappa4_search(dmu, p, cfg, tol, th);
        } catch (const Error& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }

    out << "dmu kappa4\n";
    std::ostringstream csv;
    csv << "# triadyn kappa4\n"
        << "# c=" << format_g12(p.has_leader_pattern() ? p.c1 : 0.0) << "\n"
        << "# x0=" << format_g12(p.x0) << "\n"
        << "# nu=" << format_g12(p.nu) << "\n"
        << "# tol=" << format_g12(tol) << "\n"
        << "# s_frac=" << format_g12(th.s_frac) << "\n"
        << "# r_frac=" << format_g12(th.r_frac) << "\n"
        << "dmu,kappa4\n";
    json jrows = json::array();
    std::size_t ok = 0;
    for (const auto& row : rows) {
        out << format_g12(row.dmu) << ' ';
        json jr{{"dmu", row.dmu}};
        if (row.res) {
            ++ok;
            out << format_g12(row.res->kappa4) << "\n";
            csv << format_g12(row.dmu) << ',' << format_g12(row.res->kappa4) << "\n";
            jr["kappa4"] = row.res->kappa4;
            jr["bracket"] = {row.res->bracket_lo, row.res->bracket_hi};
        } else {
            out << "NA\n";
            csv << format_g12(row.dmu) << ",NA\n";
            jr["kappa4"] = nullptr;
            jr["error"] = row.error;
            err << "note: dmu = " << format_g12(row.dmu) << ": " << row.error << "\n";
        }
        jrows.push_back(std::move(jr));
    }

    const std::string out_name = st.get(fl.out, "out", std::string("kappa4.csv"));
    const auto csv_path = resolve_out(out_name, fl, st);
    write_file(csv_path, csv.str());
    const auto jpath = std::filesystem::path(csv_path).replace_extension(".json");
    json meta{
        {"params", params_json(p)},
        {"solver", solver_json(cfg)},
        {"thresholds", thresholds_json(th)},
        {"tol", tol},
        {"rows", jrows},
    };
    write_file(jpath, meta.dump(2) + "\n");
    err << "wrote " << csv_path.string() << " and " << jpath.string() << "\n";
    return ok > 0 ? 0 : 1;
}

// Leader-pattern scalars shared by every subcommand.
void add_plane_options(CLI::App* cmd, Flags& fl) {
    cmd->add_option("--nu", fl.nu, "end/center coupling asymmetry");
    cmd->add_option("--c", fl.c, "leader strength C of the (C, 0, -C) pattern");
    cmd->add_option("--x0", fl.x0, "leader opinion");
}

// Full per-node parameter set for the point commands (simulate, classify),
// where kappa and dmu are scalars rather than axes.
void add_model_options(CLI::App* cmd, Flags& fl) {
    cmd->add_option("--kappa", fl.kappa, "coupling strength (>= 0)");
    add_plane_options(cmd, fl);
    cmd->add_option("--c1", fl.c1, "leadership strength on node 1");
    cmd->add_option("--c2", fl.c2, "leadership strength on node 2");
    cmd->add_option("--c3", fl.c3, "leadership strength on node 3");
    cmd->add_option("--dmu", fl.dmu, "bias gap; sets biases (-dmu/2, 0, dmu/2)");
    cmd->add_option("--mu1", fl.mu1, "natural bias of node 1");
    cmd->add_option("--mu2", fl.mu2, "natural bias of node 2");
    cmd->add_option("--mu3", fl.mu3, "natural bias of node 3");
    cmd->add_option("--lambda", fl.lambda, "coupling attention width");
    cmd->add_option("--gamma1", fl.gamma1, "self-bias strength of node 1");
    cmd->add_option("--gamma2", fl.gamma2, "self-bias strength of node 2");
    cmd->add_option("--gamma3", fl.gamma3, "self-bias strength of node 3");
}

void add_solver_options(CLI::App* cmd, Flags& fl) {
    cmd->add_option("--method", fl.method, "integrator: rk45 (adaptive) or rk4 (fixed step)");
    cmd->add_option("--dt", fl.dt, "fixed step size, or initial step for rk45");
    cmd->add_option("--t-max", fl.t_max, "integration horizon");
    cmd->add_option("--eq-tol", fl.eq_tol, "equilibrium residual tolerance");
    cmd->add_option("--abs-tol", fl.abs_tol, "rk45 absolute tolerance");
    cmd->add_option("--rel-tol", fl.rel_tol, "rk45 relative tolerance");
    cmd->add_option("--stride", fl.stride, "record every stride-th accepted step");
}

void add_threshold_options(CLI::App* cmd, Flags& fl) {
    cmd->add_option("--s-frac", fl.s_frac, "MR threshold: |s*| >= s_frac * dmu");
    cmd->add_option("--r-frac", fl.r_frac, "SHD threshold: r* >= r_frac * dmu");
}

void add_common_options(CLI::App* cmd, Flags& fl) {
    cmd->add_option("--config", fl.config, "JSON config file (flags take precedence)");
    cmd->add_option("--out-dir", fl.out_dir,
                    "directory for relative output paths (default $TRIADYN_OUT_DIR)");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"three-agent opinion chain under a leadership force: simulation, "
                 "regime classification and bifurcation boundaries"};
    app.name("triadyn");
    Flags fl;

    auto* sim = app.add_subcommand("simulate", "integrate one scenario and report its regime");
    add_model_options(sim, fl);
    add_solver_options(sim, fl);
    add_threshold_options(sim, fl);
    add_common_options(sim, fl);
    sim->add_option("--preset", fl.preset, "named figure scenario (fig1a ... fig5b)");
    sim->add_option("--x-init", fl.x_init, "initial opinions as x1,x2,x3");
    sim->add_option("--ic-policy", fl.ic_policy, "auto, bias or perturbed-center");
    sim->add_option("--convention", fl.convention, "derivative convention: paper or true-derivative");
    sim->add_option("--out", fl.out, "trajectory output file");
    sim->add_option("--format", fl.format, "output format: csv or json");
    sim->add_flag("--plot", fl.plot, "also write an SVG line plot");

    auto* cls = app.add_subcommand("classify", "find and classify the equilibrium from one start");
    add_model_options(cls, fl);
    add_solver_options(cls, fl);
    add_threshold_options(cls, fl);
    add_common_options(cls, fl);
    cls->add_option("--x-init", fl.x_init, "initial opinions as x1,x2,x3");
    cls->add_option("--ic-policy", fl.ic_policy, "auto, bias or perturbed-center");

    auto* bnd = app.add_subcommand("boundaries", "tabulate the kappa1..kappa3 boundary curves");
    add_plane_options(bnd, fl);
    add_solver_options(bnd, fl);
    add_threshold_options(bnd, fl);
    add_common_options(bnd, fl);
    bnd->add_option("--dmu", fl.dmu_range, "dmu axis as lo:hi:n");
    bnd->add_option("--convention", fl.convention, "derivative convention: paper or true-derivative");
    bnd->add_flag("--with-kappa4", fl.with_k4, "also locate kappa4 by simulation (slow)");
    bnd->add_option("--tol", fl.tol, "kappa4 bisection tolerance");

    auto* dia = app.add_subcommand("diagram", "classify a (dmu, kappa) grid and render a heatmap");
    add_plane_options(dia, fl);
    add_solver_options(dia, fl);
    add_threshold_options(dia, fl);
    add_common_options(dia, fl);
    dia->add_option("--dmu", fl.dmu_range, "dmu axis as lo:hi:n");
    dia->add_option("--kappa", fl.kappa_range, "kappa axis as lo:hi:n");
    dia->add_option("--ic-policy", fl.ic_policy, "auto, bias or perturbed-center");
    dia->add_option("--convention", fl.convention, "derivative convention for the overlay");
    dia->add_option("--threads", fl.threads, "worker threads for grid cells");
    dia->add_option("--out-base", fl.out_base, "basename for .csv/.svg outputs");

    auto* k4 = app.add_subcommand("kappa4", "bisect the majority-rule cessation threshold");
    add_plane_options(k4, fl);
    add_solver_options(k4, fl);
    add_threshold_options(k4, fl);
    add_common_options(k4, fl);
    k4->add_option("--dmu-list", fl.dmu_list, "comma-separated dmu values");
    k4->add_option("--tol", fl.tol, "bisection tolerance");
    k4->add_option("--out", fl.out, "CSV output file (JSON metadata lands beside it)");

    app.require_subcommand(1);

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed()) return cmd_simulate(fl, out, err);
        if (cls->parsed()) return cmd_classify(fl, out, err);
        if (bnd->parsed()) return cmd_boundaries(fl, out, err);
        if (dia->parsed()) return cmd_diagram(fl, out, err);
        if (k4->parsed()) return cmd_kappa4(fl, out, err);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace triadyn
