#include "triadyn/export.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "triadyn/errors.hpp"

namespace triadyn {

namespace {

std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find(',') == std::string::npos) return s;
    return '"' + s + '"';
}

void append_param_comments(std::ostringstream& out, const ModelParams& p,
                           DerivConvention conv) {
    out << "# kappa=" << format_g12(p.kappa) << "\n"
        << "# nu=" << format_g12(p.nu) << "\n"
        << "# c1=" << format_g12(p.c1) << "\n"
        << "# c2=" << format_g12(p.c2) << "\n"
        << "# c3=" << format_g12(p.c3) << "\n"
        << "# x0=" << format_g12(p.x0) << "\n"
        << "# mu1=" << format_g12(p.mu1) << "\n"
        << "# mu2=" << format_g12(p.mu2) << "\n"
        << "# mu3=" << format_g12(p.mu3) << "\n"
        << "# gamma1=" << format_g12(p.gamma1) << "\n"
        << "# gamma2=" << format_g12(p.gamma2) << "\n"
        << "# gamma3=" << format_g12(p.gamma3) << "\n"
        << "# lambda=" << format_g12(p.lambda) << "\n"
        << "# convention=" << to_string(conv) << "\n";
}

void append_solver_comments(std::ostringstream& out, const SolverConfig& cfg) {
    out << "# method=" << to_string(cfg.method) << "\n"
        << "# dt=" << format_g12(cfg.dt) << "\n"
        << "# t_max=" << format_g12(cfg.t_max) << "\n"
        << "# eq_tol=" << format_g12(cfg.eq_tol) << "\n"
        << "# abs_tol=" << format_g12(cfg.abs_tol) << "\n"
        << "# rel_tol=" << format_g12(cfg.rel_tol) << "\n"
        << "# stride=" << cfg.stride << "\n";
}

const char* regime_fill(const RegimeLabel& label) {
    switch (label.kind) {
        case Regime::SHD: return "#4878a8";
        case Regime::SLD: return "#6a9f58";
        case Regime::Unresolved: return "#b0b0b0";
        case Regime::MR:
            return label.pair == MajorityPair::Nodes12 ? "#e49444" : "#e7ba52";
    }
    return "#b0b0b0";
}

struct CurveStyle {
    const char* color;
    const char* dash;  // empty for solid
};

CurveStyle curve_style(BoundaryKind k) {
    switch (k) {
        case BoundaryKind::K1: return {"#1a1a1a", ""};
        case BoundaryKind::K2: return {"#7b3294", "6,3"};
        case BoundaryKind::K3: return {"#006d5b", "2,3"};
        case BoundaryKind::K4: return {"#c23b22", "10,4"};
    }
    return {"#1a1a1a", ""};
}

// Midpoint edges around sorted sample positions, so each heatmap cell covers
// the half-open interval closest to its sample.
std::vector<double> cell_edges(const std::vector<double>& axis) {
    std::vector<double> edges(axis.size() + 1);
    if (axis.size() == 1) {
        const double w = std::max(0.5, std::abs(axis[0]) * 0.05);
        edges[0] = axis[0] - w;
        edges[1] = axis[0] + w;
        return edges;
    }
    edges.front() = axis.front() - 0.5 * (axis[1] - axis[0]);
    edges.back() = axis.back() + 0.5 * (axis[axis.size() - 1] - axis[axis.size() - 2]);
    for (std::size_t i = 1; i < axis.size(); ++i) {
        edges[i] = 0.5 * (axis[i - 1] + axis[i]);
    }
    return edges;
}

}  // namespace

std::string format_g12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

nlohmann::json params_json(const ModelParams& p) {
    return nlohmann::json{
        {"kappa", p.kappa},   {"nu", p.nu},         {"c1", p.c1},
        {"c2", p.c2},         {"c3", p.c3},         {"x0", p.x0},
        {"mu1", p.mu1},       {"mu2", p.mu2},       {"mu3", p.mu3},
        {"gamma1", p.gamma1}, {"gamma2", p.gamma2}, {"gamma3", p.gamma3},
        {"lambda", p.lambda},
    };
}

nlohmann::json solver_json(const SolverConfig& cfg) {
    return nlohmann::json{
        {"method", to_string(cfg.method)}, {"dt", cfg.dt},
        {"t_max", cfg.t_max},              {"eq_tol", cfg.eq_tol},
        {"abs_tol", cfg.abs_tol},          {"rel_tol", cfg.rel_tol},
        {"stride", cfg.stride},
    };
}

nlohmann::json equilibrium_json(const Equilibrium& eq) {
    nlohmann::json evs = nlohmann::json::array();
    for (const auto& ev : eq.eigenvalues) {
        evs.push_back({ev.real(), ev.imag()});
    }
    nlohmann::json j{
        {"x_star", {eq.x_star[0], eq.x_star[1], eq.x_star[2]}},
        {"residual", eq.residual},
        {"eigenvalues", evs},
        {"stable", eq.stable},
        {"converged", eq.converged},
    };
    if (!eq.diagnostic.empty()) j["diagnostic"] = eq.diagnostic;
    return j;
}

std::string trajectory_csv(const Trajectory& traj, const SolverConfig& cfg,
                           DerivConvention conv, const Equilibrium& eq,
                           const RegimeLabel& label) {
    std::ostringstream out;
    out << "# triadyn trajectory\n"
        << "# label=" << to_string(label) << "\n"
        << "# converged=" << (eq.converged ? "true" : "false") << "\n"
        << "# final_residual=" << format_g12(traj.final_residual) << "\n"
        << "# x_star=" << format_g12(eq.x_star[0]) << ' ' << format_g12(eq.x_star[1])
        << ' ' << format_g12(eq.x_star[2]) << "\n";
    append_param_comments(out, traj.params, conv);
    append_solver_comments(out, cfg);
    out << "t,x1,x2,x3,r,s,xbar\n";
    for (const auto& s : traj.samples) {
        const RsxState rs = to_rsx(s.x, s.t);
        out << format_g12(s.t) << ',' << format_g12(s.x[0]) << ',' << format_g12(s.x[1])
            << ',' << format_g12(s.x[2]) << ',' << format_g12(rs.r) << ','
            << format_g12(rs.s) << ',' << format_g12(rs.xbar) << "\n";
    }
    return out.str();
}

nlohmann::json trajectory_json(const Trajectory& traj, const SolverConfig& cfg,
                               DerivConvention conv, const Equilibrium& eq,
                               const RegimeLabel& label) {
    nlohmann::json samples = nlohmann::json::array();
    for (const auto& s : traj.samples) {
        const RsxState rs = to_rsx(s.x, s.t);
        samples.push_back({s.t, s.x[0], s.x[1], s.x[2], rs.r, rs.s, rs.xbar});
    }
    return nlohmann::json{
        {"params", params_json(traj.params)},
        {"solver", solver_json(cfg)},
        {"convention", to_string(conv)},
        {"converged", traj.converged},
        {"final_residual", traj.final_residual},
        {"label", to_string(label)},
        {"r_star", label.r_star},
        {"s_star", label.s_star},
        {"equilibrium", equilibrium_json(eq)},
        {"columns", {"t", "x1", "x2", "x3", "r", "s", "xbar"}},
        {"samples", samples},
    };
}

std::string trajectory_svg(const Trajectory& traj) {
    const double W = 640, H = 400, ml = 56, mr = 16, mt = 24, mb = 40;
    const double pw = W - ml - mr, ph = H - mt - mb;
    double t1 = 1.0, vmin = 0.0, vmax = 1.0;
    if (!traj.samples.empty()) {
        t1 = std::max(traj.samples.back().t, 1e-12);
        vmin = vmax = traj.samples.front().x[0];
        for (const auto& s : traj.samples) {
            for (double v : s.x) {
                vmin = std::min(vmin, v);
                vmax = std::max(vmax, v);
            }
        }
    }
    if (vmax - vmin < 1e-12) {
        vmax += 0.5;
        vmin -= 0.5;
    }
    const double pad = 0.05 * (vmax - vmin);
    vmin -= pad;
    vmax += pad;
    auto X = [&](double t) { return ml + t / t1 * pw; };
    auto Y = [&](double v) { return mt + (1.0 - (v - vmin) / (vmax - vmin)) * ph; };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n"
        << "<rect x=\"" << fmt2(ml) << "\" y=\"" << fmt2(mt) << "\" width=\"" << fmt2(pw)
        << "\" height=\"" << fmt2(ph) << "\" fill=\"#ffffff\" stroke=\"#444444\"/>\n";
    const char* colors[3] = {"#4878a8", "#555555", "#d1605e"};
    const char* names[3] = {"x1", "x2", "x3"};
    for (int c = 0; c < 3; ++c) {
        out << "<polyline fill=\"none\" stroke=\"" << colors[c] << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& s : traj.samples) {
            out << fmt2(X(s.t)) << ',' << fmt2(Y(s.x[c])) << ' ';
        }
        out << "\"/>\n";
        out << "<text x=\"" << fmt2(ml + 8 + 48 * c) << "\" y=\"" << fmt2(mt + 14)
            << "\" fill=\"" << colors[c] << "\" font-size=\"12\">" << names[c] << "</text>\n";
    }
    out << "<text x=\"" << fmt2(ml + pw / 2) << "\" y=\"" << fmt2(H - 8)
        << "\" text-anchor=\"middle\" font-size=\"12\">t (0 to " << format_g12(t1)
        << ")</text>\n"
        << "<text x=\"14\" y=\"" << fmt2(mt + ph / 2)
        << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 14 "
        << fmt2(mt + ph / 2) << ")\">opinion (" << format_g12(vmin) << " to "
        << format_g12(vmax) << ")</text>\n"
        << "</svg>\n";
    return out.str();
}

std::string boundary_csv(const BoundaryCurve& curve) {
    std::ostringstream out;
    out << "# triadyn boundary " << to_string(curve.kind) << "\n"
        << "# c=" << format_g12(curve.params.c) << "\n"
        << "# x0=" << format_g12(curve.params.x0) << "\n"
        << "# nu=" << format_g12(curve.params.nu) << "\n"
        << "# convention=" << to_string(curve.params.convention) << "\n"
        << "dmu,kappa\n";
    for (const auto& [dmu, kappa] : curve.points) {
        out << format_g12(dmu) << ',' << format_g12(kappa) << "\n";
    }
    return out.str();
}

nlohmann::json boundaries_json(const std::vector<BoundaryCurve>& curves,
                               const std::vector<std::string>& skipped) {
    nlohmann::json jc = nlohmann::json::object();
    nlohmann::json j;
    for (const auto& c : curves) {
        nlohmann::json pts = nlohmann::json::array();
        for (const auto& [dmu, kappa] : c.points) pts.push_back({dmu, kappa});
        jc[to_string(c.kind)] = pts;
        j["params"] = {{"c", c.params.c}, {"x0", c.params.x0}, {"nu", c.params.nu}};
        j["convention"] = to_string(c.params.convention);
    }
    j["curves"] = jc;
    j["skipped"] = skipped;
    return j;
}

std::string diagram_csv(const DiagramGrid& grid, const ModelParams& p,
                        DerivConvention conv, const ClassifyThresholds& thresholds) {
    std::ostringstream out;
    out << "# triadyn diagram\n"
        << "# ic_policy="
        << (grid.ic_policy == IcPolicy::BiasStart ? "bias" : "perturbed-center") << "\n"
        << "# s_frac=" << format_g12(thresholds.s_frac) << "\n"
        << "# r_frac=" << format_g12(thresholds.r_frac) << "\n";
    append_param_comments(out, p, conv);
    out << "dmu,kappa,label\n";
    for (std::size_t i = 0; i < grid.dmu_axis.size(); ++i) {
        for (std::size_t j = 0; j < grid.kappa_axis.size(); ++j) {
            out << format_g12(grid.dmu_axis[i]) << ',' << format_g12(grid.kappa_axis[j])
                << ',' << csv_field(to_string(grid.at(i, j))) << "\n";
        }
    }
    return out.str();
}

std::string diagram_svg(const DiagramGrid& grid,
                        const std::vector<BoundaryCurve>& overlays) {
    const double W = 720, H = 520, ml = 64, mr = 160, mt = 28, mb = 52;
    const double pw = W - ml - mr, ph = H - mt - mb;
    const auto dx = cell_edges(grid.dmu_axis);
    const auto ky = cell_edges(grid.kappa_axis);
    const double d0 = dx.front(), d1 = dx.back();
    const double k0 = ky.front(), k1 = ky.back();
    auto X = [&](double d) { return ml + (d - d0) / (d1 - d0) * pw; };
    auto Y = [&](double k) { return mt + (1.0 - (k - k0) / (k1 - k0)) * ph; };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n"
        << "<defs><clipPath id=\"plot\"><rect x=\"" << fmt2(ml) << "\" y=\"" << fmt2(mt)
        << "\" width=\"" << fmt2(pw) << "\" height=\"" << fmt2(ph)
        << "\"/></clipPath></defs>\n";
    for (std::size_t i = 0; i < grid.dmu_axis.size(); ++i) {
        for (std::size_t j = 0; j < grid.kappa_axis.size(); ++j) {
            const double x = X(dx[i]);
            const double y = Y(ky[j + 1]);
            out << "<rect x=\"" << fmt2(x) << "\" y=\"" << fmt2(y) << "\" width=\""
                << fmt2(X(dx[i + 1]) - x) << "\" height=\"" << fmt2(Y(ky[j]) - y)
                << "\" fill=\"" << regime_fill(grid.at(i, j)) << "\"/>\n";
        }
    }
    out << "<g clip-path=\"url(#plot)\">\n";
    for (const auto& curve : overlays) {
        if (curve.points.size() < 2) continue;
        const CurveStyle st = curve_style(curve.kind);
        out << "<polyline fill=\"none\" stroke=\"" << st.color << "\" stroke-width=\"2\"";
        if (st.dash[0] != '\0') out << " stroke-dasharray=\"" << st.dash << "\"";
        out << " points=\"";
        for (const auto& [dmu, kappa] : curve.points) {
            out << fmt2(X(dmu)) << ',' << fmt2(Y(kappa)) << ' ';
        }
        out << "\"/>\n";
    }
    out << "</g>\n";
    out << "<rect x=\"" << fmt2(ml) << "\" y=\"" << fmt2(mt) << "\" width=\"" << fmt2(pw)
        << "\" height=\"" << fmt2(ph) << "\" fill=\"none\" stroke=\"#444444\"/>\n";

    double ly = mt + 8;
    auto legend_swatch = [&](const char* fill, const char* text) {
        out << "<rect x=\"" << fmt2(W - mr + 12) << "\" y=\"" << fmt2(ly)
            << "\" width=\"14\" height=\"14\" fill=\"" << fill << "\"/>\n"
            << "<text x=\"" << fmt2(W - mr + 32) << "\" y=\"" << fmt2(ly + 11)
            << "\" font-size=\"12\">" << text << "</text>\n";
        ly += 20;
    };
    legend_swatch("#4878a8", "SHD");
    legend_swatch("#e49444", "MR(1,2)");
    legend_swatch("#e7ba52", "MR(2,3)");
    legend_swatch("#6a9f58", "SLD");
    legend_swatch("#b0b0b0", "unresolved");
    ly += 8;
    for (const auto& curve : overlays) {
        const CurveStyle st = curve_style(curve.kind);
        out << "<line x1=\"" << fmt2(W - mr + 12) << "\" y1=\"" << fmt2(ly + 7) << "\" x2=\""
            << fmt2(W - mr + 26) << "\" y2=\"" << fmt2(ly + 7) << "\" stroke=\"" << st.color
            << "\" stroke-width=\"2\"";
        if (st.dash[0] != '\0') out << " stroke-dasharray=\"" << st.dash << "\"";
        out << "/>\n<text x=\"" << fmt2(W - mr + 32) << "\" y=\"" << fmt2(ly + 11)
            << "\" font-size=\"12\">" << to_string(curve.kind) << "</text>\n";
        ly += 20;
    }
    out << "<text x=\"" << fmt2(ml + pw / 2) << "\" y=\"" << fmt2(H - 12)
        << "\" text-anchor=\"middle\" font-size=\"13\">dmu (" << format_g12(grid.dmu_axis.front())
        << " to " << format_g12(grid.dmu_axis.back()) << ")</text>\n"
        << "<text x=\"16\" y=\"" << fmt2(mt + ph / 2)
        << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
        << fmt2(mt + ph / 2) << ")\">kappa (" << format_g12(grid.kappa_axis.front()) << " to "
        << format_g12(grid.kappa_axis.back()) << ")</text>\n"
        << "</svg>\n";
    return out.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path.string() + "' for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.close();
    if (!f) throw Error("failed while writing '" + path.string() + "'");
}

}  // namespace triadyn
