#include "triadyn/regimes.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "triadyn/errors.hpp"

namespace triadyn {

namespace {

ModelParams with_dmu(const ModelParams& tpl, double delta_mu) {
    ModelParams p = tpl;
    p.mu1 = -delta_mu / 2.0;
    p.mu2 = 0.0;
    p.mu3 = delta_mu / 2.0;
    return p;
}

}  // namespace

std::string to_string(const RegimeLabel& label) {
    switch (label.kind) {
        case Regime::SHD: return "SHD";
        case Regime::SLD: return "SLD";
        case Regime::Unresolved: return "UNRESOLVED";
        case Regime::MR:
            return label.pair == MajorityPair::Nodes12 ? "MR(1,2)" : "MR(2,3)";
    }
    return "UNRESOLVED";
}

void ClassifyThresholds::validate() const {
    if (!(s_frac > 0.0) || !(r_frac > 0.0)) {
        throw ValidationError("classification thresholds must be > 0");
    }
}

RegimeLabel classify(const Equilibrium& eq, double delta_mu,
                     const ClassifyThresholds& thresholds) {
    thresholds.validate();
    if (!(delta_mu > 0.0)) throw ValidationError("classify: delta_mu must be > 0");
    const RsxState rs = to_rsx(eq.x_star);
    RegimeLabel label;
    label.r_star = rs.r;
    label.s_star = rs.s;
    if (!eq.converged) {
        label.kind = Regime::Unresolved;
        return label;
    }
    // A large equilibrium asymmetry means two nodes closed ranks: the center
    // joined whichever end the positive (negative) s points away from.
    if (std::abs(rs.s) >= thresholds.s_frac * delta_mu) {
        label.kind = Regime::MR;
        label.pair = rs.s > 0.0 ? MajorityPair::Nodes12 : MajorityPair::Nodes23;
    } else if (rs.r >= thresholds.r_frac * delta_mu) {
        label.kind = Regime::SHD;
    } else {
        label.kind = Regime::SLD;
    }
    return label;
}

IcPolicy default_ic_policy(const ModelParams& p) {
    return p.has_leader() ? IcPolicy::BiasStart : IcPolicy::PerturbedCenter;
}

Vec3 initial_condition(const ModelParams& p, IcPolicy policy) {
    if (policy == IcPolicy::PerturbedCenter) {
        return {p.mu1, p.mu2 + 1e-6, p.mu3};
    }
    return {p.mu1, p.mu2, p.mu3};
}

Kappa4Result kappa4_search(double delta_mu, const ModelParams& p, const SolverConfig& cfg,
                           double tol, const ClassifyThresholds& thresholds) {
    if (!(delta_mu > 0.0)) throw ValidationError("kappa4_search: delta_mu must be > 0");
    if (!(tol > 0.0)) throw ValidationError("kappa4_search: tol must be > 0");
    const ModelParams base = with_dmu(p, delta_mu);
    base.validate();
    const Vec3 ic = initial_condition(base, default_ic_policy(base));

    auto is_mr = [&](double kappa) {
        ModelParams q = base;
        q.kappa = kappa;
        const Equilibrium eq = find_equilibrium(q, ic, cfg);
        if (!eq.converged) {
            std::ostringstream msg;
            msg << "kappa4_search: unresolved equilibrium at dmu = " << delta_mu
                << ", kappa = " << kappa << " (" << eq.diagnostic << ")";
            throw UnresolvedError(msg.str());
        }
        return classify(eq, delta_mu, thresholds).kind == Regime::MR;
    };

    // Geometric upward scan brackets the last majority-rule coupling.
    constexpr double kappa_cap = 4096.0;
    double last_mr = -1.0;
    double first_beyond = -1.0;
    for (double k = 1.0; k <= kappa_cap; k *= 2.0) {
        if (is_mr(k)) {
            last_mr = k;
        } else if (last_mr > 0.0) {
            first_beyond = k;
            break;
        }
    }
    if (last_mr < 0.0) {
        std::ostringstream msg;
        msg << "kappa4_search: no majority-rule regime for kappa in [1, " << kappa_cap
            << "] at dmu = " << delta_mu;
        throw NoMajorityRuleError(msg.str());
    }
    if (first_beyond < 0.0) {
        std::ostringstream msg;
        msg << "kappa4_search: majority rule persists beyond kappa = " << kappa_cap
            << " at dmu = " << delta_mu;
        throw NoMajorityRuleError(msg.str());
    }

    double lo = last_mr;
    double hi = first_beyond;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (is_mr(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return {0.5 * (lo + hi), lo, hi};
}

BoundaryCurve kappa4_curve(const DmuRange& range, const ModelParams& p,
                           const SolverConfig& cfg, double tol,
                           std::vector<std::string>* skip_log) {
    range.validate();
    BoundaryCurve curve;
    curve.kind = BoundaryKind::K4;
    curve.params = {p.has_leader_pattern() ? p.c1 : 0.0, p.x0, p.nu,
                    DerivConvention::PaperComposite};
    for (double dmu : range.grid()) {
        try {
            curve.points.emplace_back(dmu, kappa4_search(dmu, p, cfg, tol).kappa4);
        } catch (const Error& e) {
            if (skip_log) {
                std::ostringstream msg;
                msg << "k4 skipped at dmu = " << dmu << ": " << e.what();
                skip_log->push_back(msg.str());
            }
        }
    }
    return curve;
}

void GridSpec::validate() const {
    if (dmu_axis.empty() || kappa_axis.empty()) {
        throw ValidationError("diagram grid axes must be non-empty");
    }
    if (!std::is_sorted(dmu_axis.begin(), dmu_axis.end()) ||
        !std::is_sorted(kappa_axis.begin(), kappa_axis.end())) {
        throw ValidationError("diagram grid axes must be ascending");
    }
    for (double d : dmu_axis) {
        if (!(d > 0.0) || !std::isfinite(d)) {
            throw ValidationError("diagram dmu axis must be positive and finite");
        }
    }
    for (double k : kappa_axis) {
        if (k < 0.0 || !std::isfinite(k)) {
            throw ValidationError("diagram kappa axis must be >= 0 and finite");
        }
    }
}

const RegimeLabel& DiagramGrid::at(std::size_t i_dmu, std::size_t j_kappa) const {
    return labels[i_dmu * kappa_axis.size() + j_kappa];
}

DiagramGrid stability_diagram(const GridSpec& spec, const ModelParams& p,
                              const SolverConfig& cfg, unsigned threads,
                              const ClassifyThresholds& thresholds) {
    spec.validate();
    cfg.validate();
    thresholds.validate();
    DiagramGrid grid;
    grid.dmu_axis = spec.dmu_axis;
    grid.kappa_axis = spec.kappa_axis;
    grid.ic_policy = spec.ic_policy;
    const std::size_t nk = spec.kappa_axis.size();
    const std::size_t total = spec.dmu_axis.size() * nk;
    grid.labels.assign(total, RegimeLabel{});

    // Cells are independent and each is written exactly once at its own
    // index, so the sweep order (and thread count) cannot change the result.
    auto cell = [&](std::size_t idx) {
        const double dmu = spec.dmu_axis[idx / nk];
        ModelParams q = with_dmu(p, dmu);
        q.kappa = spec.kappa_axis[idx % nk];
        try {
            const Equilibrium eq =
                find_equilibrium(q, initial_condition(q, spec.ic_policy), cfg);
            grid.labels[idx] = classify(eq, dmu, thresholds);
        } catch (const Error&) {
            // leave the cell UNRESOLVED
        }
    };

    if (threads <= 1) {
        for (std::size_t i = 0; i < total; ++i) cell(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        const unsigned n_workers = std::min(threads, 64u);
        for (unsigned w = 0; w < n_workers; ++w) {
            pool.emplace_back([&]() {
                for (std::size_t i = next.fetch_add(1); i < total; i = next.fetch_add(1)) {
                    cell(i);
                }
            });
        }
        for (auto& t : pool) t.join();
    }
    return grid;
}

std::vector<ProbeResult> bistability_probe(double delta_mu, double kappa,
                                           const ModelParams& p,
                                           const std::vector<Vec3>& ic_set,
                                           const SolverConfig& cfg,
                                           const ClassifyThresholds& thresholds) {
    if (!(delta_mu > 0.0)) throw ValidationError("bistability_probe: delta_mu must be > 0");
    if (ic_set.empty()) throw ValidationError("bistability_probe: empty initial-condition set");
    ModelParams q = with_dmu(p, delta_mu);
    q.kappa = kappa;
    q.validate();

    std::vector<ProbeResult> found;
    for (const Vec3& ic : ic_set) {
        Equilibrium eq;
        try {
            eq = find_equilibrium(q, ic, cfg);
        } catch (const Error&) {
            continue;
        }
        if (!eq.converged) continue;
        const bool seen = std::any_of(found.begin(), found.end(), [&](const ProbeResult& pr) {
            double dist = 0.0;
            for (int i = 0; i < 3; ++i) {
                dist = std::max(dist, std::abs(pr.eq.x_star[i] - eq.x_star[i]));
            }
            return dist <= 1e-4;
        });
        if (!seen) {
            found.push_back({eq, classify(eq, delta_mu, thresholds)});
        }
    }
    if (found.empty()) {
        std::ostringstream msg;
        msg << "bistability_probe: no run converged at dmu = " << delta_mu
            << ", kappa = " << kappa;
        throw UnresolvedError(msg.str());
    }
    return found;
}

const std::vector<ScenarioPreset>& scenario_presets() {
    static const std::vector<ScenarioPreset> presets = [] {
        std::vector<ScenarioPreset> v;
        auto add = [&v](const char* name, const char* summary, const ModelParams& p,
                        const Vec3& ic) {
            ScenarioPreset sp;
            sp.name = name;
            sp.summary = summary;
            sp.params = p;
            sp.x_init = ic;
            v.push_back(std::move(sp));
        };
        const Vec3 wide{-2.5, 1e-6, 2.5};

        add("fig1a", "leaderless, weak coupling, both ends hold (SHD)",
            ModelParams::canonical(5.0, 1.0), wide);
        add("fig1b", "leaderless, middling coupling, majority forms (MR)",
            ModelParams::canonical(5.0, 1.5), wide);
        add("fig1c", "leaderless, strong coupling, near-consensus (SLD)",
            ModelParams::canonical(5.0, 3.0), wide);

        add("fig2a", "leader pulls but coupling too weak (SHD)",
            ModelParams::canonical(5.0, 0.5, 0.05, 4.0), {-2.5, 0.0, 2.5});
        add("fig2b", "leader tips the majority to its side (MR)",
            ModelParams::canonical(5.0, 1.5, 0.05, 4.0), {-2.5, 0.0, 2.5});
        add("fig2c", "strong coupling overrides the leader (SLD)",
            ModelParams::canonical(5.0, 14.0, 0.05, 4.0), {-2.5, 0.0, 2.5});

        const Vec3 centered{-2.5, 0.0, 2.5};
        ModelParams uniform = ModelParams::canonical(5.0, 1.0);
        uniform.c1 = uniform.c2 = uniform.c3 = 0.2;
        uniform.x0 = 8.0;
        add("fig4a", "uniform leadership, weak coupling (SHD, mean drawn up)", uniform, centered);
        uniform.kappa = 1.5;
        add("fig4b", "uniform leadership, middling coupling (MR, mean drawn up)", uniform, centered);
        uniform.kappa = 4.0;
        add("fig4c", "uniform leadership, strong coupling (SLD, mean drawn up)", uniform, centered);

        ModelParams ends = ModelParams::canonical(5.0, 14.0);
        ends.c1 = ends.c3 = 4.0;
        ends.c2 = 0.0;
        ends.x0 = 4.0;
        add("fig5a", "strong leadership on both ends beats strong coupling (SLD)", ends, centered);

        add("fig5b", "weak antisymmetric leadership, long majority excursion before SLD",
            ModelParams::canonical(5.0, 1.5, 0.19, 4.0), centered);

        return v;
    }();
    return presets;
}

const ScenarioPreset* find_preset(const std::string& name) {
    for (const auto& p : scenario_presets()) {
        if (p.name == name) return &p;
    }
    return nullptr;
}

}  // namespace triadyn
