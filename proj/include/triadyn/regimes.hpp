#ifndef TRIADYN_REGIMES_HPP
#define TRIADYN_REGIMES_HPP

#include <optional>
#include <string>
#include <vector>

#include "triadyn/bifurcation.hpp"
#include "triadyn/integrate.hpp"
#include "triadyn/model.hpp"

namespace triadyn {

enum class Regime { SHD, MR, SLD, Unresolved };
enum class MajorityPair { Nodes12, Nodes23 };

struct RegimeLabel {
    Regime kind = Regime::Unresolved;
    std::optional<MajorityPair> pair;  // set only for MR
    double r_star = 0.0;
    double s_star = 0.0;
};

// "SHD", "MR(1,2)", "MR(2,3)", "SLD" or "UNRESOLVED".
std::string to_string(const RegimeLabel& label);

struct ClassifyThresholds {
    double s_frac = 0.3;  // |s*| >= s_frac * dmu selects MR
    double r_frac = 0.6;  // r* >= r_frac * dmu separates SHD from SLD

    void validate() const;
};

RegimeLabel classify(const Equilibrium& eq, double delta_mu,
                     const ClassifyThresholds& thresholds = {});

// Where a sweep starts: at the biases, or at the biases with the center
// nudged off the symmetric manifold (used for leaderless runs, where the
// exact manifold is invariant and would mask the pitchfork).
enum class IcPolicy { BiasStart, PerturbedCenter };

IcPolicy default_ic_policy(const ModelParams& p);
Vec3 initial_condition(const ModelParams& p, IcPolicy policy);

struct Kappa4Result {
    double kappa4 = 0.0;
    double bracket_lo = 0.0;  // final bisection bracket around the cessation
    double bracket_hi = 0.0;
};

// Largest coupling at which majority rule still wins from the standard start:
// geometric upward scan (kappa = 1, 2, 4, ... up to 4096) to bracket the
// MR -> non-MR transition, then bisection to width tol.
Kappa4Result kappa4_search(double delta_mu, const ModelParams& p, const SolverConfig& cfg,
                           double tol = 0.005, const ClassifyThresholds& thresholds = {});

// kappa4 sampled over a dmu grid, for overlay on boundary plots. Grid points
// without a majority-rule window are skipped and noted in skip_log.
BoundaryCurve kappa4_curve(const DmuRange& range, const ModelParams& p,
                           const SolverConfig& cfg, double tol = 0.005,
                           std::vector<std::string>* skip_log = nullptr);

struct GridSpec {
    std::vector<double> dmu_axis;    // ascending
    std::vector<double> kappa_axis;  // ascending
    IcPolicy ic_policy = IcPolicy::BiasStart;

    void validate() const;
};

struct DiagramGrid {
    std::vector<double> dmu_axis;
    std::vector<double> kappa_axis;
    std::vector<RegimeLabel> labels;  // row-major, index = i_dmu * n_kappa + j_kappa
    IcPolicy ic_policy = IcPolicy::BiasStart;

    const RegimeLabel& at(std::size_t i_dmu, std::size_t j_kappa) const;
};

// Classifies every (dmu, kappa) grid cell from the chosen start. Cells whose
// runs fail stay UNRESOLVED; the grid itself never aborts. Cell results do
// not depend on the number of worker threads.
DiagramGrid stability_diagram(const GridSpec& spec, const ModelParams& p,
                              const SolverConfig& cfg, unsigned threads = 1,
                              const ClassifyThresholds& thresholds = {});

struct ProbeResult {
    Equilibrium eq;
    RegimeLabel label;
};

// Runs every initial condition to its equilibrium and keeps the distinct ones
// (separated by more than 1e-4 in the inf-norm). Throws UnresolvedError when
// no run converges.
std::vector<ProbeResult> bistability_probe(double delta_mu, double kappa,
                                           const ModelParams& p,
                                           const std::vector<Vec3>& ic_set,
                                           const SolverConfig& cfg = {},
                                           const ClassifyThresholds& thresholds = {});

struct ScenarioPreset {
    std::string name;
    std::string summary;
    ModelParams params;
    Vec3 x_init{};
    SolverConfig solver;
};

const std::vector<ScenarioPreset>& scenario_presets();
const ScenarioPreset* find_preset(const std::string& name);

}  // namespace triadyn

#endif
