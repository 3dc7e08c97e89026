#ifndef TRIADYN_EXPORT_HPP
#define TRIADYN_EXPORT_HPP

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "triadyn/bifurcation.hpp"
#include "triadyn/integrate.hpp"
#include "triadyn/regimes.hpp"

namespace triadyn {

// All floating-point text output goes through this (12 significant digits),
// so repeated runs produce byte-identical files.
std::string format_g12(double v);

nlohmann::json params_json(const ModelParams& p);
nlohmann::json solver_json(const SolverConfig& cfg);
nlohmann::json equilibrium_json(const Equilibrium& eq);

std::string trajectory_csv(const Trajectory& traj, const SolverConfig& cfg,
                           DerivConvention conv, const Equilibrium& eq,
                           const RegimeLabel& label);
nlohmann::json trajectory_json(const Trajectory& traj, const SolverConfig& cfg,
                               DerivConvention conv, const Equilibrium& eq,
                               const RegimeLabel& label);
std::string trajectory_svg(const Trajectory& traj);

std::string boundary_csv(const BoundaryCurve& curve);
nlohmann::json boundaries_json(const std::vector<BoundaryCurve>& curves,
                               const std::vector<std::string>& skipped);

std::string diagram_csv(const DiagramGrid& grid, const ModelParams& p,
                        DerivConvention conv, const ClassifyThresholds& thresholds);
std::string diagram_svg(const DiagramGrid& grid,
                        const std::vector<BoundaryCurve>& overlays);

// Single writer used by the whole CLI; content is assembled in memory first.
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace triadyn

#endif
