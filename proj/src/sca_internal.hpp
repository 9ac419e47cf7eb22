#pragma once

#include "uavsec/sca.hpp"

// Shared machinery behind Algorithms 1 and 2. The robust engine differs only
// in the eavesdropper numerator distance and the alpha_e constraint block, so
// one builder serves both.
namespace uavsec::detail {

IteratePoint init_feasible_impl(const ScenarioConfig& cfg, const SchemePins& pins, bool robust);
Subproblem build_impl(const IteratePoint& prev, const ScenarioConfig& cfg,
                      const SchemePins& pins, bool robust);
RunResult run_sca_loop(const ScenarioConfig& cfg, const SolveOptions& opts, bool robust);

// Slack families re-tightened onto their defining equalities for (traj, p).
IteratePoint refresh_iterate(const ScenarioConfig& cfg, const SchemePins& pins, bool robust,
                             std::vector<Position3D> traj, std::vector<double> p_s,
                             std::vector<double> p_u);

// Straight-line trajectory sample used by initialization and the
// straight-line scheme: slot n (0-based) sits at start + (n+1)/N (end-start).
std::vector<Position3D> straight_line_trajectory(const ScenarioConfig& cfg);

// Effective ST-Eve distance: exact for the perfect case, strict worst case
// over the disk for robust runs.
double effective_st_eve_distance(const ScenarioConfig& cfg, bool robust);

}  // namespace uavsec::detail
