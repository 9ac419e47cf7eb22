#pragma once

#include "uavsec/conic.hpp"
#include "uavsec/sca.hpp"
#include "uavsec/scenario.hpp"

namespace uavsec {

// Strict worst-case ST-Eve distance over the uncertainty disk of radius Q:
// ||eve_estimate - st|| - Q, the supremum-achieving distance for Eve's rate.
// Requires the ST to lie strictly outside the disk.
double worst_case_st_eve_distance(const Position3D& eve_estimate, double radius_q,
                                  const Position3D& st);

// Per-slot S-procedure constraints enforcing
//   max over the disk of f_d(eve_estimate + (dx, dy, 0), c_U) <= alpha_e.
// Emits the linear rows plus the arrow LMI lowered to a rotated cone. The
// position/slack arguments are affine expressions in the subproblem variables.
std::vector<conic::Constraint> s_procedure_blocks(
    const Position3D& eve_estimate, double radius_q, const conic::AffineExpr& x_u,
    const conic::AffineExpr& y_u, const conic::AffineExpr& z_u,
    const conic::AffineExpr& alpha_e, const conic::AffineExpr& theta_e,
    const conic::AffineExpr& mu);

// Exact (closed-form) maximum of f_d(eve_estimate + delta, p) over the disk;
// used by initialization and reporting.
double disk_max_squared_distance(const Position3D& eve_estimate, double radius_q,
                                 const Position3D& p);

// Sampled maximum over a sunflower pattern covering the disk; the audit-side
// oracle for the S-procedure constraints.
double disk_grid_max_squared_distance(const Position3D& eve_estimate, double radius_q,
                                      const Position3D& p, int samples = 10000);

// Feasible start for the worst-case engine; same construction as the perfect
// case with the disk-maximal alpha_e and the S-procedure slacks initialized tight.
IteratePoint init_feasible_robust(const ScenarioConfig& cfg, const SchemePins& pins = {});

// Worst-case convex subproblem: identical to the perfect program except the
// eavesdropper numerator distance and the S-procedure blocks.
Subproblem build_robust_subproblem(const IteratePoint& prev, const ScenarioConfig& cfg,
                                   const SchemePins& pins = {});

// Worst-case counterpart of solve_sca. With eve_radius_q = 0 it reduces
// exactly to the perfect-location engine.
RunResult solve_robust_sca(const ScenarioConfig& cfg, const SolveOptions& opts = {});

}  // namespace uavsec
