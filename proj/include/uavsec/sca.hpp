#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "uavsec/conic.hpp"
#include "uavsec/scenario.hpp"

namespace uavsec {

// One full SCA iterate: trajectory, powers, and every slack family. Index n
// runs over slots 1..N (0-based in the vectors); the trajectory entry for the
// last slot equals uav_end. theta_e / mu are populated only on robust runs.
struct IteratePoint {
    std::vector<Position3D> traj;  // c_U[n]
    std::vector<double> p_s, p_u;  // watts
    std::vector<double> r_s, r_e;  // bits/s/Hz
    std::vector<double> t_s, t_e;  // SNR-like slacks
    std::vector<double> alpha_s, alpha_e, alpha_p;  // squared-distance slacks, m^2
    std::vector<double> beta;      // jamming-to-noise slack
    std::vector<double> theta_e;   // robust S-procedure slack, m^2
    std::vector<double> mu;        // robust S-procedure multiplier

    int slots() const { return static_cast<int>(traj.size()); }
};

// Scheme restrictions, applied by pinning subproblem variables.
struct SchemePins {
    bool trajectory = false;  // straight-line flight
    bool powers = false;      // fixed transmit powers p_s_avg / p_u_avg
    bool no_jamming = false;  // p_u = 0
};

struct RunResult {
    IteratePoint final_point;
    std::vector<double> objective_history;  // R_sec^LB,(i), i = 0..iterations
    std::vector<double> per_slot_rate_s;    // exact R_S^LB at the final point
    std::vector<double> per_slot_rate_e;    // exact (worst-case) R_E^UB
    std::vector<double> per_slot_secrecy;   // clipped [r_s - r_e]+
    std::vector<double> uav_eve_distance;   // to the Eve estimate, meters
    int iterations = 0;
    bool converged = false;     // eps_tol met within the iteration cap
    double objective = 0.0;     // final unclipped optimizer objective
    double average_secrecy = 0.0;  // mean of per_slot_secrecy

    std::string scheme = "proposed";
    SpaceMode space = SpaceMode::ThreeD;
    bool robust = false;
    double radius_q = 0.0;

    std::vector<IteratePoint> iterate_history;  // filled when recording
};

struct ScaError : std::runtime_error {
    ScaError(int iteration_, const std::string& msg)
        : std::runtime_error("sca iteration " + std::to_string(iteration_) + ": " + msg),
          iteration(iteration_) {}
    int iteration;
};

struct SolveOptions {
    conic::SolverOptions solver{1e-8, 1e-3, 300, false};
    int max_sca_iterations = 100;
    bool record_iterates = false;
    double audit_tol = 1e-6;  // relative tolerance for the exact-constraint audit
    SchemePins pins;
};

// Maps iterate fields onto the flat variable vector of one convex subproblem.
// The core families hold the model variables (13N perfect, 15N robust);
// epigraph slacks for the hyperbolic interference/eavesdropper terms are
// bookkeeping on top.
struct SubproblemLayout {
    int N = 0;
    bool robust = false;
    int xu = 0, yu = 0, zu = 0, ps = 0, pu = 0, rs = 0, re = 0, ts = 0, te = 0;
    int as_ = 0, ae = 0, ap = 0, bt = 0;
    int th = -1, mu = -1;              // robust only
    int u1 = 0, u2 = 0, v1 = 0, v2 = 0;  // bookkeeping
    int core_count = 0;
    int total_count = 0;
    bool no_jamming = false;                             // p_u pinned to exactly zero
    double floor_ps = 0.0, floor_pu = 0.0;               // power floors (zero when pinned)
    std::vector<double> floor_ts, floor_te, floor_beta;  // trust-region floors used

    conic::Index var(int family, int n) const { return static_cast<conic::Index>(family + n); }

    // Primal vector for an iterate at its own expansion point (bookkeeping
    // slacks tight).
    std::vector<double> pack(const IteratePoint& it) const;
    IteratePoint unpack(std::span<const double> x) const;
};

struct Subproblem {
    conic::ConicProgram program;
    SubproblemLayout layout;
};

// Feasible starting point: straight-line trajectory, small jamming power,
// ST power scaled to meet the interference budget with 10% margin, every
// slack tight at its defining inequality.
IteratePoint init_feasible(const ScenarioConfig& cfg, const SchemePins& pins = {});

// Convex subproblem around prev (the perfect-location program).
Subproblem build_subproblem(const IteratePoint& prev, const ScenarioConfig& cfg,
                            const SchemePins& pins = {});

// Successive convex approximation with monotone feasible ascent, perfect
// eavesdropper location.
RunResult solve_sca(const ScenarioConfig& cfg, const SolveOptions& opts = {});

// (1/N) sum(r_s - r_e) of an iterate.
double iterate_objective(const IteratePoint& it);

// Checks the original (non-surrogate) constraints of the safe problem:
// mobility, power budgets, and exact interference. Throws ScaError when a
// violation exceeds rel_tol; robust iterates also get the disk-max check.
void audit_original_constraints(const IteratePoint& it, const ScenarioConfig& cfg,
                                double rel_tol, bool robust);

// Relative feasibility audit of a subproblem at a given point.
double max_relative_violation(const conic::ConicProgram& program, std::span<const double> x);

}  // namespace uavsec
