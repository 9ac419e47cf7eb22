#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uavsec/schemes.hpp"

namespace uavsec {

// A batch of runs covering the standard sweeps: schemes x space modes
// x (T, N) pairs x uncertainty radii. Every run writes its own trajectory,
// per-slot and convergence CSVs; the plan adds one summary CSV plus a JSON
// manifest. Outputs are byte-stable across repeated runs of the same plan.
struct ExperimentPlan {
    ScenarioConfig base;
    std::vector<SchemeKind> schemes{SchemeKind::Proposed};
    std::vector<SpaceMode> space_modes{SpaceMode::ThreeD};
    LocationModel location = LocationModel::Perfect;
    std::vector<double> radiuses{0.0};   // robust-only sweep; {0} for perfect
    std::vector<double> horizons;        // seconds
    std::vector<int> slot_counts;        // paired with horizons, broadcast if single
    std::uint64_t seed = 1;
    std::string out_dir = "runs";
    int jobs = 1;
};

struct RunRecord {
    std::string tag;
    SchemeSpec spec;
    double horizon = 0.0;
    int slots = 0;
    bool ok = false;
    std::string detail;           // failure reason when !ok
    double average_secrecy = 0.0; // bits/s/Hz
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<std::string> files;
};

struct ExperimentOutcome {
    std::vector<RunRecord> runs;
    int succeeded = 0;
    int failed = 0;
};

// Validates and executes a plan; throws std::invalid_argument on an invalid
// plan (empty sweeps, unwritable output directory).
ExperimentOutcome run_experiments(const ExperimentPlan& plan);

// 64-bit FNV-1a of the canonical config document, hex-encoded; keys the
// manifest so runs are traceable to their exact scenario.
std::string config_hash(const ScenarioConfig& cfg);

}  // namespace uavsec
