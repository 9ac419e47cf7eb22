#pragma once

#include <string>

#include "uavsec/sca.hpp"
#include "uavsec/scenario.hpp"

namespace uavsec {

enum class SchemeKind { Proposed, FixedPower, StraightLine, NoJamming };
enum class LocationModel { Perfect, Robust };

struct SchemeSpec {
    SchemeKind kind = SchemeKind::Proposed;
    SpaceMode space_mode = SpaceMode::ThreeD;
    LocationModel location = LocationModel::Perfect;
    double radius_q = 0.0;  // uncertainty disk radius for the robust model
};

const char* to_string(SchemeKind k);
SchemeKind scheme_from_string(const std::string& name);  // throws on unknown names

// Runs one comparison scheme as a constrained variant of the SCA engines:
// FixedPower pins both transmit powers at their averages, StraightLine pins
// the trajectory, NoJamming pins p_u = 0. Infeasible pinned values (e.g. the
// fixed powers breaking the interference threshold) surface as ScaError.
RunResult run_scheme(const SchemeSpec& spec, const ScenarioConfig& cfg,
                     const SolveOptions& opts = {});

}  // namespace uavsec
