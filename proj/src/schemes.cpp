#include "uavsec/schemes.hpp"

#include <stdexcept>

#include "uavsec/robust.hpp"

namespace uavsec {

const char* to_string(SchemeKind k) {
    switch (k) {
        case SchemeKind::Proposed: return "proposed";
        case SchemeKind::FixedPower: return "fixed-power";
        case SchemeKind::StraightLine: return "straight-line";
        case SchemeKind::NoJamming: return "no-jamming";
    }
    return "unknown";
}

SchemeKind scheme_from_string(const std::string& name) {
    if (name == "proposed") return SchemeKind::Proposed;
    if (name == "fixed-power") return SchemeKind::FixedPower;
    if (name == "straight-line") return SchemeKind::StraightLine;
    if (name == "no-jamming") return SchemeKind::NoJamming;
    throw std::invalid_argument("unknown scheme '" + name + "'");
}

RunResult run_scheme(const SchemeSpec& spec, const ScenarioConfig& cfg,
                     const SolveOptions& opts) {
    ScenarioConfig run_cfg = cfg;
    run_cfg.space_mode = spec.space_mode;
    run_cfg.eve_radius_q = spec.location == LocationModel::Robust ? spec.radius_q : 0.0;
    validate(run_cfg);

    SolveOptions run_opts = opts;
    run_opts.pins = {};
    switch (spec.kind) {
        case SchemeKind::Proposed: break;
        case SchemeKind::FixedPower: run_opts.pins.powers = true; break;
        case SchemeKind::StraightLine: run_opts.pins.trajectory = true; break;
        case SchemeKind::NoJamming: run_opts.pins.no_jamming = true; break;
    }

    RunResult res = spec.location == LocationModel::Robust ? solve_robust_sca(run_cfg, run_opts)
                                                           : solve_sca(run_cfg, run_opts);
    res.scheme = to_string(spec.kind);
    return res;
}

}  // namespace uavsec
