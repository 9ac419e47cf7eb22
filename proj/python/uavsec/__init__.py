"""Joint UAV-jammer trajectory and power optimization for secure
cognitive-radio links."""

from ._core import (  # noqa: F401
    IteratePoint,
    Position3D,
    RunResult,
    ScenarioConfig,
    __version__,
    dbm_to_watts,
    default_config_document,
    default_scenario,
    eavesdropper_upper_bound,
    ergodic_rate_mc,
    load_config_file,
    parse_config,
    run_scheme,
    secrecy_lower_bound,
    solve_robust_sca,
    solve_sca,
    squared_distance,
    uav_gain,
    watts_to_dbm,
    worst_case_st_eve_distance,
)
