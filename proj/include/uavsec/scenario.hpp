#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace uavsec {

// Point in the 3D deployment space, meters. Ground nodes have z = 0.
struct Position3D {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

enum class SpaceMode { TwoD, ThreeD };

// dB/dBm conversions live at the config and report boundaries only; everything
// inside the optimizer works in linear SI units (watts, meters).
double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);
double db_to_linear(double db);
double linear_to_db(double lin);

// Fully validated scenario. Powers and gains are linear (watts / dimensionless),
// distances are meters. Derived fields (slot_len_delta, l_max, gamma0) are
// populated on load and satisfy their defining identities exactly.
struct ScenarioConfig {
    Position3D st_pos;        // secondary transmitter c_ST
    Position3D sr_pos;        // secondary receiver c_S
    Position3D pr_pos;        // primary receiver c_P
    Position3D eve_pos;       // eavesdropper estimate
    Position3D uav_start;     // c_U[0]
    Position3D uav_end;       // c_U[N+1]

    double horizon_T = 0.0;   // seconds
    int slot_count_N = 0;
    double slot_len_delta = 0.0;  // T / N

    double v_max = 0.0;       // m/s
    double l_max = 0.0;       // v_max * slot_len_delta, per-slot travel cap

    double h_min = 0.0;       // meters
    double h_max = 0.0;

    double p_s_max = 0.0;     // watts
    double p_s_avg = 0.0;
    double p_u_max = 0.0;
    double p_u_avg = 0.0;

    double interference_eps = 0.0;  // watts, average budget at PR
    double noise_power = 0.0;       // watts, sigma^2
    double rho0 = 0.0;              // linear channel gain at 1 m
    double gamma0 = 0.0;            // rho0 / sigma^2, 1/watts

    double path_loss_exp = 0.0;     // phi, terrestrial links
    double euler_k = 0.0;           // Euler-Mascheroni constant

    double eve_radius_q = 0.0;      // meters; 0 means perfect location
    SpaceMode space_mode = SpaceMode::ThreeD;
    double bandwidth_hz = 0.0;      // reporting only
    double eps_tol = 0.0;           // SCA convergence threshold
    std::uint64_t rng_seed = 0;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Reference setup: ST/SR/PR at (0,0,0)/(300,0,0)/(0,250,0),
// Eve estimate at (150,250,0), UAV endpoints (-100,200,100) -> (500,200,100),
// T = 500 s with N = 500 slots, perfect Eve location (Q = 0).
ScenarioConfig default_scenario();

// Parses the key/value config document. Every key defaults to the reference
// scenario; unknown keys are an error. See default_config_document() for the
// full key list.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config_file(const std::string& path);

// The documented config document with all keys at their defaults. Parsing it
// reproduces default_scenario() exactly.
std::string default_config_document();

// Serialize back to the document format (used for config hashing and docs).
std::string to_config_document(const ScenarioConfig& cfg);

// Re-checks every invariant on an already-built config; throws ConfigError.
void validate(const ScenarioConfig& cfg);

}  // namespace uavsec
