#include "uavsec/scenario.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace uavsec {

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

namespace {

constexpr double kEulerConstant = 0.5772156649015329;

// Raw document values, dB/dBm where the document says so. Keeping the raw
// form around makes defaults and round-trip serialization bit-exact.
struct RawConfig {
    Position3D st_pos{0.0, 0.0, 0.0};
    Position3D sr_pos{300.0, 0.0, 0.0};
    Position3D pr_pos{0.0, 250.0, 0.0};
    Position3D eve_pos{150.0, 250.0, 0.0};
    Position3D uav_start{-100.0, 200.0, 100.0};
    Position3D uav_end{500.0, 200.0, 100.0};
    double horizon_s = 500.0;
    int slots = 500;
    double v_max_mps = 10.0;
    double h_min_m = 50.0;
    double h_max_m = 150.0;
    double p_s_max_dbm = 40.0;
    bool has_p_s_avg = false;
    double p_s_avg_dbm = 0.0;  // default: half of max, halved in watts
    double p_u_max_dbm = 4.0;
    bool has_p_u_avg = false;
    double p_u_avg_dbm = 0.0;
    double interference_eps_dbm = -20.0;
    double noise_power_dbm = -70.0;
    double rho0_db = 10.0;
    double path_loss_exp = 3.0;
    double euler_k = kEulerConstant;
    double eve_radius_q_m = 0.0;
    std::string space_mode = "3d";
    double bandwidth_hz = 10e6;
    double eps_tol = 1e-4;
    std::uint64_t rng_seed = 1;
};

[[noreturn]] void fail(const std::string& msg) { throw ConfigError("config: " + msg); }

double parse_number(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        double v = std::stod(value, &pos);
        while (pos < value.size() && std::isspace(static_cast<unsigned char>(value[pos]))) ++pos;
        if (pos != value.size()) fail("trailing characters in value for '" + key + "'");
        return v;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        fail("cannot parse number for '" + key + "': '" + value + "'");
    }
}

Position3D parse_position(const std::string& key, const std::string& value) {
    std::istringstream iss(value);
    Position3D p;
    if (!(iss >> p.x >> p.y >> p.z)) fail("expected three coordinates for '" + key + "'");
    std::string rest;
    if (iss >> rest) fail("trailing characters in value for '" + key + "'");
    return p;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt(const Position3D& p) { return fmt(p.x) + " " + fmt(p.y) + " " + fmt(p.z); }

void check_finite(const char* what, const Position3D& p) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z))
        fail(std::string(what) + " has non-finite coordinates");
}

void check_ground(const char* what, const Position3D& p) {
    check_finite(what, p);
    if (p.z != 0.0) fail(std::string(what) + " must be on the ground (z = 0)");
}

ScenarioConfig build(const RawConfig& raw) {
    ScenarioConfig cfg;
    cfg.st_pos = raw.st_pos;
    cfg.sr_pos = raw.sr_pos;
    cfg.pr_pos = raw.pr_pos;
    cfg.eve_pos = raw.eve_pos;
    cfg.uav_start = raw.uav_start;
    cfg.uav_end = raw.uav_end;
    cfg.horizon_T = raw.horizon_s;
    cfg.slot_count_N = raw.slots;
    cfg.v_max = raw.v_max_mps;
    cfg.h_min = raw.h_min_m;
    cfg.h_max = raw.h_max_m;
    cfg.p_s_max = dbm_to_watts(raw.p_s_max_dbm);
    cfg.p_u_max = dbm_to_watts(raw.p_u_max_dbm);
    // Average limits default to half the peak budgets, halved in the linear
    // domain because the averages enter the linear constraints directly.
    cfg.p_s_avg = raw.has_p_s_avg ? dbm_to_watts(raw.p_s_avg_dbm) : cfg.p_s_max / 2.0;
    cfg.p_u_avg = raw.has_p_u_avg ? dbm_to_watts(raw.p_u_avg_dbm) : cfg.p_u_max / 2.0;
    cfg.interference_eps = dbm_to_watts(raw.interference_eps_dbm);
    cfg.noise_power = dbm_to_watts(raw.noise_power_dbm);
    cfg.rho0 = db_to_linear(raw.rho0_db);
    cfg.path_loss_exp = raw.path_loss_exp;
    cfg.euler_k = raw.euler_k;
    cfg.eve_radius_q = raw.eve_radius_q_m;
    if (raw.space_mode == "2d") cfg.space_mode = SpaceMode::TwoD;
    else if (raw.space_mode == "3d") cfg.space_mode = SpaceMode::ThreeD;
    else fail("space_mode must be '2d' or '3d', got '" + raw.space_mode + "'");
    cfg.bandwidth_hz = raw.bandwidth_hz;
    cfg.eps_tol = raw.eps_tol;
    cfg.rng_seed = raw.rng_seed;

    if (cfg.slot_count_N < 1) fail("slots must be >= 1");
    cfg.slot_len_delta = cfg.horizon_T / cfg.slot_count_N;
    cfg.l_max = cfg.v_max * cfg.slot_len_delta;
    cfg.gamma0 = cfg.rho0 / cfg.noise_power;

    validate(cfg);
    return cfg;
}

RawConfig raw_defaults() { return RawConfig{}; }

void apply_key(RawConfig& raw, const std::string& key, const std::string& value) {
    if (key == "st_pos") raw.st_pos = parse_position(key, value);
    else if (key == "sr_pos") raw.sr_pos = parse_position(key, value);
    else if (key == "pr_pos") raw.pr_pos = parse_position(key, value);
    else if (key == "eve_pos") raw.eve_pos = parse_position(key, value);
    else if (key == "uav_start") raw.uav_start = parse_position(key, value);
    else if (key == "uav_end") raw.uav_end = parse_position(key, value);
    else if (key == "horizon_s") raw.horizon_s = parse_number(key, value);
    else if (key == "slots") raw.slots = static_cast<int>(parse_number(key, value));
    else if (key == "v_max_mps") raw.v_max_mps = parse_number(key, value);
    else if (key == "h_min_m") raw.h_min_m = parse_number(key, value);
    else if (key == "h_max_m") raw.h_max_m = parse_number(key, value);
    else if (key == "p_s_max_dbm") raw.p_s_max_dbm = parse_number(key, value);
    else if (key == "p_s_avg_dbm") { raw.p_s_avg_dbm = parse_number(key, value); raw.has_p_s_avg = true; }
    else if (key == "p_u_max_dbm") raw.p_u_max_dbm = parse_number(key, value);
    else if (key == "p_u_avg_dbm") { raw.p_u_avg_dbm = parse_number(key, value); raw.has_p_u_avg = true; }
    else if (key == "interference_eps_dbm") raw.interference_eps_dbm = parse_number(key, value);
    else if (key == "noise_power_dbm") raw.noise_power_dbm = parse_number(key, value);
    else if (key == "rho0_db") raw.rho0_db = parse_number(key, value);
    else if (key == "path_loss_exp") raw.path_loss_exp = parse_number(key, value);
    else if (key == "euler_k") raw.euler_k = parse_number(key, value);
    else if (key == "eve_radius_q_m") raw.eve_radius_q_m = parse_number(key, value);
    else if (key == "space_mode") raw.space_mode = value;
    else if (key == "bandwidth_hz") raw.bandwidth_hz = parse_number(key, value);
    else if (key == "eps_tol") raw.eps_tol = parse_number(key, value);
    else if (key == "rng_seed") raw.rng_seed = static_cast<std::uint64_t>(parse_number(key, value));
    else fail("unknown key '" + key + "'");
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

ScenarioConfig default_scenario() { return build(raw_defaults()); }

ScenarioConfig parse_config(const std::string& text) {
    RawConfig raw = raw_defaults();
    std::istringstream iss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(iss, line)) {
        ++lineno;
        std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            fail("line " + std::to_string(lineno) + ": expected 'key = value'");
        std::string key = trim(stripped.substr(0, eq));
        std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) fail("line " + std::to_string(lineno) + ": missing key");
        if (value.empty()) fail("line " + std::to_string(lineno) + ": missing value for '" + key + "'");
        apply_key(raw, key, value);
    }
    return build(raw);
}

ScenarioConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

void validate(const ScenarioConfig& cfg) {
    check_ground("sr_pos", cfg.sr_pos);
    check_ground("pr_pos", cfg.pr_pos);
    check_ground("eve_pos", cfg.eve_pos);
    check_ground("st_pos", cfg.st_pos);
    check_finite("uav_start", cfg.uav_start);
    check_finite("uav_end", cfg.uav_end);
    if (cfg.slot_count_N < 1) fail("slots must be >= 1");
    if (!(cfg.horizon_T > 0.0)) fail("horizon_s must be positive");
    if (!(cfg.v_max > 0.0)) fail("v_max_mps must be positive");
    if (!(cfg.h_min > 0.0 && cfg.h_min <= cfg.h_max)) fail("need 0 < h_min <= h_max");
    if (!(cfg.p_s_max > 0.0) || !(cfg.p_u_max > 0.0)) fail("peak powers must be positive");
    if (cfg.p_s_avg > cfg.p_s_max) fail("p_s_avg exceeds p_s_max");
    if (cfg.p_u_avg > cfg.p_u_max) fail("p_u_avg exceeds p_u_max");
    if (!(cfg.interference_eps > 0.0)) fail("interference threshold must be positive");
    if (!(cfg.noise_power > 0.0)) fail("noise power must be positive");
    if (!(cfg.rho0 > 0.0)) fail("rho0 must be positive");
    if (!(cfg.path_loss_exp > 0.0)) fail("path_loss_exp must be positive");
    if (cfg.eve_radius_q < 0.0) fail("eve_radius_q_m must be >= 0");
    if (!(cfg.eps_tol > 0.0)) fail("eps_tol must be positive");
    if (cfg.uav_start.z < cfg.h_min || cfg.uav_start.z > cfg.h_max)
        fail("uav_start altitude outside [h_min, h_max]");
    if (cfg.uav_end.z < cfg.h_min || cfg.uav_end.z > cfg.h_max)
        fail("uav_end altitude outside [h_min, h_max]");
}

std::string default_config_document() {
    // Serialized from the default scenario so document and code cannot drift.
    return to_config_document(default_scenario());
}

std::string to_config_document(const ScenarioConfig& cfg) {
    std::ostringstream out;
    out << "# uavsec scenario (positions in meters, powers in dBm, gains in dB)\n";
    out << "st_pos = " << fmt(cfg.st_pos) << "\n";
    out << "sr_pos = " << fmt(cfg.sr_pos) << "\n";
    out << "pr_pos = " << fmt(cfg.pr_pos) << "\n";
    out << "eve_pos = " << fmt(cfg.eve_pos) << "\n";
    out << "uav_start = " << fmt(cfg.uav_start) << "\n";
    out << "uav_end = " << fmt(cfg.uav_end) << "\n";
    out << "horizon_s = " << fmt(cfg.horizon_T) << "\n";
    out << "slots = " << cfg.slot_count_N << "\n";
    out << "v_max_mps = " << fmt(cfg.v_max) << "\n";
    out << "h_min_m = " << fmt(cfg.h_min) << "\n";
    out << "h_max_m = " << fmt(cfg.h_max) << "\n";
    out << "p_s_max_dbm = " << fmt(watts_to_dbm(cfg.p_s_max)) << "\n";
    out << "p_s_avg_dbm = " << fmt(watts_to_dbm(cfg.p_s_avg)) << "\n";
    out << "p_u_max_dbm = " << fmt(watts_to_dbm(cfg.p_u_max)) << "\n";
    out << "p_u_avg_dbm = " << fmt(watts_to_dbm(cfg.p_u_avg)) << "\n";
    out << "interference_eps_dbm = " << fmt(watts_to_dbm(cfg.interference_eps)) << "\n";
    out << "noise_power_dbm = " << fmt(watts_to_dbm(cfg.noise_power)) << "\n";
    out << "rho0_db = " << fmt(linear_to_db(cfg.rho0)) << "\n";
    out << "path_loss_exp = " << fmt(cfg.path_loss_exp) << "\n";
    out << "euler_k = " << fmt(cfg.euler_k) << "\n";
    out << "eve_radius_q_m = " << fmt(cfg.eve_radius_q) << "\n";
    out << "space_mode = " << (cfg.space_mode == SpaceMode::TwoD ? "2d" : "3d") << "\n";
    out << "bandwidth_hz = " << fmt(cfg.bandwidth_hz) << "\n";
    out << "eps_tol = " << fmt(cfg.eps_tol) << "\n";
    out << "rng_seed = " << cfg.rng_seed << "\n";
    return out.str();
}

}  // namespace uavsec
