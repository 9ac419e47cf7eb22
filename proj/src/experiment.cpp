#include "uavsec/experiment.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "uavsec/channel.hpp"

namespace uavsec {

namespace {

std::string fmt12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string space_name(SpaceMode m) { return m == SpaceMode::TwoD ? "2d" : "3d"; }

std::string location_name(const SchemeSpec& spec) {
    if (spec.location == LocationModel::Perfect) return "perfect";
    return "robust" + fmt12(spec.radius_q);
}

std::string sanitize(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return s;
}

struct PlannedRun {
    SchemeSpec spec;
    double horizon = 0.0;
    int slots = 0;
    std::string tag;
};

void write_run_files(const std::filesystem::path& dir, const ScenarioConfig& cfg,
                     const RunResult& r, RunRecord& rec) {
    {
        std::ofstream f(dir / (rec.tag + "_trajectory.csv"));
        f << "n,x_m,y_m,z_m\n";
        f << "0," << fmt12(cfg.uav_start.x) << "," << fmt12(cfg.uav_start.y) << ","
          << fmt12(cfg.uav_start.z) << "\n";
        for (int n = 0; n < cfg.slot_count_N; ++n) {
            const Position3D& p = r.final_point.traj[n];
            f << (n + 1) << "," << fmt12(p.x) << "," << fmt12(p.y) << "," << fmt12(p.z) << "\n";
        }
        rec.files.push_back(rec.tag + "_trajectory.csv");
    }
    {
        std::ofstream f(dir / (rec.tag + "_slots.csv"));
        f << "n,rate_s_bps_hz,rate_e_bps_hz,secrecy_bps_hz,uav_eve_distance_m\n";
        for (int n = 0; n < cfg.slot_count_N; ++n) {
            f << (n + 1) << "," << fmt12(r.per_slot_rate_s[n]) << ","
              << fmt12(r.per_slot_rate_e[n]) << "," << fmt12(r.per_slot_secrecy[n]) << ","
              << fmt12(r.uav_eve_distance[n]) << "\n";
        }
        rec.files.push_back(rec.tag + "_slots.csv");
    }
    {
        std::ofstream f(dir / (rec.tag + "_convergence.csv"));
        f << "iteration,objective_bps_hz\n";
        for (std::size_t i = 0; i < r.objective_history.size(); ++i)
            f << i << "," << fmt12(r.objective_history[i]) << "\n";
        rec.files.push_back(rec.tag + "_convergence.csv");
    }
}

}  // namespace

std::string config_hash(const ScenarioConfig& cfg) {
    const std::string doc = to_config_document(cfg);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : doc) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ExperimentOutcome run_experiments(const ExperimentPlan& plan) {
    if (plan.schemes.empty()) throw std::invalid_argument("plan: empty scheme list");
    if (plan.space_modes.empty()) throw std::invalid_argument("plan: empty space mode list");
    if (plan.horizons.empty()) throw std::invalid_argument("plan: empty horizon sweep");
    if (plan.radiuses.empty()) throw std::invalid_argument("plan: empty radius sweep");
    if (plan.slot_counts.empty()) throw std::invalid_argument("plan: empty slot counts");
    if (plan.slot_counts.size() != 1 && plan.slot_counts.size() != plan.horizons.size())
        throw std::invalid_argument("plan: slot counts must be scalar or match the horizon sweep");
    if (plan.out_dir.empty()) throw std::invalid_argument("plan: empty output directory");
    for (double t : plan.horizons)
        if (!(t > 0.0)) throw std::invalid_argument("plan: horizons must be positive");
    for (double q : plan.radiuses)
        if (q < 0.0) throw std::invalid_argument("plan: radius must be >= 0");

    const std::filesystem::path dir(plan.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::invalid_argument("plan: cannot create output directory " + plan.out_dir);

    const std::vector<double> radii =
        plan.location == LocationModel::Perfect ? std::vector<double>{0.0} : plan.radiuses;

    std::vector<PlannedRun> runs;
    for (const SchemeKind kind : plan.schemes)
        for (const SpaceMode mode : plan.space_modes)
            for (const double q : radii)
                for (std::size_t h = 0; h < plan.horizons.size(); ++h) {
                    PlannedRun pr;
                    pr.spec = SchemeSpec{kind, mode, plan.location, q};
                    pr.horizon = plan.horizons[h];
                    pr.slots = plan.slot_counts.size() == 1
                                   ? plan.slot_counts[0]
                                   : plan.slot_counts[h];
                    pr.tag = std::string(to_string(kind)) + "_" + space_name(mode) + "_" +
                             location_name(pr.spec) + "_T" + fmt12(pr.horizon) + "_N" +
                             std::to_string(pr.slots);
                    runs.push_back(std::move(pr));
                }

    ExperimentOutcome outcome;
    outcome.runs.resize(runs.size());

    std::mutex io_mutex;
    std::size_t next = 0;
    auto worker = [&]() {
        for (;;) {
            std::size_t idx;
            {
                std::lock_guard<std::mutex> lock(io_mutex);
                if (next >= runs.size()) return;
                idx = next++;
            }
            const PlannedRun& pr = runs[idx];
            RunRecord rec;
            rec.tag = pr.tag;
            rec.spec = pr.spec;
            rec.horizon = pr.horizon;
            rec.slots = pr.slots;
            ScenarioConfig cfg = plan.base;
            cfg.horizon_T = pr.horizon;
            cfg.slot_count_N = pr.slots;
            cfg.slot_len_delta = cfg.horizon_T / cfg.slot_count_N;
            cfg.l_max = cfg.v_max * cfg.slot_len_delta;
            cfg.rng_seed = plan.seed;
            try {
                validate(cfg);
                const RunResult r = run_scheme(pr.spec, cfg, {});
                rec.ok = true;
                rec.average_secrecy = r.average_secrecy;
                rec.objective = r.objective;
                rec.iterations = r.iterations;
                rec.converged = r.converged;
                ScenarioConfig run_cfg = cfg;
                run_cfg.space_mode = pr.spec.space_mode;
                write_run_files(dir, run_cfg, r, rec);
            } catch (const std::exception& e) {
                rec.ok = false;
                rec.detail = e.what();
            }
            {
                std::lock_guard<std::mutex> lock(io_mutex);
                outcome.runs[idx] = std::move(rec);
            }
        }
    };

    const int jobs = std::max(1, plan.jobs);
    std::vector<std::thread> pool;
    for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    for (const RunRecord& rec : outcome.runs)
        rec.ok ? ++outcome.succeeded : ++outcome.failed;

    // Single-writer summary in plan order.
    {
        std::ofstream f(dir / "summary.csv");
        f << "scheme,space,location,radius_q_m,horizon_s,slots,seed,avg_secrecy_bps_hz,"
             "avg_secrecy_bps,objective_bps_hz,iterations,converged,status,detail\n";
        for (const RunRecord& rec : outcome.runs) {
            f << to_string(rec.spec.kind) << "," << space_name(rec.spec.space_mode) << ","
              << (rec.spec.location == LocationModel::Perfect ? "perfect" : "robust") << ","
              << fmt12(rec.spec.location == LocationModel::Perfect ? 0.0 : rec.spec.radius_q)
              << "," << fmt12(rec.horizon) << "," << rec.slots << "," << plan.seed << ","
              << fmt12(rec.average_secrecy) << ","
              << fmt12(rec.average_secrecy * plan.base.bandwidth_hz) << ","
              << fmt12(rec.objective) << "," << rec.iterations << ","
              << (rec.converged ? 1 : 0) << "," << (rec.ok ? "ok" : "failed") << ","
              << sanitize(rec.detail) << "\n";
        }
    }

    // Manifest: provenance without timestamps, so reruns stay byte-identical.
    {
        nlohmann::json manifest;
        manifest["format_version"] = 1;
        manifest["generator"] = {{"name", "uavsec"}, {"version", "0.1.0"}};
        manifest["config_hash"] = config_hash(plan.base);
        manifest["config"] = to_config_document(plan.base);
        nlohmann::json jplan;
        jplan["seed"] = plan.seed;
        jplan["location"] =
            plan.location == LocationModel::Perfect ? "perfect" : "robust";
        for (const SchemeKind k : plan.schemes) jplan["schemes"].push_back(to_string(k));
        for (const SpaceMode m : plan.space_modes) jplan["space_modes"].push_back(space_name(m));
        for (const double q : radii) jplan["radius_q_m"].push_back(q);
        for (const double t : plan.horizons) jplan["horizons_s"].push_back(t);
        for (const int n : plan.slot_counts) jplan["slot_counts"].push_back(n);
        manifest["plan"] = jplan;
        for (const RunRecord& rec : outcome.runs) {
            nlohmann::json jrun;
            jrun["tag"] = rec.tag;
            jrun["status"] = rec.ok ? "ok" : "failed";
            if (!rec.detail.empty()) jrun["detail"] = rec.detail;
            jrun["files"] = rec.files;
            manifest["runs"].push_back(jrun);
        }
        std::ofstream f(dir / "manifest.json");
        f << manifest.dump(2) << "\n";
    }

    return outcome;
}

}  // namespace uavsec
