#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "uavsec/experiment.hpp"

using namespace uavsec;

int main(int argc, char** argv) {
    CLI::App app{"Joint UAV-jammer trajectory and power optimization for secure "
                 "cognitive-radio links"};

    std::string config_path;
    std::vector<std::string> scheme_names{"proposed"};
    std::vector<std::string> space_names;
    std::string location_name = "perfect";
    std::vector<double> radius_q;
    std::vector<double> horizons;
    std::vector<int> slots;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out_dir = "runs";
    int jobs = 2;
    bool print_default = false;

    app.add_option("--config", config_path, "Scenario config file (key = value document)");
    app.add_option("--scheme", scheme_names,
                   "Schemes to run: proposed, fixed-power, straight-line, no-jamming")
        ->capture_default_str();
    app.add_option("--space", space_names, "Space modes: 2d and/or 3d (default: config value)");
    app.add_option("--location", location_name, "Eve location model: perfect or robust")
        ->check(CLI::IsMember({"perfect", "robust"}))
        ->capture_default_str();
    app.add_option("--radius-q", radius_q,
                   "Uncertainty radius sweep in meters for the robust model");
    app.add_option("--horizon", horizons, "Time horizon sweep in seconds");
    app.add_option("--slots", slots, "Slot count, scalar or paired with --horizon");
    app.add_option("--seed", seed, "RNG seed recorded with the outputs")
        ->each([&seed_set](const std::string&) { seed_set = true; });
    app.add_option("--out", out_dir, "Output directory")->capture_default_str();
    app.add_option("--jobs", jobs, "Worker threads for independent runs")->capture_default_str();
    app.add_flag("--print-default-config", print_default,
                 "Print the documented default scenario and exit");

    CLI11_PARSE(app, argc, argv);

    if (print_default) {
        std::fputs(default_config_document().c_str(), stdout);
        return 0;
    }

    ExperimentPlan plan;
    try {
        plan.base = config_path.empty() ? default_scenario() : load_config_file(config_path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }

    try {
        plan.schemes.clear();
        for (const auto& name : scheme_names) plan.schemes.push_back(scheme_from_string(name));
        plan.space_modes.clear();
        if (space_names.empty()) {
            plan.space_modes.push_back(plan.base.space_mode);
        } else {
            for (const auto& name : space_names) {
                if (name == "2d") plan.space_modes.push_back(SpaceMode::TwoD);
                else if (name == "3d") plan.space_modes.push_back(SpaceMode::ThreeD);
                else throw std::invalid_argument("unknown space mode '" + name + "'");
            }
        }
        plan.location = location_name == "robust" ? LocationModel::Robust : LocationModel::Perfect;
        plan.radiuses = radius_q.empty() ? std::vector<double>{plan.base.eve_radius_q} : radius_q;
        plan.horizons = horizons.empty() ? std::vector<double>{plan.base.horizon_T} : horizons;
        plan.slot_counts = slots.empty() ? std::vector<int>{plan.base.slot_count_N} : slots;
        plan.seed = seed_set ? seed : plan.base.rng_seed;
        plan.out_dir = out_dir;
        plan.jobs = jobs;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }

    const auto t0 = std::chrono::steady_clock::now();
    ExperimentOutcome outcome;
    try {
        outcome = run_experiments(plan);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "invalid plan: %s\n", e.what());
        return 2;
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    for (const RunRecord& rec : outcome.runs) {
        if (rec.ok)
            std::printf("%-45s avg secrecy %10.6f bits/s/Hz  iters %3d%s\n", rec.tag.c_str(),
                        rec.average_secrecy, rec.iterations, rec.converged ? "" : " (cap)");
        else
            std::printf("%-45s FAILED: %s\n", rec.tag.c_str(), rec.detail.c_str());
    }
    std::printf("%d/%zu runs succeeded in %.1f s; outputs in %s\n", outcome.succeeded,
                outcome.runs.size(), wall, plan.out_dir.c_str());

    if (outcome.failed == 0) return 0;
    return 1;
}
