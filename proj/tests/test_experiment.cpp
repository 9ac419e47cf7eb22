#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "uavsec/experiment.hpp"

using namespace uavsec;
namespace fs = std::filesystem;

namespace {

ExperimentPlan tiny_plan(const std::string& out) {
    ExperimentPlan plan;
    plan.base = parse_config(
        "slots = 6\n"
        "horizon_s = 30\n"
        "uav_start = -50 200 100\n"
        "uav_end = 50 200 100\n");
    plan.schemes = {SchemeKind::Proposed};
    plan.space_modes = {SpaceMode::ThreeD};
    plan.horizons = {30.0};
    plan.slot_counts = {6};
    plan.out_dir = out;
    plan.seed = 7;
    return plan;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("plan validation") {
    ExperimentPlan plan = tiny_plan("/tmp/uavsec_test_validate");
    plan.schemes.clear();
    CHECK_THROWS_AS(run_experiments(plan), std::invalid_argument);
    plan = tiny_plan("/tmp/uavsec_test_validate");
    plan.horizons.clear();
    CHECK_THROWS_AS(run_experiments(plan), std::invalid_argument);
    plan = tiny_plan("/tmp/uavsec_test_validate");
    plan.slot_counts = {6, 8};  // mismatched with one horizon
    CHECK_THROWS_AS(run_experiments(plan), std::invalid_argument);
    plan = tiny_plan("");
    CHECK_THROWS_AS(run_experiments(plan), std::invalid_argument);
}

TEST_CASE("runs emit the expected files and summary") {
    const std::string out = "/tmp/uavsec_test_run";
    fs::remove_all(out);
    ExperimentPlan plan = tiny_plan(out);
    const ExperimentOutcome outcome = run_experiments(plan);
    REQUIRE(outcome.runs.size() == 1);
    CHECK(outcome.succeeded == 1);
    CHECK(outcome.failed == 0);
    const std::string tag = outcome.runs[0].tag;
    CHECK(fs::exists(fs::path(out) / (tag + "_trajectory.csv")));
    CHECK(fs::exists(fs::path(out) / (tag + "_slots.csv")));
    CHECK(fs::exists(fs::path(out) / (tag + "_convergence.csv")));
    CHECK(fs::exists(fs::path(out) / "summary.csv"));
    CHECK(fs::exists(fs::path(out) / "manifest.json"));

    // summary rows agree with the run record
    const std::string summary = slurp(fs::path(out) / "summary.csv");
    CHECK(summary.find("proposed,3d,perfect") != std::string::npos);
    CHECK(summary.find("ok") != std::string::npos);

    // trajectory file has N + 1 rows plus header
    std::istringstream traj(slurp(fs::path(out) / (tag + "_trajectory.csv")));
    int lines = 0;
    std::string line;
    while (std::getline(traj, line))
        if (!line.empty()) ++lines;
    CHECK(lines == plan.base.slot_count_N + 2);
}

TEST_CASE("reruns are byte identical") {
    const std::string out1 = "/tmp/uavsec_test_det1";
    const std::string out2 = "/tmp/uavsec_test_det2";
    fs::remove_all(out1);
    fs::remove_all(out2);
    ExperimentPlan plan = tiny_plan(out1);
    plan.jobs = 2;
    run_experiments(plan);
    plan.out_dir = out2;
    run_experiments(plan);
    for (const auto& entry : fs::directory_iterator(out1)) {
        const fs::path other = fs::path(out2) / entry.path().filename();
        REQUIRE(fs::exists(other));
        CHECK(slurp(entry.path()) == slurp(other));
    }
}

TEST_CASE("failures are recorded and reported") {
    const std::string out = "/tmp/uavsec_test_fail";
    fs::remove_all(out);
    ExperimentPlan plan = tiny_plan(out);
    // second horizon is too short to reach the destination
    plan.horizons = {30.0, 5.0};
    plan.slot_counts = {6, 6};
    const ExperimentOutcome outcome = run_experiments(plan);
    REQUIRE(outcome.runs.size() == 2);
    CHECK(outcome.succeeded == 1);
    CHECK(outcome.failed == 1);
    CHECK(!outcome.runs[1].ok);
    CHECK(outcome.runs[1].detail.find("infeasible geometry") != std::string::npos);
    const std::string summary = slurp(fs::path(out) / "summary.csv");
    CHECK(summary.find("failed") != std::string::npos);
}

TEST_CASE("config hash is stable and sensitive") {
    const ScenarioConfig a = default_scenario();
    ScenarioConfig b = a;
    CHECK(config_hash(a) == config_hash(b));
    b.v_max = 11.0;
    CHECK(config_hash(a) != config_hash(b));
}

}  // TEST_SUITE
