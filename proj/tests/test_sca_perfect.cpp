#include "doctest.h"

#include <cmath>

#include "uavsec/channel.hpp"
#include "uavsec/sca.hpp"
#include "uavsec/scenario.hpp"

using namespace uavsec;

namespace {

ScenarioConfig small_cfg() {
    return parse_config(
        "slots = 10\n"
        "horizon_s = 50\n"
        "uav_start = -50 200 100\n"
        "uav_end = 50 200 100\n");
}

}  // namespace

TEST_SUITE("sca_perfect") {

TEST_CASE("init feasibility geometry checks") {
    // reference scenario: straight length 600 m vs N * L_max = 5000 m
    ScenarioConfig cfg = parse_config("slots = 500\nhorizon_s = 500\n");
    CHECK_NOTHROW(init_feasible(cfg));

    // N = 10, T = 10 s: 600 m > 100 m reachable
    ScenarioConfig bad = parse_config("slots = 10\nhorizon_s = 10\n");
    CHECK_THROWS_AS(init_feasible(bad), ScaError);

    // 2D mode with unequal endpoint altitudes cannot pin z
    ScenarioConfig bad2d = parse_config(
        "slots = 20\nhorizon_s = 100\nspace_mode = 2d\n"
        "uav_start = -50 200 100\nuav_end = 50 200 120\n");
    CHECK_THROWS_AS(init_feasible(bad2d), ScaError);
}

TEST_CASE("init point passes a full self-expansion audit") {
    const ScenarioConfig cfg = small_cfg();
    const IteratePoint it = init_feasible(cfg);
    Subproblem sub = build_subproblem(it, cfg);
    CHECK(max_relative_violation(sub.program, sub.layout.pack(it)) <= 1e-9);
    CHECK_NOTHROW(audit_original_constraints(it, cfg, 1e-9, false));
}

TEST_CASE("subproblem has the expected variable count") {
    const ScenarioConfig cfg = small_cfg();
    const IteratePoint it = init_feasible(cfg);
    Subproblem sub = build_subproblem(it, cfg);
    // 13N core variables plus epigraph bookkeeping
    CHECK(sub.layout.core_count == 13 * cfg.slot_count_N);
    CHECK(sub.program.variable_count() == sub.layout.total_count);
    CHECK(sub.layout.total_count == 17 * cfg.slot_count_N);
}

TEST_CASE("layout pack/unpack round trip") {
    const ScenarioConfig cfg = small_cfg();
    const IteratePoint it = init_feasible(cfg);
    Subproblem sub = build_subproblem(it, cfg);
    const auto x = sub.layout.pack(it);
    const IteratePoint back = sub.layout.unpack(x);
    for (int n = 0; n < cfg.slot_count_N; ++n) {
        CHECK(back.traj[n].x == it.traj[n].x);
        CHECK(back.p_s[n] == it.p_s[n]);
        CHECK(back.t_e[n] == doctest::Approx(it.t_e[n]).epsilon(1e-15));
        CHECK(back.beta[n] == doctest::Approx(it.beta[n]).epsilon(1e-15));
    }
}

TEST_CASE("solve_sca: monotone ascent, convergence, feasibility") {
    const ScenarioConfig cfg = small_cfg();
    SolveOptions opts;
    const RunResult r = solve_sca(cfg, opts);
    CHECK(r.converged);
    CHECK(r.iterations <= 30);
    REQUIRE(r.objective_history.size() == static_cast<std::size_t>(r.iterations) + 1);
    for (std::size_t i = 1; i < r.objective_history.size(); ++i)
        CHECK(r.objective_history[i] >= r.objective_history[i - 1] - 1e-9);
    CHECK(r.objective > r.objective_history.front());
    CHECK_NOTHROW(audit_original_constraints(r.final_point, cfg, 1e-6, false));

    // endpoint exactness
    const Position3D last = r.final_point.traj.back();
    CHECK(std::sqrt(squared_distance(last, cfg.uav_end)) <= 1e-6);

    // reported per-slot values are clipped; averages consistent
    double avg = 0.0;
    for (int n = 0; n < cfg.slot_count_N; ++n) {
        CHECK(r.per_slot_secrecy[n] >= 0.0);
        CHECK(r.per_slot_secrecy[n] ==
              doctest::Approx(std::max(0.0, r.per_slot_rate_s[n] - r.per_slot_rate_e[n]))
                  .epsilon(1e-12));
        avg += r.per_slot_secrecy[n];
    }
    CHECK(r.average_secrecy == doctest::Approx(avg / cfg.slot_count_N).epsilon(1e-12));
}

TEST_CASE("3d mode dominates 2d mode") {
    ScenarioConfig cfg3 = small_cfg();
    ScenarioConfig cfg2 = cfg3;
    cfg2.space_mode = SpaceMode::TwoD;
    SolveOptions opts;
    const RunResult r3 = solve_sca(cfg3, opts);
    const RunResult r2 = solve_sca(cfg2, opts);
    CHECK(r3.objective >= r2.objective - 1e-9);
    // 2D pins altitude
    for (int n = 0; n < cfg2.slot_count_N; ++n)
        CHECK(r2.final_point.traj[n].z == doctest::Approx(cfg2.uav_start.z).epsilon(1e-9));
}

TEST_CASE("iterate objective helper") {
    IteratePoint it;
    it.traj = {{0, 0, 100}, {0, 0, 100}};
    it.r_s = {3.0, 1.0};
    it.r_e = {1.0, 0.5};
    CHECK(iterate_objective(it) == doctest::Approx(1.25));
}

}  // TEST_SUITE
