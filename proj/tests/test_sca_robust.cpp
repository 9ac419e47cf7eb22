#include "doctest.h"

#include <cmath>

#include "uavsec/channel.hpp"
#include "uavsec/robust.hpp"
#include "uavsec/scenario.hpp"

using namespace uavsec;
using conic::AffineExpr;

namespace {

ScenarioConfig robust_cfg(double q) {
    ScenarioConfig cfg = parse_config(
        "slots = 12\n"
        "horizon_s = 36\n"
        "uav_start = 0 200 100\n"
        "uav_end = 240 200 100\n");
    cfg.eve_radius_q = q;
    return cfg;
}

}  // namespace

TEST_SUITE("sca_robust") {

TEST_CASE("worst case ST-Eve distance") {
    // sqrt(85000) - 20, frozen from the scenario geometry
    CHECK(worst_case_st_eve_distance({150, 250, 0}, 20.0, {0, 0, 0}) ==
          doctest::Approx(271.5475947422650).epsilon(1e-13));
    CHECK(worst_case_st_eve_distance({150, 250, 0}, 0.0, {0, 0, 0}) ==
          doctest::Approx(291.5475947422650).epsilon(1e-13));
    // degenerate disk: Eve could sit on the ST
    CHECK_THROWS(worst_case_st_eve_distance({150, 250, 0}, 291.5475947422650, {0, 0, 0}));
    CHECK_THROWS(worst_case_st_eve_distance({10, 0, 0}, 50.0, {0, 0, 0}));
}

TEST_CASE("disk maximum: closed form vs sunflower oracle") {
    const Position3D eve{150, 250, 0};
    for (const Position3D p : {Position3D{150, 250, 100}, Position3D{40, 180, 60},
                               Position3D{300, 300, 140}}) {
        const double exact = disk_max_squared_distance(eve, 20.0, p);
        const double grid = disk_grid_max_squared_distance(eve, 20.0, p, 10000);
        CHECK(grid <= exact * (1.0 + 1e-12));
        CHECK(grid >= exact * (1.0 - 2e-3));  // sampled max slightly inside
    }
    // Q = 0 degenerates to the plain squared distance
    CHECK(disk_max_squared_distance(eve, 0.0, {150, 250, 100}) == doctest::Approx(10000.0));
}

TEST_CASE("s-procedure blocks at a fixed UAV position") {
    const Position3D eve{150, 250, 0};
    const double q = 20.0;
    const Position3D c{150, 250, 100};
    // alpha_e at the disk maximum, mu/theta at their natural values
    const double alpha_e = disk_max_squared_distance(eve, q, c);
    const double theta = squared_distance(eve, c) - alpha_e;
    const double hdist = std::hypot(c.x - eve.x, c.y - eve.y);
    const double mu = 1.0 + hdist / q;

    const auto blocks =
        s_procedure_blocks(eve, q, AffineExpr(c.x), AffineExpr(c.y), AffineExpr(c.z),
                           AffineExpr(alpha_e), AffineExpr(theta), AffineExpr(mu));
    REQUIRE(blocks.size() == 5);  // distance cone + mu row + lowered LMI (2 lin + 1 cone)
    std::vector<double> empty;
    for (const auto& b : blocks) CHECK(conic::constraint_violation(b, empty) <= 1e-9);

    // brute-force check that alpha_e really dominates the disk
    CHECK(disk_grid_max_squared_distance(eve, q, c, 10000) <= alpha_e * (1.0 + 1e-9));
    // center of the disk is covered
    CHECK(squared_distance(eve, c) <= alpha_e);

    CHECK_THROWS(s_procedure_blocks(eve, 0.0, AffineExpr(c.x), AffineExpr(c.y), AffineExpr(c.z),
                                    AffineExpr(alpha_e), AffineExpr(theta), AffineExpr(mu)));
}

TEST_CASE("robust subproblem has 15N core variables") {
    const ScenarioConfig cfg = robust_cfg(20.0);
    const IteratePoint it = init_feasible_robust(cfg);
    Subproblem sub = build_robust_subproblem(it, cfg);
    CHECK(sub.layout.core_count == 15 * cfg.slot_count_N);
    CHECK(max_relative_violation(sub.program, sub.layout.pack(it)) <= 1e-9);
}

TEST_CASE("robust run: monotone, feasible, conservative") {
    const ScenarioConfig cfg = robust_cfg(20.0);
    SolveOptions opts;
    opts.record_iterates = true;
    const RunResult r = solve_robust_sca(cfg, opts);
    CHECK(r.converged);
    for (std::size_t i = 1; i < r.objective_history.size(); ++i)
        CHECK(r.objective_history[i] >= r.objective_history[i - 1] - 1e-9);
    CHECK_NOTHROW(audit_original_constraints(r.final_point, cfg, 1e-6, true));

    // S-procedure soundness on every accepted iterate
    for (const auto& it : r.iterate_history) {
        for (int n = 0; n < cfg.slot_count_N; ++n) {
            const double worst =
                disk_grid_max_squared_distance(cfg.eve_pos, cfg.eve_radius_q, it.traj[n], 10000);
            CHECK(worst <= it.alpha_e[n] * (1.0 + 1e-6));
        }
    }

    // worst-casing can only lower the rate
    ScenarioConfig perfect = cfg;
    perfect.eve_radius_q = 0.0;
    const RunResult rp = solve_sca(perfect, SolveOptions{});
    CHECK(r.objective <= rp.objective + 1e-6);
}

TEST_CASE("q = 0 reduction matches the perfect pipeline") {
    const ScenarioConfig cfg = robust_cfg(0.0);
    SolveOptions opts;
    const RunResult robust = solve_robust_sca(cfg, opts);
    const RunResult perfect = solve_sca(cfg, opts);
    CHECK(robust.objective ==
          doctest::Approx(perfect.objective).epsilon(1e-6));
}

}  // TEST_SUITE
