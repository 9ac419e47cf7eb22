#include "doctest.h"

#include <cmath>
#include <vector>

#include "uavsec/channel.hpp"
#include "uavsec/rng.hpp"
#include "uavsec/scenario.hpp"

using namespace uavsec;

namespace {
ScenarioConfig reference() { return default_scenario(); }
}

TEST_SUITE("channel") {

TEST_CASE("squared distance basics") {
    CHECK(squared_distance({0, 0, 0}, {3, 4, 0}) == 25.0);
    CHECK(squared_distance({1.5, -2, 7}, {1.5, -2, 7}) == 0.0);
    CHECK(squared_distance({0, 0, 0}, {150, 250, 0}) == 85000.0);
}

TEST_CASE("squared distance is a metric squared") {
    const Philox4x32 rng(11);
    for (int k = 0; k < 200; ++k) {
        auto pt = [&](int j) {
            return Position3D{rng.uniform(6 * k + 2 * j) * 1000 - 500,
                              rng.uniform(6 * k + 2 * j + 1) * 1000 - 500,
                              rng.uniform(6 * k + 600 + j) * 200};
        };
        const Position3D a = pt(0), b = pt(1), c = pt(2);
        CHECK(squared_distance(a, b) == squared_distance(b, a));
        CHECK(squared_distance(a, b) >= 0.0);
        CHECK(squared_distance(a, b) <=
              2.0 * (squared_distance(a, c) + squared_distance(c, b)) + 1e-9);
    }
}

TEST_CASE("uav gain follows inverse square law") {
    CHECK(uav_gain(10.0, 100.0) == doctest::Approx(1e-3).epsilon(1e-14));
    CHECK(uav_gain(10.0, 1.0) == 10.0);  // reference distance 1 m
    CHECK(uav_gain(7.5, 80.0) == doctest::Approx(4.0 * uav_gain(7.5, 160.0)).epsilon(1e-13));
    CHECK_THROWS(uav_gain(10.0, 0.0));
    CHECK_THROWS(uav_gain(10.0, -5.0));
}

TEST_CASE("analytic bound values") {
    const ScenarioConfig cfg = reference();
    // High-precision oracle values (mpmath, 30 digits).
    CHECK(secrecy_lower_bound(5.0, 0.0, 300.0, 120.0, cfg) ==
          doctest::Approx(13.3440736386062887).epsilon(1e-12));
    CHECK(secrecy_lower_bound(0.0, 1e-3, 300.0, 120.0, cfg) == 0.0);
    CHECK(eavesdropper_upper_bound(5.0, 1.256e-3, 291.548, 100.0, cfg) ==
          doctest::Approx(1.38198049132547164).epsilon(1e-12));
    // Jamming dominates
    CHECK(eavesdropper_upper_bound(5.0, 1e9, 291.548, 100.0, cfg) ==
          doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("bound monotonicities by finite differences") {
    const ScenarioConfig cfg = reference();
    const Philox4x32 rng(5);
    for (int k = 0; k < 100; ++k) {
        const double p_s = 0.1 + 9.0 * rng.uniform(8 * k);
        const double p_u = 1e-4 + 2e-3 * rng.uniform(8 * k + 1);
        const double d1 = 60.0 + 400.0 * rng.uniform(8 * k + 2);
        const double d2 = 60.0 + 300.0 * rng.uniform(8 * k + 3);
        const double eps = 1e-6;
        // increasing in p_s
        CHECK(secrecy_lower_bound(p_s + eps, p_u, d1, d2, cfg) >=
              secrecy_lower_bound(p_s, p_u, d1, d2, cfg));
        // decreasing in p_u
        CHECK(secrecy_lower_bound(p_s, p_u + eps, d1, d2, cfg) <=
              secrecy_lower_bound(p_s, p_u, d1, d2, cfg));
        // Eve bound decreasing in d_se, increasing in d_ue
        CHECK(eavesdropper_upper_bound(p_s, p_u, d1 + eps, d2, cfg) <=
              eavesdropper_upper_bound(p_s, p_u, d1, d2, cfg));
        CHECK(eavesdropper_upper_bound(p_s, p_u, d1, d2 + eps, cfg) >=
              eavesdropper_upper_bound(p_s, p_u, d1, d2, cfg));
    }
}

TEST_CASE("interference at PR") {
    const ScenarioConfig cfg = reference();
    const std::vector<double> ps1{5.0}, pu1{1.256e-3}, dup1{100.0};
    CHECK(interference_at_pr(ps1, pu1, 250.0, dup1, cfg) ==
          doctest::Approx(4.456e-6).epsilon(1e-12));

    const std::vector<double> z{0.0, 0.0};
    const std::vector<double> d{100.0, 70.0};
    CHECK(interference_at_pr(z, z, 250.0, d, cfg) == 0.0);

    // averaging invariance: two identical slots match the single-slot value
    const std::vector<double> ps2{5.0, 5.0}, pu2{1.256e-3, 1.256e-3}, dup2{100.0, 100.0};
    CHECK(interference_at_pr(ps2, pu2, 250.0, dup2, cfg) ==
          doctest::Approx(interference_at_pr(ps1, pu1, 250.0, dup1, cfg)).epsilon(1e-15));

    const std::vector<double> short_pu{1.0};
    CHECK_THROWS(interference_at_pr(ps2, short_pu, 250.0, dup2, cfg));
}

TEST_CASE("mc estimator basics") {
    const ScenarioConfig cfg = reference();
    CHECK(ergodic_rate_mc(0.0, 1e-3, 300.0, 100.0, 1000, 3, cfg) == 0.0);
    // deterministic for fixed seed
    CHECK(ergodic_rate_mc(2.0, 1e-3, 300.0, 100.0, 5000, 9, cfg) ==
          ergodic_rate_mc(2.0, 1e-3, 300.0, 100.0, 5000, 9, cfg));
    CHECK(ergodic_rate_mc(2.0, 1e-3, 300.0, 100.0, 5000, 9, cfg) !=
          ergodic_rate_mc(2.0, 1e-3, 300.0, 100.0, 5000, 10, cfg));
}

TEST_CASE("mc matches exponential log moment") {
    // E[ln(K psi)] = ln K - k for unit-mean exponential psi.
    const ScenarioConfig cfg = reference();
    const double p_s = 3.0, p_u = 1e-3, d_tx = 280.0, d_jam = 120.0;
    const double K = p_s * cfg.rho0 * std::pow(d_tx, -cfg.path_loss_exp) /
                     (p_u * cfg.rho0 / (d_jam * d_jam) + cfg.noise_power);
    const Philox4x32 rng(123);
    const std::uint64_t n = 400000;
    double sum = 0.0, sumsq = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) {
        const double v = std::log(K * rng.exponential(i));
        sum += v;
        sumsq += v * v;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sumsq / n - mean * mean) / (n - 1.0));
    const double closed_form = std::log(K) - cfg.euler_k;
    CHECK(std::abs(mean - closed_form) < 3.0 * se);
}

TEST_CASE("mc standard error scales like 1/sqrt(n)") {
    const ScenarioConfig cfg = reference();
    const int reps = 300;
    auto spread = [&](std::uint64_t n, std::uint64_t seed0) {
        double s = 0.0, s2 = 0.0;
        for (int r = 0; r < reps; ++r) {
            const double v =
                ergodic_rate_mc(4.0, 1.2e-3, 310.0, 90.0, n, seed0 + static_cast<std::uint64_t>(r), cfg);
            s += v;
            s2 += v * v;
        }
        const double m = s / reps;
        return std::sqrt(s2 / reps - m * m);
    };
    const double sd1 = spread(1000, 1000);
    const double sd2 = spread(2000, 5000);
    const double ratio = sd1 / sd2;
    CHECK(ratio > 1.2);   // ~sqrt(2) = 1.414 within statistical noise
    CHECK(ratio < 1.65);
}

TEST_CASE("jensen bounds sandwich the true ergodic rates") {
    const ScenarioConfig cfg = reference();
    const Philox4x32 rng(77);
    const std::uint64_t samples = 200000;
    for (int k = 0; k < 30; ++k) {
        const double p_s = 0.2 + 8.0 * rng.uniform(10 * k);
        const double p_u = 1e-4 + 2.2e-3 * rng.uniform(10 * k + 1);
        const double d_tx = 80.0 + 400.0 * rng.uniform(10 * k + 2);
        const double d_jam = 60.0 + 240.0 * rng.uniform(10 * k + 3);
        const auto est = ergodic_rate_mc_se(p_s, p_u, d_tx, d_jam, samples,
                                            1000 + static_cast<std::uint64_t>(k), cfg);
        const double lb = secrecy_lower_bound(p_s, p_u, d_tx, d_jam, cfg);
        const double ub = eavesdropper_upper_bound(p_s, p_u, d_tx, d_jam, cfg);
        CHECK(lb <= est.mean + 3.0 * est.std_error);
        CHECK(ub >= est.mean - 3.0 * est.std_error);
    }
}

TEST_CASE("rate pair clips secrecy") {
    const RatePair a = make_rate_pair(3.0, 1.0);
    CHECK(a.secrecy == 2.0);
    const RatePair b = make_rate_pair(1.0, 4.0);
    CHECK(b.secrecy == 0.0);
}

}  // TEST_SUITE
