#pragma once

#include <cstdint>
#include <span>

#include "uavsec/scenario.hpp"

namespace uavsec {

// Rayleigh power fading on terrestrial links: unit-mean exponential gain psi
// on top of rho0 * dist^-phi. UAV links are LoS, rho0 * dist^-2.
struct FadingModel {
    double path_loss_exp = 0.0;
    double rho0 = 0.0;
};

struct RatePair {
    double r_s = 0.0;      // bits/s/Hz at SR
    double r_e = 0.0;      // bits/s/Hz at Eve
    double secrecy = 0.0;  // max(0, r_s - r_e)
};

RatePair make_rate_pair(double r_s, double r_e);

// Squared Euclidean distance f_d(a, b).
double squared_distance(const Position3D& a, const Position3D& b);

// Free-space LoS gain rho0 / dist^2; dist is Euclidean, reference 1 m.
double uav_gain(double rho0, double dist);

// Analytic lower bound of the SR ergodic rate,
// log2(1 + e^-k gamma0 d_ss^-phi p_s / (gamma0 d_us^-2 p_u + 1)).
double secrecy_lower_bound(double p_s, double p_u, double d_ss, double d_us,
                           const ScenarioConfig& cfg);

// Analytic upper bound of Eve's ergodic rate,
// log2(1 + gamma0 d_se^-phi p_s / (gamma0 d_ue^-2 p_u + 1)).
double eavesdropper_upper_bound(double p_s, double p_u, double d_se, double d_ue,
                                const ScenarioConfig& cfg);

// Sample-mean estimate of E[log2(1 + p_s rho0 d_tx^-phi psi / (p_u rho0 d_jam^-2 + sigma^2))]
// over unit-mean exponential psi. Deterministic for a fixed seed.
double ergodic_rate_mc(double p_s, double p_u, double d_tx, double d_jam,
                       std::uint64_t samples, std::uint64_t seed,
                       const ScenarioConfig& cfg);

// Same estimate plus the standard error of the mean.
struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
};
McEstimate ergodic_rate_mc_se(double p_s, double p_u, double d_tx, double d_jam,
                              std::uint64_t samples, std::uint64_t seed,
                              const ScenarioConfig& cfg);

// Average aggregate interference power at PR over N slots,
// (1/N) sum(rho0 d_sp^-phi p_s[n] + rho0 d_up[n]^-2 p_u[n]).
double interference_at_pr(std::span<const double> p_s, std::span<const double> p_u,
                          double d_sp, std::span<const double> d_up,
                          const ScenarioConfig& cfg);

}  // namespace uavsec
