#include "uavsec/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "uavsec/rng.hpp"

namespace uavsec {

RatePair make_rate_pair(double r_s, double r_e) {
    return RatePair{r_s, r_e, std::max(0.0, r_s - r_e)};
}

double squared_distance(const Position3D& a, const Position3D& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    return dx * dx + dy * dy + dz * dz;
}

double uav_gain(double rho0, double dist) {
    if (!(dist > 0.0)) throw std::invalid_argument("uav_gain: distance must be positive");
    return rho0 / (dist * dist);
}

namespace {
constexpr double kLog2 = 0.6931471805599453;  // ln 2

inline double log2_1p(double x) { return std::log1p(x) / kLog2; }
}  // namespace

double secrecy_lower_bound(double p_s, double p_u, double d_ss, double d_us,
                           const ScenarioConfig& cfg) {
    if (!(d_ss > 0.0) || !(d_us > 0.0))
        throw std::invalid_argument("secrecy_lower_bound: distances must be positive");
    if (p_s < 0.0 || p_u < 0.0)
        throw std::invalid_argument("secrecy_lower_bound: powers must be nonnegative");
    const double num = std::exp(-cfg.euler_k) * cfg.gamma0 * std::pow(d_ss, -cfg.path_loss_exp) * p_s;
    const double den = cfg.gamma0 * p_u / (d_us * d_us) + 1.0;
    return log2_1p(num / den);
}

double eavesdropper_upper_bound(double p_s, double p_u, double d_se, double d_ue,
                                const ScenarioConfig& cfg) {
    if (!(d_se > 0.0) || !(d_ue > 0.0))
        throw std::invalid_argument("eavesdropper_upper_bound: distances must be positive");
    if (p_s < 0.0 || p_u < 0.0)
        throw std::invalid_argument("eavesdropper_upper_bound: powers must be nonnegative");
    const double num = cfg.gamma0 * std::pow(d_se, -cfg.path_loss_exp) * p_s;
    const double den = cfg.gamma0 * p_u / (d_ue * d_ue) + 1.0;
    return log2_1p(num / den);
}

McEstimate ergodic_rate_mc_se(double p_s, double p_u, double d_tx, double d_jam,
                              std::uint64_t samples, std::uint64_t seed,
                              const ScenarioConfig& cfg) {
    if (samples < 1) throw std::invalid_argument("ergodic_rate_mc: samples must be >= 1");
    if (!(d_tx > 0.0) || !(d_jam > 0.0))
        throw std::invalid_argument("ergodic_rate_mc: distances must be positive");
    // SINR = K * psi with deterministic K; only psi is random.
    const double K = p_s * cfg.rho0 * std::pow(d_tx, -cfg.path_loss_exp) /
                     (p_u * cfg.rho0 / (d_jam * d_jam) + cfg.noise_power);
    const Philox4x32 rng(seed);
    double sum = 0.0;
    double sumsq = 0.0;
    for (std::uint64_t i = 0; i < samples; ++i) {
        const double r = log2_1p(K * rng.exponential(i));
        sum += r;
        sumsq += r * r;
    }
    const double n = static_cast<double>(samples);
    const double mean = sum / n;
    const double var = std::max(0.0, sumsq / n - mean * mean);
    return McEstimate{mean, samples > 1 ? std::sqrt(var / (n - 1.0)) : 0.0};
}

double ergodic_rate_mc(double p_s, double p_u, double d_tx, double d_jam,
                       std::uint64_t samples, std::uint64_t seed,
                       const ScenarioConfig& cfg) {
    return ergodic_rate_mc_se(p_s, p_u, d_tx, d_jam, samples, seed, cfg).mean;
}

double interference_at_pr(std::span<const double> p_s, std::span<const double> p_u,
                          double d_sp, std::span<const double> d_up,
                          const ScenarioConfig& cfg) {
    const std::size_t n = p_s.size();
    if (p_u.size() != n || d_up.size() != n)
        throw std::invalid_argument("interference_at_pr: array length mismatch");
    if (n == 0) throw std::invalid_argument("interference_at_pr: empty arrays");
    const double st_gain = cfg.rho0 * std::pow(d_sp, -cfg.path_loss_exp);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        total += st_gain * p_s[i] + cfg.rho0 * p_u[i] / (d_up[i] * d_up[i]);
    return total / static_cast<double>(n);
}

}  // namespace uavsec
