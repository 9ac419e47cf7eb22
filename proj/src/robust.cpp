#include "uavsec/robust.hpp"

#include <cmath>
#include <stdexcept>

#include "sca_internal.hpp"
#include "uavsec/channel.hpp"

namespace uavsec {

using conic::AffineExpr;
using conic::ArrowPsd3;
using conic::Constraint;
using conic::LinearIneq;
using conic::RotatedCone;

double worst_case_st_eve_distance(const Position3D& eve_estimate, double radius_q,
                                  const Position3D& st) {
    if (radius_q < 0.0) throw std::invalid_argument("worst_case_st_eve_distance: negative radius");
    const double d = std::sqrt(squared_distance(eve_estimate, st));
    if (d <= radius_q)
        throw std::invalid_argument(
            "worst_case_st_eve_distance: ST inside the uncertainty disk; Eve could be co-located");
    return d - radius_q;
}

double disk_max_squared_distance(const Position3D& eve_estimate, double radius_q,
                                 const Position3D& p) {
    const double h = std::hypot(p.x - eve_estimate.x, p.y - eve_estimate.y);
    const double dz = p.z - eve_estimate.z;
    return (h + radius_q) * (h + radius_q) + dz * dz;
}

double disk_grid_max_squared_distance(const Position3D& eve_estimate, double radius_q,
                                      const Position3D& p, int samples) {
    // Vogel sunflower: r_k = Q sqrt(k/K), theta_k = k * golden angle.
    constexpr double kGoldenAngle = 2.39996322972865332;
    double worst = 0.0;
    for (int k = 1; k <= samples; ++k) {
        const double r = radius_q * std::sqrt(static_cast<double>(k) / samples);
        const double th = kGoldenAngle * static_cast<double>(k);
        const Position3D eve{eve_estimate.x + r * std::cos(th),
                             eve_estimate.y + r * std::sin(th), eve_estimate.z};
        worst = std::max(worst, squared_distance(eve, p));
    }
    return worst;
}

std::vector<Constraint> s_procedure_blocks(const Position3D& eve_estimate, double radius_q,
                                           const AffineExpr& x_u, const AffineExpr& y_u,
                                           const AffineExpr& z_u, const AffineExpr& alpha_e,
                                           const AffineExpr& theta_e, const AffineExpr& mu) {
    if (!(radius_q > 0.0))
        throw std::invalid_argument("s_procedure_blocks: radius must be positive (use the "
                                    "perfect-location constraint for Q = 0)");
    std::vector<Constraint> out;
    // f_d(eve_estimate, c_U) - alpha_e <= theta_e, as a rotated cone on the
    // convex quadratic side.
    out.push_back(RotatedCone{theta_e + alpha_e, AffineExpr(0.5),
                              {x_u - eve_estimate.x, y_u - eve_estimate.y, z_u - eve_estimate.z}});
    out.push_back(LinearIneq{mu});
    // Arrow LMI S[n] >= 0, lowered to one rotated cone plus linear rows.
    ArrowPsd3 arrow{mu - AffineExpr(1.0), x_u - eve_estimate.x, y_u - eve_estimate.y,
                    (-radius_q * radius_q) * mu - theta_e};
    for (auto& c : conic::lmi_to_rotated_cone(arrow)) out.push_back(std::move(c));
    return out;
}

IteratePoint init_feasible_robust(const ScenarioConfig& cfg, const SchemePins& pins) {
    return detail::init_feasible_impl(cfg, pins, true);
}

Subproblem build_robust_subproblem(const IteratePoint& prev, const ScenarioConfig& cfg,
                                   const SchemePins& pins) {
    return detail::build_impl(prev, cfg, pins, true);
}

RunResult solve_robust_sca(const ScenarioConfig& cfg, const SolveOptions& opts) {
    return detail::run_sca_loop(cfg, opts, true);
}

}  // namespace uavsec
