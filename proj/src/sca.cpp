#include "uavsec/sca.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sca_internal.hpp"
#include "uavsec/channel.hpp"
#include "uavsec/robust.hpp"
#include "uavsec/surrogates.hpp"

namespace uavsec {

namespace {

using conic::AffineExpr;
using conic::ConicProgram;
using conic::RotatedCone;
using conic::SecondOrderCone;
using surrogates::kTrustMargin;

constexpr double kPowerFloorRel = 1e-6;  // keeps expansion denominators positive
constexpr double kFloorShrink = 1e-3;     // adaptive trust floors track the iterate

double dist(const Position3D& a, const Position3D& b) {
    return std::sqrt(squared_distance(a, b));
}

AffineExpr affine_of(const surrogates::DistanceFirstOrder& s, const AffineExpr& x,
                     const AffineExpr& y, const AffineExpr& z) {
    AffineExpr e(s.value0 - s.gx * s.c0.x - s.gy * s.c0.y - s.gz * s.c0.z);
    e += s.gx * x;
    e += s.gy * y;
    e += s.gz * z;
    return e;
}

struct DerivedGeometry {
    double d_ss, d_sp, d_se_eff;
    double cs_gain;  // e^-k gamma0 d_ss^-phi
    double ce_gain;  // gamma0 d_se_eff^-phi
    double cp_st;    // rho0 d_sp^-phi
};

DerivedGeometry derive_geometry(const ScenarioConfig& cfg, bool robust) {
    DerivedGeometry g;
    g.d_ss = dist(cfg.st_pos, cfg.sr_pos);
    g.d_sp = dist(cfg.st_pos, cfg.pr_pos);
    g.d_se_eff = detail::effective_st_eve_distance(cfg, robust);
    g.cs_gain = std::exp(-cfg.euler_k) * cfg.gamma0 * std::pow(g.d_ss, -cfg.path_loss_exp);
    g.ce_gain = cfg.gamma0 * std::pow(g.d_se_eff, -cfg.path_loss_exp);
    g.cp_st = cfg.rho0 * std::pow(g.d_sp, -cfg.path_loss_exp);
    return g;
}

void check_iterate_shape(const IteratePoint& it, int N, bool robust) {
    auto bad = [N](const std::vector<double>& v) { return static_cast<int>(v.size()) != N; };
    if (it.slots() != N || bad(it.p_s) || bad(it.p_u) || bad(it.r_s) || bad(it.r_e) ||
        bad(it.t_s) || bad(it.t_e) || bad(it.alpha_s) || bad(it.alpha_e) || bad(it.alpha_p) ||
        bad(it.beta))
        throw ScaError(0, "iterate shape does not match the scenario");
    if (robust && (bad(it.theta_e) || bad(it.mu)))
        throw ScaError(0, "robust iterate missing theta/mu slacks");
}

}  // namespace

double iterate_objective(const IteratePoint& it) {
    double sum = 0.0;
    for (int n = 0; n < it.slots(); ++n) sum += it.r_s[n] - it.r_e[n];
    return sum / static_cast<double>(it.slots());
}

std::vector<double> SubproblemLayout::pack(const IteratePoint& it) const {
    std::vector<double> x(static_cast<std::size_t>(total_count), 0.0);
    for (int n = 0; n < N; ++n) {
        x[static_cast<std::size_t>(xu + n)] = it.traj[n].x;
        x[static_cast<std::size_t>(yu + n)] = it.traj[n].y;
        x[static_cast<std::size_t>(zu + n)] = it.traj[n].z;
        x[static_cast<std::size_t>(ps + n)] = it.p_s[n];
        x[static_cast<std::size_t>(pu + n)] = it.p_u[n];
        x[static_cast<std::size_t>(rs + n)] = it.r_s[n];
        x[static_cast<std::size_t>(re + n)] = it.r_e[n];
        x[static_cast<std::size_t>(ts + n)] = it.t_s[n];
        x[static_cast<std::size_t>(te + n)] = it.t_e[n];
        x[static_cast<std::size_t>(as_ + n)] = it.alpha_s[n];
        x[static_cast<std::size_t>(ae + n)] = it.alpha_e[n];
        x[static_cast<std::size_t>(ap + n)] = it.alpha_p[n];
        x[static_cast<std::size_t>(bt + n)] = it.beta[n];
        if (robust) {
            x[static_cast<std::size_t>(th + n)] = it.theta_e[n];
            x[static_cast<std::size_t>(mu + n)] = it.mu[n];
        }
        // Bookkeeping slacks tight at the self-expansion point.
        if (it.p_u[n] > 0.0) {
            x[static_cast<std::size_t>(u1 + n)] = it.p_u[n] / it.alpha_p[n];
            x[static_cast<std::size_t>(u2 + n)] = it.p_u[n] / it.alpha_p[n];
        }
        if (it.beta[n] > 0.0 || it.p_u[n] > 0.0) {
            x[static_cast<std::size_t>(v1 + n)] = it.p_s[n] / (it.beta[n] + 1.0);
            x[static_cast<std::size_t>(v2 + n)] = it.p_s[n] / (it.beta[n] + 1.0);
        }
    }
    return x;
}

IteratePoint SubproblemLayout::unpack(std::span<const double> x) const {
    IteratePoint it;
    it.traj.resize(static_cast<std::size_t>(N));
    auto grab = [&](int family, int n) { return x[static_cast<std::size_t>(family + n)]; };
    auto fill = [&](std::vector<double>& v, int family) {
        v.resize(static_cast<std::size_t>(N));
        for (int n = 0; n < N; ++n) v[static_cast<std::size_t>(n)] = grab(family, n);
    };
    for (int n = 0; n < N; ++n)
        it.traj[static_cast<std::size_t>(n)] = {grab(xu, n), grab(yu, n), grab(zu, n)};
    fill(it.p_s, ps);
    fill(it.p_u, pu);
    fill(it.r_s, rs);
    fill(it.r_e, re);
    fill(it.t_s, ts);
    fill(it.t_e, te);
    fill(it.alpha_s, as_);
    fill(it.alpha_e, ae);
    fill(it.alpha_p, ap);
    fill(it.beta, bt);
    if (robust) {
        fill(it.theta_e, th);
        fill(it.mu, mu);
        for (int n = 0; n < N; ++n) it.mu[n] = std::max(it.mu[n], 0.0);
    }
    // Clamp strict-positivity slacks back onto their trust floors; the solver
    // satisfies them only up to its tolerance. A pinned jamming power snaps
    // to exactly zero.
    for (int n = 0; n < N; ++n) {
        it.p_s[n] = std::max(it.p_s[n], floor_ps);
        it.p_u[n] = no_jamming ? 0.0 : std::max(it.p_u[n], floor_pu);
        it.t_s[n] = std::max(it.t_s[n], floor_ts[static_cast<std::size_t>(n)]);
        it.t_e[n] = std::max(it.t_e[n], floor_te[static_cast<std::size_t>(n)]);
        it.beta[n] = std::max(it.beta[n], floor_beta[static_cast<std::size_t>(n)]);
        it.alpha_s[n] = std::max(it.alpha_s[n], kTrustMargin);
        it.alpha_e[n] = std::max(it.alpha_e[n], kTrustMargin);
        it.alpha_p[n] = std::max(it.alpha_p[n], kTrustMargin);
    }
    return it;
}

namespace detail {

std::vector<Position3D> straight_line_trajectory(const ScenarioConfig& cfg) {
    const int N = cfg.slot_count_N;
    std::vector<Position3D> traj(static_cast<std::size_t>(N));
    for (int n = 0; n < N; ++n) {
        const double f = static_cast<double>(n + 1) / static_cast<double>(N);
        Position3D p{cfg.uav_start.x + f * (cfg.uav_end.x - cfg.uav_start.x),
                     cfg.uav_start.y + f * (cfg.uav_end.y - cfg.uav_start.y),
                     cfg.uav_start.z + f * (cfg.uav_end.z - cfg.uav_start.z)};
        p.z = std::clamp(p.z, cfg.h_min, cfg.h_max);
        traj[static_cast<std::size_t>(n)] = p;
    }
    return traj;
}

double effective_st_eve_distance(const ScenarioConfig& cfg, bool robust) {
    if (robust && cfg.eve_radius_q > 0.0)
        return worst_case_st_eve_distance(cfg.eve_pos, cfg.eve_radius_q, cfg.st_pos);
    return dist(cfg.st_pos, cfg.eve_pos);
}

// Re-tightens every slack family onto its defining equality for the given
// trajectory and powers. The result satisfies the original nonconvex
// constraints whenever (traj, p) does, and its objective value is never below
// the one reported by the subproblem solve it came from, so refreshing after
// every solve keeps the ascent monotone while removing accumulated surrogate
// slack from the next expansion point.
IteratePoint refresh_iterate(const ScenarioConfig& cfg, const SchemePins& pins, bool robust,
                             std::vector<Position3D> traj, std::vector<double> p_s,
                             std::vector<double> p_u) {
    const int N = cfg.slot_count_N;
    const bool worst_case = robust && cfg.eve_radius_q > 0.0;
    const DerivedGeometry g = derive_geometry(cfg, robust);

    IteratePoint it;
    it.traj = std::move(traj);
    it.p_s = std::move(p_s);
    it.p_u = std::move(p_u);
    it.r_s.resize(static_cast<std::size_t>(N));
    it.r_e.resize(static_cast<std::size_t>(N));
    it.t_s.resize(static_cast<std::size_t>(N));
    it.t_e.resize(static_cast<std::size_t>(N));
    it.alpha_s.resize(static_cast<std::size_t>(N));
    it.alpha_e.resize(static_cast<std::size_t>(N));
    it.alpha_p.resize(static_cast<std::size_t>(N));
    it.beta.resize(static_cast<std::size_t>(N));
    if (worst_case) {
        it.theta_e.resize(static_cast<std::size_t>(N));
        it.mu.resize(static_cast<std::size_t>(N));
    }
    for (int n = 0; n < N; ++n) {
        const Position3D& c = it.traj[n];
        it.alpha_s[n] = squared_distance(cfg.sr_pos, c);
        it.alpha_p[n] = squared_distance(cfg.pr_pos, c);
        it.alpha_e[n] = worst_case ? disk_max_squared_distance(cfg.eve_pos, cfg.eve_radius_q, c)
                                   : squared_distance(cfg.eve_pos, c);
        it.beta[n] = pins.no_jamming ? 0.0 : cfg.gamma0 * it.p_u[n] / it.alpha_e[n];
        it.t_s[n] = g.cs_gain * it.p_s[n] / (cfg.gamma0 * it.p_u[n] / it.alpha_s[n] + 1.0);
        it.t_e[n] = g.ce_gain * it.p_s[n] / (it.beta[n] + 1.0);
        it.r_s[n] = std::log2(1.0 + it.t_s[n]);
        it.r_e[n] = std::log2(1.0 + it.t_e[n]);
        if (worst_case) {
            it.theta_e[n] = squared_distance(cfg.eve_pos, c) - it.alpha_e[n];
            const double hdist = std::hypot(c.x - cfg.eve_pos.x, c.y - cfg.eve_pos.y);
            it.mu[n] = 1.0 + hdist / cfg.eve_radius_q;
        }
    }
    return it;
}

IteratePoint init_feasible_impl(const ScenarioConfig& cfg, const SchemePins& pins, bool robust) {
    const int N = cfg.slot_count_N;
    const bool worst_case = robust && cfg.eve_radius_q > 0.0;
    const DerivedGeometry g = derive_geometry(cfg, robust);

    const double segment = dist(cfg.uav_start, cfg.uav_end);
    if (segment > static_cast<double>(N) * cfg.l_max * (1.0 + 1e-12))
        throw ScaError(0, "infeasible geometry: straight segment of " + std::to_string(segment) +
                              " m exceeds N*L_max = " +
                              std::to_string(static_cast<double>(N) * cfg.l_max) + " m");
    if (cfg.space_mode == SpaceMode::TwoD &&
        std::abs(cfg.uav_start.z - cfg.uav_end.z) > 1e-9)
        throw ScaError(0, "infeasible geometry: 2D mode needs equal endpoint altitudes");
    if (worst_case && dist(cfg.eve_pos, cfg.st_pos) <= cfg.eve_radius_q)
        throw ScaError(0, "ST lies inside the Eve uncertainty disk; worst-case model invalid");

    std::vector<Position3D> traj = straight_line_trajectory(cfg);

    const double p_floor_s = kPowerFloorRel * cfg.p_s_max;
    const double p_floor_u = kPowerFloorRel * cfg.p_u_max;

    double p_u0;
    if (pins.no_jamming) {
        p_u0 = 0.0;
    } else if (pins.powers) {
        p_u0 = cfg.p_u_avg;
    } else {
        p_u0 = std::min(0.01 * cfg.p_u_max, cfg.p_u_avg);
        double inv_fd_sum = 0.0;
        for (int n = 0; n < N; ++n)
            inv_fd_sum += 1.0 / squared_distance(cfg.pr_pos, traj[static_cast<std::size_t>(n)]);
        const double per_watt = cfg.rho0 * inv_fd_sum / static_cast<double>(N);
        if (per_watt * p_u0 > 0.45 * cfg.interference_eps)
            p_u0 = 0.45 * cfg.interference_eps / per_watt;
        p_u0 = std::max(p_u0, p_floor_u);
    }

    double uav_interference = 0.0;
    for (int n = 0; n < N; ++n)
        uav_interference +=
            cfg.rho0 * p_u0 / squared_distance(cfg.pr_pos, traj[static_cast<std::size_t>(n)]);
    uav_interference /= static_cast<double>(N);

    double p_s0;
    if (pins.powers) {
        p_s0 = cfg.p_s_avg;
        const double total = g.cp_st * p_s0 + uav_interference;
        if (total > cfg.interference_eps)
            throw ScaError(0, "fixed transmit powers violate the PR interference threshold");
    } else {
        const double budget = 0.9 * cfg.interference_eps - uav_interference;
        p_s0 = std::min(cfg.p_s_avg, budget / g.cp_st);
        if (p_s0 < p_floor_s)
            throw ScaError(0, "interference budget leaves no room for a positive ST power");
    }

    IteratePoint it = refresh_iterate(cfg, pins, robust, std::move(traj),
                                      std::vector<double>(static_cast<std::size_t>(N), p_s0),
                                      std::vector<double>(static_cast<std::size_t>(N), p_u0));

    // Self-expansion audit: the starting point must satisfy its own convex
    // program, otherwise the first subproblem could be infeasible.
    Subproblem sub = build_impl(it, cfg, pins, robust);
    const double viol = max_relative_violation(sub.program, sub.layout.pack(it));
    if (viol > 1e-9)
        throw ScaError(0, "initial point fails the self-expansion audit, violation " +
                              std::to_string(viol));
    return it;
}

Subproblem build_impl(const IteratePoint& prev, const ScenarioConfig& cfg,
                      const SchemePins& pins, bool robust) {
    const int N = cfg.slot_count_N;
    const bool worst_case = robust && cfg.eve_radius_q > 0.0;
    check_iterate_shape(prev, N, worst_case);
    const DerivedGeometry g = derive_geometry(cfg, robust);

    SubproblemLayout lay;
    lay.N = N;
    lay.robust = worst_case;
    int off = 0;
    auto next_family = [&off, N]() {
        const int o = off;
        off += N;
        return o;
    };
    lay.xu = next_family();
    lay.yu = next_family();
    lay.zu = next_family();
    lay.ps = next_family();
    lay.pu = next_family();
    lay.rs = next_family();
    lay.re = next_family();
    lay.ts = next_family();
    lay.te = next_family();
    lay.as_ = next_family();
    lay.ae = next_family();
    lay.ap = next_family();
    lay.bt = next_family();
    if (worst_case) {
        lay.th = next_family();
        lay.mu = next_family();
    }
    lay.core_count = off;
    lay.u1 = next_family();
    lay.u2 = next_family();
    lay.v1 = next_family();
    lay.v2 = next_family();
    lay.total_count = off;
    lay.no_jamming = pins.no_jamming;
    lay.floor_ps = kPowerFloorRel * cfg.p_s_max;
    lay.floor_pu = pins.no_jamming ? 0.0 : kPowerFloorRel * cfg.p_u_max;
    lay.floor_ts.resize(static_cast<std::size_t>(N));
    lay.floor_te.resize(static_cast<std::size_t>(N));
    lay.floor_beta.resize(static_cast<std::size_t>(N));

    ConicProgram prog(lay.total_count);
    const double invN = 1.0 / static_cast<double>(N);
    for (int n = 0; n < N; ++n) {
        prog.set_objective_coeff(lay.var(lay.rs, n), invN);
        prog.set_objective_coeff(lay.var(lay.re, n), -invN);
    }

    // Rotated cones solve poorly when the two linear sides live on very
    // different magnitudes (no row scaling can fix an imbalance inside one
    // cone). 2 l r >= |w|^2 is invariant under l -> l/k, r -> k r, so balance
    // both sides around their values at the expansion point.
    const std::vector<double> x_prev = lay.pack(prev);
    auto add_balanced_rsoc = [&prog, &x_prev](AffineExpr l, AffineExpr r,
                                              std::vector<AffineExpr> w) {
        const double lo = std::max(std::abs(l.eval(x_prev)), 1e-14);
        const double ro = std::max(std::abs(r.eval(x_prev)), 1e-14);
        const double k = std::sqrt(lo / ro);
        prog.add(RotatedCone{(1.0 / k) * std::move(l), k * std::move(r), std::move(w)});
    };

    // Epigraph of a square, x^2 <= y, in the shifted SOC form
    // ||(sqrt(c) x, (y - c)/2)|| <= (y + c)/2. Unlike the plain rotated cone
    // this never collapses onto the cone apex when x and y go to zero
    // together (which they do in slots that shut their transmitter off), and
    // c = x0^2 balances the block at the expansion point.
    auto add_square_epigraph = [&prog](AffineExpr x, AffineExpr y, double c) {
        c = std::max(c, 1e-30);
        prog.add(SecondOrderCone{{std::sqrt(c) * std::move(x), 0.5 * (y - AffineExpr(c))},
                                 0.5 * (y + AffineExpr(c))});
    };

    auto v = [&](int family, int n) { return AffineExpr::variable(lay.var(family, n)); };
    const std::vector<Position3D> line =
        pins.trajectory ? straight_line_trajectory(cfg) : std::vector<Position3D>{};

    AffineExpr sum_ps, sum_pu, interference;
    for (int n = 0; n < N; ++n) {
        const AffineExpr X = v(lay.xu, n), Y = v(lay.yu, n), Z = v(lay.zu, n);
        const AffineExpr PS = v(lay.ps, n), PU = v(lay.pu, n);
        const AffineExpr RS = v(lay.rs, n), RE = v(lay.re, n);
        const AffineExpr TS = v(lay.ts, n), TE = v(lay.te, n);
        const AffineExpr AS = v(lay.as_, n), AE = v(lay.ae, n), AP = v(lay.ap, n);
        const AffineExpr BT = v(lay.bt, n);

        // (1a) altitude band
        prog.add_linear_ineq(Z - cfg.h_min);
        prog.add_linear_ineq(cfg.h_max - Z);
        // (1b) per-slot travel cap
        if (n == 0) {
            prog.add(SecondOrderCone{{X - cfg.uav_start.x, Y - cfg.uav_start.y,
                                      Z - cfg.uav_start.z},
                                     AffineExpr(cfg.l_max)});
        } else {
            prog.add(SecondOrderCone{{X - v(lay.xu, n - 1), Y - v(lay.yu, n - 1),
                                      Z - v(lay.zu, n - 1)},
                                     AffineExpr(cfg.l_max)});
        }
        // (1c) endpoint
        if (n == N - 1) {
            prog.add_linear_eq(X - cfg.uav_end.x);
            prog.add_linear_eq(Y - cfg.uav_end.y);
            prog.add_linear_eq(Z - cfg.uav_end.z);
        }
        if (cfg.space_mode == SpaceMode::TwoD) prog.add_linear_eq(Z - cfg.uav_start.z);
        if (pins.trajectory) {
            prog.add_linear_eq(X - line[static_cast<std::size_t>(n)].x);
            prog.add_linear_eq(Y - line[static_cast<std::size_t>(n)].y);
            prog.add_linear_eq(Z - line[static_cast<std::size_t>(n)].z);
        }

        // (5d)/(5f) peak powers, with a tiny positive floor so expansion
        // denominators stay valid.
        if (pins.powers) {
            prog.add_linear_eq(PS - cfg.p_s_avg);
            prog.add_linear_eq(PU - cfg.p_u_avg);
        } else if (pins.no_jamming) {
            prog.add_linear_eq(PU);
            prog.add_linear_ineq(PS - lay.floor_ps);
            prog.add_linear_ineq(cfg.p_s_max - PS);
        } else {
            prog.add_linear_ineq(PS - lay.floor_ps);
            prog.add_linear_ineq(cfg.p_s_max - PS);
            prog.add_linear_ineq(PU - lay.floor_pu);
            prog.add_linear_ineq(cfg.p_u_max - PU);
        }
        sum_ps += PS;
        sum_pu += PU;

        // Adaptive trust floors: always strictly below the expansion point.
        const double fts = std::min(kTrustMargin, kFloorShrink * prev.t_s[n]);
        const double fte = std::min(kTrustMargin, kFloorShrink * prev.t_e[n]);
        lay.floor_ts[static_cast<std::size_t>(n)] = fts;
        lay.floor_te[static_cast<std::size_t>(n)] = fte;
        prog.add_linear_ineq(TS - fts);
        prog.add_linear_ineq(TE - fte);
        prog.add_linear_ineq(AS - kTrustMargin);
        prog.add_linear_ineq(AP - kTrustMargin);

        // (12) log lower tangent: (a - r_s) t_s >= b
        const auto lt = surrogates::log_lower_tangent(prev.t_s[n]);
        add_balanced_rsoc(lt.a - RS, TS, {AffineExpr(std::sqrt(2.0 * lt.b))});

        // (14) bilinear surrogate of t_s (gamma0 p_u + alpha_s) <= C p_s alpha_s
        {
            const double denom0 = cfg.gamma0 * prev.p_u[n] + prev.alpha_s[n];
            const double A = prev.t_s[n] / denom0;
            const double B = denom0 / prev.t_s[n];
            const double C = g.cs_gain;
            AffineExpr den = cfg.gamma0 * PU + AS;
            prog.add(SecondOrderCone{{std::sqrt(0.5 * A) * den, std::sqrt(0.5 * B) * TS,
                                      (0.5 * std::sqrt(C)) * (PS - AS)},
                                     (0.5 * std::sqrt(C)) * (PS + AS)});
        }

        // (15) alpha_s under the linearized SR distance
        prog.add_linear_ineq(
            affine_of(surrogates::distance_first_order(cfg.sr_pos, prev.traj[n]), X, Y, Z) - AS);

        // (16d) or the S-procedure block
        if (worst_case) {
            const AffineExpr TH = v(lay.th, n), MU = v(lay.mu, n);
            for (auto& c : s_procedure_blocks(cfg.eve_pos, cfg.eve_radius_q, X, Y, Z, AE, TH, MU)) {
                if (auto* rc = std::get_if<RotatedCone>(&c))
                    add_balanced_rsoc(std::move(rc->left), std::move(rc->right),
                                      std::move(rc->norm_args));
                else
                    prog.add(std::move(c));
            }
        } else {
            add_balanced_rsoc(AE, AffineExpr(0.5),
                              {X - cfg.eve_pos.x, Y - cfg.eve_pos.y, Z - cfg.eve_pos.z});
        }

        // (18) log upper tangent
        const auto ut = surrogates::log_upper_tangent(prev.t_e[n]);
        prog.add_linear_ineq(RE - AffineExpr(ut.value - ut.slope * ut.t0) - ut.slope * TE);

        if (pins.no_jamming) {
            // beta = 0: the eavesdropper SNR bound is linear in p_s.
            prog.add_linear_ineq(TE - g.ce_gain * PS);
            prog.add_linear_eq(v(lay.bt, n));
            prog.add_linear_eq(v(lay.v1, n));
            prog.add_linear_eq(v(lay.v2, n));
            prog.add_linear_eq(v(lay.u1, n));
            prog.add_linear_eq(v(lay.u2, n));
            prog.add_linear_eq(AE - prev.alpha_e[n]);
            if (worst_case) {
                prog.add_linear_eq(v(lay.th, n) - prev.theta_e[n]);
                prog.add_linear_eq(v(lay.mu, n) - prev.mu[n]);
            }
            lay.floor_beta[static_cast<std::size_t>(n)] = 0.0;
        } else {
            const AffineExpr V1 = v(lay.v1, n), V2 = v(lay.v2, n);
            const AffineExpr U1 = v(lay.u1, n), U2 = v(lay.u2, n);

            // (19) epigraph of the quad-over-lin eavesdropper surrogate
            const double K1 = prev.p_s[n] * (prev.beta[n] + 1.0);
            const double cs = std::max(prev.p_s[n], 0.1 * cfg.p_s_max);
            add_square_epigraph(PS, K1 * V1, cs * cs);
            add_balanced_rsoc(V2, 2.0 * BT - AffineExpr(prev.beta[n] - 1.0),
                              {AffineExpr(std::sqrt(2.0 * prev.p_s[n]))});
            prog.add_linear_ineq(TE - (0.5 * g.ce_gain) * (V1 + V2));
            prog.add_linear_ineq(2.0 * BT - AffineExpr(prev.beta[n] - 1.0 + kTrustMargin));

            // (20) bilinear surrogate of alpha_e beta <= gamma0 p_u
            const double cb = prev.beta[n] / prev.alpha_e[n];
            add_balanced_rsoc(cfg.gamma0 * PU, AffineExpr(1.0),
                              {std::sqrt(cb) * AE, std::sqrt(1.0 / cb) * BT});
            const double fb = std::min(kTrustMargin, kFloorShrink * prev.beta[n]);
            lay.floor_beta[static_cast<std::size_t>(n)] = fb;
            prog.add_linear_ineq(BT - fb);
            prog.add_linear_ineq(AE - kTrustMargin);

            // (25) per-slot interference epigraphs
            const double K2 = prev.p_u[n] * prev.alpha_p[n];
            const double cu = std::max(prev.p_u[n], 0.1 * cfg.p_u_max);
            add_square_epigraph(PU, K2 * U1, cu * cu);
            add_balanced_rsoc(U2, 2.0 * AP - AffineExpr(prev.alpha_p[n]),
                              {AffineExpr(std::sqrt(2.0 * prev.p_u[n]))});
            prog.add_linear_ineq(2.0 * AP - AffineExpr(prev.alpha_p[n] + kTrustMargin));

            interference += g.cp_st * PS + (0.5 * cfg.rho0) * (U1 + U2);
        }
        if (pins.no_jamming) interference += g.cp_st * PS;

        // (32) alpha_p under the linearized PR distance
        prog.add_linear_ineq(
            affine_of(surrogates::distance_first_order(cfg.pr_pos, prev.traj[n]), X, Y, Z) - AP);
    }

    // (5c)/(5e) average powers and the interference budget
    prog.add_linear_ineq(AffineExpr(static_cast<double>(N) * cfg.p_s_avg) - sum_ps);
    prog.add_linear_ineq(AffineExpr(static_cast<double>(N) * cfg.p_u_avg) - sum_pu);
    prog.add_linear_ineq(AffineExpr(static_cast<double>(N) * cfg.interference_eps) - interference);

    return Subproblem{std::move(prog), std::move(lay)};
}

// Exact feasibility of (traj, p) for the original safe problem; used by the
// extrapolating line search, so it must not rely on any surrogate.
bool exact_point_feasible(const ScenarioConfig& cfg, const std::vector<Position3D>& traj,
                          const std::vector<double>& p_s, const std::vector<double>& p_u,
                          const SchemePins& pins) {
    const int N = cfg.slot_count_N;
    const double l2 = cfg.l_max * cfg.l_max * (1.0 + 1e-12);
    const double p_floor_s = kPowerFloorRel * cfg.p_s_max;
    const double p_floor_u = pins.no_jamming ? 0.0 : kPowerFloorRel * cfg.p_u_max;
    double sum_ps = 0.0, sum_pu = 0.0, inter = 0.0;
    const double cp_st =
        cfg.rho0 * std::pow(dist(cfg.st_pos, cfg.pr_pos), -cfg.path_loss_exp);
    for (int n = 0; n < N; ++n) {
        const Position3D& c = traj[static_cast<std::size_t>(n)];
        if (c.z < cfg.h_min || c.z > cfg.h_max) return false;
        const Position3D& prev = n == 0 ? cfg.uav_start : traj[static_cast<std::size_t>(n - 1)];
        if (squared_distance(c, prev) > l2) return false;
        if (p_s[static_cast<std::size_t>(n)] < p_floor_s ||
            p_s[static_cast<std::size_t>(n)] > cfg.p_s_max)
            return false;
        if (p_u[static_cast<std::size_t>(n)] < p_floor_u ||
            p_u[static_cast<std::size_t>(n)] > cfg.p_u_max)
            return false;
        sum_ps += p_s[static_cast<std::size_t>(n)];
        sum_pu += p_u[static_cast<std::size_t>(n)];
        inter += cp_st * p_s[static_cast<std::size_t>(n)] +
                 cfg.rho0 * p_u[static_cast<std::size_t>(n)] / squared_distance(cfg.pr_pos, c);
    }
    const double Nd = static_cast<double>(N);
    return sum_ps <= Nd * cfg.p_s_avg && sum_pu <= Nd * cfg.p_u_avg &&
           inter <= Nd * cfg.interference_eps;
}

// The bilinear surrogates advance shallow directions (notably the jamming
// power) only geometrically; an exact-objective line search along the SCA
// step with doubling extrapolation removes that tail while preserving both
// feasibility and monotone ascent.
// Noise-level gains are not worth moving the expansion point for; they sit
// below the subproblem solve accuracy and can leave it on an awkward boundary.
double gain_floor(double obj) { return std::max(1e-6 * std::abs(obj), 1e-9); }

IteratePoint extrapolate_step(const ScenarioConfig& cfg, const SchemePins& pins, bool robust,
                              const IteratePoint& cur, IteratePoint next, double& obj) {
    const int N = cfg.slot_count_N;
    double best_obj = obj;
    const IteratePoint base = next;
    IteratePoint best = std::move(next);
    std::vector<Position3D> traj(static_cast<std::size_t>(N));
    std::vector<double> p_s(static_cast<std::size_t>(N)), p_u(static_cast<std::size_t>(N));
    for (double theta = 2.0; theta <= 1048576.0; theta *= 2.0) {
        for (int n = 0; n < N; ++n) {
            const auto ns = static_cast<std::size_t>(n);
            traj[ns] = {cur.traj[ns].x + theta * (base.traj[ns].x - cur.traj[ns].x),
                        cur.traj[ns].y + theta * (base.traj[ns].y - cur.traj[ns].y),
                        cur.traj[ns].z + theta * (base.traj[ns].z - cur.traj[ns].z)};
            p_s[ns] = cur.p_s[ns] + theta * (base.p_s[ns] - cur.p_s[ns]);
            p_u[ns] = cur.p_u[ns] + theta * (base.p_u[ns] - cur.p_u[ns]);
        }
        if (!exact_point_feasible(cfg, traj, p_s, p_u, pins)) break;
        IteratePoint trial = refresh_iterate(cfg, pins, robust, traj, p_s, p_u);
        const double tobj = iterate_objective(trial);
        if (!(tobj > best_obj + gain_floor(best_obj))) break;
        best = std::move(trial);
        best_obj = tobj;
    }
    // Slots flying at the speed cap block the full-vector extrapolation at
    // once; a second powers-only pass still accelerates the power valley.
    traj = best.traj;
    for (double theta = 2.0; theta <= 1048576.0; theta *= 2.0) {
        for (int n = 0; n < N; ++n) {
            const auto ns = static_cast<std::size_t>(n);
            p_s[ns] = cur.p_s[ns] + theta * (base.p_s[ns] - cur.p_s[ns]);
            p_u[ns] = cur.p_u[ns] + theta * (base.p_u[ns] - cur.p_u[ns]);
        }
        if (!exact_point_feasible(cfg, traj, p_s, p_u, pins)) break;
        IteratePoint trial = refresh_iterate(cfg, pins, robust, traj, p_s, p_u);
        const double tobj = iterate_objective(trial);
        if (!(tobj > best_obj + gain_floor(best_obj))) break;
        best = std::move(trial);
        best_obj = tobj;
    }
    obj = best_obj;
    return best;
}

RunResult run_sca_loop(const ScenarioConfig& cfg, const SolveOptions& opts, bool robust) {
    const bool worst_case = robust && cfg.eve_radius_q > 0.0;
    const DerivedGeometry g = derive_geometry(cfg, robust);
    const int N = cfg.slot_count_N;

    RunResult res;
    res.space = cfg.space_mode;
    res.robust = robust;
    res.radius_q = robust ? cfg.eve_radius_q : 0.0;

    IteratePoint cur = init_feasible_impl(cfg, opts.pins, robust);
    res.objective_history.push_back(iterate_objective(cur));
    if (opts.record_iterates) res.iterate_history.push_back(cur);

    bool converged = false;
    int iters = 0;
    for (int i = 1; i <= opts.max_sca_iterations && !converged; ++i) {
        Subproblem sub = build_impl(cur, cfg, opts.pins, robust);
        const conic::ConicSolution sol = conic::solve(sub.program, opts.solver);
        if (sol.status != conic::SolveStatus::Optimal)
            throw ScaError(i, std::string("subproblem not optimal: ") +
                                  conic::to_string(sol.status) +
                                  ", kkt residual " + std::to_string(sol.kkt_residual));
        IteratePoint next = sub.layout.unpack(sol.primal);
        next = refresh_iterate(cfg, opts.pins, robust, std::move(next.traj), std::move(next.p_s),
                               std::move(next.p_u));
        double obj = iterate_objective(next);
        next = extrapolate_step(cfg, opts.pins, robust, cur, std::move(next), obj);
        const double prev_obj = res.objective_history.back();
        if (obj < prev_obj) {
            // The subproblem could not improve on its own warm point, so the
            // remaining ascent is below solver accuracy; keep the previous
            // iterate and stop.
            converged = true;
            break;
        }
        res.objective_history.push_back(obj);
        cur = std::move(next);
        iters = i;
        if (opts.record_iterates) res.iterate_history.push_back(cur);

        const double improvement = obj - prev_obj;
        if (std::abs(prev_obj) > 1e-12)
            converged = improvement / std::abs(prev_obj) <= cfg.eps_tol;
        else
            converged = std::abs(improvement) <= cfg.eps_tol;
    }
    res.iterations = iters;
    res.converged = converged;
    res.objective = res.objective_history.back();

    // Reporting uses exact bound expressions; ST power is zeroed in slots with
    // negative unclipped secrecy, which keeps every constraint satisfied.
    const double d_ss = dist(cfg.st_pos, cfg.sr_pos);
    const double d_se_plain = dist(cfg.st_pos, cfg.eve_pos);
    res.per_slot_rate_s.resize(static_cast<std::size_t>(N));
    res.per_slot_rate_e.resize(static_cast<std::size_t>(N));
    res.per_slot_secrecy.resize(static_cast<std::size_t>(N));
    res.uav_eve_distance.resize(static_cast<std::size_t>(N));
    auto exact_rates = [&](int n) {
        const Position3D& c = cur.traj[n];
        const double d_us = dist(cfg.sr_pos, c);
        double d_ue, d_se;
        if (worst_case) {
            d_ue = std::sqrt(disk_max_squared_distance(cfg.eve_pos, cfg.eve_radius_q, c));
            d_se = g.d_se_eff;
        } else {
            d_ue = dist(cfg.eve_pos, c);
            d_se = d_se_plain;
        }
        const double rs = secrecy_lower_bound(cur.p_s[n], cur.p_u[n], d_ss, d_us, cfg);
        const double re = eavesdropper_upper_bound(cur.p_s[n], cur.p_u[n], d_se, d_ue, cfg);
        return std::pair<double, double>(rs, re);
    };
    for (int n = 0; n < N; ++n) {
        auto [rs, re] = exact_rates(n);
        if (rs - re < 0.0) {
            cur.p_s[n] = 0.0;
            rs = 0.0;
            re = 0.0;
        }
        res.per_slot_rate_s[static_cast<std::size_t>(n)] = rs;
        res.per_slot_rate_e[static_cast<std::size_t>(n)] = re;
        res.per_slot_secrecy[static_cast<std::size_t>(n)] = std::max(0.0, rs - re);
        res.uav_eve_distance[static_cast<std::size_t>(n)] = dist(cfg.eve_pos, cur.traj[n]);
    }
    double avg = 0.0;
    for (double s : res.per_slot_secrecy) avg += s;
    res.average_secrecy = avg / static_cast<double>(N);

    audit_original_constraints(cur, cfg, opts.audit_tol, worst_case);
    res.final_point = std::move(cur);
    return res;
}

}  // namespace detail

IteratePoint init_feasible(const ScenarioConfig& cfg, const SchemePins& pins) {
    return detail::init_feasible_impl(cfg, pins, false);
}

Subproblem build_subproblem(const IteratePoint& prev, const ScenarioConfig& cfg,
                            const SchemePins& pins) {
    return detail::build_impl(prev, cfg, pins, false);
}

RunResult solve_sca(const ScenarioConfig& cfg, const SolveOptions& opts) {
    return detail::run_sca_loop(cfg, opts, false);
}

void audit_original_constraints(const IteratePoint& it, const ScenarioConfig& cfg,
                                double rel_tol, bool robust) {
    const int N = cfg.slot_count_N;
    check_iterate_shape(it, N, robust && cfg.eve_radius_q > 0.0);
    auto fail = [](const std::string& msg) { throw ScaError(-1, "feasibility audit: " + msg); };

    const double l2 = cfg.l_max * cfg.l_max;
    for (int n = 0; n < N; ++n) {
        const Position3D& c = it.traj[n];
        if (c.z < cfg.h_min - rel_tol * cfg.h_min || c.z > cfg.h_max + rel_tol * cfg.h_max)
            fail("altitude out of band at slot " + std::to_string(n));
        const Position3D& prev = n == 0 ? cfg.uav_start : it.traj[n - 1];
        if (squared_distance(c, prev) > l2 * (1.0 + rel_tol) + 1e-12)
            fail("speed cap exceeded at slot " + std::to_string(n));
        if (it.p_s[n] < -rel_tol * cfg.p_s_max || it.p_s[n] > cfg.p_s_max * (1.0 + rel_tol))
            fail("ST peak power violated at slot " + std::to_string(n));
        if (it.p_u[n] < -rel_tol * cfg.p_u_max || it.p_u[n] > cfg.p_u_max * (1.0 + rel_tol))
            fail("UAV peak power violated at slot " + std::to_string(n));
    }
    if (dist(it.traj[static_cast<std::size_t>(N - 1)], cfg.uav_end) > 1e-6)
        fail("endpoint missed by more than 1e-6 m");

    double avg_ps = 0.0, avg_pu = 0.0;
    for (int n = 0; n < N; ++n) {
        avg_ps += it.p_s[n];
        avg_pu += it.p_u[n];
    }
    avg_ps /= static_cast<double>(N);
    avg_pu /= static_cast<double>(N);
    if (avg_ps > cfg.p_s_avg * (1.0 + rel_tol)) fail("average ST power violated");
    if (avg_pu > cfg.p_u_avg * (1.0 + rel_tol)) fail("average UAV power violated");

    std::vector<double> d_up(static_cast<std::size_t>(N));
    for (int n = 0; n < N; ++n) d_up[static_cast<std::size_t>(n)] = dist(cfg.pr_pos, it.traj[n]);
    const double inter = interference_at_pr(it.p_s, it.p_u, dist(cfg.st_pos, cfg.pr_pos), d_up, cfg);
    if (inter > cfg.interference_eps * (1.0 + rel_tol)) fail("PR interference budget violated");

    if (robust && cfg.eve_radius_q > 0.0) {
        for (int n = 0; n < N; ++n) {
            const double worst =
                disk_grid_max_squared_distance(cfg.eve_pos, cfg.eve_radius_q, it.traj[n]);
            if (worst > it.alpha_e[n] * (1.0 + rel_tol))
                fail("worst-case Eve distance exceeds alpha_e at slot " + std::to_string(n));
        }
    }
}

double max_relative_violation(const conic::ConicProgram& program, std::span<const double> x) {
    using namespace conic;
    double worst = 0.0;
    auto scale_of_expr = [&](const AffineExpr& e) {
        double s = std::abs(e.constant());
        for (const auto& t : e.terms())
            s += std::abs(t.coeff * x[static_cast<std::size_t>(t.var)]);
        return std::max(1.0, s);
    };
    for (const auto& c : program.constraints()) {
        double rel = 0.0;
        if (const auto* eq = std::get_if<LinearEq>(&c)) {
            rel = std::abs(eq->expr.eval(x)) / scale_of_expr(eq->expr);
        } else if (const auto* li = std::get_if<LinearIneq>(&c)) {
            rel = std::max(0.0, -li->expr.eval(x)) / scale_of_expr(li->expr);
        } else if (const auto* soc = std::get_if<SecondOrderCone>(&c)) {
            double nn = 0.0;
            for (const auto& e : soc->norm_args) {
                const double v = e.eval(x);
                nn += v * v;
            }
            const double bound = soc->bound.eval(x);
            rel = std::max(0.0, std::sqrt(nn) - bound) /
                  std::max({1.0, std::sqrt(nn), std::abs(bound)});
        } else if (const auto* rc = std::get_if<RotatedCone>(&c)) {
            const double l = rc->left.eval(x);
            const double r = rc->right.eval(x);
            double nn = 0.0;
            for (const auto& e : rc->norm_args) {
                const double v = e.eval(x);
                nn += v * v;
            }
            const double lin = std::max(0.0, std::max(-l, -r)) /
                               std::max({1.0, std::abs(l), std::abs(r)});
            const double quad =
                std::max(0.0, nn - 2.0 * l * r) / std::max({1.0, nn, std::abs(2.0 * l * r)});
            rel = std::max(lin, quad);
        } else if (const auto* ar = std::get_if<ArrowPsd3>(&c)) {
            const double d = ar->diag.eval(x);
            const double a = ar->a.eval(x);
            const double b = ar->b.eval(x);
            const double cc = ar->corner.eval(x);
            const double lin = std::max(0.0, std::max(-d, -cc)) /
                               std::max({1.0, std::abs(d), std::abs(cc)});
            const double q = a * a + b * b;
            const double quad = std::max(0.0, q - d * cc) / std::max({1.0, q, std::abs(d * cc)});
            rel = std::max(lin, quad);
        }
        worst = std::max(worst, rel);
    }
    return worst;
}

}  // namespace uavsec
