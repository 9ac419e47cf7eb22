#pragma once

#include "uavsec/scenario.hpp"

namespace uavsec::surrogates {

// Concave-minorant coefficients for log2(1 + t): a - b/t <= log2(1 + t) on
// t > 0, tight at t0. (Tangent in the 1/t variable.)
struct LogLowerTangent {
    double a = 0.0;
    double b = 0.0;
    double eval(double t) const { return a - b / t; }
};
LogLowerTangent log_lower_tangent(double t0);

// Affine majorant of log2(1 + t): value + slope * (t - t0) >= log2(1 + t)
// for t >= 0, tight at t0.
struct LogUpperTangent {
    double t0 = 0.0;
    double value = 0.0;  // log2(1 + t0)
    double slope = 0.0;  // log2(e) / (1 + t0)
    double eval(double t) const { return value + slope * (t - t0); }
};
LogUpperTangent log_upper_tangent(double t0);

// Convex majorant of the product xy on x, y >= 0:
// xy <= 0.5 (y0/x0 x^2 + x0/y0 y^2), tight at (x0, y0).
struct BilinearUpper {
    double cx = 0.0;  // y0 / x0
    double cy = 0.0;  // x0 / y0
    double eval(double x, double y) const { return 0.5 * (cx * x * x + cy * y * y); }
};
BilinearUpper bilinear_upper(double x0, double y0);

// Convex majorant of scale * p^2... / (beta + 1) around (p0, beta0):
// scale/2 * (p^2 / (p0 (beta0+1)) + p0 / (2 beta - beta0 + 1)) >= scale * p / (beta + 1)
// on the trust region 2 beta - beta0 + 1 > 0, tight at (p0, beta0).
struct QuadOverLinUpper {
    double scale = 0.0;
    double p0 = 0.0;
    double beta0 = 0.0;
    double quad_coeff = 0.0;  // scale / (2 p0 (beta0 + 1))
    double eval(double p, double beta) const {
        return quad_coeff * p * p + 0.5 * scale * p0 / (2.0 * beta - beta0 + 1.0);
    }
};
QuadOverLinUpper quad_over_lin_upper(double p0, double beta0, double scale = 1.0);

// Affine minorant of the squared distance f_d(anchor, c) around c0:
// f_d(anchor, c0) + grad . (c - c0) <= f_d(anchor, c) everywhere, tight at c0.
struct DistanceFirstOrder {
    Position3D anchor;
    Position3D c0;
    double value0 = 0.0;  // f_d(anchor, c0)
    double gx = 0.0, gy = 0.0, gz = 0.0;  // 2 (c0 - anchor)
    double eval(const Position3D& c) const {
        return value0 + gx * (c.x - c0.x) + gy * (c.y - c0.y) + gz * (c.z - c0.z);
    }
};
DistanceFirstOrder distance_first_order(const Position3D& anchor, const Position3D& c0);

// Linear side conditions keeping surrogate denominators positive around the
// expansion point.
constexpr double kTrustMargin = 1e-6;

}  // namespace uavsec::surrogates
