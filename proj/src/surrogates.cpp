#include "uavsec/surrogates.hpp"

#include <cmath>
#include <stdexcept>

#include "uavsec/channel.hpp"

namespace uavsec::surrogates {

namespace {
constexpr double kLog2E = 1.4426950408889634;  // log2(e)
}

LogLowerTangent log_lower_tangent(double t0) {
    if (!(t0 > 0.0)) throw std::invalid_argument("log_lower_tangent: t0 must be positive");
    LogLowerTangent s;
    s.a = std::log2(1.0 + t0) + kLog2E * t0 / (t0 + 1.0);
    s.b = kLog2E * t0 * t0 / (t0 + 1.0);
    return s;
}

LogUpperTangent log_upper_tangent(double t0) {
    if (!(t0 > 0.0)) throw std::invalid_argument("log_upper_tangent: t0 must be positive");
    LogUpperTangent s;
    s.t0 = t0;
    s.value = std::log2(1.0 + t0);
    s.slope = kLog2E / (1.0 + t0);
    return s;
}

BilinearUpper bilinear_upper(double x0, double y0) {
    if (!(x0 > 0.0) || !(y0 > 0.0))
        throw std::invalid_argument("bilinear_upper: expansion point must be positive");
    return BilinearUpper{y0 / x0, x0 / y0};
}

QuadOverLinUpper quad_over_lin_upper(double p0, double beta0, double scale) {
    if (!(p0 > 0.0)) throw std::invalid_argument("quad_over_lin_upper: p0 must be positive");
    if (beta0 < 0.0) throw std::invalid_argument("quad_over_lin_upper: beta0 must be >= 0");
    QuadOverLinUpper s;
    s.scale = scale;
    s.p0 = p0;
    s.beta0 = beta0;
    s.quad_coeff = scale / (2.0 * p0 * (beta0 + 1.0));
    return s;
}

DistanceFirstOrder distance_first_order(const Position3D& anchor, const Position3D& c0) {
    DistanceFirstOrder s;
    s.anchor = anchor;
    s.c0 = c0;
    s.value0 = squared_distance(anchor, c0);
    s.gx = 2.0 * (c0.x - anchor.x);
    s.gy = 2.0 * (c0.y - anchor.y);
    s.gz = 2.0 * (c0.z - anchor.z);
    return s;
}

}  // namespace uavsec::surrogates
