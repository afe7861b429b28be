#pragma once

// acos(q) from the factored forms of 1 - q and 1 + q, which stay accurate when
// q is within rounding of +-1 (thin arcs of large circles).

#include "btk/numeric.hpp"

#include <algorithm>
#include <cmath>

namespace btk::detail {

inline double acos_factored(double one_minus_q, double one_plus_q)
{
	if (one_minus_q <= 1.0)
		return 2.0 * std::asin(std::sqrt(std::clamp(0.5 * one_minus_q, 0.0, 1.0)));
	return kPi - 2.0 * std::asin(std::sqrt(std::clamp(0.5 * one_plus_q, 0.0, 1.0)));
}

/// Half-angle of the arc of the circle |z| = r inside D(c, rho), s = |c| > 0,
/// assuming |s - rho| < r < s + rho.
inline double circle_arc_half_angle(double r, double s, double rho)
{
	double den = 2.0 * r * s;
	return acos_factored((rho - r + s) * (rho + r - s) / den, (r + s - rho) * (r + s + rho) / den);
}

/// Angle a in [0, pi] with |c + rho e^(i(arg c + a))| = R, s = |c| > 0.
inline double disk_boundary_crossing(double R, double s, double rho)
{
	double den = 2.0 * s * rho;
	return acos_factored((s + rho - R) * (s + rho + R) / den, (R - s + rho) * (R + s - rho) / den);
}

} // namespace btk::detail
