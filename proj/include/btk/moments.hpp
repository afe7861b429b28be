#pragma once

#include "btk/weight.hpp"

#include <functional>

namespace btk {

/// log g for a radial density g >= 0, with first and second derivatives.
/// log g must be concave on [lo, hi] for the peak search to be exact;
/// all built-in density families satisfy this.
struct LogDensity
{
	std::function<double(double)> value;
	std::function<double(double)> d1;
	std::function<double(double)> d2;
};

/// log of  int_lo^hi r^k omega(r) g(r) dr  (g = 1 when `g` is null), evaluated
/// by locating the maximiser of the log-integrand, trimming the interval where
/// it has dropped by more than 60 nats, and doubling Gauss-Legendre panels
/// until the relative change is below `tol`.
///
/// `peak_hint`, if given, seeds the Newton search for the maximiser and receives
/// the located maximiser (successive calls with growing k can reuse it).
double log_radial_moment(const RadialWeight& w, double k, double lo, double hi, double tol,
                         const LogDensity* g = nullptr, double* peak_hint = nullptr);

} // namespace btk
