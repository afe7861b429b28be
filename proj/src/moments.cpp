#include "btk/moments.hpp"

#include "btk/numeric.hpp"

#include <cmath>
#include <limits>

namespace btk {

namespace {

constexpr double kDrop = 45.0;

struct LogIntegrand
{
	const RadialWeight& w;
	double k;
	const LogDensity* g;

	double value(double r) const
	{
		double v = -2.0 * w.phi(r);
		if (k != 0.0)
			v += k * std::log(r);
		if (g)
			v += g->value(r);
		return std::isnan(v) ? kNegInf : v;
	}
	double d1(double r) const
	{
		if (r >= 1.0)
			return kNegInf;
		double v = -2.0 * w.dphi(r);
		if (k != 0.0)
			v += r > 0.0 ? k / r : std::numeric_limits<double>::infinity();
		if (g)
			v += g->d1(r);
		return v;
	}
	double d2(double r) const
	{
		double v = -2.0 * w.d2phi(r);
		if (k != 0.0 && r > 0.0)
			v -= k / (r * r);
		if (g)
			v += g->d2(r);
		return v;
	}
};

double locate_peak(const LogIntegrand& f, double lo, double hi, double hint)
{
	double d_lo = f.d1(lo);
	if (!(d_lo > 0.0))
		return lo;
	double d_hi = f.d1(hi);
	if (!(d_hi < 0.0))
		return hi;
	double a = lo, b = hi;
	double x = (hint > lo && hint < hi) ? hint : 0.5 * (lo + hi);
	for (int iter = 0; iter < 300; ++iter)
	{
		double d = f.d1(x);
		if (d > 0.0)
			a = x;
		else
			b = x;
		if (d == 0.0 || b - a <= 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, b))
			return x;
		double dd = f.d2(x);
		double next = x - d / dd;
		if (!(next > a && next < b) || !std::isfinite(next))
			next = 0.5 * (a + b);
		if (std::abs(next - x) <= 1e-15 * std::max(1.0, x))
			return next;
		x = next;
	}
	return x;
}

// Point beyond which the log-integrand stays below `target`, searched between
// `inner` (above target) and `outer` (the interval end).
double locate_level(const LogIntegrand& f, double inner, double outer, double target, double step)
{
	if (f.value(outer) >= target)
		return outer;
	double in = inner, out = outer;
	double x = inner + step;
	if (!((x - in) * (x - out) < 0.0) || !std::isfinite(x))
		x = 0.5 * (in + out);
	for (int iter = 0; iter < 300; ++iter)
	{
		double v = f.value(x);
		if (v >= target)
			in = x;
		else
		{
			out = x;
			if (v >= target - 15.0)
				return x;
		}
		if (std::abs(out - in) <= 1e-15 * std::max(1.0, std::abs(x)))
			return out;
		double slope = f.d1(x);
		double next = x - (v - target) / slope;
		if (!((next - in) * (next - out) < 0.0) || !std::isfinite(next))
			next = 0.5 * (in + out);
		x = next;
	}
	return out;
}

} // namespace

double log_radial_moment(const RadialWeight& w, double k, double lo, double hi, double tol,
                         const LogDensity* g, double* peak_hint)
{
	hi = std::min(hi, 1.0);
	if (!(hi > lo))
		return kNegInf;
	LogIntegrand f{w, k, g};
	double peak = locate_peak(f, lo, hi, peak_hint ? *peak_hint : -1.0);
	if (peak_hint)
		*peak_hint = peak;
	double top = f.value(peak);
	if (top == kNegInf)
		return kNegInf;

	double curv = f.d2(peak);
	double step = (curv < 0.0 && std::isfinite(curv)) ? std::sqrt(2.0 * kDrop / -curv) : 0.5 * (hi - lo);
	double target = top - kDrop;
	double a = peak > lo ? locate_level(f, peak, lo, target, -step) : lo;
	double b = peak < hi ? locate_level(f, peak, hi, target, step) : hi;

	auto integrand = [&](double r) { return std::exp(f.value(r) - top); };
	// f - top cancels terms of size |top|, which bounds the attainable accuracy
	tol = std::max(tol, 64.0 * std::numeric_limits<double>::epsilon() * std::abs(top));
	// both ends trimmed: the integrand is negligible with all its derivatives there
	if (a > lo && b < hi)
		return top + std::log(integrate_trapezoid_doubling(integrand, a, b, tol, 24).value);
	return top + std::log(integrate_doubling(integrand, a, b, tol, false, 1, 20).value);
}

} // namespace btk
