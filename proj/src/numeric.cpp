#include "btk/numeric.hpp"

#include "btk/errors.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace btk {

namespace {

GaussRule compute_gauss_legendre(int n)
{
	GaussRule rule;
	rule.nodes.resize(n);
	rule.weights.resize(n);
	for (int i = 0; i < (n + 1) / 2; ++i)
	{
		// Tricomi initial guess, then Newton on P_n
		double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
		double dp = 0.0;
		for (int iter = 0; iter < 100; ++iter)
		{
			double p0 = 1.0, p1 = x;
			for (int k = 2; k <= n; ++k)
			{
				double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
				p0 = p1;
				p1 = p2;
			}
			double pn = n == 0 ? 1.0 : (n == 1 ? x : p1);
			double pm1 = n == 1 ? 1.0 : p0;
			dp = n * (x * pn - pm1) / (x * x - 1.0);
			double dx = pn / dp;
			x -= dx;
			if (std::abs(dx) < 1e-16)
				break;
		}
		double w = 2.0 / ((1.0 - x * x) * dp * dp);
		rule.nodes[i] = -x;
		rule.nodes[n - 1 - i] = x;
		rule.weights[i] = w;
		rule.weights[n - 1 - i] = w;
	}
	return rule;
}

} // namespace

const GaussRule& gauss_legendre(int order)
{
	static std::mutex mutex;
	static std::map<int, std::unique_ptr<GaussRule>> cache;
	std::lock_guard lock(mutex);
	auto& slot = cache[order];
	if (!slot)
		slot = std::make_unique<GaussRule>(compute_gauss_legendre(order));
	return *slot;
}

double compensated_sum(std::span<const double> xs)
{
	CompensatedSum s;
	for (double x : xs)
		s += x;
	return s.value();
}

std::string format_double(double x)
{
	if (std::isnan(x))
		return "nan";
	if (std::isinf(x))
		return x > 0 ? "inf" : "-inf";
	char buf[32];
	auto res = std::to_chars(buf, buf + sizeof buf, x);
	return std::string(buf, res.ptr);
}

double radical_inverse(std::uint64_t index, unsigned base)
{
	double inv = 1.0 / base;
	double f = inv;
	double r = 0.0;
	while (index > 0)
	{
		r += f * static_cast<double>(index % base);
		index /= base;
		f *= inv;
	}
	return r;
}

double integrate_panels(const std::function<double(double)>& f, double a, double b,
                        int panels, int order)
{
	const GaussRule& rule = gauss_legendre(order);
	double h = (b - a) / panels;
	CompensatedSum sum;
	for (int k = 0; k < panels; ++k)
	{
		double lo = a + k * h;
		double mid = lo + 0.5 * h;
		for (int i = 0; i < order; ++i)
			sum += 0.5 * h * rule.weights[i] * f(mid + 0.5 * h * rule.nodes[i]);
	}
	return sum.value();
}

double integrate_panels_smoothed(const std::function<double(double)>& f, double a, double b,
                                 int panels, int order)
{
	double half = 0.5 * (b - a);
	auto g = [&](double t) { return f(a + half * (1.0 - std::cos(t))) * half * std::sin(t); };
	return integrate_panels(g, 0.0, kPi, panels, order);
}

QuadratureResult integrate_doubling(const std::function<double(double)>& f, double a, double b,
                                    double tol, bool smoothed, int start_panels,
                                    int max_doublings, double abs_floor)
{
	if (!(b > a))
		return {0.0, 0, 0.0};
	auto eval = [&](int panels) {
		return smoothed ? integrate_panels_smoothed(f, a, b, panels)
		                : integrate_panels(f, a, b, panels);
	};
	int panels = std::max(1, start_panels);
	double prev = eval(panels);
	for (int k = 0; k < max_doublings; ++k)
	{
		panels *= 2;
		double cur = eval(panels);
		double diff = std::abs(cur - prev);
		double scale = std::max(std::abs(cur), abs_floor);
		if (diff <= tol * scale || diff == 0.0)
			return {cur, panels, scale > 0 ? diff / scale : 0.0};
		prev = cur;
	}
	throw ConvergenceError("quadrature on [" + std::to_string(a) + ", " + std::to_string(b) +
	                       "] did not converge after " + std::to_string(max_doublings) +
	                       " doublings");
}

QuadratureResult integrate_trapezoid_doubling(const std::function<double(double)>& f, double a,
                                              double b, double tol, int start_intervals,
                                              int max_doublings)
{
	if (!(b > a))
		return {0.0, 0, 0.0};
	int n = std::max(2, start_intervals);
	double h = (b - a) / n;
	CompensatedSum sum;
	sum += 0.5 * (f(a) + f(b));
	for (int i = 1; i < n; ++i)
		sum += f(a + i * h);
	double prev = h * sum.value();
	for (int k = 0; k < max_doublings; ++k)
	{
		for (int i = 0; i < n; ++i)
			sum += f(a + (i + 0.5) * h);
		n *= 2;
		h *= 0.5;
		double cur = h * sum.value();
		double diff = std::abs(cur - prev);
		if (diff <= tol * std::abs(cur) || diff == 0.0)
			return {cur, n, cur != 0.0 ? diff / std::abs(cur) : 0.0};
		prev = cur;
	}
	throw ConvergenceError("trapezoidal rule did not converge");
}

} // namespace btk
