#pragma once

// Independent reference computations used by the unit tests. Nothing here
// calls into the quadrature code of the library.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace oracle {

/// Composite Simpson rule with n (even) intervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n)
{
	if (n % 2)
		++n;
	double h = (b - a) / n;
	double s = f(a) + f(b);
	for (int i = 1; i < n; ++i)
		s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
	return s * h / 3.0;
}

/// Simpson in the variable t with r = 1 - (1-t)^2 on [0, 1], clustering nodes near r = 1.
inline double simpson_graded(const std::function<double(double)>& f, double a, double b, int n)
{
	auto g = [&](double t) {
		double s = 1.0 - t;
		double r = a + (b - a) * (1.0 - s * s);
		return f(r) * (b - a) * 2.0 * s;
	};
	return simpson(g, 0.0, 1.0, n);
}

/// (1/pi) int_0^rmax int_0^2pi F(r e^{it}) r dt dr with Simpson in r and the
/// trapezoidal rule in t (exact for trigonometric polynomials of degree < angles).
inline std::complex<double> disk_integral(const std::function<std::complex<double>(std::complex<double>)>& F,
                                          double rmax, int radial, int angles)
{
	std::complex<double> total = 0.0;
	if (radial % 2)
		++radial;
	double h = rmax / radial;
	for (int i = 0; i <= radial; ++i)
	{
		double r = i * h;
		double c = (i == 0 || i == radial) ? 1.0 : (i % 2 ? 4.0 : 2.0);
		std::complex<double> ring = 0.0;
		for (int j = 0; j < angles; ++j)
			ring += F(std::polar(r, 2.0 * M_PI * j / angles));
		total += c * h / 3.0 * r * ring * (2.0 / angles);
	}
	return total;
}

} // namespace oracle
