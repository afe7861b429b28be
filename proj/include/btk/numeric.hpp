#pragma once

// Small numerical kernels shared by every module: Gauss-Legendre rules,
// compensated summation, log-space helpers and low-discrepancy sequences.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace btk {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule
{
	std::vector<double> nodes;
	std::vector<double> weights;
};

/// Rules are computed once per order and cached; the returned reference stays valid.
const GaussRule& gauss_legendre(int order);

/// Neumaier-compensated running sum.
class CompensatedSum
{
public:
	CompensatedSum& operator+=(double x)
	{
		double t = sum_ + x;
		if (std::abs(sum_) >= std::abs(x))
			comp_ += (sum_ - t) + x;
		else
			comp_ += (x - t) + sum_;
		sum_ = t;
		return *this;
	}
	double value() const { return sum_ + comp_; }

private:
	double sum_ = 0.0;
	double comp_ = 0.0;
};

double compensated_sum(std::span<const double> xs);

/// log(exp(a) + exp(b)) without overflow.
inline double log_add_exp(double a, double b)
{
	if (a == kNegInf)
		return b;
	if (b == kNegInf)
		return a;
	double m = std::max(a, b);
	return m + std::log1p(std::exp(-std::abs(a - b)));
}

/// Radical inverse of `index` in the given base (Halton component).
double radical_inverse(std::uint64_t index, unsigned base);

/// Shortest decimal text that reads back as x ("nan", "inf" for non-finite values).
std::string format_double(double x);

/// Integrate f over [a, b] with `panels` equal Gauss-Legendre panels.
double integrate_panels(const std::function<double(double)>& f, double a, double b,
                        int panels, int order = 20);

/// Same as integrate_panels after the substitution x = a + (b-a)(1-cos t)/2, which
/// removes square-root behaviour at both endpoints.
double integrate_panels_smoothed(const std::function<double(double)>& f, double a, double b,
                                 int panels, int order = 20);

struct QuadratureResult
{
	double value = 0.0;
	int panels = 0;
	double rel_change = 0.0;
};

/// Doubles the panel count until two successive estimates agree to `tol`
/// (relative, or absolute below `abs_floor`). Throws ConvergenceError after
/// `max_doublings` failures.
QuadratureResult integrate_doubling(const std::function<double(double)>& f, double a, double b,
                                    double tol, bool smoothed = false, int start_panels = 2,
                                    int max_doublings = 20, double abs_floor = 0.0);

/// Nested trapezoidal rule, halving the step until the relative change is below
/// `tol`. Converges geometrically for smooth integrands that are negligible at
/// both ends (e.g. log-concave integrands trimmed where they have decayed).
QuadratureResult integrate_trapezoid_doubling(const std::function<double(double)>& f, double a,
                                              double b, double tol, int start_intervals = 16,
                                              int max_doublings = 20);

} // namespace btk
