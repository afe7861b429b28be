#include "btk/weight.hpp"

#include "btk/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace btk {

namespace {

constexpr double kSafety = 1.05;

std::string format_id(const char* fmt, double a, double b = 0.0, double c = 0.0)
{
	char buf[256];
	std::snprintf(buf, sizeof buf, fmt, a, b, c);
	return buf;
}

// Five-point derivative for custom weights, step scaled to the distance to the boundary.
double numeric_derivative(const std::function<double(double)>& f, double r)
{
	double h = 1e-4 * std::max(1e-3, 1.0 - r);
	if (r - 2 * h < 0.0)
		return (-3 * f(r) + 4 * f(r + h) - f(r + 2 * h)) / (2 * h);
	return (f(r - 2 * h) - 8 * f(r - h) + 8 * f(r + h) - f(r + 2 * h)) / (12 * h);
}

} // namespace

double RadialWeight::phi(double r) const
{
	switch (family_)
	{
	case WeightFamily::Exponential:
	{
		double u = (1.0 - r) * (1.0 + r);
		return 0.5 * std::pow(u, -alpha_);
	}
	case WeightFamily::DoubleExponential:
	{
		double v = 1.0 - r;
		return 0.5 * gamma_ * std::exp(beta_ * std::pow(v, -alpha_));
	}
	case WeightFamily::Custom:
		return custom_phi_(r);
	}
	return 0.0;
}

double RadialWeight::dphi(double r) const
{
	switch (family_)
	{
	case WeightFamily::Exponential:
	{
		double u = (1.0 - r) * (1.0 + r);
		return alpha_ * r * std::pow(u, -alpha_ - 1.0);
	}
	case WeightFamily::DoubleExponential:
	{
		double v = 1.0 - r;
		double x = beta_ * std::pow(v, -alpha_);
		double g = alpha_ * x / v;
		return 0.5 * gamma_ * std::exp(x) * g;
	}
	case WeightFamily::Custom:
		return numeric_derivative(custom_phi_, r);
	}
	return 0.0;
}

double RadialWeight::d2phi(double r) const
{
	switch (family_)
	{
	case WeightFamily::Exponential:
	{
		double u = (1.0 - r) * (1.0 + r);
		return alpha_ * std::pow(u, -alpha_ - 2.0) * (u + 2.0 * (alpha_ + 1.0) * r * r);
	}
	case WeightFamily::DoubleExponential:
	{
		double v = 1.0 - r;
		double x = beta_ * std::pow(v, -alpha_);
		double g = alpha_ * x / v;
		double gp = (alpha_ + 1.0) * g / v;
		return 0.5 * gamma_ * std::exp(x) * (g * g + gp);
	}
	case WeightFamily::Custom:
		return numeric_derivative([this](double s) { return dphi(s); }, r);
	}
	return 0.0;
}

double RadialWeight::laplacian_phi(double r) const
{
	switch (family_)
	{
	case WeightFamily::Exponential:
	{
		double u = (1.0 - r) * (1.0 + r);
		return 2.0 * alpha_ * std::pow(u, -alpha_ - 2.0) * (1.0 + alpha_ * r * r);
	}
	case WeightFamily::DoubleExponential:
		if (r == 0.0)
			return std::numeric_limits<double>::infinity();
		return d2phi(r) + dphi(r) / r;
	case WeightFamily::Custom:
	{
		double t = custom_tau_(r);
		return 1.0 / (t * t);
	}
	}
	return 0.0;
}

double RadialWeight::tau(double r) const
{
	switch (family_)
	{
	case WeightFamily::Exponential:
	{
		double u = (1.0 - r) * (1.0 + r);
		if (u <= 0.0)
			return 0.0;
		return std::exp(0.5 * (alpha_ + 2.0) * std::log(u) -
		                0.5 * std::log(2.0 * alpha_ * (1.0 + alpha_ * r * r)));
	}
	case WeightFamily::DoubleExponential:
	{
		if (r <= 0.0)
			return 0.0;
		double v = 1.0 - r;
		if (v <= 0.0)
			return 0.0;
		double x = beta_ * std::pow(v, -alpha_);
		double g = alpha_ * x / v;
		double gp = (alpha_ + 1.0) * g / v;
		double s = g * g + gp + g / r;
		return std::exp(-0.5 * (std::log(0.5 * gamma_) + x + std::log(s)));
	}
	case WeightFamily::Custom:
		return custom_tau_(r);
	}
	return 0.0;
}

double RadialWeight::tau_prime(double r) const
{
	switch (family_)
	{
	case WeightFamily::Exponential:
	{
		double u = (1.0 - r) * (1.0 + r);
		if (u <= 0.0)
			return 0.0;
		return -tau(r) * ((alpha_ + 2.0) * r / u + alpha_ * r / (1.0 + alpha_ * r * r));
	}
	case WeightFamily::DoubleExponential:
	{
		if (r <= 0.0)
			return std::numeric_limits<double>::infinity();
		double v = 1.0 - r;
		if (v <= 0.0)
			return 0.0;
		double x = beta_ * std::pow(v, -alpha_);
		double g = alpha_ * x / v;
		double gp = (alpha_ + 1.0) * g / v;
		double gpp = (alpha_ + 2.0) * gp / v;
		double s = g * g + gp + g / r;
		double sp = 2.0 * g * gp + gpp + gp / r - g / (r * r);
		double t = tau(r);
		if (t == 0.0)
			return 0.0;
		return -0.5 * t * (g + sp / s);
	}
	case WeightFamily::Custom:
		return numeric_derivative(custom_tau_, r);
	}
	return 0.0;
}

void RadialWeight::require_delta(double delta) const
{
	if (!(delta > 0.0 && delta < m_tau_))
	{
		char buf[160];
		std::snprintf(buf, sizeof buf, "delta = %.6g outside (0, m_tau = %.6g)", delta, m_tau_);
		throw ParameterError(buf);
	}
}

double RadialWeight::tau_sup_beyond(double r_lo) const
{
	if (env_r_.empty())
		return 0.0;
	auto it = std::upper_bound(env_r_.begin(), env_r_.end(), std::max(0.0, r_lo));
	std::size_t i = it == env_r_.begin() ? 0 : static_cast<std::size_t>(it - env_r_.begin()) - 1;
	return kSafety * env_sup_[i];
}

std::vector<double> constant_estimation_grid()
{
	std::vector<double> grid;
	const int n = 4096;
	for (int i = 0; i < n; ++i)
		grid.push_back(static_cast<double>(i) / n);
	for (int k = 1; k <= 40; ++k)
		grid.push_back(1.0 - std::ldexp(1.0, -k));
	std::sort(grid.begin(), grid.end());
	grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
	return grid;
}

void RadialWeight::finalize(bool estimate_constants)
{
	env_r_ = constant_estimation_grid();
	std::vector<double> t(env_r_.size());
	for (std::size_t i = 0; i < env_r_.size(); ++i)
		t[i] = tau(env_r_[i]);

	if (estimate_constants)
	{
		double c1 = 0.0, c2 = 0.0;
		for (std::size_t i = 0; i < env_r_.size(); ++i)
		{
			c1 = std::max(c1, t[i] / (1.0 - env_r_[i]));
			double tp = std::abs(tau_prime(env_r_[i]));
			if (std::isfinite(tp))
				c2 = std::max(c2, tp);
			if (i + 1 < env_r_.size())
				c2 = std::max(c2, std::abs(t[i + 1] - t[i]) / (env_r_[i + 1] - env_r_[i]));
		}
		c1_ = kSafety * c1;
		c2_ = kSafety * c2;
	}
	m_tau_ = std::min({1.0, 1.0 / c1_, 1.0 / c2_}) / 4.0;

	env_sup_.assign(t.size(), 0.0);
	double running = 0.0;
	for (std::size_t i = t.size(); i-- > 0;)
	{
		// the sup between grid points i and i+1 is bounded via the Lipschitz constant
		double gap = i + 1 < t.size() ? env_r_[i + 1] - env_r_[i] : 0.0;
		running = std::max(running, t[i] + 0.5 * c2_ * gap);
		env_sup_[i] = running;
	}
}

RadialWeight make_exponential_weight(double alpha)
{
	if (!(alpha > 0.0) || !std::isfinite(alpha))
		throw DomainError("exponential weight requires alpha > 0");
	RadialWeight w;
	w.family_ = WeightFamily::Exponential;
	w.alpha_ = alpha;
	w.id_ = format_id("exponential(alpha=%.17g)", alpha);
	w.finalize(true);
	return w;
}

RadialWeight make_double_exponential_weight(double alpha, double beta, double gamma)
{
	if (!(alpha > 0.0 && beta > 0.0 && gamma > 0.0) || !std::isfinite(alpha) ||
	    !std::isfinite(beta) || !std::isfinite(gamma))
		throw DomainError("double exponential weight requires alpha, beta, gamma > 0");
	RadialWeight w;
	w.family_ = WeightFamily::DoubleExponential;
	w.alpha_ = alpha;
	w.beta_ = beta;
	w.gamma_ = gamma;
	w.id_ = format_id("double_exponential(alpha=%.17g,beta=%.17g,gamma=%.17g)", alpha, beta, gamma);
	w.finalize(true);
	return w;
}

RadialWeight make_custom_weight(CustomWeightSpec spec)
{
	if (!spec.phi || !spec.tau)
		throw DomainError("custom weight needs phi and tau");
	if (!(spec.c1 > 0.0 && spec.c2 > 0.0))
		throw DomainError("custom weight needs positive c1, c2");
	RadialWeight w;
	w.family_ = WeightFamily::Custom;
	w.custom_phi_ = std::move(spec.phi);
	w.custom_tau_ = std::move(spec.tau);
	w.c1_ = spec.c1;
	w.c2_ = spec.c2;
	w.id_ = "custom(" + spec.name + ")";
	w.finalize(false);
	return w;
}

double numeric_laplacian(const RadialWeight& w, double r)
{
	double h = 1e-5 * (1.0 - r);
	double f0 = w.phi(r);
	if (r < h)
	{
		// radial symmetry: phi(-h) = phi(h), and phi'/r -> phi'' at the origin
		double fp = w.phi(r + h);
		return 2.0 * 2.0 * (fp - f0) / (h * h);
	}
	double fp = w.phi(r + h);
	double fm = w.phi(r - h);
	double d2 = (fp - 2.0 * f0 + fm) / (h * h);
	double d1 = (fp - fm) / (2.0 * h);
	return d2 + d1 / r;
}

CertificationReport certify_class_L(const RadialWeight& w, int grid_size)
{
	if (grid_size < 100)
		throw DomainError("certification grid needs at least 100 points");
	const double r_top = 1.0 - 1e-6;
	std::vector<double> grid;
	grid.reserve(grid_size + 20);
	for (int i = 0; i < grid_size; ++i)
		grid.push_back(r_top * i / (grid_size - 1));
	for (int k = 1; std::ldexp(1.0, -k) >= 1e-6; ++k)
		grid.push_back(1.0 - std::ldexp(1.0, -k));
	std::sort(grid.begin(), grid.end());
	grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

	const std::size_t n = grid.size();
	std::vector<double> t(n);
	for (std::size_t i = 0; i < n; ++i)
		t[i] = w.tau(grid[i]);

	CertificationReport rep;
	rep.grid_points = static_cast<int>(n);
	for (std::size_t i = 0; i < n; ++i)
		rep.sup_tau_over_gap = std::max(rep.sup_tau_over_gap, t[i] / (1.0 - grid[i]));
	for (std::size_t stride = 1; stride < n; stride *= 2)
		for (std::size_t i = 0; i + stride < n; ++i)
			rep.lipschitz = std::max(rep.lipschitz,
			                         std::abs(t[i + stride] - t[i]) / (grid[i + stride] - grid[i]));
	rep.condition_a = rep.sup_tau_over_gap <= w.c1();
	rep.condition_b = rep.lipschitz <= w.c2();
	rep.r_max = grid.back();
	rep.tau_at_rmax = t.back();
	rep.tau_prime_at_rmax = w.tau_prime(grid.back());

	// trend over the outer tenth of the grid
	bool decreasing = true;
	for (std::size_t i = n - n / 10; i + 1 < n; ++i)
		decreasing = decreasing && t[i + 1] < t[i];
	rep.tau_decreasing_near_boundary = decreasing;

	for (std::size_t i = 0; i < n; ++i)
	{
		double lap = numeric_laplacian(w, grid[i]);
		if (!std::isfinite(lap) || !std::isfinite(w.phi(grid[i])) || t[i] == 0.0)
		{
			++rep.identity_skipped;
			continue;
		}
		rep.identity_max_deviation = std::max(rep.identity_max_deviation, std::abs(t[i] * t[i] * lap - 1.0));
	}
	rep.m_tau = w.m_tau();
	return rep;
}

} // namespace btk
