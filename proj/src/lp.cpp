#include "btk/measure.hpp"

#include "btk/numeric.hpp"
#include "arc.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace btk {

namespace {

using VectorField = std::function<void(double, std::vector<double>&)>;

// Integrates a vector-valued function of r over [a, b] with cosine-smoothed
// Gauss-Legendre panels, doubling until every component changes by less than
// `tol` relative (absolute below `floor`).
std::vector<double> integrate_vector(const VectorField& f, std::size_t dim, double a, double b, double tol,
                                     int start_panels = 2, int max_doublings = 14)
{
	const GaussRule& rule = gauss_legendre(20);
	double half = 0.5 * (b - a);
	std::vector<double> vals(dim);
	auto eval = [&](int panels) {
		std::vector<CompensatedSum> sums(dim);
		double h = kPi / panels;
		for (int k = 0; k < panels; ++k)
		{
			double mid = (k + 0.5) * h;
			for (std::size_t i = 0; i < rule.nodes.size(); ++i)
			{
				double t = mid + 0.5 * h * rule.nodes[i];
				double jac = half * std::sin(t) * 0.5 * h * rule.weights[i];
				f(a + half * (1.0 - std::cos(t)), vals);
				for (std::size_t d = 0; d < dim; ++d)
					sums[d] += jac * vals[d];
			}
		}
		std::vector<double> out(dim);
		for (std::size_t d = 0; d < dim; ++d)
			out[d] = sums[d].value();
		return out;
	};
	if (!(b > a))
		return std::vector<double>(dim, 0.0);
	int panels = start_panels;
	auto prev = eval(panels);
	for (int k = 0; k < max_doublings; ++k)
	{
		panels *= 2;
		auto cur = eval(panels);
		bool done = true;
		for (std::size_t d = 0; d < dim; ++d)
		{
			double diff = std::abs(cur[d] - prev[d]);
			if (diff > tol * std::abs(cur[d]) && diff != 0.0)
				done = false;
		}
		if (done)
			return cur;
		prev = std::move(cur);
	}
	throw ConvergenceError("radial quadrature on [" + std::to_string(a) + ", " + std::to_string(b) +
	                       "] did not converge");
}

std::vector<double> integrate_vector_pieces(const VectorField& f, std::size_t dim, std::vector<double> cuts,
                                            double a, double b, double tol)
{
	cuts.push_back(a);
	cuts.push_back(b);
	std::sort(cuts.begin(), cuts.end());
	std::vector<double> total(dim, 0.0);
	double prev = a;
	for (double c : cuts)
	{
		c = std::clamp(c, a, b);
		if (c - prev > 1e-14)
		{
			auto part = integrate_vector(f, dim, prev, c, tol);
			for (std::size_t d = 0; d < dim; ++d)
				total[d] += part[d];
		}
		prev = std::max(prev, c);
	}
	return total;
}

double powp(double x, double p)
{
	if (x <= 0.0)
		return 0.0;
	return p == 1.0 ? x : (p == 2.0 ? x * x : std::pow(x, p));
}

void require_ps(std::span<const double> ps)
{
	for (double p : ps)
		if (!(p > 0.0) || !std::isfinite(p))
			throw DomainError("exponents p must be positive");
}

void require_r_max(double r_max)
{
	if (!(r_max > 0.0 && r_max < 1.0))
		throw DomainError("r_max must lie in (0, 1)");
}

// Root of the increasing function f(r) - target on [0, hi], if any.
bool solve_increasing(const std::function<double(double)>& f, double target, double hi, double& root)
{
	double a = 0.0, b = hi;
	if (f(a) > target || f(b) < target)
		return false;
	for (int i = 0; i < 200 && b - a > 1e-16; ++i)
	{
		double m = 0.5 * (a + b);
		(f(m) < target ? a : b) = m;
	}
	root = 0.5 * (a + b);
	return true;
}

// Radii r where the circle {|z| = r} meets or leaves the disk D(z, delta tau(z))
// around the level radius x, i.e. r +- delta tau(r) = x.
void add_disk_breaks(const RadialWeight& w, double delta, double x, double r_max, std::vector<double>& out)
{
	double root;
	if (solve_increasing([&](double r) { return r - delta * w.tau(r); }, x, r_max, root))
		out.push_back(root);
	if (solve_increasing([&](double r) { return r + delta * w.tau(r); }, x, r_max, root))
		out.push_back(root);
}

// Angular integrals int_0^2pi mu_hat(r e^it)^p dt for an atomic measure: on the
// circle |z| = r the disk radius delta tau(r) is fixed, so mu_hat is piecewise
// constant with jumps where the circle enters or leaves the disks around atoms.
void atomic_angular(const RadialWeight& w, const MeasureSpec& mu, double delta, double r,
                    std::span<const double> ps, std::vector<double>& out)
{
	constexpr double kTwoPi = 2.0 * kPi;
	double t = w.tau(r);
	double rho = delta * t;
	double base = 0.0;
	std::vector<std::pair<double, double>> events;
	for (const Atom& a : mu.atoms())
	{
		double s = std::abs(a.point);
		if (r + s <= rho)
		{
			base += a.mass;
			continue;
		}
		if (s == 0.0 || r >= s + rho || r <= s - rho)
			continue;
		double psi = detail::circle_arc_half_angle(r, s, rho);
		double start = std::fmod(std::arg(a.point) - psi, kTwoPi);
		if (start < 0.0)
			start += kTwoPi;
		double end = start + 2.0 * psi;
		events.emplace_back(start, a.mass);
		if (end > kTwoPi)
		{
			events.emplace_back(kTwoPi, -a.mass);
			events.emplace_back(0.0, a.mass);
			events.emplace_back(end - kTwoPi, -a.mass);
		}
		else
			events.emplace_back(end, -a.mass);
	}
	std::sort(events.begin(), events.end());
	std::fill(out.begin(), out.end(), 0.0);
	double inv = 1.0 / (t * t);
	double cur = base;
	double pos = 0.0;
	auto flush = [&](double upto) {
		double len = upto - pos;
		if (len > 0.0 && cur > 0.0)
			for (std::size_t k = 0; k < ps.size(); ++k)
				out[k] += len * powp(cur * inv, ps[k]);
		pos = upto;
	};
	for (const auto& [angle, dm] : events)
	{
		flush(angle);
		cur += dm;
		if (cur < 1e-300)
			cur = std::max(cur, 0.0);
	}
	flush(kTwoPi);
}

} // namespace

std::vector<double> lp_lambda_tau_integrals(const RadialWeight& w, const std::function<double(Complex)>& field,
                                            std::span<const double> ps, double r_max, int angles, double tol)
{
	require_ps(ps);
	require_r_max(r_max);
	if (angles < 1)
		throw DomainError("need at least one angle");
	std::vector<double> fv(static_cast<std::size_t>(angles));
	VectorField f = [&](double r, std::vector<double>& out) {
		for (int j = 0; j < angles; ++j)
			fv[j] = field(std::polar(r, 2.0 * kPi * (j + 0.5) / angles));
		double t = w.tau(r);
		double jac = 2.0 * r / (t * t * angles); // (1/pi) r tau^-2 (2 pi / angles)
		for (std::size_t k = 0; k < ps.size(); ++k)
		{
			CompensatedSum s;
			for (double v : fv)
				s += powp(v, ps[k]);
			out[k] = jac * s.value();
		}
	};
	return integrate_vector(f, ps.size(), 0.0, r_max, tol, 2, 8);
}

std::vector<double> lp_lambda_tau_integrals_radial(const RadialWeight& w, const std::function<double(double)>& field,
                                                   std::span<const double> ps, double r_max,
                                                   std::vector<double> breaks, double tol)
{
	require_ps(ps);
	require_r_max(r_max);
	VectorField f = [&](double r, std::vector<double>& out) {
		double v = field(r);
		double t = w.tau(r);
		double jac = 2.0 * r / (t * t);
		for (std::size_t k = 0; k < ps.size(); ++k)
			out[k] = jac * powp(v, ps[k]);
	};
	return integrate_vector_pieces(f, ps.size(), std::move(breaks), 0.0, r_max, tol);
}

double lp_lambda_tau_norm(const RadialWeight& w, const std::function<double(Complex)>& field, double p,
                          double r_max)
{
	double ps[] = {p};
	return std::pow(lp_lambda_tau_integrals(w, field, ps, r_max)[0], 1.0 / p);
}

std::vector<double> mu_hat_lp_integrals(const RadialWeight& w, const MeasureSpec& mu, double delta,
                                        std::span<const double> ps, double r_max)
{
	w.require_delta(delta);
	require_ps(ps);
	require_r_max(r_max);
	if (mu.is_zero())
		return std::vector<double>(ps.size(), 0.0);
	switch (mu.kind())
	{
	case MeasureKind::Radial:
	{
		std::vector<double> breaks;
		for (double x : {0.0, mu.density().lo, mu.density().hi})
			add_disk_breaks(w, delta, x, r_max, breaks);
		auto field = [&](double r) { return mu_hat(w, mu, delta, r); };
		return lp_lambda_tau_integrals_radial(w, field, ps, r_max, breaks, 1e-8);
	}
	case MeasureKind::Atomic:
	{
		std::vector<double> breaks;
		for (const Atom& a : mu.atoms())
			add_disk_breaks(w, delta, std::abs(a.point), r_max, breaks);
		std::vector<double> ang(ps.size());
		VectorField f = [&](double r, std::vector<double>& out) {
			atomic_angular(w, mu, delta, r, ps, ang);
			double t = w.tau(r);
			for (std::size_t k = 0; k < ps.size(); ++k)
				out[k] = r / (kPi * t * t) * ang[k];
		};
		return integrate_vector_pieces(f, ps.size(), breaks, 0.0, r_max, 1e-8);
	}
	case MeasureKind::Grid:
	{
		auto field = [&](Complex z) { return mu_hat(w, mu, delta, z); };
		return lp_lambda_tau_integrals(w, field, ps, r_max);
	}
	}
	return {};
}

std::vector<double> berezin_lp_integrals(const RadialWeight& w, const BasisTable& bt, const MeasureSpec& mu,
                                         std::span<const double> ps, double r_max)
{
	require_ps(ps);
	require_r_max(r_max);
	if (mu.is_zero())
		return std::vector<double>(ps.size(), 0.0);
	BerezinEvaluator berezin(w, bt, mu);
	if (mu.kind() == MeasureKind::Radial)
	{
		auto field = [&](double r) { return berezin(Complex(r, 0.0)); };
		return lp_lambda_tau_integrals_radial(w, field, ps, r_max, {}, 1e-8);
	}
	auto field = [&](Complex z) { return berezin(z); };
	return lp_lambda_tau_integrals(w, field, ps, r_max);
}

std::vector<double> lattice_lp_sums(const RadialWeight& w, const MeasureSpec& mu, const Lattice& lat, double delta,
                                    std::span<const double> ps)
{
	w.require_delta(delta);
	require_ps(ps);
	std::vector<CompensatedSum> sums(ps.size());
	if (!mu.is_zero())
		for (Complex z : lat.points)
		{
			double v = mu_hat(w, mu, delta, z);
			if (v > 0.0)
				for (std::size_t k = 0; k < ps.size(); ++k)
					sums[k] += powp(v, ps[k]);
		}
	std::vector<double> out(ps.size());
	for (std::size_t k = 0; k < ps.size(); ++k)
		out[k] = sums[k].value();
	return out;
}

double lattice_lp_sum(const RadialWeight& w, const MeasureSpec& mu, const Lattice& lat, double delta, double p)
{
	double ps[] = {p};
	return std::pow(lattice_lp_sums(w, mu, lat, delta, ps)[0], 1.0 / p);
}

} // namespace btk
