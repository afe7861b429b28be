#include "btk/measure.hpp"

#include "btk/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace btk {

namespace {

constexpr double kWindowDrop = 50.0;

struct CoefficientWindow
{
	int lo = 0;
	int hi = 0;           // inclusive
	double log_norm = 0.0; // log ||K_z||^2
	double log_rho2 = 0.0; // log |z|^2
};

// Degrees n whose coefficient |v_n|^2 = |z|^(2n) / (h_n ||K_z||^2) lies within
// e^-50 of the largest one. log h_n is convex, so n log|z|^2 - log h_n is
// concave and the peak is found by bisection on its increments.
CoefficientWindow coefficient_window(const BasisTable& bt, Complex z)
{
	CoefficientWindow win;
	win.log_norm = log_kernel_norm_sq(bt, z);
	double rho = std::abs(z);
	if (rho == 0.0)
		return win;
	win.log_rho2 = 2.0 * std::log(rho);
	const auto& lh = bt.log_h;
	int a = 0, b = bt.degree_max;
	while (a < b)
	{
		int m = (a + b) / 2;
		if (win.log_rho2 - (lh[m + 1] - lh[m]) > 0.0)
			a = m + 1;
		else
			b = m;
	}
	int peak = a;
	auto term = [&](int n) { return n * win.log_rho2 - lh[n]; };
	double top = term(peak);
	int lo = peak, hi = peak;
	while (lo > 0 && term(lo - 1) > top - kWindowDrop)
		--lo;
	while (hi < bt.degree_max && term(hi + 1) > top - kWindowDrop)
		++hi;
	win.lo = lo;
	win.hi = hi;
	return win;
}

} // namespace

GridRingData grid_ring_data(const RadialWeight& w, const PolarGrid& g, int kmax, int qmax)
{
	GridRingData out;
	out.log_ring.assign(g.nr, std::vector<double>(kmax + 1, kNegInf));
	out.fourier.assign(g.nr, std::vector<Complex>(qmax + 1, 0.0));
	double dth = 2.0 * kPi / g.ntheta;
	for (int i = 0; i < g.nr; ++i)
	{
		bool empty = true;
		for (int j = 0; j < g.ntheta; ++j)
			empty = empty && g.cells[i * g.ntheta + j] == 0.0;
		if (empty)
			continue;
		double r0 = static_cast<double>(i) / g.nr, r1 = static_cast<double>(i + 1) / g.nr;
		double hint = -1.0;
		for (int k = 0; k <= kmax; ++k)
			out.log_ring[i][k] = log_radial_moment(w, k + 1.0, r0, r1, 1e-12, nullptr, &hint);
		for (int q = 0; q <= qmax; ++q)
		{
			Complex acc = 0.0;
			for (int j = 0; j < g.ntheta; ++j)
			{
				double dens = g.density(i, j);
				if (dens == 0.0)
					continue;
				Complex seg = q == 0 ? Complex(dth, 0.0)
				                     : (std::polar(1.0, q * (j + 1) * dth) - std::polar(1.0, q * j * dth)) /
				                           Complex(0.0, q);
				acc += dens * seg;
			}
			out.fourier[i][q] = acc / kPi;
		}
	}
	return out;
}

std::vector<double> radial_toeplitz_log_diagonal(const RadialWeight& w, const BasisTable& bt,
                                                 const MeasureSpec& mu, int count)
{
	if (mu.kind() != MeasureKind::Radial)
		throw DomainError("radial_toeplitz_log_diagonal needs a radial measure");
	if (count < 0 || count > bt.degree_max + 1)
		throw DomainError("diagonal length exceeds the basis table");
	const RadialDensity& d = mu.density();
	LogDensity g;
	bool plain = d.beta == 0.0 && d.s == 0.0;
	if (!plain)
		g = mu.log_density(w);
	std::vector<double> out(static_cast<std::size_t>(count));
	double hint = -1.0;
	double log_scale = std::log(d.scale);
	for (int n = 0; n < count; ++n)
	{
		double m = log_radial_moment(w, 2.0 * n + 1.0, d.lo, d.hi, 1e-12, plain ? nullptr : &g, &hint);
		out[n] = std::log(2.0) + log_scale + m - bt.log_h[n];
	}
	return out;
}

BerezinEvaluator::BerezinEvaluator(const RadialWeight& w, const BasisTable& bt, const MeasureSpec& mu)
    : w_(w), bt_(bt), mu_(mu)
{
	switch (mu.kind())
	{
	case MeasureKind::Atomic:
		for (const Atom& a : mu.atoms())
			log_omega_.push_back(w.log_omega(a.point));
		break;
	case MeasureKind::Radial:
		log_t_ = radial_toeplitz_log_diagonal(w, bt, mu, bt.degree_max + 1);
		break;
	case MeasureKind::Grid:
		rings_ = grid_ring_data(w, mu.grid(), 2 * bt.degree_max, bt.degree_max);
		break;
	}
}

double BerezinEvaluator::operator()(Complex z) const
{
	if (!(std::abs(z) < 1.0))
		throw DomainError("Berezin transform needs |z| < 1");
	if (mu_.is_zero())
		return 0.0;
	switch (mu_.kind())
	{
	case MeasureKind::Atomic:
	{
		double log_norm = log_kernel_norm_sq(bt_, z);
		CompensatedSum sum;
		for (std::size_t j = 0; j < mu_.atoms().size(); ++j)
		{
			const Atom& a = mu_.atoms()[j];
			LogComplex k = kernel(bt_, z, a.point);
			sum += a.mass * std::exp(2.0 * k.log_abs - log_norm + log_omega_[j]);
		}
		return sum.value();
	}
	case MeasureKind::Radial:
		return radial(z);
	case MeasureKind::Grid:
		return grid(z);
	}
	return 0.0;
}

double BerezinEvaluator::radial(Complex z) const
{
	CoefficientWindow win = coefficient_window(bt_, z);
	CompensatedSum sum;
	const auto& lh = bt_.log_h;
	for (int n = win.lo; n <= win.hi; ++n)
		sum += std::exp(n * win.log_rho2 - lh[n] - win.log_norm + log_t_[n]);
	return sum.value();
}

double BerezinEvaluator::grid(Complex z) const
{
	CoefficientWindow win = coefficient_window(bt_, z);
	const auto& lh = bt_.log_h;
	double theta = std::arg(z);
	CompensatedSum sum;
	for (std::size_t i = 0; i < rings_.log_ring.size(); ++i)
	{
		if (rings_.empty_band(i))
			continue;
		for (int m = win.lo; m <= win.hi; ++m)
			for (int n = win.lo; n <= win.hi; ++n)
			{
				int q = n - m;
				Complex f = rings_.coefficient(i, q);
				double mag = std::exp((m + n) * 0.5 * win.log_rho2 + rings_.log_ring[i][m + n] - lh[m] - lh[n] -
				                      win.log_norm);
				sum += mag * std::real(std::polar(1.0, -q * theta) * f);
			}
	}
	return sum.value();
}

double berezin_measure(const RadialWeight& w, const BasisTable& bt, const MeasureSpec& mu, Complex z)
{
	if (mu.is_zero())
	{
		if (!(std::abs(z) < 1.0))
			throw DomainError("Berezin transform needs |z| < 1");
		return 0.0;
	}
	if (mu.kind() == MeasureKind::Atomic)
		return BerezinEvaluator(w, bt, mu)(z);
	// build only the part of the tables the window at z needs
	int degree = std::min(bt.degree_max, coefficient_window(bt, z).hi + 1);
	BasisTable shorter = bt;
	shorter.degree_max = degree;
	shorter.log_h.resize(static_cast<std::size_t>(degree) + 1);
	try
	{
		return BerezinEvaluator(w, shorter, mu)(z);
	}
	catch (const TruncationError&)
	{
		return BerezinEvaluator(w, bt, mu)(z);
	}
}

} // namespace btk
