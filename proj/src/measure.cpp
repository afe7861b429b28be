#include "btk/measure.hpp"

#include "btk/numeric.hpp"
#include "arc.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace btk {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

// Length of the intersection of the arcs [a0, a0 + la) and [b0, b0 + lb) on the
// circle, both lengths at most 2 pi.
double arc_overlap(double a0, double la, double b0, double lb)
{
	double d = std::fmod(b0 - a0, kTwoPi);
	if (d < 0.0)
		d += kTwoPi;
	auto seg = [&](double lo) { return std::max(0.0, std::min(la, lo + lb) - std::max(0.0, lo)); };
	return seg(d) + seg(d - kTwoPi);
}

// Half-angle of the arc of the circle |z| = r lying in D(c, rho), s = |c|.
// Returns pi for a full circle and a negative value if the circle misses the disk.
double circle_half_angle(double r, double s, double rho)
{
	if (r + s <= rho)
		return kPi;
	if (r >= s + rho || r <= s - rho || s == 0.0)
		return -1.0;
	return detail::circle_arc_half_angle(r, s, rho);
}

bool angle_in(double a, double t0, double dt)
{
	if (dt >= kTwoPi)
		return true;
	double d = std::fmod(a - t0, kTwoPi);
	if (d < 0.0)
		d += kTwoPi;
	return d < dt;
}

void require_positive_finite(double x, const char* what)
{
	if (!(x > 0.0) || !std::isfinite(x))
		throw DomainError(std::string(what) + " must be positive and finite");
}

} // namespace

double PolarGrid::cell_area(int i) const
{
	double r0 = static_cast<double>(i) / nr;
	double r1 = static_cast<double>(i + 1) / nr;
	return (r1 * r1 - r0 * r0) / ntheta;
}

MeasureSpec MeasureSpec::zero()
{
	return MeasureSpec{};
}

MeasureSpec MeasureSpec::atomic(std::vector<Atom> atoms)
{
	for (const Atom& a : atoms)
	{
		if (!(std::abs(a.point) < 1.0))
			throw DomainError("atoms must lie in the open unit disk");
		require_positive_finite(a.mass, "atom mass");
	}
	MeasureSpec mu;
	mu.kind_ = MeasureKind::Atomic;
	mu.atoms_ = std::move(atoms);
	return mu;
}

MeasureSpec MeasureSpec::radial(RadialDensity density)
{
	if (!(density.lo >= 0.0 && density.lo < density.hi && density.hi <= 1.0))
		throw DomainError("radial support must satisfy 0 <= lo < hi <= 1");
	if (!(density.beta >= 0.0) || !std::isfinite(density.beta))
		throw DomainError("density exponent beta must be >= 0");
	require_positive_finite(density.scale, "density scale");
	if (density.family == RadialFamily::WeightCompensated)
	{
		if (!(density.s >= 0.0 && density.s < 1.0))
			throw DomainError("weight-compensation exponent s must lie in [0, 1)");
		if (!(density.hi < 1.0))
			throw DomainError("weight-compensated densities need a support with hi < 1");
	}
	else
	{
		density.s = 0.0;
		if (density.family == RadialFamily::Indicator)
			density.beta = 0.0;
	}
	MeasureSpec mu;
	mu.kind_ = MeasureKind::Radial;
	mu.radial_ = density;
	return mu;
}

MeasureSpec MeasureSpec::grid(PolarGrid grid)
{
	if (grid.nr < 1 || grid.ntheta < 1)
		throw DomainError("grid needs nr, ntheta >= 1");
	if (grid.cells.size() != static_cast<std::size_t>(grid.nr) * static_cast<std::size_t>(grid.ntheta))
		throw DomainError("grid needs nr * ntheta cell masses");
	for (double m : grid.cells)
		if (!(m >= 0.0) || !std::isfinite(m))
			throw DomainError("grid cell masses must be finite and >= 0");
	MeasureSpec mu;
	mu.kind_ = MeasureKind::Grid;
	mu.grid_ = std::move(grid);
	return mu;
}

MeasureSpec MeasureSpec::area_grid(int nr, int ntheta)
{
	PolarGrid g;
	g.nr = nr;
	g.ntheta = ntheta;
	if (nr < 1 || ntheta < 1)
		throw DomainError("grid needs nr, ntheta >= 1");
	g.cells.resize(static_cast<std::size_t>(nr) * static_cast<std::size_t>(ntheta));
	for (int i = 0; i < nr; ++i)
		for (int j = 0; j < ntheta; ++j)
			g.cells[i * ntheta + j] = g.cell_area(i);
	return grid(std::move(g));
}

bool MeasureSpec::is_zero() const
{
	switch (kind_)
	{
	case MeasureKind::Atomic:
		return atoms_.empty();
	case MeasureKind::Radial:
		return false;
	case MeasureKind::Grid:
		return std::all_of(grid_.cells.begin(), grid_.cells.end(), [](double m) { return m == 0.0; });
	}
	return true;
}

MeasureSpec MeasureSpec::scaled(double c) const
{
	require_positive_finite(c, "scale factor");
	MeasureSpec mu = *this;
	for (Atom& a : mu.atoms_)
		a.mass *= c;
	mu.radial_.scale *= c;
	for (double& m : mu.grid_.cells)
		m *= c;
	return mu;
}

MeasureSpec MeasureSpec::divided_by_weight(const RadialWeight& w) const
{
	MeasureSpec mu = *this;
	switch (kind_)
	{
	case MeasureKind::Atomic:
		for (Atom& a : mu.atoms_)
			a.mass *= std::exp(-w.log_omega(a.point));
		return mu;
	case MeasureKind::Radial:
		if (radial_.family == RadialFamily::Indicator)
		{
			mu.radial_.family = RadialFamily::WeightCompensated;
			mu.radial_.beta = 0.0;
		}
		else if (radial_.family == RadialFamily::Power)
			mu.radial_.family = RadialFamily::WeightCompensated;
		mu.radial_.s += 1.0;
		if (!(mu.radial_.hi < 1.0))
			throw DomainError("omega^-1 d mu is infinite unless the support stays away from the boundary");
		return mu;
	case MeasureKind::Grid:
		break;
	}
	throw DomainError("omega^-1 d mu is not available for grid measures");
}

double MeasureSpec::support_radius() const
{
	switch (kind_)
	{
	case MeasureKind::Atomic:
	{
		double r = 0.0;
		for (const Atom& a : atoms_)
			r = std::max(r, std::nextafter(std::abs(a.point), 2.0));
		return r;
	}
	case MeasureKind::Radial:
		return radial_.hi;
	case MeasureKind::Grid:
		for (int i = grid_.nr - 1; i >= 0; --i)
			for (int j = 0; j < grid_.ntheta; ++j)
				if (grid_.cells[i * grid_.ntheta + j] > 0.0)
					return static_cast<double>(i + 1) / grid_.nr;
		return 0.0;
	}
	return 1.0;
}

LogDensity MeasureSpec::log_density(const RadialWeight& w) const
{
	if (kind_ != MeasureKind::Radial)
		throw DomainError("log_density needs a radial measure");
	double beta = radial_.beta;
	double s = radial_.s;
	const RadialWeight* wp = &w;
	LogDensity g;
	g.value = [=](double r) {
		double v = 0.0;
		if (beta != 0.0)
			v += beta * std::log1p(-r * r);
		if (s != 0.0)
			v += 2.0 * s * wp->phi(r);
		return v;
	};
	g.d1 = [=](double r) {
		double v = 0.0;
		if (beta != 0.0)
			v -= beta * 2.0 * r / (1.0 - r * r);
		if (s != 0.0)
			v += 2.0 * s * wp->dphi(r);
		return v;
	};
	g.d2 = [=](double r) {
		double v = 0.0;
		if (beta != 0.0)
		{
			double u = 1.0 - r * r;
			v -= beta * 2.0 * (1.0 + r * r) / (u * u);
		}
		if (s != 0.0)
			v += 2.0 * s * wp->d2phi(r);
		return v;
	};
	return g;
}

double MeasureSpec::radial_value(const RadialWeight& w, double r) const
{
	if (r < radial_.lo || r >= radial_.hi)
		return 0.0;
	double v = radial_.scale;
	if (radial_.beta != 0.0)
		v *= std::pow(1.0 - r * r, radial_.beta);
	if (radial_.s != 0.0)
		v *= std::exp(2.0 * radial_.s * w.phi(r));
	return v;
}

double MeasureSpec::total_mass(const RadialWeight& w) const
{
	switch (kind_)
	{
	case MeasureKind::Atomic:
	{
		CompensatedSum sum;
		for (const Atom& a : atoms_)
			sum += a.mass;
		return sum.value();
	}
	case MeasureKind::Radial:
	{
		auto f = [&](double r) { return 2.0 * r * radial_value(w, r); };
		return integrate_doubling(f, radial_.lo, radial_.hi, 1e-12, true, 2).value;
	}
	case MeasureKind::Grid:
		return compensated_sum(grid_.cells);
	}
	return 0.0;
}

double sector_disk_area(Complex c, double rho, double r0, double r1, double t0, double dt)
{
	if (!(rho > 0.0) || !(r1 > r0))
		return 0.0;
	double s = std::abs(c);
	double tc = std::arg(c);
	dt = std::min(dt, kTwoPi);

	// Green's theorem: area = 1/2 (closed integral of x dy - y dx). Rays through
	// the origin contribute nothing, the two circular arcs contribute R^2/2 times
	// the angle they spend inside the disk, and the disk boundary contributes the
	// part of it inside the annular sector.
	auto arc_term = [&](double R) {
		if (R <= 0.0)
			return 0.0;
		double psi = circle_half_angle(R, s, rho);
		if (psi < 0.0)
			return 0.0;
		double inside = psi >= kPi ? dt : arc_overlap(t0, dt, tc - psi, 2.0 * psi);
		return 0.5 * R * R * inside;
	};
	double area = arc_term(r1) - arc_term(r0);

	std::vector<double> cuts = {0.0, kTwoPi};
	auto add_cut = [&](double t) {
		t = std::fmod(t, kTwoPi);
		if (t < 0.0)
			t += kTwoPi;
		cuts.push_back(t);
	};
	if (s > 0.0)
		for (double R : {r0, r1})
		{
			if (R > 0.0 && R >= std::abs(s - rho) && R <= s + rho)
			{
				double a = detail::disk_boundary_crossing(R, s, rho);
				add_cut(tc + a);
				add_cut(tc - a);
			}
		}
	if (dt < kTwoPi)
		for (double phi : {t0, t0 + dt})
		{
			double q = -std::imag(c * std::polar(1.0, -phi)) / rho;
			if (std::abs(q) <= 1.0)
			{
				double a = std::asin(q);
				add_cut(phi + a);
				add_cut(phi + kPi - a);
			}
		}
	std::sort(cuts.begin(), cuts.end());

	double cx = c.real(), cy = c.imag();
	for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
	{
		double ta = cuts[k], tb = cuts[k + 1];
		if (tb - ta <= 0.0)
			continue;
		Complex mid = c + std::polar(rho, 0.5 * (ta + tb));
		double rm = std::abs(mid);
		if (rm < r0 || rm >= r1 || !angle_in(std::arg(mid), t0, dt))
			continue;
		area += 0.5 * (rho * rho * (tb - ta) +
		               rho * (cx * (std::sin(tb) - std::sin(ta)) - cy * (std::cos(tb) - std::cos(ta))));
	}
	return std::max(area, 0.0) / kPi;
}

namespace {

double radial_disk_mass(const RadialWeight& w, const MeasureSpec& mu, double s, double rho)
{
	const RadialDensity& d = mu.density();
	double total = 0.0;
	double full_hi = std::min(d.hi, rho - s);
	if (full_hi > d.lo)
	{
		auto f = [&](double r) { return 2.0 * r * mu.radial_value(w, r); };
		total += integrate_doubling(f, d.lo, full_hi, 1e-11, false, 1).value;
	}
	if (s > 0.0)
	{
		double a = std::max(d.lo, std::abs(s - rho));
		double b = std::min(d.hi, s + rho);
		if (b > a)
		{
			auto f = [&](double r) {
				double psi = circle_half_angle(r, s, rho);
				return psi <= 0.0 ? 0.0 : (2.0 / kPi) * r * psi * mu.radial_value(w, r);
			};
			total += integrate_doubling(f, a, b, 1e-11, true, 1).value;
		}
	}
	return total;
}

double grid_disk_mass(const PolarGrid& g, Complex c, double rho)
{
	double s = std::abs(c);
	int i0 = std::max(0, static_cast<int>(std::floor((s - rho) * g.nr)));
	int i1 = std::min(g.nr - 1, static_cast<int>(std::floor((s + rho) * g.nr)));
	double dth = kTwoPi / g.ntheta;
	long j0 = 0, j1 = g.ntheta - 1;
	if (rho < s)
	{
		double half = std::asin(rho / s);
		double tc = std::arg(c);
		if (2.0 * half + dth < kTwoPi)
		{
			j0 = static_cast<long>(std::floor((tc - half) / dth));
			j1 = static_cast<long>(std::floor((tc + half) / dth));
		}
	}
	CompensatedSum sum;
	for (int i = i0; i <= i1; ++i)
	{
		double r0 = static_cast<double>(i) / g.nr, r1 = static_cast<double>(i + 1) / g.nr;
		for (long jj = j0; jj <= j1; ++jj)
		{
			int j = static_cast<int>(((jj % g.ntheta) + g.ntheta) % g.ntheta);
			double m = g.cells[i * g.ntheta + j];
			if (m == 0.0)
				continue;
			double area = sector_disk_area(c, rho, r0, r1, j * dth, dth);
			sum += m / g.cell_area(i) * area;
		}
	}
	return sum.value();
}

} // namespace

double disk_mass(const RadialWeight& w, const MeasureSpec& mu, Complex c, double rho)
{
	if (!(rho > 0.0))
		return 0.0;
	switch (mu.kind())
	{
	case MeasureKind::Atomic:
	{
		CompensatedSum sum;
		for (const Atom& a : mu.atoms())
			if (std::abs(a.point - c) < rho)
				sum += a.mass;
		return sum.value();
	}
	case MeasureKind::Radial:
		return radial_disk_mass(w, mu, std::abs(c), rho);
	case MeasureKind::Grid:
		return grid_disk_mass(mu.grid(), c, rho);
	}
	return 0.0;
}

double mu_hat(const RadialWeight& w, const MeasureSpec& mu, double delta, Complex z)
{
	w.require_delta(delta);
	if (!(std::abs(z) < 1.0))
		throw DomainError("mu_hat needs |z| < 1");
	double t = w.tau(z);
	if (!(t > 0.0))
		return 0.0;
	return disk_mass(w, mu, z, delta * t) / (t * t);
}

std::vector<double> default_tail_ladder(double r_max)
{
	std::vector<double> ladder;
	for (double r : {0.0, 0.3, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.98, 0.99})
		if (r < r_max)
			ladder.push_back(r);
	return ladder;
}

CarlesonReport carleson_constant(const RadialWeight& w, const MeasureSpec& mu, double delta, double r_max,
                                 std::vector<double> ladder)
{
	w.require_delta(delta);
	if (!(r_max > 0.0 && r_max < 1.0))
		throw DomainError("r_max must lie in (0, 1)");
	if (ladder.empty())
		ladder = default_tail_ladder(r_max);
	std::sort(ladder.begin(), ladder.end());

	CarlesonReport rep;
	rep.r_max = r_max;
	rep.ladder_r = ladder;
	rep.ladder_sup.assign(ladder.size(), 0.0);
	auto record = [&](Complex z, double v) {
		++rep.evaluations;
		if (v > rep.constant)
		{
			rep.constant = v;
			rep.argsup = z;
		}
		double r = std::abs(z);
		for (std::size_t k = 0; k < ladder.size(); ++k)
			if (r > ladder[k])
				rep.ladder_sup[k] = std::max(rep.ladder_sup[k], v);
	};
	if (mu.is_zero())
		return rep;

	switch (mu.kind())
	{
	case MeasureKind::Radial:
	{
		double r = 0.0;
		for (;;)
		{
			record(Complex(r, 0.0), mu_hat(w, mu, delta, r));
			if (r >= r_max)
				break;
			double step = std::max(delta * w.tau(r) / 8.0, 1e-9);
			r = std::min(r + step, r_max);
		}
		break;
	}
	case MeasureKind::Atomic:
	{
		// mu_hat(z) > 0 only if some atom a has |z - a| < delta tau(z), which
		// confines z to a disk of radius reach_bound(a) around a.
		constexpr int kRadial = 64, kAngular = 64, kRay = 256;
		for (const Atom& a : mu.atoms())
		{
			double reach = std::max(reach_bound(w, a.point, delta), delta * w.tau(a.point));
			auto visit = [&](Complex z) {
				if (std::abs(z) <= r_max)
					record(z, mu_hat(w, mu, delta, z));
			};
			visit(a.point);
			for (int i = 1; i <= kRadial; ++i)
				for (int j = 0; j < kAngular; ++j)
					visit(a.point + std::polar(reach * i / kRadial, kTwoPi * j / kAngular));
			// mu_hat grows as tau shrinks, so its peak sits just inside the
			// disk edge on the outward ray
			Complex dir = std::abs(a.point) > 0.0 ? a.point / std::abs(a.point) : Complex(1.0, 0.0);
			for (int i = -kRay; i <= kRay; ++i)
				visit(a.point + dir * (reach * i / kRay));
		}
		break;
	}
	case MeasureKind::Grid:
	{
		double r = 0.0;
		for (;;)
		{
			double h = std::max(0.5 * delta * w.tau(r), 1e-9);
			std::size_t n = r == 0.0 ? 1 : static_cast<std::size_t>(std::ceil(kTwoPi * r / h));
			for (std::size_t j = 0; j < n; ++j)
			{
				Complex z = std::polar(r, kTwoPi * (static_cast<double>(j) + 0.5) / static_cast<double>(n));
				record(z, mu_hat(w, mu, delta, z));
			}
			if (r >= r_max)
				break;
			r = std::min(r + h, r_max);
		}
		break;
	}
	}
	return rep;
}

} // namespace btk
