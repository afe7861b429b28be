#include "doctest.h"

#include "btk/measure.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace btk;

namespace {

const RadialWeight& alpha_one()
{
	static const RadialWeight w = make_exponential_weight(1.0);
	return w;
}

const BasisTable& table_095()
{
	static const BasisTable bt = build_basis_table(alpha_one(), degree_for_radius(alpha_one(), 0.95), 1e-12);
	return bt;
}

double tau_alpha_one(double r)
{
	double u = 1.0 - r * r;
	return std::pow(u, 1.5) / std::sqrt(2.0 * (1.0 + r * r));
}

// int_{|z| <= R} d lambda_tau for alpha = 1 in closed form: with u = R^2 the
// integrand 4 r (1 + r^2) / (1 - r^2)^3 integrates to 2/(1-u)^2 - 2/(1-u).
double lambda_tau_mass(double R)
{
	double v = 1.0 - R * R;
	return 2.0 / (v * v) - 2.0 / v;
}

// Normalised area of D(c, rho) intersected with an annular sector, by counting
// midpoints of an n x n grid over the bounding box of the disk.
double counted_sector_area(Complex c, double rho, double r0, double r1, double t0, double dt, int n)
{
	double h = 2.0 * rho / n;
	long hits = 0;
	for (int i = 0; i < n; ++i)
		for (int j = 0; j < n; ++j)
		{
			Complex p = c + Complex(-rho + (i + 0.5) * h, -rho + (j + 0.5) * h);
			if (std::abs(p - c) >= rho)
				continue;
			double r = std::abs(p);
			if (r < r0 || r >= r1)
				continue;
			double a = std::fmod(std::arg(p) - t0, 2.0 * M_PI);
			if (a < 0.0)
				a += 2.0 * M_PI;
			hits += a < dt;
		}
	return hits * h * h / M_PI;
}

// (1/pi) int_{D(c, rho)} g(|z|) dA in polar coordinates around c.
double polar_disk_mass(const std::function<double(double)>& g, Complex c, double rho)
{
	auto ring = [&](double s) {
		const int angles = 2048;
		double sum = 0.0;
		for (int j = 0; j < angles; ++j)
			sum += g(std::abs(c + std::polar(s, 2.0 * M_PI * (j + 0.5) / angles)));
		return s * sum * 2.0 / angles;
	};
	return oracle::simpson(ring, 0.0, rho, 2000);
}

} // namespace

TEST_CASE("mu_hat of area measure is delta^2")
{
	const auto& w = alpha_one();
	double d = w.default_delta();
	auto dA = MeasureSpec::radial({});
	auto grid = MeasureSpec::area_grid(32, 48);
	for (double r : {0.0, 0.3, 0.7, 0.9, 0.99})
	{
		CHECK(mu_hat(w, dA, d, r) == doctest::Approx(d * d).epsilon(1e-10));
		CHECK(mu_hat(w, grid, d, std::polar(r, 0.3)) == doctest::Approx(d * d).epsilon(1e-10));
	}
	CHECK(dA.total_mass(w) == doctest::Approx(1.0).epsilon(1e-12));
	CHECK(grid.total_mass(w) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mu_hat of a point mass")
{
	const auto& w = alpha_one();
	double d = w.default_delta();
	Complex a(0.4, -0.2);
	auto mu = MeasureSpec::atomic({{a, 2.5}});
	std::mt19937_64 rng(7);
	std::uniform_real_distribution<double> unit(0.0, 1.0);
	for (int i = 0; i < 500; ++i)
	{
		Complex z = a + std::polar(0.06 * unit(rng), 2.0 * M_PI * unit(rng));
		double t = tau_alpha_one(std::abs(z));
		double expect = std::abs(z - a) < d * t ? 2.5 / (t * t) : 0.0;
		CHECK(mu_hat(w, mu, d, z) == doctest::Approx(expect).epsilon(1e-12));
	}
	CHECK(mu_hat(w, MeasureSpec::zero(), d, 0.5) == 0.0);
}

TEST_CASE("exact sector-disk area against grid counting")
{
	std::mt19937_64 rng(11);
	std::uniform_real_distribution<double> unit(0.0, 1.0);
	for (int k = 0; k < 12; ++k)
	{
		Complex c = std::polar(0.9 * unit(rng), 2.0 * M_PI * unit(rng));
		double rho = 0.02 + 0.3 * unit(rng);
		double r0 = 0.8 * unit(rng);
		double r1 = r0 + 0.05 + 0.3 * unit(rng);
		double t0 = 2.0 * M_PI * unit(rng);
		double dt = 0.1 + 2.0 * unit(rng);
		double exact = sector_disk_area(c, rho, r0, r1, t0, dt);
		double counted = counted_sector_area(c, rho, r0, r1, t0, dt, 3000);
		CHECK(exact == doctest::Approx(counted).epsilon(5e-3));
	}
	// disk entirely inside the sector, sector entirely inside the disk
	CHECK(sector_disk_area({0.5, 0.1}, 0.05, 0.0, 1.0, 0.0, 2.0 * M_PI) == doctest::Approx(0.0025).epsilon(1e-13));
	CHECK(sector_disk_area(0.1, 0.9, 0.2, 0.4, 0.1, 0.5) ==
	      doctest::Approx(0.12 * 0.5 / (2.0 * M_PI)).epsilon(1e-13));
	// the cells of a polar grid tile the disk
	double total = 0.0;
	for (int i = 0; i < 8; ++i)
		for (int j = 0; j < 8; ++j)
			total += sector_disk_area({0.3, 0.2}, 0.3, i / 8.0, (i + 1) / 8.0, j * M_PI / 4.0, M_PI / 4.0);
	CHECK(total == doctest::Approx(0.09).epsilon(1e-13));
}

TEST_CASE("radial disk mass against a polar oracle")
{
	const auto& w = alpha_one();
	RadialDensity dens;
	dens.beta = 2.0;
	dens.lo = 0.2;
	dens.hi = 0.7;
	dens.scale = 3.0;
	auto mu = MeasureSpec::radial(dens);
	auto g = [](double r) { return r >= 0.2 && r < 0.7 ? 3.0 * std::pow(1.0 - r * r, 2.0) : 0.0; };
	// centred disk in closed form: int 3 (1 - u)^2 du over u in [0.04, 0.25]
	CHECK(disk_mass(w, mu, 0.0, 0.5) == doctest::Approx(std::pow(0.96, 3) - std::pow(0.75, 3)).epsilon(1e-12));
	for (auto [c, rho] : {std::pair{Complex(0.5, 0.3), 0.1}, {Complex(-0.1, 0.65), 0.2}, {Complex(0.15, 0.0), 0.1}})
	{
		double ref = polar_disk_mass(g, c, rho);
		CHECK(disk_mass(w, mu, c, rho) == doctest::Approx(ref).epsilon(2e-5));
	}
}

TEST_CASE("Carleson constants and tail ladders")
{
	const auto& w = alpha_one();
	double d = w.default_delta();

	auto dA = MeasureSpec::radial({});
	auto c = carleson_constant(w, dA, d, 0.9);
	CHECK(c.constant == doctest::Approx(d * d).epsilon(1e-10));
	REQUIRE(c.ladder_r.size() == c.ladder_sup.size());
	for (double s : c.ladder_sup)
		CHECK(s == doctest::Approx(d * d).epsilon(1e-10));
	CHECK(c.ladder_r == std::vector<double>{0.0, 0.3, 0.5, 0.6, 0.7, 0.8});

	auto grid = carleson_constant(w, MeasureSpec::area_grid(16, 16), d, 0.9);
	CHECK(grid.constant == doctest::Approx(d * d).epsilon(1e-10));

	// a point mass at the origin: mu_hat(z) = 1/tau(z)^2 on |z| < delta tau(z)
	auto at0 = carleson_constant(w, MeasureSpec::atomic({{0.0, 1.0}}), d, 0.9);
	double t0 = tau_alpha_one(0.0);
	double edge = tau_alpha_one(d * t0);
	CHECK(at0.constant >= 1.0 / (t0 * t0));
	CHECK(at0.constant <= 1.0 / (edge * edge) * (1.0 + 1e-9));
	CHECK(at0.ladder_sup.front() == at0.constant);
	CHECK(at0.ladder_sup[1] == 0.0);

	// the ladder of a measure never increases
	auto atoms = MeasureSpec::atomic({{0.2, 1.0}, {Complex(0.0, 0.55), 0.3}, {Complex(-0.85, 0.1), 0.01}});
	auto ca = carleson_constant(w, atoms, d, 0.9);
	CHECK(std::is_sorted(ca.ladder_sup.rbegin(), ca.ladder_sup.rend()));
	CHECK(ca.ladder_sup.back() > 0.0);

	auto z = carleson_constant(w, MeasureSpec::zero(), d, 0.9);
	CHECK(z.constant == 0.0);
	CHECK_THROWS_AS(carleson_constant(w, dA, d, 1.0), DomainError);
}

TEST_CASE("homogeneity and monotonicity")
{
	const auto& w = alpha_one();
	double d = w.default_delta();
	RadialDensity inner;
	inner.family = RadialFamily::Indicator;
	inner.lo = 0.3;
	inner.hi = 0.6;
	RadialDensity outer = inner;
	outer.lo = 0.2;
	outer.hi = 0.7;
	auto small = MeasureSpec::radial(inner);
	auto big = MeasureSpec::radial(outer);
	std::mt19937_64 rng(3);
	std::uniform_real_distribution<double> unit(0.0, 1.0);
	for (int i = 0; i < 200; ++i)
	{
		Complex z = std::polar(0.8 * unit(rng), 2.0 * M_PI * unit(rng));
		CHECK(mu_hat(w, small.scaled(4.0), d, z) == doctest::Approx(4.0 * mu_hat(w, small, d, z)).epsilon(1e-12));
		CHECK(mu_hat(w, small, d, z) <= mu_hat(w, big, d, z) * (1.0 + 1e-12));
	}
	CHECK(carleson_constant(w, small.scaled(4.0), d, 0.9).constant ==
	      doctest::Approx(4.0 * carleson_constant(w, small, d, 0.9).constant).epsilon(1e-12));
	CHECK_THROWS_AS(small.scaled(0.0), DomainError);
	CHECK_THROWS_AS(MeasureSpec::radial({RadialFamily::Power, -1.0}), DomainError);
	CHECK_THROWS_AS(MeasureSpec::atomic({{1.0, 1.0}}), DomainError);
	CHECK_THROWS_AS(MeasureSpec::atomic({{0.1, -1.0}}), DomainError);
}

TEST_CASE("Berezin transform of area measure is one")
{
	const auto& w = alpha_one();
	const auto& bt = table_095();
	auto dA = MeasureSpec::radial({});
	BerezinEvaluator radial(w, bt, dA);
	for (double r : {0.0, 0.5, 0.9, 0.95})
		CHECK(radial(std::polar(r, 1.0)) == doctest::Approx(1.0).epsilon(1e-10));
	auto grid = MeasureSpec::area_grid(8, 8);
	CHECK(berezin_measure(w, bt, grid, Complex(0.2, 0.4)) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("Berezin transform of atoms")
{
	const auto& w = alpha_one();
	const auto& bt = table_095();
	Complex a(0.3, 0.1);
	auto mu = MeasureSpec::atomic({{a, 1.5}});
	// B(delta_a)(a) = omega(a) K(a, a)
	double self = 1.5 * std::exp(w.log_omega(a) + log_kernel_norm_sq(bt, a));
	CHECK(berezin_measure(w, bt, mu, a) == doctest::Approx(self).epsilon(1e-12));
	// B(delta_a)(z) K(z, z) / omega(a) = |K(z, a)|^2 is symmetric in (z, a)
	std::mt19937_64 rng(13);
	std::uniform_real_distribution<double> unit(0.0, 1.0);
	for (int i = 0; i < 50; ++i)
	{
		Complex z = std::polar(0.9 * unit(rng), 2.0 * M_PI * unit(rng));
		Complex b = std::polar(0.9 * unit(rng), 2.0 * M_PI * unit(rng));
		double lhs = std::log(berezin_measure(w, bt, MeasureSpec::atomic({{b, 1.0}}), z)) +
		             log_kernel_norm_sq(bt, z) - w.log_omega(b);
		double rhs = std::log(berezin_measure(w, bt, MeasureSpec::atomic({{z, 1.0}}), b)) +
		             log_kernel_norm_sq(bt, b) - w.log_omega(z);
		CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
	}
}

TEST_CASE("grid Berezin transform matches radial and brute-force references")
{
	const auto& w = alpha_one();
	const auto& bt = table_095();
	// the band [0.25, 0.5) as a grid and as an indicator density
	PolarGrid g;
	g.nr = 4;
	g.ntheta = 6;
	g.cells.assign(24, 0.0);
	for (int j = 0; j < 6; ++j)
		g.cells[6 + j] = g.cell_area(1);
	RadialDensity band;
	band.family = RadialFamily::Indicator;
	band.lo = 0.25;
	band.hi = 0.5;
	auto as_grid = MeasureSpec::grid(g);
	auto as_radial = MeasureSpec::radial(band);
	for (double r : {0.0, 0.3, 0.6})
		CHECK(berezin_measure(w, bt, as_grid, std::polar(r, 0.7)) ==
		      doctest::Approx(berezin_measure(w, bt, as_radial, r)).epsilon(1e-10));

	// one cell: |k_z(u)|^2 omega(u) integrated over [0.25, 0.5) x [pi/3, 2 pi/3)
	PolarGrid one = g;
	std::fill(one.cells.begin(), one.cells.end(), 0.0);
	one.cells[6 + 1] = 0.02;
	double dens = one.density(1, 1);
	auto cell = MeasureSpec::grid(one);
	for (Complex z : {Complex(0.0, 0.4), Complex(0.3, -0.2)})
	{
		double log_norm = log_kernel_norm_sq(bt, z);
		auto radial_part = [&](double r) {
			auto angular = [&](double t) {
				Complex u = std::polar(r, t);
				return std::exp(2.0 * kernel(bt, z, u).log_abs - log_norm + w.log_omega(u));
			};
			return r * oracle::simpson(angular, M_PI / 3.0, 2.0 * M_PI / 3.0, 400);
		};
		double ref = dens / M_PI * oracle::simpson(radial_part, 0.25, 0.5, 400);
		CHECK(berezin_measure(w, bt, cell, z) == doctest::Approx(ref).epsilon(1e-8));
	}
}

TEST_CASE("L^p(lambda_tau) integrals")
{
	const auto& w = alpha_one();
	double d = w.default_delta();
	double ps[] = {0.5, 1.0, 2.0};
	double mass = lambda_tau_mass(0.9);
	CHECK(mass == doctest::Approx(oracle::simpson_graded([](double r) {
		                                  return 2.0 * r / std::pow(tau_alpha_one(r), 2);
	                                  }, 0.0, 0.9, 20000)).epsilon(1e-9));

	auto ones = lp_lambda_tau_integrals(w, [](Complex) { return 1.0; }, ps, 0.9);
	auto ones_radial = lp_lambda_tau_integrals_radial(w, [](double) { return 1.0; }, ps, 0.9);
	for (int k = 0; k < 3; ++k)
	{
		CHECK(ones[k] == doctest::Approx(mass).epsilon(1e-6));
		CHECK(ones_radial[k] == doctest::Approx(mass).epsilon(1e-8));
	}

	auto muhat = mu_hat_lp_integrals(w, MeasureSpec::radial({}), d, ps, 0.9);
	for (int k = 0; k < 3; ++k)
		CHECK(muhat[k] == doctest::Approx(std::pow(d, 2.0 * ps[k]) * mass).epsilon(1e-7));
	auto grid_muhat = mu_hat_lp_integrals(w, MeasureSpec::area_grid(8, 8), d, ps, 0.9);
	for (int k = 0; k < 3; ++k)
		CHECK(grid_muhat[k] == doctest::Approx(muhat[k]).epsilon(1e-6));

	auto berezin = berezin_lp_integrals(w, table_095(), MeasureSpec::radial({}), ps, 0.9);
	for (int k = 0; k < 3; ++k)
		CHECK(berezin[k] == doctest::Approx(mass).epsilon(1e-8));
	CHECK_THROWS_AS(lp_lambda_tau_integrals(w, [](Complex) { return 1.0; }, std::vector<double>{0.0}, 0.9),
	                DomainError);
}

TEST_CASE("atomic mu_hat integrals against a brute-force polar sum")
{
	const auto& w = alpha_one();
	double d = w.default_delta();
	Complex a(0.5, 0.2);
	auto mu = MeasureSpec::atomic({{a, 1.0}});
	double ps[] = {0.5, 1.0, 2.0};
	auto got = mu_hat_lp_integrals(w, mu, d, ps, 0.9);

	// midpoint sum over a fine polar grid restricted to the region near the atom
	double s = std::abs(a);
	double reach = 2.0 * d * tau_alpha_one(s - 0.1);
	double th = std::arg(a);
	const int nr = 3000, nt = 3000;
	double dr = 2.0 * reach / nr;
	std::vector<double> ref(3, 0.0);
	for (int i = 0; i < nr; ++i)
	{
		double r = s - reach + (i + 0.5) * dr;
		double t = tau_alpha_one(r);
		double dth = 2.0 * reach / (r * nt);
		for (int j = 0; j < nt; ++j)
		{
			Complex z = std::polar(r, th - reach / r + (j + 0.5) * dth);
			if (std::abs(z - a) >= d * t)
				continue;
			double v = 1.0 / (t * t);
			double area = r * dr * dth / M_PI / (t * t);
			for (int k = 0; k < 3; ++k)
				ref[k] += std::pow(v, ps[k]) * area;
		}
	}
	for (int k = 0; k < 3; ++k)
		CHECK(got[k] == doctest::Approx(ref[k]).epsilon(2e-3));
}

TEST_CASE("lattice sums and the Berezin lower bound")
{
	const auto& w = alpha_one();
	double d = w.default_delta();
	auto lat = build_lattice(w, d, 0.6);
	double ps[] = {0.5, 1.0, 2.0};
	auto sums = lattice_lp_sums(w, MeasureSpec::radial({}), lat, d, ps);
	double n = static_cast<double>(lat.points.size());
	for (int k = 0; k < 3; ++k)
		CHECK(sums[k] == doctest::Approx(n * std::pow(d, 2.0 * ps[k])).epsilon(1e-9));
	CHECK(lattice_lp_sum(w, MeasureSpec::radial({}), lat, d, 2.0) == doctest::Approx(std::sqrt(n) * d * d).epsilon(1e-9));
	CHECK(lattice_lp_sums(w, MeasureSpec::zero(), lat, d, ps) == std::vector<double>(3, 0.0));

	// B mu >= c mu_hat pointwise with a constant independent of the point
	const auto& bt = table_095();
	auto mu = MeasureSpec::atomic({{Complex(0.3, 0.3), 1.0}, {Complex(-0.7, 0.2), 0.2}, {Complex(0.0, -0.85), 0.05}});
	BerezinEvaluator berezin(w, bt, mu);
	std::mt19937_64 rng(29);
	std::uniform_real_distribution<double> unit(0.0, 1.0);
	double worst = INFINITY;
	for (const Atom& at : mu.atoms())
		for (int i = 0; i < 300; ++i)
		{
			Complex z = at.point + std::polar(d * tau_alpha_one(std::abs(at.point)) * unit(rng), 2.0 * M_PI * unit(rng));
			double m = mu_hat(w, mu, d, z);
			if (m > 0.0)
				worst = std::min(worst, berezin(z) / m);
		}
	MESSAGE("min B mu / mu_hat = " << worst);
	CHECK(worst > 1e-3);
}
