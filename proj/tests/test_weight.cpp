#include "doctest.h"

#include "btk/weight.hpp"

#include <cmath>
#include <random>

using namespace btk;

namespace {

// Fourth-order stencils for phi'' + phi'/r, independent of the closed forms.
double laplacian_five_point(const RadialWeight& w, double r)
{
	double h = 2e-3 * (1.0 - r) * std::min(1.0, r + 0.05);
	auto f = [&](double s) { return w.phi(std::abs(s)); };
	double d2 = (-f(r + 2 * h) + 16 * f(r + h) - 30 * f(r) + 16 * f(r - h) - f(r - 2 * h)) / (12 * h * h);
	if (r == 0.0)
		return 2.0 * d2;
	double d1 = (f(r - 2 * h) - 8 * f(r - h) + 8 * f(r + h) - f(r + 2 * h)) / (12 * h);
	return d2 + d1 / r;
}

} // namespace

TEST_CASE("exponential weight closed forms")
{
	auto w = make_exponential_weight(1.0);
	CHECK(std::exp(w.log_omega(0.0)) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
	CHECK(w.tau(0.0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));

	for (int i = 0; i < 1000; ++i)
	{
		double r = 0.999 * i / 999.0;
		double u = 1.0 - r * r;
		CHECK(w.tau(r) * std::pow(u, -1.5) * std::sqrt(2.0 * (1.0 + r * r)) ==
		      doctest::Approx(1.0).epsilon(1e-13));
		// numerical second differences of phi
		CHECK(w.tau(r) * w.tau(r) * laplacian_five_point(w, r) == doctest::Approx(1.0).epsilon(1e-6));
		CHECK(w.tau(r) * w.tau(r) * numeric_laplacian(w, r) == doctest::Approx(1.0).epsilon(1e-4));
	}
}

TEST_CASE("tau' matches finite differences")
{
	for (double alpha : {0.5, 1.0, 2.0})
	{
		auto w = make_exponential_weight(alpha);
		for (double r : {0.05, 0.3, 0.6, 0.9, 0.99})
		{
			double h = 1e-6 * (1 - r);
			double fd = (w.tau(r + h) - w.tau(r - h)) / (2 * h);
			CHECK(w.tau_prime(r) == doctest::Approx(fd).epsilon(1e-6));
		}
	}
	auto d = make_double_exponential_weight(1.0, 1.0, 1.0);
	for (double r : {0.05, 0.3, 0.6, 0.9})
	{
		double h = 1e-6 * (1 - r) * r;
		double fd = (d.tau(r + h) - d.tau(r - h)) / (2 * h);
		CHECK(d.tau_prime(r) == doctest::Approx(fd).epsilon(1e-5));
	}
}

TEST_CASE("double exponential weight")
{
	auto w = make_double_exponential_weight(1.0, 1.0, 1.0);
	CHECK(std::exp(w.log_omega(0.0)) == doctest::Approx(std::exp(-std::exp(1.0))).epsilon(1e-14));
	CHECK(std::exp(w.log_omega(0.0)) == doctest::Approx(0.065988).epsilon(1e-5));
	for (int i = 1; i < 1000; ++i)
	{
		double r = 0.995 * i / 999.0;
		double t = w.tau(r);
		CHECK(t * t * w.laplacian_phi(r) == doctest::Approx(1.0).epsilon(1e-12));
		if (r < 0.99)
			CHECK(t * t * numeric_laplacian(w, r) == doctest::Approx(1.0).epsilon(1e-4));
	}
	CHECK(w.tau(0.9) < w.tau(0.5));
	CHECK(w.tau(0.5) < w.tau(0.1));
	CHECK(w.m_tau() > 0.0);
}

TEST_CASE("parameter validation")
{
	CHECK_THROWS_AS(make_exponential_weight(0.0), DomainError);
	CHECK_THROWS_AS(make_exponential_weight(-1.0), DomainError);
	CHECK_THROWS_AS(make_double_exponential_weight(1.0, 0.0, 1.0), DomainError);
	CHECK_THROWS_AS(make_double_exponential_weight(1.0, 1.0, -2.0), DomainError);

	auto w = make_exponential_weight(1.0);
	CHECK(w.m_tau() == doctest::Approx(std::min({1.0, 1.0 / w.c1(), 1.0 / w.c2()}) / 4.0));
	CHECK_THROWS_AS(w.require_delta(0.0), ParameterError);
	CHECK_THROWS_AS(w.require_delta(w.m_tau()), ParameterError);
	CHECK_NOTHROW(w.require_delta(w.default_delta()));
}

TEST_CASE("class L certification")
{
	auto w = make_exponential_weight(1.0);
	auto rep = certify_class_L(w, 10000);
	CHECK(rep.condition_a);
	CHECK(rep.condition_b);
	CHECK(rep.pass());
	CHECK(w.c2() >= std::abs(w.tau_prime(0.0)));
	CHECK(w.tau_prime(0.0) == 0.0);
	CHECK(rep.tau_decreasing_near_boundary);
	CHECK(rep.identity_max_deviation < 1e-4);

	for (double alpha : {0.5, 2.0})
		CHECK(certify_class_L(make_exponential_weight(alpha), 10000).pass());

	CustomWeightSpec spec;
	spec.name = "linear";
	spec.phi = [](double r) { return r * r; };
	spec.tau = [](double r) { return 2.0 * (1.0 - r); };
	spec.c1 = 1.0;
	spec.c2 = 3.0;
	auto custom = make_custom_weight(spec);
	auto bad = certify_class_L(custom, 1000);
	CHECK_FALSE(bad.condition_a);
	CHECK(bad.sup_tau_over_gap == doctest::Approx(2.0));
	CHECK(bad.condition_b);
	CHECK_FALSE(bad.pass());

	CHECK_THROWS_AS(certify_class_L(w, 99), DomainError);
}

TEST_CASE("tau comparability on delta-disks")
{
	std::mt19937_64 rng(20240611);
	std::uniform_real_distribution<double> unit(0.0, 1.0);
	for (double alpha : {0.5, 1.0, 2.0})
	{
		auto w = make_exponential_weight(alpha);
		int violations = 0;
		for (int i = 0; i < 1000; ++i)
		{
			double delta = w.m_tau() * (0.01 + 0.98 * unit(rng));
			double ra = 0.999 * std::sqrt(unit(rng));
			Complex a = std::polar(ra, 2 * M_PI * unit(rng));
			double rho = delta * w.tau(a) * std::sqrt(unit(rng));
			Complex z = a + std::polar(rho, 2 * M_PI * unit(rng));
			double t = w.tau(z);
			if (t < 0.5 * w.tau(a) || t > 2.0 * w.tau(a))
				++violations;
		}
		CHECK(violations == 0);
	}
}

TEST_CASE("tau envelope bounds tau from above")
{
	auto w = make_exponential_weight(1.0);
	for (int i = 0; i < 2000; ++i)
	{
		double r = 0.9999 * i / 1999.0;
		CHECK(w.tau_sup_beyond(r) >= w.tau(r));
	}
}
