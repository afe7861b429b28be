#include "doctest.h"

#include "btk/toeplitz.hpp"
#include "oracles.hpp"

#include "json.hpp"

#include <Eigen/Eigenvalues>

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

const BasisTable& table()
{
	static const BasisTable bt = build_basis_table(alpha_one(), kDefaultDegreeMax, 1e-12);
	return bt;
}

double omega_alpha_one(double r) { return std::exp(-1.0 / (1.0 - r * r)); }

// 2 int_lo^hi r^(2n+1) omega g dr by Simpson
double simpson_moment(int n, double lo, double hi, const std::function<double(double)>& g, int intervals)
{
	return 2.0 * oracle::simpson([&](double r) { return std::pow(r, 2 * n + 1) * omega_alpha_one(r) * g(r); }, lo,
	                             hi, intervals);
}

double max_relative_gap(const std::vector<double>& a, const std::vector<double>& b, std::size_t count)
{
	double gap = 0.0;
	for (std::size_t i = 0; i < count; ++i)
		gap = std::max(gap, std::abs(a[i] - b[i]) / b[i]);
	return gap;
}

ToeplitzMatrix dense_matrix(int dim, std::vector<Complex> entries)
{
	ToeplitzMatrix tm;
	tm.dim = dim;
	tm.structure = MatrixStructure::Dense;
	tm.entries = std::move(entries);
	return tm;
}

} // namespace

TEST_CASE("area measure gives the identity")
{
	const auto& w = alpha_one();
	auto tm = assemble_toeplitz(w, table(), MeasureSpec::radial({}), 256);
	CHECK(tm.structure == MatrixStructure::Diagonal);
	for (int n = 0; n < 256; ++n)
		CHECK(tm.diagonal[n] == doctest::Approx(1.0).epsilon(1e-8));
	auto grid = assemble_toeplitz(w, table(), MeasureSpec::area_grid(8, 8), 48);
	double worst = 0.0;
	for (int m = 0; m < 48; ++m)
		for (int n = 0; n < 48; ++n)
			worst = std::max(worst, std::abs(grid.entry(table(), m, n) - (m == n ? 1.0 : 0.0)));
	CHECK(worst < 1e-8);
}

TEST_CASE("radial indicator diagonal against Simpson")
{
	const auto& w = alpha_one();
	RadialDensity half;
	half.family = RadialFamily::Indicator;
	half.hi = 0.5;
	auto tm = assemble_toeplitz(w, table(), MeasureSpec::radial(half), 256);
	auto one = [](double) { return 1.0; };
	for (int n = 0; n < 256; n += 15)
	{
		double ref = simpson_moment(n, 0.0, 0.5, one, 20000) / simpson_moment(n, 0.0, 1.0, one, 200000);
		CHECK(tm.diagonal[n] == doctest::Approx(ref).epsilon(1e-8));
	}
}

TEST_CASE("dense assembly of a radial measure matches the diagonal path")
{
	const auto& w = alpha_one();
	RadialDensity p;
	p.beta = 2.0;
	auto mu = MeasureSpec::radial(p);
	auto diag = assemble_toeplitz(w, table(), mu, 64);
	auto dense = assemble_dense(w, table(), mu, 64);
	double on = 0.0, off = 0.0;
	for (int m = 0; m < 64; ++m)
		for (int n = 0; n < 64; ++n)
		{
			Complex v = dense.entry(table(), m, n);
			if (m == n)
				on = std::max(on, std::abs(v - diag.diagonal[m]));
			else
				off = std::max(off, std::abs(v));
		}
	CHECK(on < 1e-8);
	CHECK(off < 1e-10);
}

TEST_CASE("point mass at the origin is rank one")
{
	const auto& w = alpha_one();
	auto tm = assemble_toeplitz(w, table(), MeasureSpec::atomic({{0.0, 2.0}}), 128);
	CHECK(tm.structure == MatrixStructure::FiniteRank);
	double expect = 2.0 * omega_alpha_one(0.0) / std::exp(table().log_h[0]);
	double ps[] = {0.5, 1.0, 2.0};
	auto rep = spectrum(tm, ps);
	REQUIRE(rep.eigenvalues.size() == 128);
	CHECK(rep.eigenvalues[0] == doctest::Approx(expect).epsilon(1e-12));
	CHECK(rep.eigenvalues[1] == 0.0);
	for (double p : ps)
		CHECK(rep.schatten.at(p).norm == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("Schatten norms of explicit spectra")
{
	std::vector<double> ones(100, 1.0);
	for (double p : {0.5, 1.0, 2.0, 3.0})
		CHECK(schatten_norm(ones, p) == doctest::Approx(std::pow(100.0, 1.0 / p)).epsilon(1e-14));
	std::vector<double> geometric;
	for (int n = 0; n < 40; ++n)
		geometric.push_back(std::ldexp(1.0, -n));
	CHECK(schatten_norm(geometric, 1.0) == doctest::Approx(2.0 * (1.0 - std::ldexp(1.0, -40))).epsilon(1e-15));
	CHECK(schatten_norm(std::vector<double>{3.0, 4.0}, 2.0) == doctest::Approx(5.0).epsilon(1e-15));
	CHECK(schatten_norm(std::vector<double>(5, 0.0), 1.0) == 0.0);
	CHECK(schatten_norm(geometric, 64.0) == doctest::Approx(1.0).epsilon(0.05));
	CHECK_THROWS_AS(schatten_norm(ones, 0.0), DomainError);

	ToeplitzMatrix tm;
	tm.dim = 40;
	tm.structure = MatrixStructure::Diagonal;
	tm.diagonal = geometric;
	std::reverse(tm.diagonal.begin(), tm.diagonal.end());
	double ps[] = {0.5, 1.0, 2.0, 4.0};
	auto rep = spectrum(tm, ps);
	CHECK(rep.eigenvalues == geometric);
	CHECK(rep.trace == doctest::Approx(tm.trace()).epsilon(1e-8));
	double prev = INFINITY;
	for (double p : ps)
	{
		CHECK(rep.schatten.at(p).norm <= prev);
		CHECK(rep.operator_norm <= rep.schatten.at(p).norm);
		prev = rep.schatten.at(p).norm;
	}
}

TEST_CASE("Jacobi eigenvalues against Eigen")
{
	std::mt19937_64 rng(41);
	std::normal_distribution<double> gauss;
	for (int n : {1, 2, 7, 60})
	{
		std::vector<Complex> a(static_cast<std::size_t>(n) * n);
		Eigen::MatrixXcd m(n, n);
		for (int i = 0; i < n; ++i)
			for (int j = i; j < n; ++j)
			{
				Complex v(gauss(rng), i == j ? 0.0 : gauss(rng));
				a[i * n + j] = v;
				a[j * n + i] = std::conj(v);
				m(i, j) = v;
				m(j, i) = std::conj(v);
			}
		Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
		std::vector<double> ref(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
		std::sort(ref.begin(), ref.end(), std::greater<>());
		int sweeps = 0;
		auto got = hermitian_eigenvalues(a, n, &sweeps);
		double scale = std::abs(ref.front()) + std::abs(ref.back());
		for (int i = 0; i < n; ++i)
			CHECK(got[i] == doctest::Approx(ref[i]).scale(scale).epsilon(1e-12));
		CHECK(sweeps <= 100);
	}
	CHECK(hermitian_eigenvalues(std::vector<Complex>(9, 0.0), 3) == std::vector<double>(3, 0.0));
	CHECK_THROWS_AS(hermitian_eigenvalues(std::vector<Complex>(5), 2), DomainError);
}

TEST_CASE("clipping and PSD violations")
{
	auto tiny = dense_matrix(2, {1.0, 0.0, 0.0, -1e-12});
	auto rep = spectrum(tiny);
	CHECK(rep.eigenvalues == std::vector<double>{1.0, 0.0});
	CHECK(rep.clipped == doctest::Approx(1e-12));
	CHECK_THROWS_AS(spectrum(dense_matrix(2, {1.0, 0.0, 0.0, -1e-3})), PsdViolation);
}

TEST_CASE("finite-rank spectrum against truncated dense spectra")
{
	const auto& w = alpha_one();
	for (double radius : {0.7, 0.93})
	{
		auto mu = MeasureSpec::atomic({{std::polar(radius, 0.4), 1.0},
		                               {std::polar(0.6 * radius, 2.0), 0.5},
		                               {std::polar(radius, -2.2), 2.0},
		                               {0.0, 0.3}});
		auto exact = spectrum(assemble_toeplitz(w, table(), mu, 512));
		double previous = INFINITY;
		for (int d : {128, 256, 512})
		{
			auto truncated = spectrum(assemble_dense(w, table(), mu, d));
			double gap = max_relative_gap(truncated.eigenvalues, exact.eigenvalues, 4);
			MESSAGE("|z| = " << radius << ", dim " << d << ": relative gap " << gap);
			// non-increasing once the rounding floor is reached
			CHECK(gap <= std::max(previous, 1e-12));
			previous = gap;
		}
		if (radius <= 0.7)
			CHECK(previous <= 1e-4);
	}
}

TEST_CASE("dense assembly is additive over atoms")
{
	const auto& w = alpha_one();
	Atom a{{0.3, 0.2}, 1.0}, b{{-0.5, 0.1}, 0.25}, c{{0.0, -0.6}, 3.0};
	auto both = assemble_dense(w, table(), MeasureSpec::atomic({a, b, c}), 64);
	auto first = assemble_dense(w, table(), MeasureSpec::atomic({a, b}), 64);
	auto second = assemble_dense(w, table(), MeasureSpec::atomic({c}), 64);
	std::size_t mismatches = 0;
	for (std::size_t i = 0; i < both.entries.size(); ++i)
		mismatches += both.entries[i] != first.entries[i] + second.entries[i];
	CHECK(mismatches == 0);
}

TEST_CASE("operator Berezin transform")
{
	const auto& w = alpha_one();
	const auto& bt = table();
	auto identity = assemble_toeplitz(w, bt, MeasureSpec::radial({}), 512);
	for (double r : {0.0, 0.5, 0.9})
		CHECK(berezin_operator(bt, identity, std::polar(r, 2.0)) == doctest::Approx(1.0).epsilon(1e-8));
	CHECK(berezin_operator(bt, dense_matrix(8, std::vector<Complex>(64, 0.0)), 0.1) == 0.0);
	CHECK_THROWS_AS(berezin_operator(bt, assemble_toeplitz(w, bt, MeasureSpec::radial({}), 16), 0.9),
	                TruncationError);

	auto mu = MeasureSpec::atomic({{Complex(0.4, 0.3), 1.0}, {Complex(-0.6, 0.1), 0.2}, {Complex(0.1, -0.7), 0.7}});
	auto finite = assemble_toeplitz(w, bt, mu, 512);
	auto dense = assemble_dense(w, bt, mu, 512);
	double top = spectrum(finite).operator_norm;
	std::mt19937_64 rng(8);
	std::uniform_real_distribution<double> unit(0.0, 1.0);
	for (int i = 0; i < 50; ++i)
	{
		Complex z = std::polar(0.7 * std::sqrt(unit(rng)), 2.0 * M_PI * unit(rng));
		double direct = berezin_measure(w, bt, mu, z);
		CHECK(berezin_operator(bt, finite, z) == doctest::Approx(direct).epsilon(1e-8));
		CHECK(berezin_operator(bt, dense, z) == doctest::Approx(direct).epsilon(1e-8));
		CHECK(direct <= top * (1.0 + 1e-12));
	}

	PolarGrid g;
	g.nr = 4;
	g.ntheta = 4;
	g.cells = {0, 0, 0, 0, 0.01, 0, 0.02, 0, 0, 0, 0, 0.005, 0, 0, 0, 0};
	auto grid = MeasureSpec::grid(g);
	auto gm = assemble_toeplitz(w, bt, grid, 256);
	for (Complex z : {Complex(0.2, 0.1), Complex(-0.3, 0.5)})
		CHECK(berezin_operator(bt, gm, z) == doctest::Approx(berezin_measure(w, bt, grid, z)).epsilon(1e-8));
}

TEST_CASE("truncated trace identity for a radial measure")
{
	const auto& w = alpha_one();
	RadialDensity p;
	p.beta = 1.0;
	p.hi = 0.8;
	auto tm = assemble_toeplitz(w, table(), MeasureSpec::radial(p), 32);
	// int sum_{n < 32} |e_n|^2 omega d mu = 2 int sum_n r^(2n+1) / h_n omega (1 - r^2) dr
	std::vector<double> h;
	for (int n = 0; n < 32; ++n)
		h.push_back(simpson_moment(n, 0.0, 1.0, [](double) { return 1.0; }, 100000));
	double ref = 2.0 * oracle::simpson(
	                       [&](double r) {
		                       double s = 0.0;
		                       for (int n = 0; n < 32; ++n)
			                       s += std::pow(r, 2 * n + 1) / h[n];
		                       return s * omega_alpha_one(r) * (1.0 - r * r);
	                       },
	                       0.0, 0.8, 20000);
	CHECK(tm.trace() == doctest::Approx(ref).epsilon(1e-6));
	CHECK(spectrum(tm).trace == doctest::Approx(tm.trace()).epsilon(1e-8));
}

TEST_CASE("spectrum report serialisation")
{
	const auto& w = alpha_one();
	RadialDensity p;
	p.beta = 3.0;
	double ps[] = {0.5, 1.0, 2.0};
	auto rep = spectrum(assemble_toeplitz(w, table(), MeasureSpec::radial(p), 64), ps);
	auto j = nlohmann::json::parse(spectrum_json(rep));
	CHECK(j["structure"] == "diagonal");
	CHECK(j["dim"] == 64);
	CHECK(j["eigenvalues"].size() == 64);
	CHECK(j["schatten_norms"]["0.5"]["norm"].get<double>() == rep.schatten.at(0.5).norm);
	CHECK(j["schatten_norms"].contains("1"));
	CHECK(j["schatten_norms"].contains("2"));
	auto csv = spectrum_csv(rep);
	CHECK(std::count(csv.begin(), csv.end(), '\n') == 65);
	CHECK(csv.rfind("index,eigenvalue\n", 0) == 0);
	CHECK(assemble_toeplitz(w, table(), MeasureSpec::radial(p), 64).structure == MatrixStructure::Diagonal);
	CHECK_THROWS_AS(assemble_toeplitz(w, table(), MeasureSpec::radial(p), 2002), DomainError);
}
