#include "btk/basis.hpp"

#include "btk/moments.hpp"
#include "btk/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>

namespace btk {

namespace {

constexpr double kWindow = 45.0;
constexpr double kTailRatio = 1e-15;

struct SeriesValue
{
	double log_abs;
	double phase;
};

// sum_n exp(n log_w - log_h[n]) e^(i n theta) over the numerically relevant window
SeriesValue kernel_series(const BasisTable& bt, double log_w, double theta, bool real_axis)
{
	const auto& lh = bt.log_h;
	const int top = bt.degree_max;
	if (log_w == kNegInf)
		return {-lh[0], 0.0};
	auto term = [&](int n) { return n * log_w - lh[n]; };

	int lo = 0, hi = top;
	while (lo < hi)
	{
		int mid = lo + (hi - lo) / 2;
		if (term(mid + 1) > term(mid))
			lo = mid + 1;
		else
			hi = mid;
	}
	const int peak = lo;
	const double lmax = term(peak);

	CompensatedSum re, im, mag;
	auto add = [&](int n, double l) {
		double a = std::exp(l - lmax);
		mag += a;
		if (real_axis)
			re += a;
		else
		{
			double ph = n * theta;
			re += a * std::cos(ph);
			im += a * std::sin(ph);
		}
	};
	for (int n = peak; n >= 0; --n)
	{
		double l = term(n);
		if (l < lmax - kWindow)
			break;
		add(n, l);
	}
	for (int n = peak + 1; n <= top; ++n)
	{
		double l = term(n);
		if (l < lmax - kWindow)
			break;
		add(n, l);
	}

	double last = std::exp(term(top) - lmax);
	if (last > kTailRatio * mag.value())
	{
		char buf[200];
		std::snprintf(buf, sizeof buf,
		              "kernel series truncated: |w| = %.6g needs more than degree %d (tail ratio %.3g)",
		              std::exp(log_w), top, last / mag.value());
		throw TruncationError(buf);
	}
	double x = re.value(), y = im.value();
	double modulus = std::hypot(x, y);
	return {lmax + std::log(modulus), std::atan2(y, x)};
}

} // namespace

BasisTable build_basis_table(const RadialWeight& w, int degree_max, double tol)
{
	if (degree_max < 0)
		throw DomainError("degree_max must be non-negative");
	if (!(tol > 0.0 && tol <= 1e-6))
		throw DomainError("basis quadrature tolerance must lie in (0, 1e-6]");
	BasisTable bt;
	bt.weight_id = w.id();
	bt.degree_max = degree_max;
	bt.quad_tolerance = tol;
	bt.log_h.resize(static_cast<std::size_t>(degree_max) + 1);
	double hint = -1.0;
	const double log2 = std::log(2.0);
	for (int n = 0; n <= degree_max; ++n)
		bt.log_h[n] = log2 + log_radial_moment(w, 2.0 * n + 1.0, 0.0, 1.0, tol, nullptr, &hint);
	return bt;
}

int degree_for_radius(const RadialWeight& w, double r_max)
{
	if (!(r_max >= 0.0 && r_max < 1.0))
		throw DomainError("degree_for_radius needs 0 <= r < 1");
	// Term n of the diagonal series at |z| = r peaks where the maximiser s(n) of
	// r^(2n+1) w(r) equals r, i.e. n(s) = s phi'(s) - 1/2, and decays past the
	// peak by  F(s) = int_r^s 2 log(t/r) dn(t),  dn/dt = t Lap phi(t).
	double r = std::max(r_max, 0.5);
	double s = r;
	double decay = 0.0;
	while (decay < 50.0)
	{
		double ds = 0.02 * w.tau(s);
		if (!(ds > 0.0) || s + ds >= 1.0)
			throw ResourceError("kernel degree for this radius is not representable");
		double mid = s + 0.5 * ds;
		decay += 2.0 * std::log(mid / r) * mid * w.laplacian_phi(mid) * ds;
		s += ds;
	}
	double n = std::ceil(1.02 * (s * w.dphi(s)) + 64.0);
	if (!(n < 5e7))
		throw ResourceError("kernel degree for this radius exceeds 5e7");
	return static_cast<int>(n);
}

LogComplex kernel(const BasisTable& bt, Complex z, Complex zeta)
{
	if (!(std::abs(z) < 1.0 && std::abs(zeta) < 1.0))
		throw DomainError("kernel arguments must lie in the open unit disk");
	Complex prod = zeta * std::conj(z);
	double m = std::abs(prod);
	auto s = kernel_series(bt, m > 0.0 ? std::log(m) : kNegInf, std::arg(prod), false);
	return {s.log_abs, s.phase};
}

double log_kernel_norm_sq(const BasisTable& bt, Complex z)
{
	double r = std::abs(z);
	if (!(r < 1.0))
		throw DomainError("kernel arguments must lie in the open unit disk");
	return kernel_series(bt, r > 0.0 ? 2.0 * std::log(r) : kNegInf, 0.0, true).log_abs;
}

LogComplex normalized_kernel(const BasisTable& bt, Complex z, Complex zeta)
{
	LogComplex k = kernel(bt, z, zeta);
	k.log_abs -= 0.5 * log_kernel_norm_sq(bt, z);
	return k;
}

std::vector<double> log_coefficients_sq(const BasisTable& bt, Complex z, int dim)
{
	if (dim > bt.degree_max + 1)
		throw DomainError("dimension exceeds basis table degree");
	double lnorm = log_kernel_norm_sq(bt, z);
	double r = std::abs(z);
	double lr2 = r > 0.0 ? 2.0 * std::log(r) : kNegInf;
	std::vector<double> out(dim);
	for (int n = 0; n < dim; ++n)
		out[n] = (n == 0 ? 0.0 : n * lr2) - bt.log_h[n] - lnorm;
	return out;
}

double check_submeanvalue(const RadialWeight& w, std::span<const Complex> coeffs, Complex z,
                          double p, double beta, double delta)
{
	if (!(p > 0.0))
		throw DomainError("sub-mean-value exponent p must be positive");
	if (!(std::abs(z) < 1.0))
		throw DomainError("point must lie in the open unit disk");
	auto log_abs_f = [&](Complex x) {
		Complex acc = 0.0;
		for (std::size_t i = coeffs.size(); i-- > 0;)
			acc = acc * x + coeffs[i];
		double a = std::abs(acc);
		return a > 0.0 ? std::log(a) : kNegInf;
	};
	auto log_integrand = [&](Complex x) {
		double lf = log_abs_f(x);
		if (lf == kNegInf)
			return kNegInf;
		return p * lf + (beta != 0.0 ? beta * w.log_omega(x) : 0.0);
	};

	const double radius = delta * w.tau(z);
	double lhs = log_integrand(z);
	if (lhs == kNegInf)
		return 0.0;

	// (1/pi) int_0^R int_0^2pi F(z + rho e^{it}) rho dt drho, returned in log form
	auto log_disk_integral = [&](int panels, int angles) {
		const GaussRule& rule = gauss_legendre(20);
		std::vector<double> logs;
		std::vector<double> wts;
		double h = radius / panels;
		for (int k = 0; k < panels; ++k)
			for (int i = 0; i < 20; ++i)
			{
				double rho = h * k + 0.5 * h * (1.0 + rule.nodes[i]);
				double wr = 0.5 * h * rule.weights[i] * rho * (2.0 / angles);
				for (int j = 0; j < angles; ++j)
				{
					double t = 2.0 * kPi * (j + 0.5) / angles;
					logs.push_back(log_integrand(z + std::polar(rho, t)));
					wts.push_back(wr);
				}
			}
		double top = *std::max_element(logs.begin(), logs.end());
		if (top == kNegInf)
			return kNegInf;
		CompensatedSum s;
		for (std::size_t i = 0; i < logs.size(); ++i)
			s += wts[i] * std::exp(logs[i] - top);
		return top + std::log(s.value());
	};

	int panels = 1, angles = 64;
	double prev = log_disk_integral(panels, angles);
	for (int k = 0; k < 8; ++k)
	{
		panels *= 2;
		angles *= 2;
		double cur = log_disk_integral(panels, angles);
		if (std::abs(cur - prev) < 1e-9)
			return std::exp(lhs - (cur - 2.0 * std::log(radius)));
		prev = cur;
	}
	throw ConvergenceError("sub-mean-value disk quadrature did not converge");
}

void save_basis_table(const BasisTable& bt, const std::filesystem::path& path)
{
	std::ofstream out(path, std::ios::binary);
	if (!out)
		throw ResourceError("cannot write basis cache " + path.string());
	out << "BTKBASIS1\n" << bt.weight_id << '\n';
	out.write(reinterpret_cast<const char*>(&bt.quad_tolerance), sizeof(double));
	std::int64_t count = static_cast<std::int64_t>(bt.log_h.size());
	out.write(reinterpret_cast<const char*>(&count), sizeof count);
	out.write(reinterpret_cast<const char*>(bt.log_h.data()),
	          static_cast<std::streamsize>(bt.log_h.size() * sizeof(double)));
}

bool load_basis_table(const std::filesystem::path& path, const std::string& weight_id,
                      int degree_max, double tol, BasisTable& out)
{
	std::ifstream in(path, std::ios::binary);
	if (!in)
		return false;
	std::string magic, id;
	std::getline(in, magic);
	std::getline(in, id);
	if (magic != "BTKBASIS1" || id != weight_id)
		return false;
	double stored_tol = 0.0;
	std::int64_t count = 0;
	in.read(reinterpret_cast<char*>(&stored_tol), sizeof stored_tol);
	in.read(reinterpret_cast<char*>(&count), sizeof count);
	if (!in || stored_tol > tol || count < degree_max + 1)
		return false;
	std::vector<double> values(static_cast<std::size_t>(count));
	in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(count * sizeof(double)));
	if (!in)
		return false;
	values.resize(static_cast<std::size_t>(degree_max) + 1);
	out.weight_id = weight_id;
	out.degree_max = degree_max;
	out.quad_tolerance = stored_tol;
	out.log_h = std::move(values);
	return true;
}

BasisTable cached_basis_table(const RadialWeight& w, int degree_max, double tol)
{
	const char* dir = std::getenv("BTK_CACHE_DIR");
	if (!dir || !*dir)
		return build_basis_table(w, degree_max, tol);
	char name[64];
	std::snprintf(name, sizeof name, "basis_%016zx.bin", std::hash<std::string>{}(w.id()));
	std::filesystem::path path = std::filesystem::path(dir) / name;
	BasisTable bt;
	if (load_basis_table(path, w.id(), degree_max, tol, bt))
		return bt;
	bt = build_basis_table(w, degree_max, tol);
	std::filesystem::create_directories(dir);
	save_basis_table(bt, path);
	return bt;
}

} // namespace btk
