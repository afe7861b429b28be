#include "btk/toeplitz.hpp"

#include "btk/errors.hpp"
#include "btk/numeric.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace btk {

namespace {

void require_dim(const BasisTable& bt, int dim)
{
	if (dim < 1 || dim > bt.degree_max + 1)
		throw DomainError("matrix dimension must lie in [1, degree_max + 1] = [1, " +
		                  std::to_string(bt.degree_max + 1) + "]");
}

// c * e_n(xi) conj(e_m(xi)) with log c given.
Complex atom_entry(const BasisTable& bt, double log_c, Complex xi, int m, int n)
{
	double rho = std::abs(xi);
	if (rho == 0.0)
		return m == 0 && n == 0 ? Complex(std::exp(log_c - bt.log_h[0]), 0.0) : Complex(0.0, 0.0);
	double mag = std::exp(log_c + (m + n) * std::log(rho) - 0.5 * (bt.log_h[m] + bt.log_h[n]));
	return std::polar(mag, (n - m) * std::arg(xi));
}

ToeplitzMatrix dense_from(const BasisTable& bt, int dim, const std::function<Complex(int, int)>& upper)
{
	ToeplitzMatrix tm;
	tm.basis_ref = bt.weight_id;
	tm.dim = dim;
	tm.structure = MatrixStructure::Dense;
	tm.entries.assign(static_cast<std::size_t>(dim) * dim, 0.0);
	for (int m = 0; m < dim; ++m)
	{
		Complex d = upper(m, m);
		tm.entries[m * dim + m] = d.real();
		for (int n = m + 1; n < dim; ++n)
		{
			Complex v = upper(m, n);
			tm.entries[m * dim + n] = v;
			tm.entries[n * dim + m] = std::conj(v);
		}
	}
	return tm;
}

ToeplitzMatrix grid_dense(const RadialWeight& w, const BasisTable& bt, const MeasureSpec& mu, int dim)
{
	GridRingData rings = grid_ring_data(w, mu.grid(), 2 * dim - 2, dim - 1);
	const auto& lh = bt.log_h;
	return dense_from(bt, dim, [&](int m, int n) {
		Complex sum = 0.0;
		for (std::size_t i = 0; i < rings.log_ring.size(); ++i)
			if (!rings.empty_band(i))
				sum += std::exp(rings.log_ring[i][m + n] - 0.5 * (lh[m] + lh[n])) * rings.coefficient(i, n - m);
		return sum;
	});
}

} // namespace

std::string to_string(MatrixStructure s)
{
	switch (s)
	{
	case MatrixStructure::Diagonal:
		return "diagonal";
	case MatrixStructure::FiniteRank:
		return "finite_rank";
	case MatrixStructure::Dense:
		return "dense";
	}
	return "unknown";
}

Complex ToeplitzMatrix::entry(const BasisTable& bt, int m, int n) const
{
	if (m < 0 || n < 0 || m >= dim || n >= dim)
		throw DomainError("matrix index out of range");
	switch (structure)
	{
	case MatrixStructure::Diagonal:
		return m == n ? diagonal[m] : 0.0;
	case MatrixStructure::Dense:
		return entries[static_cast<std::size_t>(m) * dim + n];
	case MatrixStructure::FiniteRank:
	{
		Complex sum = 0.0;
		for (std::size_t j = 0; j < atoms.size(); ++j)
			sum += atom_entry(bt, log_atom_scale[j], atoms[j].point, m, n);
		return m == n ? Complex(sum.real(), 0.0) : sum;
	}
	}
	return 0.0;
}

double ToeplitzMatrix::trace() const
{
	CompensatedSum sum;
	switch (structure)
	{
	case MatrixStructure::Diagonal:
		for (double t : diagonal)
			sum += t;
		break;
	case MatrixStructure::Dense:
		for (int m = 0; m < dim; ++m)
			sum += entries[static_cast<std::size_t>(m) * dim + m].real();
		break;
	case MatrixStructure::FiniteRank:
		for (std::size_t j = 0; j < atoms.size(); ++j)
			sum += gram[j * atoms.size() + j].real();
		break;
	}
	return sum.value();
}

double ToeplitzMatrix::frobenius_norm() const
{
	CompensatedSum sum;
	switch (structure)
	{
	case MatrixStructure::Diagonal:
		for (double t : diagonal)
			sum += t * t;
		break;
	case MatrixStructure::Dense:
		for (Complex v : entries)
			sum += std::norm(v);
		break;
	case MatrixStructure::FiniteRank:
		for (Complex v : gram)
			sum += std::norm(v);
		break;
	}
	return std::sqrt(sum.value());
}

ToeplitzMatrix assemble_toeplitz(const RadialWeight& w, const BasisTable& bt, const MeasureSpec& mu, int dim)
{
	require_dim(bt, dim);
	switch (mu.kind())
	{
	case MeasureKind::Radial:
	{
		ToeplitzMatrix tm;
		tm.basis_ref = bt.weight_id;
		tm.dim = dim;
		tm.structure = MatrixStructure::Diagonal;
		for (double lt : radial_toeplitz_log_diagonal(w, bt, mu, dim))
			tm.diagonal.push_back(std::exp(lt));
		return tm;
	}
	case MeasureKind::Atomic:
	{
		ToeplitzMatrix tm;
		tm.basis_ref = bt.weight_id;
		tm.dim = dim;
		tm.structure = MatrixStructure::FiniteRank;
		tm.atoms = mu.atoms();
		std::size_t J = tm.atoms.size();
		for (const Atom& a : tm.atoms)
			tm.log_atom_scale.push_back(std::log(a.mass) + w.log_omega(a.point));
		tm.gram.assign(J * J, 0.0);
		for (std::size_t j = 0; j < J; ++j)
			for (std::size_t k = j; k < J; ++k)
			{
				LogComplex kv = kernel(bt, tm.atoms[k].point, tm.atoms[j].point);
				double mag = std::exp(0.5 * (tm.log_atom_scale[j] + tm.log_atom_scale[k]) + kv.log_abs);
				Complex v = j == k ? Complex(mag, 0.0) : std::polar(mag, kv.phase);
				tm.gram[j * J + k] = v;
				tm.gram[k * J + j] = std::conj(v);
			}
		return tm;
	}
	case MeasureKind::Grid:
		return grid_dense(w, bt, mu, dim);
	}
	throw DomainError("unknown measure kind");
}

ToeplitzMatrix assemble_dense(const RadialWeight& w, const BasisTable& bt, const MeasureSpec& mu, int dim)
{
	require_dim(bt, dim);
	const auto& lh = bt.log_h;
	switch (mu.kind())
	{
	case MeasureKind::Grid:
		return grid_dense(w, bt, mu, dim);
	case MeasureKind::Atomic:
	{
		std::vector<double> log_c;
		for (const Atom& a : mu.atoms())
			log_c.push_back(std::log(a.mass) + w.log_omega(a.point));
		return dense_from(bt, dim, [&](int m, int n) {
			Complex sum = 0.0;
			for (std::size_t j = 0; j < log_c.size(); ++j)
				sum += atom_entry(bt, log_c[j], mu.atoms()[j].point, m, n);
			return sum;
		});
	}
	case MeasureKind::Radial:
	{
		const RadialDensity& d = mu.density();
		LogDensity g;
		bool plain = d.beta == 0.0 && d.s == 0.0;
		if (!plain)
			g = mu.log_density(w);
		std::vector<double> log_moment(static_cast<std::size_t>(2 * dim - 1));
		double hint = -1.0;
		for (int k = 0; k < 2 * dim - 1; ++k)
			log_moment[k] = std::log(d.scale) +
			                log_radial_moment(w, k + 1.0, d.lo, d.hi, 1e-12, plain ? nullptr : &g, &hint);
		// (1/pi) int_0^2pi e^(i q t) dt by the trapezoidal rule on 2 dim nodes
		int nodes = 2 * dim;
		std::vector<Complex> angular(static_cast<std::size_t>(dim));
		for (int q = 0; q < dim; ++q)
		{
			Complex acc = 0.0;
			for (int j = 0; j < nodes; ++j)
				acc += std::polar(1.0, 2.0 * kPi * q * j / nodes);
			angular[q] = acc * (2.0 / nodes);
		}
		return dense_from(bt, dim, [&](int m, int n) {
			return std::exp(log_moment[m + n] - 0.5 * (lh[m] + lh[n])) * angular[n - m];
		});
	}
	}
	throw DomainError("unknown measure kind");
}

std::vector<double> hermitian_eigenvalues(std::vector<Complex> a, int n, int* sweeps)
{
	if (n < 0 || a.size() != static_cast<std::size_t>(n) * n)
		throw DomainError("matrix size does not match its dimension");
	auto at = [&](int i, int j) -> Complex& { return a[static_cast<std::size_t>(i) * n + j]; };
	CompensatedSum fro2;
	for (Complex v : a)
		fro2 += std::norm(v);
	double fro = std::sqrt(fro2.value());
	std::vector<double> eig(static_cast<std::size_t>(n), 0.0);
	if (sweeps)
		*sweeps = 0;
	if (fro == 0.0)
		return eig;
	if (!std::isfinite(fro))
		throw DomainError("matrix has non-finite entries");

	double skip = 1e-13 * fro / n;
	int sweep = 0;
	for (;; ++sweep)
	{
		CompensatedSum off;
		for (int p = 0; p < n; ++p)
			for (int q = p + 1; q < n; ++q)
				off += 2.0 * std::norm(at(p, q));
		if (std::sqrt(off.value()) < 1e-12 * fro)
			break;
		if (sweep == 100)
			throw ConvergenceError("Jacobi eigenvalue iteration did not converge in 100 sweeps");
		for (int p = 0; p < n; ++p)
			for (int q = p + 1; q < n; ++q)
			{
				Complex apq = at(p, q);
				double g = std::abs(apq);
				if (g <= skip)
					continue;
				Complex e = apq / g;
				double theta = (at(q, q).real() - at(p, p).real()) / (2.0 * g);
				double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
				double c = 1.0 / std::sqrt(t * t + 1.0);
				double s = t * c;
				Complex ce = std::conj(e);
				for (int k = 0; k < n; ++k)
				{
					Complex xp = at(k, p), xq = at(k, q);
					at(k, p) = c * xp - s * ce * xq;
					at(k, q) = s * xp + c * ce * xq;
				}
				for (int k = 0; k < n; ++k)
				{
					Complex yp = at(p, k), yq = at(q, k);
					at(p, k) = c * yp - s * e * yq;
					at(q, k) = s * yp + c * e * yq;
				}
				at(p, q) = 0.0;
				at(q, p) = 0.0;
				at(p, p) = at(p, p).real();
				at(q, q) = at(q, q).real();
			}
	}
	if (sweeps)
		*sweeps = sweep;
	for (int i = 0; i < n; ++i)
		eig[i] = at(i, i).real();
	std::sort(eig.begin(), eig.end(), std::greater<>());
	return eig;
}

double schatten_norm(std::span<const double> eigenvalues, double p)
{
	if (!(p > 0.0) || !std::isfinite(p))
		throw DomainError("Schatten exponent p must be positive");
	double top = 0.0;
	for (double l : eigenvalues)
		top = std::max(top, l);
	if (top == 0.0)
		return 0.0;
	// scale by the largest eigenvalue so that large p cannot overflow
	CompensatedSum sum;
	for (double l : eigenvalues)
		if (l > 0.0)
			sum += std::pow(l / top, p);
	return top * std::pow(sum.value(), 1.0 / p);
}

double schatten_norm(const SpectrumReport& report, double p)
{
	return schatten_norm(report.eigenvalues, p);
}

SpectrumReport spectrum(const ToeplitzMatrix& tm, std::span<const double> ps)
{
	SpectrumReport rep;
	rep.structure = tm.structure;
	rep.dim = tm.dim;
	switch (tm.structure)
	{
	case MatrixStructure::Diagonal:
		rep.eigenvalues = tm.diagonal;
		std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end(), std::greater<>());
		break;
	case MatrixStructure::Dense:
		rep.eigenvalues = hermitian_eigenvalues(tm.entries, tm.dim, &rep.sweeps);
		break;
	case MatrixStructure::FiniteRank:
		rep.eigenvalues = hermitian_eigenvalues(tm.gram, static_cast<int>(tm.atoms.size()), &rep.sweeps);
		if (rep.eigenvalues.size() < static_cast<std::size_t>(tm.dim))
			rep.eigenvalues.resize(static_cast<std::size_t>(tm.dim), 0.0);
		break;
	}
	double limit = 1e-10 * tm.frobenius_norm();
	for (double& l : rep.eigenvalues)
		if (l < 0.0)
		{
			if (-l > limit)
				throw PsdViolation("eigenvalue " + format_double(l) + " is below -1e-10 ||M||");
			rep.clipped = std::max(rep.clipped, -l);
			l = 0.0;
		}
	std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end(), std::greater<>());
	rep.operator_norm = rep.eigenvalues.empty() ? 0.0 : rep.eigenvalues.front();
	rep.trace = compensated_sum(rep.eigenvalues);
	double last = rep.eigenvalues.empty() ? 0.0 : rep.eigenvalues.back();
	for (double p : ps)
	{
		SchattenEntry e;
		e.norm = schatten_norm(rep.eigenvalues, p);
		e.power_sum = std::pow(e.norm, p);
		e.tail = last > 0.0 ? std::pow(last, p) * rep.dim : 0.0;
		e.tail_flag = e.tail > 0.01 * e.power_sum;
		rep.schatten[p] = e;
	}
	return rep;
}

double berezin_operator(const BasisTable& bt, const ToeplitzMatrix& tm, Complex z)
{
	if (!(std::abs(z) < 1.0))
		throw DomainError("Berezin transform needs |z| < 1");
	if (tm.structure == MatrixStructure::FiniteRank)
	{
		double log_norm = log_kernel_norm_sq(bt, z);
		CompensatedSum sum;
		for (std::size_t j = 0; j < tm.atoms.size(); ++j)
			sum += std::exp(tm.log_atom_scale[j] + 2.0 * kernel(bt, z, tm.atoms[j].point).log_abs - log_norm);
		return sum.value();
	}
	std::vector<double> lv = log_coefficients_sq(bt, z, tm.dim);
	CompensatedSum mass;
	for (double l : lv)
		mass += std::exp(l);
	if (1.0 - mass.value() > 1e-10)
		throw TruncationError("matrix dimension " + std::to_string(tm.dim) + " misses " +
		                      format_double(1.0 - mass.value()) + " of the normalised kernel at |z| = " +
		                      format_double(std::abs(z)));
	if (tm.structure == MatrixStructure::Diagonal)
	{
		CompensatedSum sum;
		for (int n = 0; n < tm.dim; ++n)
			sum += std::exp(lv[n]) * tm.diagonal[n];
		return sum.value();
	}
	// v_n = conj(z)^n / (sqrt(h_n) ||K_z||)
	double theta = std::arg(z);
	std::vector<Complex> v(static_cast<std::size_t>(tm.dim));
	for (int n = 0; n < tm.dim; ++n)
		v[n] = std::polar(std::exp(0.5 * lv[n]), -n * theta);
	CompensatedSum sum;
	for (int m = 0; m < tm.dim; ++m)
	{
		if (v[m] == 0.0)
			continue;
		Complex row = 0.0;
		for (int n = 0; n < tm.dim; ++n)
			row += tm.entries[static_cast<std::size_t>(m) * tm.dim + n] * v[n];
		sum += std::real(std::conj(v[m]) * row);
	}
	return sum.value();
}

std::string spectrum_json(const SpectrumReport& report)
{
	nlohmann::ordered_json j;
	j["structure"] = to_string(report.structure);
	j["dim"] = report.dim;
	j["operator_norm"] = report.operator_norm;
	j["trace"] = report.trace;
	j["clipped"] = report.clipped;
	j["jacobi_sweeps"] = report.sweeps;
	nlohmann::ordered_json norms = nlohmann::ordered_json::object();
	for (const auto& [p, e] : report.schatten)
		norms[format_double(p)] = {{"norm", e.norm}, {"power_sum", e.power_sum}, {"tail", e.tail},
		                           {"tail_flag", e.tail_flag}};
	j["schatten_norms"] = norms;
	j["eigenvalues"] = report.eigenvalues;
	return j.dump(2);
}

std::string spectrum_csv(const SpectrumReport& report)
{
	std::ostringstream out;
	out << "index,eigenvalue\n";
	for (std::size_t i = 0; i < report.eigenvalues.size(); ++i)
		out << i << ',' << format_double(report.eigenvalues[i]) << '\n';
	return out.str();
}

} // namespace btk
