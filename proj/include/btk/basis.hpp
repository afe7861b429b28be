#pragma once

// Orthonormal monomial basis e_n = z^n / sqrt(h_n) of A^2_w for a radial
// weight, with h_n = 2 int_0^1 r^(2n+1) w(r) dr (area measure normalised to
// total mass 1), and the reproducing kernel
//
//     K_z(zeta) = sum_n (zeta conj(z))^n / h_n
//
// evaluated in log-magnitude / phase form.

#include "btk/weight.hpp"

#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace btk {

/// A complex number stored as log|x| and arg x.
struct LogComplex
{
	double log_abs = kLogZero;
	double phase = 0.0;

	static constexpr double kLogZero = -std::numeric_limits<double>::infinity();
	Complex value() const { return std::polar(std::exp(log_abs), phase); }
};

struct BasisTable
{
	std::string weight_id;
	int degree_max = 0;
	double quad_tolerance = 0.0;
	std::vector<double> log_h; ///< log h_n, n = 0..degree_max
};

/// Default truncation degree of the kernel series.
inline constexpr int kDefaultDegreeMax = 2000;

/// Computes log h_n for n = 0..degree_max. Requires degree_max >= 0 and
/// 0 < tol <= 1e-6.
BasisTable build_basis_table(const RadialWeight& w, int degree_max, double tol = 1e-12);

/// Degree at which the diagonal kernel series at |z| = r_max has decayed by
/// more than e^-45 past its largest term (peak near r phi'(r), width ~ r / tau).
int degree_for_radius(const RadialWeight& w, double r_max);

/// K_z(zeta). Throws TruncationError when the term at degree_max is not below
/// 1e-15 of the accumulated magnitude.
LogComplex kernel(const BasisTable& bt, Complex z, Complex zeta);

/// log K_z(z) = log ||K_z||^2.
double log_kernel_norm_sq(const BasisTable& bt, Complex z);

/// k_z(zeta) = K_z(zeta) / ||K_z||.
LogComplex normalized_kernel(const BasisTable& bt, Complex z, Complex zeta);

/// log |v_n|^2 for v_n = <k_z, e_n> = conj(z)^n / (sqrt(h_n) ||K_z||), n < dim.
std::vector<double> log_coefficients_sq(const BasisTable& bt, Complex z, int dim);

/// Sub-mean-value ratio
///   |f(z)|^p w(z)^beta / [ (delta tau(z))^-2 int_{D(delta tau(z))} |f|^p w^beta dA ]
/// for a polynomial f with coefficients `coeffs` (constant term first).
/// The disk integral uses polar coordinates around z; radial panels and angular
/// nodes are doubled together until the relative change is below 1e-9.
double check_submeanvalue(const RadialWeight& w, std::span<const Complex> coeffs, Complex z,
                          double p, double beta, double delta);

/// Binary cache file: magic, weight fingerprint, tolerance, count, raw log h_n.
void save_basis_table(const BasisTable& bt, const std::filesystem::path& path);
/// Returns false if the file is missing or its fingerprint does not match.
bool load_basis_table(const std::filesystem::path& path, const std::string& weight_id,
                      int degree_max, double tol, BasisTable& out);

/// Builds the table, reading/writing `$BTK_CACHE_DIR` when that variable is set.
BasisTable cached_basis_table(const RadialWeight& w, int degree_max, double tol = 1e-12);

} // namespace btk
