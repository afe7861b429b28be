#pragma once

// Toeplitz operators T_mu in the orthonormal basis e_n = z^n / sqrt(h_n):
//
//     <T_mu e_n, e_m> = int e_n conj(e_m) omega d mu
//
// their spectra, Schatten norms and operator Berezin transforms.

#include "btk/basis.hpp"
#include "btk/measure.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace btk {

enum class MatrixStructure
{
	Diagonal,   ///< radial measures: off-diagonal entries vanish analytically
	FiniteRank, ///< atomic measures: J x J Gram matrix of weighted kernels
	Dense
};

std::string to_string(MatrixStructure s);

class ToeplitzMatrix
{
public:
	std::string basis_ref;
	int dim = 0;
	MatrixStructure structure = MatrixStructure::Dense;

	/// Diagonal: t_n, n < dim.
	std::vector<double> diagonal;
	/// Dense: row-major dim x dim entries (m, n).
	std::vector<Complex> entries;
	/// FiniteRank: the atoms, log(mass * omega) per atom and the Hermitian Gram
	/// matrix G_jk = sqrt(c_j c_k) K(xi_j, xi_k) (row-major), c = mass * omega.
	std::vector<Atom> atoms;
	std::vector<double> log_atom_scale;
	std::vector<Complex> gram;

	/// Entry (m, n) = <T e_n, e_m> for any structure.
	Complex entry(const BasisTable& bt, int m, int n) const;
	/// Sum of the diagonal entries m < dim (for FiniteRank: of the full operator).
	double trace() const;
	/// Frobenius norm of the stored matrix.
	double frobenius_norm() const;
};

/// Fast structured assembly: Diagonal for radial, FiniteRank for atomic and
/// Dense (ring moments times angular Fourier coefficients) for grid measures.
/// Throws DomainError if dim exceeds the basis table and TruncationError if the
/// kernel series is too short at some atom.
ToeplitzMatrix assemble_toeplitz(const RadialWeight& w, const BasisTable& bt, const MeasureSpec& mu, int dim);

/// Dense assembly of the truncated matrix for any measure, used to validate the
/// structured paths. Radial entries integrate the angle with the trapezoidal
/// rule on 2 dim nodes.
ToeplitzMatrix assemble_dense(const RadialWeight& w, const BasisTable& bt, const MeasureSpec& mu, int dim);

struct SchattenEntry
{
	double norm = 0.0;       ///< (sum lambda_n^p)^(1/p)
	double power_sum = 0.0;  ///< sum lambda_n^p
	double tail = 0.0;       ///< lambda_last^p * dim, what truncation plausibly discards
	bool tail_flag = false;  ///< tail > 1% of power_sum
};

struct SpectrumReport
{
	MatrixStructure structure = MatrixStructure::Dense;
	int dim = 0;
	std::vector<double> eigenvalues; ///< descending, clipped at 0
	double operator_norm = 0.0;
	double trace = 0.0;
	double clipped = 0.0; ///< largest magnitude of a negative eigenvalue set to 0
	int sweeps = 0;       ///< Jacobi sweeps used
	std::map<double, SchattenEntry> schatten;
};

/// Eigenvalues of a Hermitian matrix (row-major, n x n) by cyclic Jacobi
/// rotations until the off-diagonal norm is below 1e-12 of the Frobenius norm.
/// Throws ConvergenceError after 100 sweeps.
std::vector<double> hermitian_eigenvalues(std::vector<Complex> a, int n, int* sweeps = nullptr);

/// Spectrum of the matrix with Schatten norms at each p. Throws PsdViolation when
/// an eigenvalue is below -1e-10 times the Frobenius norm.
SpectrumReport spectrum(const ToeplitzMatrix& tm, std::span<const double> ps = {});

/// (sum lambda_n^p)^(1/p) with compensated summation. Throws DomainError for p <= 0.
double schatten_norm(std::span<const double> eigenvalues, double p);
double schatten_norm(const SpectrumReport& report, double p);

/// <T k_z, k_z>. Throws TruncationError when more than 1e-10 of ||k_z||^2 lies
/// beyond the matrix dimension.
double berezin_operator(const BasisTable& bt, const ToeplitzMatrix& tm, Complex z);

std::string spectrum_json(const SpectrumReport& report);
/// "index,eigenvalue" lines for plotting the decay.
std::string spectrum_csv(const SpectrumReport& report);

} // namespace btk
