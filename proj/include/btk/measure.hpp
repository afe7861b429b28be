#pragma once

// Finite positive measures on the disk and the functionals built from them:
// the averaging function mu_hat_delta(z) = mu(D(delta tau(z))) / tau(z)^2, its
// supremum (Carleson constant), the Berezin transform, L^p(d lambda_tau)
// integrals with d lambda_tau = tau^-2 dA, and lattice l^p sums.

#include "btk/basis.hpp"
#include "btk/lattice.hpp"
#include "btk/moments.hpp"
#include "btk/numeric.hpp"
#include "btk/weight.hpp"

#include <complex>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace btk {

enum class MeasureKind
{
	Atomic,
	Radial,
	Grid
};

struct Atom
{
	Complex point;
	double mass = 0.0;
};

enum class RadialFamily
{
	Power,            ///< g = (1 - r^2)^beta
	Indicator,        ///< g = 1
	WeightCompensated ///< g = omega^-s (1 - r^2)^beta, needs hi < 1
};

/// d mu = scale * g(|z|) dA on the annulus lo <= |z| < hi.
struct RadialDensity
{
	RadialFamily family = RadialFamily::Power;
	double beta = 0.0;
	double s = 0.0;
	double lo = 0.0;
	double hi = 1.0;
	double scale = 1.0;
};

/// Piecewise-constant density on the polar grid of the whole disk with nr equal
/// radial bands and ntheta equal sectors. cells[i * ntheta + j] is the mass of
/// the cell [i/nr, (i+1)/nr) x [2 pi j/ntheta, 2 pi (j+1)/ntheta).
struct PolarGrid
{
	int nr = 0;
	int ntheta = 0;
	std::vector<double> cells;

	double cell_area(int i) const; ///< normalised area of a cell in band i
	double density(int i, int j) const { return cells[i * ntheta + j] / cell_area(i); }
};

class MeasureSpec
{
public:
	/// The zero measure (an atomic measure without atoms).
	static MeasureSpec zero();
	/// Throws DomainError for atoms outside the open disk or non-positive masses.
	static MeasureSpec atomic(std::vector<Atom> atoms);
	/// Throws DomainError for an invalid support, beta < 0, s outside [0, 1),
	/// or a weight-compensated density reaching the boundary.
	static MeasureSpec radial(RadialDensity density);
	/// Throws DomainError for a size mismatch or negative cell masses.
	static MeasureSpec grid(PolarGrid grid);
	/// dA restricted to the disk as a constant-density grid.
	static MeasureSpec area_grid(int nr, int ntheta);

	MeasureKind kind() const { return kind_; }
	const std::vector<Atom>& atoms() const { return atoms_; }
	const RadialDensity& density() const { return radial_; }
	const PolarGrid& grid() const { return grid_; }

	bool is_zero() const;

	/// The measure c * mu.
	MeasureSpec scaled(double c) const;

	/// The measure omega^-1 d mu (atomic and radial measures only).
	MeasureSpec divided_by_weight(const RadialWeight& w) const;

	/// Support radius: mu vanishes on {|z| >= support_radius()}.
	double support_radius() const;

	double total_mass(const RadialWeight& w) const;

	/// log g and its derivatives for radial measures, without the scale factor.
	LogDensity log_density(const RadialWeight& w) const;
	/// scale * g(r) on the support, 0 elsewhere.
	double radial_value(const RadialWeight& w, double r) const;

private:
	MeasureKind kind_ = MeasureKind::Atomic;
	std::vector<Atom> atoms_;
	RadialDensity radial_;
	PolarGrid grid_;
};

/// Normalised area of D(c, rho) intersected with the annular sector
/// {r0 <= |z| < r1, arg z in [t0, t0 + dt)}, computed exactly with Green's theorem.
double sector_disk_area(Complex c, double rho, double r0, double r1, double t0, double dt);

/// mu(D(c, rho)) for the open disk D(c, rho).
double disk_mass(const RadialWeight& w, const MeasureSpec& mu, Complex c, double rho);

/// mu(D(delta tau(z))) / tau(z)^2.
double mu_hat(const RadialWeight& w, const MeasureSpec& mu, double delta, Complex z);

struct CarlesonReport
{
	double constant = 0.0;  ///< sup of mu_hat over the evaluation set
	Complex argsup;
	double r_max = 0.0;
	std::size_t evaluations = 0;
	std::vector<double> ladder_r;   ///< rungs r
	std::vector<double> ladder_sup; ///< sup of mu_hat over {r < |z| <= r_max}
};

/// Default tail ladder 0, 0.3, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.98, 0.99 cut at r_max.
std::vector<double> default_tail_ladder(double r_max);

/// Supremum of mu_hat over {|z| <= r_max}. Radial measures are scanned along a
/// radius with step delta tau / 8; atomic measures on fine polar grids around each
/// atom (elsewhere mu_hat vanishes); grid measures on a polar grid with spacing
/// delta tau / 2.
CarlesonReport carleson_constant(const RadialWeight& w, const MeasureSpec& mu, double delta,
                                 double r_max, std::vector<double> ladder = {});

/// Ring moments and angular Fourier coefficients of a grid measure, the two
/// factors of every matrix entry  int e_n conj(e_m) omega d mu:
///   log_ring[i][k] = log int_{band i} r^(k+1) omega dr        (k <= kmax)
///   fourier[i][q]  = (1/pi) sum_j density_ij int_{sector j} e^(i q t) dt   (q <= qmax)
/// Bands without mass are left with log_ring[i][0] = -inf.
struct GridRingData
{
	std::vector<std::vector<double>> log_ring;
	std::vector<std::vector<Complex>> fourier;

	bool empty_band(std::size_t i) const { return log_ring[i][0] == kNegInf; }
	/// fourier coefficient for any sign of q
	Complex coefficient(std::size_t i, int q) const
	{
		return q >= 0 ? fourier[i][q] : std::conj(fourier[i][-q]);
	}
};

GridRingData grid_ring_data(const RadialWeight& w, const PolarGrid& grid, int kmax, int qmax);

/// Precomputed data for repeated Berezin transforms of one measure.
class BerezinEvaluator
{
public:
	BerezinEvaluator(const RadialWeight& w, const BasisTable& bt, const MeasureSpec& mu);
	/// B mu(z) = int |k_z|^2 omega d mu. Throws TruncationError when the basis
	/// table is too short for z.
	double operator()(Complex z) const;

private:
	double radial(Complex z) const;
	double grid(Complex z) const;

	const RadialWeight& w_;
	const BasisTable& bt_;
	const MeasureSpec& mu_;
	std::vector<double> log_t_;     // radial: log t_n
	GridRingData rings_;            // grid
	std::vector<double> log_omega_; // atomic: log omega(a_j)
};

double berezin_measure(const RadialWeight& w, const BasisTable& bt, const MeasureSpec& mu, Complex z);

/// log t_n, n < count, for t_n = (2 / h_n) int r^(2n+1) omega g dr: the diagonal of
/// the Toeplitz matrix of a radial measure.
std::vector<double> radial_toeplitz_log_diagonal(const RadialWeight& w, const BasisTable& bt,
                                                 const MeasureSpec& mu, int count);

/// Integrals int_{|z| <= r_max} field^p d lambda_tau for each p, by polar quadrature:
/// Gauss-Legendre panels in r (doubled until every integral changes by less than
/// `tol`) times `angles` equispaced angles.
std::vector<double> lp_lambda_tau_integrals(const RadialWeight& w,
                                            const std::function<double(Complex)>& field,
                                            std::span<const double> ps, double r_max,
                                            int angles = 512, double tol = 1e-6);

/// Same for a radial field, with the angular integral done analytically.
/// `breaks` are radii where the field is not smooth.
std::vector<double> lp_lambda_tau_integrals_radial(const RadialWeight& w,
                                                   const std::function<double(double)>& field,
                                                   std::span<const double> ps, double r_max,
                                                   std::vector<double> breaks = {}, double tol = 1e-8);

/// (int_{|z| <= r_max} field^p d lambda_tau)^(1/p).
double lp_lambda_tau_norm(const RadialWeight& w, const std::function<double(Complex)>& field,
                          double p, double r_max);

/// int mu_hat_delta^p d lambda_tau over {|z| <= r_max} for each p, using the
/// structure of the measure (radial reduction, exact angular sweeps for atoms).
std::vector<double> mu_hat_lp_integrals(const RadialWeight& w, const MeasureSpec& mu, double delta,
                                        std::span<const double> ps, double r_max);

/// int (B mu)^p d lambda_tau over {|z| <= r_max} for each p.
std::vector<double> berezin_lp_integrals(const RadialWeight& w, const BasisTable& bt,
                                         const MeasureSpec& mu, std::span<const double> ps,
                                         double r_max);

/// sum_n mu_hat_delta(z_n)^p over the lattice points, for each p.
std::vector<double> lattice_lp_sums(const RadialWeight& w, const MeasureSpec& mu, const Lattice& lat,
                                    double delta, std::span<const double> ps);

/// (sum_n mu_hat_delta(z_n)^p)^(1/p).
double lattice_lp_sum(const RadialWeight& w, const MeasureSpec& mu, const Lattice& lat, double delta,
                      double p);

} // namespace btk
