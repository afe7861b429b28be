#pragma once

// Radial weights w = exp(-2 phi) on the unit disk together with the local
// scale tau = (Laplacian phi)^(-1/2) and the class constants c1, c2, m_tau.
//
// Closed forms (u = 1 - r^2, v = 1 - r):
//
//   exponential(alpha):
//     phi    = u^(-alpha) / 2
//     phi'   = alpha r u^(-alpha-1)
//     phi''  = alpha u^(-alpha-2) (u + 2 (alpha+1) r^2)
//     Lap    = phi'' + phi'/r = 2 alpha u^(-alpha-2) (1 + alpha r^2)
//     tau    = u^((alpha+2)/2) / sqrt(2 alpha (1 + alpha r^2))
//     tau'   = -tau ((alpha+2) r / u + alpha r / (1 + alpha r^2))
//
//   double_exponential(alpha, beta, gamma), x = beta v^(-alpha), E = e^x,
//   g = alpha beta v^(-alpha-1), g' = (alpha+1) g / v, g'' = (alpha+2) g' / v:
//     phi    = gamma E / 2
//     phi'   = gamma E g / 2
//     phi''  = gamma E (g^2 + g') / 2
//     Lap    = gamma E S / 2,   S = g^2 + g' + g/r
//     tau    = exp(-(log(gamma/2) + x + log S) / 2)
//     tau'   = -tau (g + S'/S) / 2,   S' = 2 g g' + g'' + g'/r - g/r^2
//
// phi'(0) != 0 for the double exponential family, so its Laplacian blows up
// like 1/r at the origin and tau(0) = 0 there.
//
// Tail conditions of the admissible class (for r -> 1):
//   exponential: tau(r) (1-r)^(-C) increases near 1 for any C < (alpha+2)/2,
//     since tau ~ (2(1-r))^((alpha+2)/2) / sqrt(2 alpha (1+alpha)).
//   double exponential: tau ~ e^(-x/2) / (g sqrt(gamma/2)) and tau' ~ -tau g / 2,
//     so |tau'(r)| log(1/tau(r)) ~ tau g x / 4 -> 0, because e^(-x/2) decays
//     faster than any power of v grows.

#include "btk/errors.hpp"

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace btk {

using Complex = std::complex<double>;

enum class WeightFamily
{
	Exponential,
	DoubleExponential,
	Custom
};

/// User-supplied weight; tau and the class constants are taken as given.
struct CustomWeightSpec
{
	std::string name = "custom";
	std::function<double(double)> phi;
	std::function<double(double)> tau;
	double c1 = 1.0;
	double c2 = 1.0;
};

class RadialWeight
{
public:
	WeightFamily family() const { return family_; }
	double alpha() const { return alpha_; }
	double beta() const { return beta_; }
	double gamma() const { return gamma_; }

	/// Stable identifier, also used as basis-table cache fingerprint.
	const std::string& id() const { return id_; }

	double phi(double r) const;
	double dphi(double r) const;
	double d2phi(double r) const;
	/// Radial Laplacian phi'' + phi'/r.
	double laplacian_phi(double r) const;

	/// The weight is only exposed in log form; omega itself underflows near r = 1.
	double log_omega(double r) const { return -2.0 * phi(r); }
	double log_omega(Complex z) const { return log_omega(std::abs(z)); }

	double tau(double r) const;
	double tau(Complex z) const { return tau(std::abs(z)); }
	double tau_prime(double r) const;

	double c1() const { return c1_; }
	double c2() const { return c2_; }
	double m_tau() const { return m_tau_; }

	/// Default lattice/averaging scale, m_tau / 8.
	double default_delta() const { return m_tau_ / 8.0; }

	/// Throws ParameterError unless 0 < delta < m_tau.
	void require_delta(double delta) const;

	/// Upper bound for tau on the annulus {r_lo <= |z| < 1}, from a tabulated
	/// suffix maximum (inflated by 5%).
	double tau_sup_beyond(double r_lo) const;

	/// Largest tau on the estimation grid.
	double tau_max() const { return tau_sup_beyond(0.0); }

	friend RadialWeight make_exponential_weight(double alpha);
	friend RadialWeight make_double_exponential_weight(double alpha, double beta, double gamma);
	friend RadialWeight make_custom_weight(CustomWeightSpec spec);

private:
	RadialWeight() = default;
	void finalize(bool estimate_constants);

	WeightFamily family_ = WeightFamily::Exponential;
	double alpha_ = 1.0;
	double beta_ = 0.0;
	double gamma_ = 0.0;
	std::string id_;
	std::function<double(double)> custom_phi_;
	std::function<double(double)> custom_tau_;
	double c1_ = 0.0;
	double c2_ = 0.0;
	double m_tau_ = 0.0;
	std::vector<double> env_r_;
	std::vector<double> env_sup_;
};

RadialWeight make_exponential_weight(double alpha);
RadialWeight make_double_exponential_weight(double alpha, double beta, double gamma);
RadialWeight make_custom_weight(CustomWeightSpec spec);

/// Grid on which c1 and c2 are estimated: 4097 uniform points on [0, 1)
/// merged with 1 - 2^-k for k = 1..40.
std::vector<double> constant_estimation_grid();

/// Central-difference Laplacian phi'' + phi'/r with step 1e-5 (1 - r).
/// Used only to cross-check the closed forms.
double numeric_laplacian(const RadialWeight& w, double r);

struct CertificationReport
{
	int grid_points = 0;
	double sup_tau_over_gap = 0.0; ///< max tau(r) / (1 - r)
	double lipschitz = 0.0;        ///< max dyadic-stride difference quotient
	bool condition_a = false;
	bool condition_b = false;
	double tau_prime_at_rmax = 0.0;
	double r_max = 0.0;
	bool tau_decreasing_near_boundary = false;
	double tau_at_rmax = 0.0;
	double identity_max_deviation = 0.0; ///< max |tau^2 Lap_numeric - 1|
	int identity_skipped = 0;            ///< points where phi overflows
	double m_tau = 0.0;
	bool pass() const { return condition_a && condition_b; }
};

/// Checks conditions (A) and (B) with the weight's stored constants on a
/// uniform grid of `grid_size` points over [0, 1 - 1e-6] merged with the
/// dyadic points 1 - 2^-k.
CertificationReport certify_class_L(const RadialWeight& w, int grid_size);

} // namespace btk
