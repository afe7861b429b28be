#pragma once

// (delta, tau)-lattices on the truncated disk {|z| <= r_max}: points that are
// delta tau-separated, whose disks D(delta tau(z_j)) cover, and whose enlarged
// disks D(3 delta tau(z_j)) overlap boundedly.

#include "btk/weight.hpp"

#include <cstddef>
#include <vector>

namespace btk {

/// d_tau(z, zeta) = |z - zeta| / min(tau(z), tau(zeta)).
double quasi_distance(const RadialWeight& w, Complex z, Complex zeta);

/// Spatial index over points of the disk. Cells are polar: radial bands whose
/// width follows scale * tau, split into angular sectors of comparable length,
/// so that a query of radius ~ scale * tau touches O(1) cells anywhere.
class PolarIndex
{
public:
	PolarIndex(const RadialWeight& w, double scale, double r_max);

	void insert(Complex z, std::size_t id);
	/// Removes a previously inserted (z, id) pair; no-op if absent.
	void erase(Complex z, std::size_t id);

	/// Calls f(id) for every stored point that may lie in the open disk
	/// D(c, radius); candidates outside the disk may also be reported.
	template <class F>
	void visit(Complex c, double radius, F&& f) const
	{
		double rc = std::abs(c);
		auto [b0, b1] = band_range(rc - radius, rc + radius);
		double half = radius < rc ? std::asin(radius / rc) : kFullTurn;
		double theta = std::arg(c);
		for (std::size_t b = b0; b < b1; ++b)
		{
			const Band& band = bands_[b];
			std::size_t n = band.cells.size();
			if (2.0 * half + band.sector >= kFullTurn || n == 1)
			{
				for (const auto& cell : band.cells)
					for (std::size_t id : cell)
						f(id);
				continue;
			}
			long s0 = static_cast<long>(std::floor((theta - half + kFullTurn) / band.sector));
			long s1 = static_cast<long>(std::floor((theta + half + kFullTurn) / band.sector));
			for (long s = s0; s <= s1; ++s)
				for (std::size_t id : band.cells[static_cast<std::size_t>(s) % n])
					f(id);
		}
	}

private:
	static constexpr double kFullTurn = 6.283185307179586;

	struct Band
	{
		double sector = 0.0;
		std::vector<std::vector<std::size_t>> cells;
	};

	std::pair<std::size_t, std::size_t> band_range(double lo, double hi) const;
	std::vector<std::size_t>& cell_of(Complex z);

	std::vector<double> edges_; // band b covers [edges_[b], edges_[b+1])
	std::vector<Band> bands_;
};

/// Radius R such that every point z_j with |c - z_j| < scale * tau(z_j) lies
/// within R of c (tau bounded by its envelope beyond |c| - R).
double reach_bound(const RadialWeight& w, Complex c, double scale);

struct LatticeOptions
{
	std::size_t max_points = 2'000'000;
	/// Probe count for covering; 0 selects max(1e5, 2 (r_max / (delta tau(r_max)))^2).
	std::size_t probe_count = 0;
	std::size_t max_probe_count = 4'000'000;
	int max_repair_rounds = 50;
	/// Candidate spacing on each ring, as a fraction of delta tau.
	double sweep_step = 0.25;
};

struct LatticeCertificate
{
	bool separated = false;
	double min_separation_ratio = 0.0; ///< min |z_j - z_k| / (delta max(tau_j, tau_k))
	std::size_t probe_count = 0;
	std::size_t uncovered = 0;        ///< probes still uncovered after repair
	int repair_rounds = 0;
	std::size_t inserted_points = 0;  ///< probes promoted to lattice points
	std::size_t removed_points = 0;   ///< points dropped to keep separation
	int multiplicity = 0;             ///< max overlap of the 3 delta tau disks
	bool pass(int max_multiplicity = 256) const
	{
		return separated && uncovered == 0 && multiplicity <= max_multiplicity;
	}
};

struct Lattice
{
	std::string weight_id;
	double delta = 0.0;
	double r_max = 0.0;
	std::vector<Complex> points; ///< points[0] = 0
	int multiplicity_observed = 0;
	LatticeCertificate certificate;
};

/// Greedy annular sweep followed by probe-driven repair and certification.
/// Throws ParameterError for delta outside (0, m_tau), DomainError for r_max
/// outside (0, 1), ResourceError when more than options.max_points points are
/// needed, ConvergenceError if repair does not settle.
Lattice build_lattice(const RadialWeight& w, double delta, double r_max,
                      const LatticeOptions& options = {});

/// Halton points (bases 2, 3) mapped area-uniformly onto {|z| <= r_max}.
std::vector<Complex> probe_points(double r_max, std::size_t count);

/// Expected point count of build_lattice: a greedy delta tau-packing holds about
/// 2.5 / delta^2 points per unit of  int_{|z| <= r_max} tau^-2 dA.
double estimate_lattice_size(const RadialWeight& w, double delta, double r_max);

std::size_t default_probe_count(const RadialWeight& w, double delta, double r_max);

/// Minimum of |z_j - z_k| / (delta max(tau(z_j), tau(z_k))) over all pairs
/// (infinity for fewer than two points).
double min_separation_ratio(const RadialWeight& w, const Lattice& lat);

/// Probes p not covered by any disk D(z_j, delta tau(z_j)).
std::vector<Complex> uncovered_probes(const RadialWeight& w, const Lattice& lat,
                                      const std::vector<Complex>& probes);

/// Largest number of disks D(z_j, 3 delta tau(z_j)) containing one of the probes
/// or one of the lattice points.
int observed_multiplicity(const RadialWeight& w, const Lattice& lat,
                          const std::vector<Complex>& probes);

/// Re-runs separation, covering and multiplicity checks.
LatticeCertificate certify_lattice(const RadialWeight& w, const Lattice& lat,
                                   std::size_t probe_count = 0);

/// #{ z_j : d_tau(z_j, zeta) < 2^m delta }.
std::size_t count_in_ball(const RadialWeight& w, const Lattice& lat, Complex zeta, int m);

/// count_in_ball for many centres at once, sharing one spatial index.
std::vector<std::size_t> count_in_balls(const RadialWeight& w, const Lattice& lat,
                                        const std::vector<Complex>& centres, int m);

/// Splits the lattice into subsequences that are 2^m delta-separated in d_tau by
/// repeated greedy maximal extraction in stored order. Parts hold indices into
/// lat.points. Requires m >= 1.
std::vector<std::vector<std::size_t>> partition_separated(const RadialWeight& w, const Lattice& lat,
                                                          int m);

} // namespace btk
