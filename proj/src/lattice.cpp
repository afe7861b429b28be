#include "btk/lattice.hpp"

#include "btk/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace btk {

namespace {

void require_in_disk(Complex z, const char* what)
{
	if (!(std::abs(z) < 1.0))
		throw DomainError(std::string(what) + " must lie in the open unit disk");
}

// Width of the radial step at radius r for scale delta: delta tau evaluated
// a little outward so that the step stays positive where tau vanishes at 0.
double band_width(const RadialWeight& w, double r, double scale)
{
	double t = std::max(w.tau(r), w.tau(std::min(r + 0.5 * scale * w.tau_max(), 1.0 - 1e-12)));
	return std::max(scale * t, 1e-12);
}

} // namespace

double quasi_distance(const RadialWeight& w, Complex z, Complex zeta)
{
	require_in_disk(z, "z");
	require_in_disk(zeta, "zeta");
	return std::abs(z - zeta) / std::min(w.tau(z), w.tau(zeta));
}

PolarIndex::PolarIndex(const RadialWeight& w, double scale, double r_max)
{
	constexpr std::size_t kMaxSectors = 1u << 22;
	double r = 0.0;
	edges_.push_back(0.0);
	while (r < r_max)
	{
		double width = band_width(w, r, scale);
		double outer = std::min(r + width, r_max);
		if (r_max - outer < 0.25 * width)
			outer = r_max;
		double circ = kFullTurn * outer;
		std::size_t n = static_cast<std::size_t>(std::clamp(std::floor(circ / width), 1.0,
		                                                    static_cast<double>(kMaxSectors)));
		Band band;
		band.sector = kFullTurn / static_cast<double>(n);
		band.cells.resize(n);
		bands_.push_back(std::move(band));
		edges_.push_back(outer);
		r = outer;
	}
	if (bands_.empty())
	{
		bands_.push_back(Band{kFullTurn, std::vector<std::vector<std::size_t>>(1)});
		edges_.push_back(std::max(r_max, 0.0));
	}
}

std::pair<std::size_t, std::size_t> PolarIndex::band_range(double lo, double hi) const
{
	auto first = std::upper_bound(edges_.begin(), edges_.end(), std::max(lo, 0.0));
	std::size_t b0 = first == edges_.begin() ? 0 : static_cast<std::size_t>(first - edges_.begin()) - 1;
	auto last = std::upper_bound(edges_.begin(), edges_.end(), hi);
	std::size_t b1 = static_cast<std::size_t>(last - edges_.begin());
	b0 = std::min(b0, bands_.size() - 1);
	b1 = std::clamp<std::size_t>(b1, b0 + 1, bands_.size());
	if (hi >= edges_.back())
		b1 = bands_.size();
	return {b0, b1};
}

std::vector<std::size_t>& PolarIndex::cell_of(Complex z)
{
	double r = std::abs(z);
	auto it = std::upper_bound(edges_.begin(), edges_.end(), r);
	std::size_t b = it == edges_.begin() ? 0 : static_cast<std::size_t>(it - edges_.begin()) - 1;
	b = std::min(b, bands_.size() - 1);
	Band& band = bands_[b];
	std::size_t n = band.cells.size();
	auto s = static_cast<std::size_t>(std::floor((std::arg(z) + kFullTurn) / band.sector));
	return band.cells[s % n];
}

void PolarIndex::insert(Complex z, std::size_t id)
{
	cell_of(z).push_back(id);
}

void PolarIndex::erase(Complex z, std::size_t id)
{
	auto& cell = cell_of(z);
	auto it = std::find(cell.begin(), cell.end(), id);
	if (it != cell.end())
		cell.erase(it);
}

double reach_bound(const RadialWeight& w, Complex c, double scale)
{
	double rc = std::abs(c);
	double reach = scale * w.tau_max();
	for (int i = 0; i < 3; ++i)
		reach = std::min(reach, scale * w.tau_sup_beyond(rc - reach));
	return reach;
}

std::vector<Complex> probe_points(double r_max, std::size_t count)
{
	std::vector<Complex> probes;
	probes.reserve(count);
	for (std::size_t i = 1; i <= count; ++i)
	{
		double u = radical_inverse(i, 2);
		double v = radical_inverse(i, 3);
		probes.push_back(std::polar(r_max * std::sqrt(u), 2.0 * kPi * v));
	}
	return probes;
}

double estimate_lattice_size(const RadialWeight& w, double delta, double r_max)
{
	auto density = [&](double r) {
		double t = w.tau(r);
		return t > 0.0 ? 2.0 * r / (t * t) : 0.0;
	};
	return 2.5 * integrate_panels(density, 0.0, r_max, 200) / (delta * delta);
}

std::size_t default_probe_count(const RadialWeight& w, double delta, double r_max)
{
	double cell = r_max / (delta * w.tau(r_max));
	double n = std::max(1e5, 2.0 * cell * cell);
	return static_cast<std::size_t>(std::min(n, 4e6));
}

namespace {

class LatticeBuilder
{
public:
	LatticeBuilder(const RadialWeight& w, double delta, double r_max, std::size_t cap)
	    : w_(w), delta_(delta), r_max_(r_max), cap_(cap), index_(w, delta, r_max)
	{
	}

	// Index of a point that violates separation with c, or npos.
	std::size_t conflict(Complex c, double tau_c) const
	{
		std::size_t found = npos;
		double reach = std::max(delta_ * tau_c, reach_bound(w_, c, delta_));
		index_.visit(c, reach, [&](std::size_t j) {
			if (found == npos && alive_[j] &&
			    std::abs(c - pts_[j]) < delta_ * std::max(tau_c, tau_[j]))
				found = j;
		});
		return found;
	}

	bool covered(Complex p) const
	{
		bool hit = false;
		index_.visit(p, reach_bound(w_, p, delta_), [&](std::size_t j) {
			if (!hit && alive_[j] && std::abs(p - pts_[j]) < delta_ * tau_[j])
				hit = true;
		});
		return hit;
	}

	void add(Complex z, double tau_z)
	{
		if (live_ >= cap_)
			throw ResourceError("lattice needs more than " + std::to_string(cap_) +
			                    " points; lower r_max or raise the cap");
		index_.insert(z, pts_.size());
		pts_.push_back(z);
		tau_.push_back(tau_z);
		alive_.push_back(true);
		++live_;
	}

	void remove(std::size_t j)
	{
		index_.erase(pts_[j], j);
		alive_[j] = false;
		--live_;
	}

	void sweep(double step)
	{
		add(Complex(0.0, 0.0), w_.tau(0.0));
		double r = 0.0;
		int ring = 0;
		while (r < r_max_)
		{
			double h = step * delta_ * w_.tau_max();
			for (int i = 0; i < 6; ++i)
				h = step * delta_ * w_.tau(std::min(r + h, r_max_));
			h = std::max(h, 1e-14);
			r = std::min(r + h, r_max_);
			++ring;
			double t = w_.tau(r);
			// the rim has no outer ring to fill its gaps, so sample it densely
			double spacing = (r == r_max_ ? 0.125 : 1.0) * step * delta_ * t;
			auto n = static_cast<std::size_t>(std::ceil(2.0 * kPi * r / spacing));
			n = std::max<std::size_t>(n, 1);
			double offset = (ring % 2) ? 0.5 : 0.0;
			for (std::size_t i = 0; i < n; ++i)
			{
				Complex c = std::polar(r, 2.0 * kPi * (static_cast<double>(i) + offset) / static_cast<double>(n));
				if (std::abs(c) > r_max_)
					c *= std::nextafter(r_max_ / std::abs(c), 0.0);
				double tc = w_.tau(c);
				if (conflict(c, tc) == npos)
					add(c, tc);
			}
		}
	}

	// Promotes uncovered probes to lattice points; conflicting (smaller-tau)
	// points are dropped. Returns the number of probes that were uncovered.
	std::size_t repair(const std::vector<Complex>& probes, std::size_t& inserted, std::size_t& removed)
	{
		std::size_t misses = 0;
		for (Complex p : probes)
		{
			if (covered(p))
				continue;
			++misses;
			double tp = w_.tau(p);
			bool blocked = false;
			for (;;)
			{
				std::size_t j = conflict(p, tp);
				if (j == npos)
					break;
				if (j == 0)
				{
					blocked = true;
					break;
				}
				remove(j);
				++removed;
			}
			if (!blocked)
			{
				add(p, tp);
				++inserted;
			}
		}
		return misses;
	}

	std::vector<Complex> points() const
	{
		std::vector<Complex> out;
		out.reserve(live_);
		for (std::size_t j = 0; j < pts_.size(); ++j)
			if (alive_[j])
				out.push_back(pts_[j]);
		return out;
	}

	static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

private:
	const RadialWeight& w_;
	double delta_;
	double r_max_;
	std::size_t cap_;
	PolarIndex index_;
	std::vector<Complex> pts_;
	std::vector<double> tau_;
	std::vector<bool> alive_;
	std::size_t live_ = 0;
};

} // namespace

Lattice build_lattice(const RadialWeight& w, double delta, double r_max, const LatticeOptions& options)
{
	w.require_delta(delta);
	if (!(r_max > 0.0 && r_max < 1.0))
		throw DomainError("r_max must lie in (0, 1)");
	double expected = estimate_lattice_size(w, delta, r_max);
	if (expected > static_cast<double>(options.max_points))
		throw ResourceError("lattice would need about " + std::to_string(static_cast<long long>(expected)) +
		                    " points (cap " + std::to_string(options.max_points) + ")");

	LatticeBuilder builder(w, delta, r_max, options.max_points);
	builder.sweep(options.sweep_step);

	std::size_t count = options.probe_count ? options.probe_count : default_probe_count(w, delta, r_max);
	count = std::min(count, options.max_probe_count);
	auto probes = probe_points(r_max, count);

	std::size_t inserted = 0, removed = 0;
	int rounds = 0;
	for (;;)
	{
		std::size_t misses = builder.repair(probes, inserted, removed);
		if (misses == 0)
			break;
		if (++rounds > options.max_repair_rounds)
			throw ConvergenceError("lattice repair did not settle after " +
			                       std::to_string(options.max_repair_rounds) + " rounds");
	}

	Lattice lat;
	lat.weight_id = w.id();
	lat.delta = delta;
	lat.r_max = r_max;
	lat.points = builder.points();

	LatticeCertificate& cert = lat.certificate;
	cert.probe_count = probes.size();
	cert.repair_rounds = rounds;
	cert.inserted_points = inserted;
	cert.removed_points = removed;
	cert.min_separation_ratio = min_separation_ratio(w, lat);
	cert.separated = cert.min_separation_ratio >= 1.0 - 1e-12;
	cert.uncovered = uncovered_probes(w, lat, probes).size();
	cert.multiplicity = observed_multiplicity(w, lat, probes);
	lat.multiplicity_observed = cert.multiplicity;
	return lat;
}

namespace {

PolarIndex index_points(const RadialWeight& w, const Lattice& lat, double scale)
{
	PolarIndex index(w, scale, lat.r_max);
	for (std::size_t j = 0; j < lat.points.size(); ++j)
		index.insert(lat.points[j], j);
	return index;
}

std::vector<double> taus(const RadialWeight& w, const std::vector<Complex>& pts)
{
	std::vector<double> t(pts.size());
	for (std::size_t j = 0; j < pts.size(); ++j)
		t[j] = w.tau(pts[j]);
	return t;
}

} // namespace

double min_separation_ratio(const RadialWeight& w, const Lattice& lat)
{
	const auto& pts = lat.points;
	auto t = taus(w, pts);
	auto index = index_points(w, lat, lat.delta);
	double best = std::numeric_limits<double>::infinity();
	for (std::size_t j = 0; j < pts.size(); ++j)
	{
		// any pair with ratio < 2 has |z_j - z_k| < 2 delta max(tau_j, tau_k)
		double reach = std::max(2.0 * lat.delta * t[j], reach_bound(w, pts[j], 2.0 * lat.delta));
		index.visit(pts[j], reach, [&](std::size_t k) {
			if (k <= j)
				return;
			double ratio = std::abs(pts[j] - pts[k]) / (lat.delta * std::max(t[j], t[k]));
			best = std::min(best, ratio);
		});
	}
	return best;
}

std::vector<Complex> uncovered_probes(const RadialWeight& w, const Lattice& lat,
                                      const std::vector<Complex>& probes)
{
	auto t = taus(w, lat.points);
	auto index = index_points(w, lat, lat.delta);
	std::vector<Complex> misses;
	for (Complex p : probes)
	{
		bool hit = false;
		index.visit(p, reach_bound(w, p, lat.delta), [&](std::size_t j) {
			if (!hit && std::abs(p - lat.points[j]) < lat.delta * t[j])
				hit = true;
		});
		if (!hit)
			misses.push_back(p);
	}
	return misses;
}

int observed_multiplicity(const RadialWeight& w, const Lattice& lat, const std::vector<Complex>& probes)
{
	auto t = taus(w, lat.points);
	double scale = 3.0 * lat.delta;
	auto index = index_points(w, lat, scale);
	int best = 0;
	auto count_at = [&](Complex p) {
		int n = 0;
		index.visit(p, reach_bound(w, p, scale), [&](std::size_t j) {
			if (std::abs(p - lat.points[j]) < scale * t[j])
				++n;
		});
		best = std::max(best, n);
	};
	for (Complex p : probes)
		count_at(p);
	for (Complex p : lat.points)
		count_at(p);
	return best;
}

LatticeCertificate certify_lattice(const RadialWeight& w, const Lattice& lat, std::size_t probe_count)
{
	std::size_t count = probe_count ? probe_count : default_probe_count(w, lat.delta, lat.r_max);
	auto probes = probe_points(lat.r_max, count);
	LatticeCertificate cert;
	cert.probe_count = probes.size();
	cert.min_separation_ratio = min_separation_ratio(w, lat);
	cert.separated = cert.min_separation_ratio >= 1.0 - 1e-12;
	cert.uncovered = uncovered_probes(w, lat, probes).size();
	cert.multiplicity = observed_multiplicity(w, lat, probes);
	return cert;
}

std::size_t count_in_ball(const RadialWeight& w, const Lattice& lat, Complex zeta, int m)
{
	require_in_disk(zeta, "zeta");
	double radius = std::ldexp(lat.delta, m);
	double tz = w.tau(zeta);
	std::size_t n = 0;
	for (Complex z : lat.points)
	{
		double d = std::abs(z - zeta);
		if (d < radius * tz && d < radius * std::min(w.tau(z), tz))
			++n;
	}
	return n;
}

std::vector<std::size_t> count_in_balls(const RadialWeight& w, const Lattice& lat,
                                        const std::vector<Complex>& centres, int m)
{
	double scale = std::ldexp(lat.delta, m);
	auto t = taus(w, lat.points);
	auto index = index_points(w, lat, scale);
	std::vector<std::size_t> counts;
	counts.reserve(centres.size());
	for (Complex zeta : centres)
	{
		require_in_disk(zeta, "zeta");
		double tz = w.tau(zeta);
		std::size_t n = 0;
		index.visit(zeta, scale * tz, [&](std::size_t j) {
			n += std::abs(zeta - lat.points[j]) < scale * std::min(t[j], tz);
		});
		counts.push_back(n);
	}
	return counts;
}

std::vector<std::vector<std::size_t>> partition_separated(const RadialWeight& w, const Lattice& lat, int m)
{
	if (m < 1)
		throw ParameterError("partition_separated needs m >= 1");
	double scale = std::ldexp(lat.delta, m);
	auto t = taus(w, lat.points);

	std::vector<std::vector<std::size_t>> parts;
	std::vector<std::size_t> remaining(lat.points.size());
	for (std::size_t j = 0; j < remaining.size(); ++j)
		remaining[j] = j;

	while (!remaining.empty())
	{
		PolarIndex index(w, scale, lat.r_max);
		std::vector<std::size_t> part, leftover;
		for (std::size_t j : remaining)
		{
			Complex z = lat.points[j];
			bool clash = false;
			// d_tau < 2^m delta forces |z - a| < 2^m delta tau(z)
			index.visit(z, scale * t[j], [&](std::size_t k) {
				if (!clash && std::abs(z - lat.points[k]) < scale * std::min(t[j], t[k]))
					clash = true;
			});
			if (clash)
				leftover.push_back(j);
			else
			{
				index.insert(z, j);
				part.push_back(j);
			}
		}
		parts.push_back(std::move(part));
		remaining.swap(leftover);
	}
	return parts;
}

} // namespace btk
