#include "btk/verify.hpp"

#include "btk/basis.hpp"
#include "btk/errors.hpp"
#include "btk/lattice.hpp"
#include "btk/numeric.hpp"
#include "btk/toeplitz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <sstream>

namespace btk {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

struct CheckName
{
	Check check;
	const char* name;
};

constexpr CheckName kCheckNames[] = {
    {Check::KernelEstimates, "kernel_estimates"},
    {Check::LatticeCert, "lattice_cert"},
    {Check::Boundedness, "boundedness"},
    {Check::Compactness, "compactness"},
    {Check::SchattenEquivalence, "schatten_equivalence"},
    {Check::BerezinEquivalence, "berezin_equivalence"},
};

std::string with_p(const std::string& name, double p)
{
	return name + "[p=" + format_double(p) + "]";
}

std::string at_r(const std::string& name, double r)
{
	return name + "@" + format_double(r);
}

// a / b, NaN when either side vanishes
double ratio(double a, double b)
{
	if (a == 0.0 || b == 0.0 || std::isnan(a) || std::isnan(b))
		return kNaN;
	return a / b;
}

WindowResult make_window(const std::string& name, double value, double lo, double hi)
{
	WindowResult w{name, value, lo, hi, Status::NotApplicable};
	if (!std::isnan(value))
		w.status = value >= lo && value <= hi ? Status::Pass : Status::Fail;
	return w;
}

bool is_area_measure(const MeasureSpec& mu)
{
	if (mu.kind() != MeasureKind::Radial)
		return false;
	const RadialDensity& d = mu.density();
	return d.family != RadialFamily::WeightCompensated && d.lo == 0.0 && d.hi == 1.0 && d.s == 0.0 && d.beta == 0.0;
}

// Shared state for all measures of one scenario.
struct Context
{
	const Scenario& s;
	RadialWeight w;
	double delta = 0.0;
	bool doubled_delta = false; ///< 2 delta is admissible; report it alongside delta
	std::vector<double> radii; // r_max ladder plus the lattice radius, sorted
	std::optional<BasisTable> bt;
	std::optional<Lattice> lattice;

	bool wants(Check c) const { return s.checks.count(c) > 0; }
};

void kernel_checks(const Context& ctx, ReportRow& row)
{
	const Scenario& s = ctx.s;
	const RadialWeight& w = ctx.w;
	const BasisTable& bt = *ctx.bt;
	double top = s.r_max_ladder.back();
	double lo = kInf, hi = 0.0;
	for (int i = 0; i < s.kernel_grid; ++i)
	{
		double r = s.kernel_grid == 1 ? 0.0 : top * i / (s.kernel_grid - 1);
		double t = w.tau(r);
		double v = std::exp(log_kernel_norm_sq(bt, r) + w.log_omega(r)) * t * t;
		lo = std::min(lo, v);
		hi = std::max(hi, v);
	}
	row.quantities.push_back({"kernel.min", lo});
	row.quantities.push_back({"kernel.max", hi});
	row.windows.push_back(make_window("kernel.spread", lo > 0.0 ? hi / lo : kInf, 1.0, s.windows.kernel_spread));

	std::mt19937_64 rng(s.seed);
	std::uniform_real_distribution<double> unit(0.0, 1.0);
	double reach = std::min(0.99, top);
	double dmin = kInf, dmax = 0.0;
	for (int i = 0; i < s.sample_pairs; ++i)
	{
		Complex z = std::polar(reach * std::sqrt(unit(rng)), 2.0 * kPi * unit(rng));
		Complex zeta = z + std::polar(ctx.delta * w.tau(z) * std::sqrt(unit(rng)), 2.0 * kPi * unit(rng));
		double v = std::exp(kernel(bt, z, zeta).log_abs -
		                    0.5 * (log_kernel_norm_sq(bt, z) + log_kernel_norm_sq(bt, zeta)));
		dmin = std::min(dmin, v);
		dmax = std::max(dmax, v);
	}
	row.windows.push_back(make_window("diagonal.min", dmin, s.windows.diagonal_min, 1.0));
	row.windows.push_back(make_window("diagonal.max", dmax, 0.0, 1.0 + 1e-12));
}

void lattice_checks(const Context& ctx, ReportRow& row)
{
	const Lattice& lat = *ctx.lattice;
	const LatticeCertificate& c = lat.certificate;
	row.quantities.push_back({"lattice.points", static_cast<double>(lat.points.size())});
	row.quantities.push_back({"lattice.repair_rounds", static_cast<double>(c.repair_rounds)});
	row.windows.push_back(make_window("lattice.separation", c.min_separation_ratio, 1.0, kInf));
	row.windows.push_back(make_window("lattice.probes", static_cast<double>(c.probe_count), 1e5, kInf));
	row.windows.push_back(make_window("lattice.uncovered", static_cast<double>(c.uncovered), 0.0, 0.0));
	row.windows.push_back(make_window("lattice.multiplicity", static_cast<double>(lat.multiplicity_observed), 1.0,
	                                  ctx.s.windows.multiplicity_max));
}

// Ladder verdict for compactly supported measures: strictly decreasing while at
// or above tail * C, never climbing back above that level, and below it at the
// last rung.
bool strictly_decays(const std::vector<double>& ladder, double c, double tail)
{
	double floor = tail * c;
	for (std::size_t k = 1; k < ladder.size(); ++k)
	{
		bool ok = ladder[k - 1] >= floor ? ladder[k] < ladder[k - 1] : ladder[k] < floor;
		if (!ok)
			return false;
	}
	return !ladder.empty() && ladder.back() < floor;
}

// Truncated Schatten power sums at dim/4, dim/2 and dim.
std::vector<double> truncated_power_sums(const ToeplitzMatrix& tm, double p)
{
	std::vector<double> out;
	for (int d : {tm.dim / 4, tm.dim / 2, tm.dim})
	{
		std::vector<double> eig;
		switch (tm.structure)
		{
		case MatrixStructure::Diagonal:
			eig.assign(tm.diagonal.begin(), tm.diagonal.begin() + d);
			break;
		case MatrixStructure::FiniteRank:
			eig = spectrum(tm).eigenvalues;
			break;
		case MatrixStructure::Dense:
		{
			std::vector<Complex> sub(static_cast<std::size_t>(d) * d);
			for (int m = 0; m < d; ++m)
				for (int n = 0; n < d; ++n)
					sub[m * d + n] = tm.entries[static_cast<std::size_t>(m) * tm.dim + n];
			eig = hermitian_eigenvalues(std::move(sub), d);
			break;
		}
		}
		out.push_back(std::pow(schatten_norm(eig, p), p));
	}
	return out;
}

std::size_t radius_index(const std::vector<double>& radii, double r)
{
	return static_cast<std::size_t>(std::lower_bound(radii.begin(), radii.end(), r) - radii.begin());
}

void measure_checks(const Context& ctx, const NamedMeasure& nm, ReportRow& row)
{
	const Scenario& s = ctx.s;
	const RadialWeight& w = ctx.w;
	const MeasureSpec& mu = nm.measure;
	double delta = ctx.delta;
	double top = s.r_max_ladder.back();
	const Windows& win = s.windows;

	row.quantities.push_back({"mass", mu.total_mass(w)});
	row.quantities.push_back({"support_radius", mu.is_zero() ? 0.0 : mu.support_radius()});

	double c_mu = kNaN;
	if (ctx.wants(Check::Boundedness) || ctx.wants(Check::Compactness))
	{
		CarlesonReport rep = carleson_constant(w, mu, delta, top, default_tail_ladder(top));
		c_mu = rep.constant;
		row.quantities.push_back({"C_mu", c_mu});
		for (std::size_t k = 0; k < rep.ladder_r.size(); ++k)
			row.quantities.push_back({at_r("tail_sup", rep.ladder_r[k]), rep.ladder_sup[k]});
		if (ctx.wants(Check::Compactness))
		{
			double last = rep.ladder_sup.empty() ? kNaN : rep.ladder_sup.back();
			row.quantities.push_back({"tail_sup.last/C_mu", c_mu > 0.0 ? last / c_mu : kNaN});
			if (c_mu == 0.0)
				row.windows.push_back(make_window("compact.decay", kNaN, 1.0, 1.0));
			else if (is_area_measure(mu))
			{
				auto [lo, hi] = std::minmax_element(rep.ladder_sup.begin(), rep.ladder_sup.end());
				row.windows.push_back(make_window("compact.constant", (*hi - *lo) / *hi, 0.0, 1e-6));
			}
			else if (mu.support_radius() < 1.0)
				row.windows.push_back(make_window(
				    "compact.decay", strictly_decays(rep.ladder_sup, c_mu, win.tail_fraction) ? 1.0 : 0.0, 1.0, 1.0));
		}
	}

	std::optional<ToeplitzMatrix> tm;
	std::optional<SpectrumReport> spec;
	if (ctx.wants(Check::Boundedness) || ctx.wants(Check::SchattenEquivalence))
	{
		tm = assemble_toeplitz(w, *ctx.bt, mu, s.dim);
		spec = spectrum(*tm, s.ps);
		row.quantities.push_back({"lambda1", spec->operator_norm});
		row.quantities.push_back({"trace", spec->trace});
		row.quantities.push_back({"clipped", spec->clipped});
		for (double p : s.ps)
		{
			const SchattenEntry& e = spec->schatten.at(p);
			row.quantities.push_back({with_p("S_p", p), e.norm});
			row.quantities.push_back({with_p("S_p^p", p), e.power_sum});
			row.quantities.push_back({with_p("S_p.tail_flag", p), e.tail_flag ? 1.0 : 0.0});
		}
	}
	if (ctx.wants(Check::Boundedness))
	{
		double r = ratio(spec->operator_norm, c_mu);
		row.quantities.push_back({"ratio.bounded*delta^2", r * delta * delta});
		if (ctx.doubled_delta)
		{
			double c2 = carleson_constant(w, mu, 2.0 * delta, top, {}).constant;
			row.quantities.push_back({"C_mu@2delta", c2});
			row.quantities.push_back({"ratio.bounded@2delta", ratio(spec->operator_norm, c2)});
		}
		row.windows.push_back(make_window("ratio.bounded", r, win.bounded_lo, win.bounded_hi));
	}

	bool schatten = ctx.wants(Check::SchattenEquivalence);
	bool berezin = ctx.wants(Check::BerezinEquivalence);
	if (!schatten && !berezin)
		return;

	// int mu_hat^p d lambda_tau at every radius, indexed [radius][p]
	std::vector<std::vector<double>> lp_mu;
	for (double r : ctx.radii)
		lp_mu.push_back(mu_hat_lp_integrals(w, mu, delta, s.ps, r));
	for (std::size_t k = 0; k < ctx.radii.size(); ++k)
		for (std::size_t i = 0; i < s.ps.size(); ++i)
			row.quantities.push_back({at_r(with_p("lp_mu_hat", s.ps[i]), ctx.radii[k]), lp_mu[k][i]});
	std::size_t first = radius_index(ctx.radii, s.r_max_ladder.front());
	std::size_t last = radius_index(ctx.radii, top);

	if (schatten)
		for (std::size_t i = 0; i < s.ps.size(); ++i)
		{
			double p = s.ps[i];
			row.quantities.push_back({with_p("ratio.schatten", p), ratio(spec->schatten.at(p).power_sum, lp_mu[last][i])});
			if (ctx.doubled_delta)
			{
				double lp2 = mu_hat_lp_integrals(w, mu, 2.0 * delta, std::vector<double>{p}, top)[0];
				row.quantities.push_back({with_p("ratio.schatten@2delta", p), ratio(spec->schatten.at(p).power_sum, lp2)});
			}
			double growth = ratio(lp_mu[last][i], lp_mu[first][i]);
			bool lp_divergent = growth > win.divergence_growth;
			auto sums = truncated_power_sums(*tm, p);
			double inc1 = sums[1] - sums[0], inc2 = sums[2] - sums[1];
			bool dim_divergent = inc1 > 0.0 && inc2 >= 0.9 * inc1;
			row.quantities.push_back({with_p("lp_growth", p), growth});
			row.quantities.push_back({with_p("S_p^p@dim/4", p), sums[0]});
			row.quantities.push_back({with_p("S_p^p@dim/2", p), sums[1]});
			row.quantities.push_back({with_p("divergent.lp", p), lp_divergent ? 1.0 : 0.0});
			row.quantities.push_back({with_p("divergent.schatten", p), dim_divergent ? 1.0 : 0.0});
			row.windows.push_back(make_window(with_p("divergence_agree", p),
			                                  mu.is_zero() ? kNaN : (lp_divergent == dim_divergent ? 1.0 : 0.0), 1.0,
			                                  1.0));
		}

	if (!berezin)
		return;
	std::vector<std::vector<double>> lp_b;
	for (double r : ctx.radii)
		lp_b.push_back(berezin_lp_integrals(w, *ctx.bt, mu, s.ps, r));
	for (std::size_t k = 0; k < ctx.radii.size(); ++k)
		for (std::size_t i = 0; i < s.ps.size(); ++i)
			row.quantities.push_back({at_r(with_p("lp_berezin", s.ps[i]), ctx.radii[k]), lp_b[k][i]});
	if (!ctx.lattice)
	{
		row.windows.push_back(make_window("lattice.available", 0.0, 1.0, 1.0));
		return;
	}
	std::size_t at_lat = radius_index(ctx.radii, s.lattice_r_max);
	auto sums = lattice_lp_sums(w, mu, *ctx.lattice, delta, s.ps);
	for (std::size_t i = 0; i < s.ps.size(); ++i)
	{
		double p = s.ps[i];
		row.quantities.push_back({with_p("lattice_sum", p), sums[i]});
		double b_mu = ratio(lp_b[last][i], lp_mu[last][i]);
		double lat_mu = ratio(sums[i], lp_mu[at_lat][i]);
		double b_lat = ratio(lp_b[at_lat][i], sums[i]);
		row.windows.push_back(make_window(with_p("ratio.lattice/mu_hat", p), lat_mu, win.berezin_lo, win.berezin_hi));
		if (p >= 1.0)
		{
			row.windows.push_back(make_window(with_p("ratio.B/mu_hat", p), b_mu, win.berezin_lo, win.berezin_hi));
			row.windows.push_back(make_window(with_p("ratio.B/lattice", p), b_lat, win.berezin_lo, win.berezin_hi));
		}
		else
		{
			row.quantities.push_back({with_p("ratio.B/mu_hat", p), b_mu});
			row.quantities.push_back({with_p("ratio.B/lattice", p), b_lat});
		}
	}

	// pointwise B mu >= c mu_hat on lattice points where mu_hat > 0
	std::vector<Complex> hits;
	for (Complex z : ctx.lattice->points)
		if (mu_hat(w, mu, delta, z) > 0.0)
			hits.push_back(z);
	double worst = kNaN;
	if (!hits.empty())
	{
		BerezinEvaluator b(w, *ctx.bt, mu);
		std::size_t stride = std::max<std::size_t>(1, hits.size() / static_cast<std::size_t>(s.pointwise_samples));
		worst = kInf;
		for (std::size_t j = 0; j < hits.size(); j += stride)
			worst = std::min(worst, b(hits[j]) / mu_hat(w, mu, delta, hits[j]));
	}
	row.windows.push_back(make_window("pointwise.B/mu_hat", worst, win.pointwise_min, kInf));
}

ReportRow family_row(const Scenario& s, const std::vector<ReportRow>& rows)
{
	ReportRow fam;
	fam.scenario_id = s.id;
	fam.measure_id = "family";
	auto spread = [&](const std::string& name, bool compact_only, std::size_t& count) {
		double lo = kInf, hi = 0.0;
		count = 0;
		for (const ReportRow& r : rows)
		{
			if (!r.error.empty() || !r.has_quantity("support_radius"))
				continue;
			if (compact_only && r.quantity("support_radius") > s.windows.compact_support + 1e-12)
				continue;
			double v = r.has_quantity(name) ? r.quantity(name) : (r.has_window(name) ? r.window(name).value : kNaN);
			if (!(v > 0.0) || !std::isfinite(v))
				continue;
			lo = std::min(lo, v);
			hi = std::max(hi, v);
			++count;
		}
		return count >= 2 ? hi / lo : kNaN;
	};
	std::size_t count = 0;
	if (s.checks.count(Check::Boundedness))
		fam.quantities.push_back({"spread.bounded", spread("ratio.bounded", false, count)});
	if (s.checks.count(Check::SchattenEquivalence))
		for (double p : s.ps)
		{
			double v = spread(with_p("ratio.schatten", p), true, count);
			fam.quantities.push_back({with_p("compact_members", p), static_cast<double>(count)});
			fam.windows.push_back(make_window(with_p("spread.schatten", p), v, 1.0, s.windows.schatten_spread));
		}
	return fam;
}

} // namespace

std::string to_string(Check c)
{
	for (const CheckName& n : kCheckNames)
		if (n.check == c)
			return n.name;
	return "unknown";
}

Check check_from_string(const std::string& name)
{
	for (const CheckName& n : kCheckNames)
		if (name == n.name)
			return n.check;
	throw ParameterError("unknown check \"" + name + "\"");
}

std::string to_string(Status s)
{
	switch (s)
	{
	case Status::Pass:
		return "pass";
	case Status::Fail:
		return "fail";
	case Status::NotApplicable:
		return "nan";
	}
	return "unknown";
}

bool ReportRow::pass() const
{
	return error.empty() &&
	       std::none_of(windows.begin(), windows.end(), [](const WindowResult& w) { return w.status == Status::Fail; });
}

bool ReportRow::has_quantity(const std::string& name) const
{
	return std::any_of(quantities.begin(), quantities.end(), [&](const Quantity& q) { return q.name == name; });
}

bool ReportRow::has_window(const std::string& name) const
{
	return std::any_of(windows.begin(), windows.end(), [&](const WindowResult& w) { return w.name == name; });
}

double ReportRow::quantity(const std::string& name) const
{
	for (const Quantity& q : quantities)
		if (q.name == name)
			return q.value;
	throw ParameterError("row " + measure_id + " has no quantity \"" + name + "\"");
}

const WindowResult& ReportRow::window(const std::string& name) const
{
	for (const WindowResult& w : windows)
		if (w.name == name)
			return w;
	throw ParameterError("row " + measure_id + " has no window \"" + name + "\"");
}

void validate(const Scenario& s)
{
	RadialWeight w = weight_from_json(s.weight);
	if (s.delta != 0.0)
		w.require_delta(s.delta);
	if (s.r_max_ladder.empty())
		throw ParameterError("the r_max ladder is empty");
	for (std::size_t i = 0; i < s.r_max_ladder.size(); ++i)
	{
		double r = s.r_max_ladder[i];
		if (!(r > 0.0 && r < 1.0))
			throw ParameterError("r_max values must lie in (0, 1)");
		if (i > 0 && !(r > s.r_max_ladder[i - 1]))
			throw ParameterError("the r_max ladder must be strictly increasing");
	}
	if (!(s.lattice_r_max > 0.0 && s.lattice_r_max < 1.0))
		throw ParameterError("lattice_r_max must lie in (0, 1)");
	if (s.dim < 4)
		throw ParameterError("dim must be at least 4");
	if (s.ps.empty())
		throw ParameterError("no exponents p given");
	for (double p : s.ps)
		if (!(p > 0.0) || !std::isfinite(p))
			throw ParameterError("exponents p must be positive");
	if (s.measures.empty())
		throw ParameterError("a scenario needs at least one measure");
	if (s.checks.empty())
		throw ParameterError("a scenario needs at least one check");
	if (s.kernel_grid < 1 || s.sample_pairs < 0 || s.pointwise_samples < 1)
		throw ParameterError("sample counts must be positive");
}

Scenario scenario_from_json(const Json& j)
{
	if (!j.is_object())
		throw ParameterError("a scenario must be a JSON object");
	Scenario s;
	try
	{
		s.id = j.value("id", s.id);
		if (j.contains("weight"))
			s.weight = j.at("weight");
		if (j.contains("delta") && !j.at("delta").is_null())
			s.delta = j.at("delta").get<double>();
		if (j.contains("r_max"))
			s.r_max_ladder = j.at("r_max").is_array() ? j.at("r_max").get<std::vector<double>>()
			                                          : std::vector<double>{j.at("r_max").get<double>()};
		s.lattice_r_max = j.value("lattice_r_max", s.lattice_r_max);
		s.dim = j.value("dim", s.dim);
		if (j.contains("p"))
			s.ps = j.at("p").get<std::vector<double>>();
		s.kernel_grid = j.value("kernel_grid", s.kernel_grid);
		s.sample_pairs = j.value("sample_pairs", s.sample_pairs);
		s.pointwise_samples = j.value("pointwise_samples", s.pointwise_samples);
		s.seed = j.value("seed", s.seed);
		if (j.contains("checks"))
		{
			const Json& c = j.at("checks");
			if (c.is_string() && c.get<std::string>() == "all")
				for (const CheckName& n : kCheckNames)
					s.checks.insert(n.check);
			else
				for (const Json& name : c)
					s.checks.insert(check_from_string(name.get<std::string>()));
		}
		if (j.contains("windows"))
		{
			const Json& wj = j.at("windows");
			Windows& w = s.windows;
			std::map<std::string, double*> fields = {
			    {"kernel_spread", &w.kernel_spread},       {"diagonal_min", &w.diagonal_min},
			    {"bounded_lo", &w.bounded_lo},             {"bounded_hi", &w.bounded_hi},
			    {"tail_fraction", &w.tail_fraction},       {"schatten_spread", &w.schatten_spread},
			    {"divergence_growth", &w.divergence_growth}, {"berezin_lo", &w.berezin_lo},
			    {"berezin_hi", &w.berezin_hi},             {"pointwise_min", &w.pointwise_min},
			    {"compact_support", &w.compact_support}};
			for (const auto& [key, value] : wj.items())
			{
				if (key == "multiplicity_max")
					w.multiplicity_max = value.get<int>();
				else if (auto it = fields.find(key); it != fields.end())
					*it->second = value.get<double>();
				else
					throw ParameterError("unknown window \"" + key + "\"");
			}
		}
		if (j.contains("measures"))
		{
			int index = 0;
			for (const Json& m : j.at("measures"))
			{
				std::string id = m.value("id", "m" + std::to_string(index));
				s.measures.push_back({id, measure_from_json(m)});
				++index;
			}
		}
	}
	catch (const Json::exception& e)
	{
		throw ParameterError(std::string("malformed scenario: ") + e.what());
	}
	validate(s);
	return s;
}

std::vector<ReportRow> run_scenario(const Scenario& s)
{
	validate(s);
	Context ctx{s, weight_from_json(s.weight), 0.0, false, {}, std::nullopt, std::nullopt};
	ctx.delta = s.delta != 0.0 ? s.delta : ctx.w.default_delta();
	ctx.doubled_delta = 2.0 * ctx.delta < ctx.w.m_tau();
	ctx.radii = s.r_max_ladder;
	ctx.radii.push_back(s.lattice_r_max);
	std::sort(ctx.radii.begin(), ctx.radii.end());
	ctx.radii.erase(std::unique(ctx.radii.begin(), ctx.radii.end()), ctx.radii.end());

	std::vector<ReportRow> rows;
	ReportRow weight_row;
	weight_row.scenario_id = s.id;
	weight_row.measure_id = "weight";
	weight_row.quantities.push_back({"delta", ctx.delta});
	bool needs_table = ctx.wants(Check::KernelEstimates) || ctx.wants(Check::Boundedness) ||
	                   ctx.wants(Check::SchattenEquivalence) || ctx.wants(Check::BerezinEquivalence);
	bool needs_lattice = ctx.wants(Check::LatticeCert) || ctx.wants(Check::BerezinEquivalence);
	std::string setup_error;
	try
	{
		if (needs_table)
		{
			int degree = std::max(degree_for_radius(ctx.w, s.r_max_ladder.back()), s.dim - 1);
			ctx.bt = cached_basis_table(ctx.w, degree);
			weight_row.quantities.push_back({"degree_max", static_cast<double>(degree)});
		}
	}
	catch (const Error& e)
	{
		setup_error = std::string("basis table: ") + e.what();
	}
	try
	{
		if (needs_lattice)
			ctx.lattice = build_lattice(ctx.w, ctx.delta, s.lattice_r_max);
	}
	catch (const Error& e)
	{
		weight_row.error = std::string("lattice: ") + e.what();
	}
	try
	{
		if (ctx.bt && ctx.wants(Check::KernelEstimates))
			kernel_checks(ctx, weight_row);
		if (ctx.lattice && ctx.wants(Check::LatticeCert))
			lattice_checks(ctx, weight_row);
	}
	catch (const Error& e)
	{
		weight_row.error += (weight_row.error.empty() ? "" : "; ") + std::string(e.what());
	}
	if (!setup_error.empty())
		weight_row.error = setup_error + (weight_row.error.empty() ? "" : "; " + weight_row.error);
	rows.push_back(std::move(weight_row));

	for (const NamedMeasure& nm : s.measures)
	{
		ReportRow row;
		row.scenario_id = s.id;
		row.measure_id = nm.id;
		if (!setup_error.empty())
			row.error = setup_error;
		else
			try
			{
				measure_checks(ctx, nm, row);
			}
			catch (const Error& e)
			{
				row.error = e.what();
			}
		rows.push_back(std::move(row));
	}
	rows.push_back(family_row(s, std::vector<ReportRow>(rows.begin() + 1, rows.end())));
	return rows;
}

bool all_pass(const std::vector<ReportRow>& rows)
{
	return std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.pass(); });
}

std::string report_csv(const std::vector<ReportRow>& rows)
{
	std::ostringstream out;
	out << "scenario,measure,type,name,value,lo,hi,status\n";
	for (const ReportRow& r : rows)
	{
		std::string head = r.scenario_id + "," + r.measure_id + ",";
		for (const Quantity& q : r.quantities)
			out << head << "quantity," << q.name << ',' << format_double(q.value) << ",,,\n";
		for (const WindowResult& w : r.windows)
			out << head << "window," << w.name << ',' << format_double(w.value) << ',' << format_double(w.lo) << ','
			    << format_double(w.hi) << ',' << to_string(w.status) << '\n';
		if (!r.error.empty())
		{
			std::string msg = r.error;
			std::replace(msg.begin(), msg.end(), ',', ';');
			std::replace(msg.begin(), msg.end(), '\n', ' ');
			out << head << "error," << msg << ",,,,fail\n";
		}
	}
	return out.str();
}

Json report_summary(const std::vector<ReportRow>& rows)
{
	Json j;
	j["pass"] = all_pass(rows);
	Json list = Json::array();
	for (const ReportRow& r : rows)
	{
		Json row;
		row["scenario"] = r.scenario_id;
		row["measure"] = r.measure_id;
		row["pass"] = r.pass();
		if (!r.error.empty())
			row["error"] = r.error;
		Json failed = Json::array();
		for (const WindowResult& w : r.windows)
			if (w.status == Status::Fail)
				failed.push_back({{"window", w.name}, {"value", w.value}, {"lo", w.lo}, {"hi", w.hi}});
		row["failed_windows"] = failed;
		list.push_back(row);
	}
	j["rows"] = list;
	return j;
}

SweepTable sweep_family(const Scenario& s, const std::string& parameter, const std::vector<double>& values)
{
	if (values.empty())
		throw ParameterError("sweep needs at least one value");
	SweepTable table;
	table.parameter = parameter;
	table.values = values;
	for (double v : values)
	{
		Scenario run = s;
		std::string id = parameter + "=" + format_double(v);
		if (parameter == "beta")
		{
			RadialDensity d;
			for (const NamedMeasure& nm : s.measures)
				if (nm.measure.kind() == MeasureKind::Radial)
				{
					d.lo = nm.measure.density().lo;
					d.hi = nm.measure.density().hi;
					break;
				}
			d.beta = v;
			run.measures = {{id, MeasureSpec::radial(d)}};
		}
		else if (parameter == "alpha")
		{
			run.weight = {{"family", "exponential"}, {"alpha", v}};
			run.delta = 0.0;
			for (NamedMeasure& nm : run.measures)
				nm.id = id + "/" + nm.id;
		}
		else if (parameter == "atoms")
		{
			int n = static_cast<int>(v);
			if (n < 1 || n != v)
				throw ParameterError("atom counts must be positive integers");
			std::vector<Atom> atoms;
			for (int k = 0; k < n; ++k)
				atoms.push_back({std::polar(0.5, 2.0 * kPi * k / n), 1.0});
			run.measures = {{id, MeasureSpec::atomic(atoms)}};
		}
		else
			throw ParameterError("unknown sweep parameter \"" + parameter + "\"");
		for (ReportRow& r : run_scenario(run))
			if (r.measure_id != "weight" && r.measure_id != "family")
				table.rows.push_back(std::move(r));
	}

	// ratio columns present in every row, quantities and windows alike
	std::map<std::string, std::vector<double>> columns;
	for (const ReportRow& r : table.rows)
	{
		for (const Quantity& q : r.quantities)
			if (q.name.rfind("ratio.", 0) == 0)
				columns[q.name].push_back(q.value);
		for (const WindowResult& w : r.windows)
			if (w.name.rfind("ratio.", 0) == 0)
				columns[w.name].push_back(w.value);
	}
	for (const auto& [name, vals] : columns)
	{
		if (vals.size() != table.rows.size())
			continue;
		double lo = kInf, hi = 0.0;
		bool finite = true;
		for (double x : vals)
		{
			finite = finite && x > 0.0 && std::isfinite(x);
			lo = std::min(lo, x);
			hi = std::max(hi, x);
		}
		table.stability.push_back(
		    make_window("spread." + name, finite && vals.size() >= 2 ? hi / lo : kNaN, 1.0, s.windows.schatten_spread));
	}
	return table;
}

} // namespace btk
