// btk: command-line front end.
//
//   btk certify-weight <weight.json> [--grid N]
//   btk lattice <weight.json> --r-max R [--delta D] [--out lattice.json]
//   btk kernel-check <weight.json> [--grid N] [--r-max R] [--window W]
//   btk toeplitz <weight.json> <measure.json> [--dim N] [--p 0.5,1,2] [--out spectrum.json] [--csv eig.csv]
//   btk verify <scenario.json> [--out report.csv] [--summary summary.json]
//
// Exit codes: 0 when every check passes, 1 when a check fails, 2 on errors.
// Basis tables are cached in $BTK_CACHE_DIR when it is set.

#include "btk/basis.hpp"
#include "btk/errors.hpp"
#include "btk/io.hpp"
#include "btk/lattice.hpp"
#include "btk/numeric.hpp"
#include "btk/toeplitz.hpp"
#include "btk/verify.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

namespace {

using namespace btk;

int certify_weight(const std::string& weight_path, int grid)
{
	RadialWeight w = weight_from_json(read_json_file(weight_path));
	CertificationReport r = certify_class_L(w, grid);
	Json out = {{"weight", w.id()},
	            {"grid_points", r.grid_points},
	            {"condition_a", r.condition_a},
	            {"condition_b", r.condition_b},
	            {"sup_tau_over_gap", r.sup_tau_over_gap},
	            {"lipschitz", r.lipschitz},
	            {"tau_decreasing_near_boundary", r.tau_decreasing_near_boundary},
	            {"tau_at_rmax", r.tau_at_rmax},
	            {"tau_prime_at_rmax", r.tau_prime_at_rmax},
	            {"identity_max_deviation", r.identity_max_deviation},
	            {"identity_skipped", r.identity_skipped},
	            {"m_tau", r.m_tau},
	            {"default_delta", w.default_delta()},
	            {"pass", r.pass()}};
	std::cout << out.dump(2) << '\n';
	return r.pass() ? 0 : 1;
}

int lattice(const std::string& weight_path, double delta, double r_max, const std::string& out_path)
{
	RadialWeight w = weight_from_json(read_json_file(weight_path));
	if (delta == 0.0)
		delta = w.default_delta();
	Lattice lat = build_lattice(w, delta, r_max);
	const LatticeCertificate& c = lat.certificate;
	Json summary = {{"weight", w.id()},
	                {"delta", delta},
	                {"r_max", r_max},
	                {"points", lat.points.size()},
	                {"min_separation_ratio", c.min_separation_ratio},
	                {"probes", c.probe_count},
	                {"uncovered", c.uncovered},
	                {"repair_rounds", c.repair_rounds},
	                {"inserted_points", c.inserted_points},
	                {"removed_points", c.removed_points},
	                {"multiplicity", lat.multiplicity_observed},
	                {"pass", c.pass()}};
	std::cout << summary.dump(2) << '\n';
	if (!out_path.empty())
	{
		Json j = lattice_to_json(lat);
		j["weight_id"] = w.id();
		write_text_file(out_path, j.dump() + "\n");
	}
	return c.pass() ? 0 : 1;
}

int kernel_check(const std::string& weight_path, int grid, double r_max, double window)
{
	if (grid < 2)
		throw ParameterError("--grid needs at least 2 points");
	RadialWeight w = weight_from_json(read_json_file(weight_path));
	BasisTable bt = cached_basis_table(w, degree_for_radius(w, r_max));
	double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
	std::cout << "r,ratio\n";
	for (int i = 0; i < grid; ++i)
	{
		double r = r_max * i / (grid - 1);
		double t = w.tau(r);
		double v = std::exp(log_kernel_norm_sq(bt, r) + w.log_omega(r)) * t * t;
		lo = std::min(lo, v);
		hi = std::max(hi, v);
		std::cout << format_double(r) << ',' << format_double(v) << '\n';
	}
	double spread = hi / lo;
	std::cerr << "degree_max " << bt.degree_max << ", min " << lo << ", max " << hi << ", spread " << spread
	          << (spread <= window ? " (pass)" : " (fail)") << '\n';
	return spread <= window ? 0 : 1;
}

int toeplitz(const std::string& weight_path, const std::string& measure_path, int dim, const std::vector<double>& ps,
             const std::string& out_path, const std::string& csv_path)
{
	RadialWeight w = weight_from_json(read_json_file(weight_path));
	MeasureSpec mu = measure_from_json(read_json_file(measure_path));
	int degree = dim - 1;
	if (!mu.is_zero() && mu.support_radius() < 1.0)
		degree = std::max(degree, degree_for_radius(w, mu.support_radius()));
	BasisTable bt = cached_basis_table(w, degree);
	SpectrumReport report = spectrum(assemble_toeplitz(w, bt, mu, dim), ps);
	std::string json = spectrum_json(report);
	if (out_path.empty())
		std::cout << json << '\n';
	else
		write_text_file(out_path, json + "\n");
	if (!csv_path.empty())
		write_text_file(csv_path, spectrum_csv(report));
	return 0;
}

int verify(const std::string& scenario_path, const std::string& out_path, const std::string& summary_path)
{
	Scenario s = scenario_from_json(read_json_file(scenario_path));
	std::vector<ReportRow> rows = run_scenario(s);
	std::string csv = report_csv(rows);
	if (out_path.empty())
		std::cout << csv;
	else
		write_text_file(out_path, csv);
	if (!summary_path.empty())
		write_text_file(summary_path, report_summary(rows).dump(2) + "\n");
	for (const ReportRow& r : rows)
	{
		std::size_t failed = std::count_if(r.windows.begin(), r.windows.end(),
		                                   [](const WindowResult& x) { return x.status == Status::Fail; });
		std::cerr << (r.pass() ? "pass " : "FAIL ") << r.scenario_id << '/' << r.measure_id << ": "
		          << r.windows.size() << " windows, " << failed << " failed";
		if (!r.error.empty())
			std::cerr << ", error: " << r.error;
		std::cerr << '\n';
	}
	return all_pass(rows) ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
	CLI::App app{"Numerical checks for Toeplitz operators on weighted Bergman spaces"};
	app.require_subcommand(1);

	std::string weight_path, measure_path, scenario_path, out_path, csv_path, summary_path;
	int grid = 0, dim = 512;
	double delta = 0.0, r_max = 0.995, window = 50.0;
	std::vector<double> ps{0.5, 1.0, 2.0};

	auto* cw = app.add_subcommand("certify-weight", "Check the radius-function conditions of a weight");
	cw->add_option("weight", weight_path, "Weight JSON")->required()->check(CLI::ExistingFile);
	cw->add_option("--grid", grid, "Uniform grid points")->default_val(10000)->check(CLI::PositiveNumber);

	auto* lat = app.add_subcommand("lattice", "Build and certify a (delta, tau)-lattice");
	lat->add_option("weight", weight_path, "Weight JSON")->required()->check(CLI::ExistingFile);
	lat->add_option("--delta", delta, "Lattice parameter (default m_tau / 8)");
	lat->add_option("--r-max", r_max, "Radius of the truncated disk")->required();
	lat->add_option("--out", out_path, "Write the lattice points as JSON");

	auto* kc = app.add_subcommand("kernel-check", "Tabulate ||K_r||^2 omega(r) tau(r)^2");
	kc->add_option("weight", weight_path, "Weight JSON")->required()->check(CLI::ExistingFile);
	kc->add_option("--grid", grid, "Radii on [0, r-max]")->default_val(200);
	kc->add_option("--r-max", r_max, "Largest radius")->default_val(0.995);
	kc->add_option("--window", window, "Largest acceptable max/min")->default_val(50.0);

	auto* tp = app.add_subcommand("toeplitz", "Assemble a truncated Toeplitz matrix and report its spectrum");
	tp->add_option("weight", weight_path, "Weight JSON")->required()->check(CLI::ExistingFile);
	tp->add_option("measure", measure_path, "Measure JSON")->required()->check(CLI::ExistingFile);
	tp->add_option("--dim", dim, "Truncation dimension")->default_val(512)->check(CLI::PositiveNumber);
	tp->add_option("--p", ps, "Schatten exponents")->delimiter(',')->default_str("0.5,1,2");
	tp->add_option("--out", out_path, "Write the spectrum JSON here instead of stdout");
	tp->add_option("--csv", csv_path, "Write index,eigenvalue rows");

	auto* vf = app.add_subcommand("verify", "Run a scenario and write the report");
	vf->add_option("scenario", scenario_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
	vf->add_option("--out", out_path, "CSV report (stdout if omitted)");
	vf->add_option("--summary", summary_path, "JSON summary of failed windows");

	CLI11_PARSE(app, argc, argv);

	try
	{
		if (*cw)
			return certify_weight(weight_path, grid);
		if (*lat)
			return lattice(weight_path, delta, r_max, out_path);
		if (*kc)
			return kernel_check(weight_path, grid, r_max, window);
		if (*tp)
			return toeplitz(weight_path, measure_path, dim, ps, out_path, csv_path);
		if (*vf)
			return verify(scenario_path, out_path, summary_path);
	}
	catch (const btk::Error& e)
	{
		std::cerr << "btk: " << e.what() << '\n';
		return 2;
	}
	return 2;
}
