#pragma once

// Scenario runner. For every measure of a scenario it computes both sides of
// the boundedness, compactness, Schatten and Berezin equivalences and checks
// their ratios against configured windows. Results are flat rows of named
// quantities and window verdicts that serialise to CSV deterministically.

#include "btk/io.hpp"
#include "btk/measure.hpp"

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace btk {

enum class Check
{
	KernelEstimates,
	LatticeCert,
	Boundedness,
	Compactness,
	SchattenEquivalence,
	BerezinEquivalence
};

std::string to_string(Check c);
/// Throws ParameterError for an unknown name.
Check check_from_string(const std::string& name);

struct Windows
{
	double kernel_spread = 50.0;     ///< max/min of ||K_r||^2 omega tau^2
	double diagonal_min = 0.02;      ///< lower bound of |k_z(zeta)| / ||K_zeta|| on D(delta tau(z))
	int multiplicity_max = 256;
	double bounded_lo = 1e-2;        ///< lambda_1 / C_mu
	double bounded_hi = 1e2;
	double tail_fraction = 1e-3;     ///< final tail sup relative to C_mu
	double schatten_spread = 1e3;    ///< family max/min of ||T||_p^p / int mu_hat^p
	double divergence_growth = 10.0; ///< L^p growth along the r_max ladder that counts as divergence
	double berezin_lo = 1e-3;        ///< pairwise ratios of the three Berezin-side quantities
	double berezin_hi = 1e3;
	double pointwise_min = 1e-3;     ///< B mu >= pointwise_min * mu_hat
	double compact_support = 0.7;    ///< members supported in |z| <= this form the compact sub-family
};

struct NamedMeasure
{
	std::string id;
	MeasureSpec measure;
};

struct Scenario
{
	std::string id = "scenario";
	Json weight = {{"family", "exponential"}, {"alpha", 1.0}};
	double delta = 0.0; ///< 0 selects m_tau / 8
	std::vector<double> r_max_ladder{0.9, 0.99, 0.995};
	double lattice_r_max = 0.9;
	int dim = 512;
	std::vector<double> ps{0.5, 1.0, 2.0};
	std::vector<NamedMeasure> measures;
	std::set<Check> checks;
	Windows windows;
	int kernel_grid = 200;   ///< radii on [0, max r_max] for the kernel estimate
	int sample_pairs = 200;  ///< (z, zeta) pairs for diagonal comparability
	int pointwise_samples = 256;
	std::uint64_t seed = 1;
};

/// Throws ParameterError for delta outside (0, m_tau), p <= 0, an empty or
/// unsorted r_max ladder, no measures or no checks.
void validate(const Scenario& s);

/// Reads the scenario JSON (see README for the format) and validates it.
Scenario scenario_from_json(const Json& j);

enum class Status
{
	Pass,
	Fail,
	NotApplicable ///< a side is 0 or undefined, the ratio is NaN
};

std::string to_string(Status s);

struct Quantity
{
	std::string name;
	double value = 0.0;
};

struct WindowResult
{
	std::string name;
	double value = 0.0;
	double lo = 0.0;
	double hi = 0.0;
	Status status = Status::NotApplicable;
};

struct ReportRow
{
	std::string scenario_id;
	std::string measure_id;
	std::vector<Quantity> quantities;
	std::vector<WindowResult> windows;
	std::string error; ///< non-empty if the row could not be computed

	bool pass() const;
	/// Throws ParameterError if the quantity is absent.
	double quantity(const std::string& name) const;
	const WindowResult& window(const std::string& name) const;
	bool has_quantity(const std::string& name) const;
	bool has_window(const std::string& name) const;
};

/// Runs every configured check. Rows: "weight" (kernel and lattice checks), one
/// per measure, and "family" (cross-measure spreads). Failures of single rows are
/// recorded in ReportRow::error and do not abort the batch.
std::vector<ReportRow> run_scenario(const Scenario& s);

bool all_pass(const std::vector<ReportRow>& rows);

/// Long-format CSV: scenario,measure,type,name,value,lo,hi,status.
std::string report_csv(const std::vector<ReportRow>& rows);
Json report_summary(const std::vector<ReportRow>& rows);

struct SweepTable
{
	std::string parameter;
	std::vector<double> values;
	std::vector<ReportRow> rows;          ///< one row per value, measure id "<parameter>=<value>"
	std::vector<WindowResult> stability;  ///< max/min of every ratio column across the sweep
};

/// Runs the scenario once per value of a parameter:
///   "beta"  - a single radial density (1 - r^2)^beta on the support of the
///             scenario's first radial measure (the whole disk if none),
///   "alpha" - the exponential weight exponent,
///   "atoms" - that many unit atoms spread evenly on |z| = 0.5.
/// Stability windows use Windows::schatten_spread.
SweepTable sweep_family(const Scenario& s, const std::string& parameter, const std::vector<double>& values);

} // namespace btk
