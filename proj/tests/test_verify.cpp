#include "doctest.h"

#include "btk/errors.hpp"
#include "btk/verify.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace btk;

namespace {

Scenario parse(const char* text) { return scenario_from_json(Json::parse(text)); }

const ReportRow& row_of(const std::vector<ReportRow>& rows, const std::string& id)
{
	for (const ReportRow& r : rows)
		if (r.measure_id == id)
			return r;
	FAIL("no row " << id);
	return rows.front();
}

// omega(z0) ||K_z0||^2 for alpha = 1 from Simpson monomial norms
double kernel_diagonal_alpha_one(double r0)
{
	auto omega = [](double r) { return std::exp(-1.0 / (1.0 - r * r)); };
	double sum = 0.0;
	for (int n = 0; n < 80; ++n)
	{
		double h = 2.0 * oracle::simpson([&](double r) { return std::pow(r, 2 * n + 1) * omega(r); }, 0.0, 1.0, 4000);
		sum += std::pow(r0, 2 * n) / h;
	}
	return omega(r0) * sum;
}

} // namespace

TEST_CASE("scenario parsing and validation")
{
	Scenario s = parse(R"({"id": "s", "r_max": [0.5, 0.9], "dim": 32, "p": [1], "checks": ["boundedness"],
	                       "windows": {"bounded_hi": 5000, "multiplicity_max": 64},
	                       "measures": [{"atoms": [[0.1, 0.0, 1.0]]}, {"id": "area", "kind": "radial"}]})");
	CHECK(s.id == "s");
	CHECK(s.r_max_ladder == std::vector<double>{0.5, 0.9});
	CHECK(s.dim == 32);
	CHECK(s.windows.bounded_hi == 5000.0);
	CHECK(s.windows.multiplicity_max == 64);
	CHECK(s.checks == std::set<Check>{Check::Boundedness});
	REQUIRE(s.measures.size() == 2);
	CHECK(s.measures[0].id == "m0");
	CHECK(s.measures[1].id == "area");
	CHECK(parse(R"({"checks": "all", "measures": [{"kind": "zero"}]})").checks.size() == 6);

	for (Check c : {Check::KernelEstimates, Check::LatticeCert, Check::Boundedness, Check::Compactness,
	                Check::SchattenEquivalence, Check::BerezinEquivalence})
		CHECK(check_from_string(to_string(c)) == c);

	const char* bad[] = {
	    R"({"checks": ["boundedness"], "measures": []})",
	    R"({"checks": [], "measures": [{"kind": "zero"}]})",
	    R"({"checks": ["sideways"], "measures": [{"kind": "zero"}]})",
	    R"({"checks": ["boundedness"], "p": [0], "measures": [{"kind": "zero"}]})",
	    R"({"checks": ["boundedness"], "r_max": [0.9, 0.5], "measures": [{"kind": "zero"}]})",
	    R"({"checks": ["boundedness"], "r_max": [1.0], "measures": [{"kind": "zero"}]})",
	    R"({"checks": ["boundedness"], "delta": 0.5, "measures": [{"kind": "zero"}]})",
	    R"({"checks": ["boundedness"], "windows": {"width": 3}, "measures": [{"kind": "zero"}]})",
	    R"({"checks": ["boundedness"], "dim": "large", "measures": [{"kind": "zero"}]})",
	    R"([1, 2, 3])",
	};
	for (const char* text : bad)
		CHECK_THROWS_AS(parse(text), ParameterError);
}

TEST_CASE("area measure: identity operator and constant averaging function")
{
	Scenario s = parse(R"({"r_max": [0.9], "dim": 64, "checks": ["boundedness", "compactness"],
	                       "measures": [{"id": "area", "kind": "radial"}]})");
	auto rows = run_scenario(s);
	REQUIRE(rows.size() == 3);
	const ReportRow& area = row_of(rows, "area");
	REQUIRE(area.error.empty());
	double delta = make_exponential_weight(1.0).default_delta();
	CHECK(area.quantity("lambda1") == doctest::Approx(1.0).epsilon(1e-10));
	CHECK(area.quantity("trace") == doctest::Approx(64.0).epsilon(1e-10));
	CHECK(area.quantity("C_mu") == doctest::Approx(delta * delta).epsilon(1e-9));
	CHECK(area.window("ratio.bounded").value == doctest::Approx(1.0 / (delta * delta)).epsilon(1e-8));
	CHECK(area.quantity("C_mu@2delta") == doctest::Approx(4.0 * delta * delta).epsilon(1e-9));
	CHECK(area.window("compact.constant").status == Status::Pass);
	CHECK_FALSE(area.has_window("compact.decay"));
}

TEST_CASE("zero measure: zero quantities and undefined ratios")
{
	Scenario s = parse(R"({"r_max": [0.5, 0.7], "lattice_r_max": 0.4, "dim": 16, "checks": "all",
	                       "kernel_grid": 10, "sample_pairs": 10, "measures": [{"id": "zero", "kind": "zero"}]})");
	auto rows = run_scenario(s);
	const ReportRow& zero = row_of(rows, "zero");
	REQUIRE(zero.error.empty());
	for (const Quantity& q : zero.quantities)
	{
		CAPTURE(q.name);
		if (q.name.rfind("ratio.", 0) == 0 || q.name.rfind("lp_growth", 0) == 0 || q.name == "tail_sup.last/C_mu")
			CHECK(std::isnan(q.value));
		else
			CHECK(q.value == 0.0);
	}
	CHECK(zero.has_window("ratio.bounded"));
	CHECK(zero.has_window("ratio.B/mu_hat[p=1]"));
	for (const WindowResult& w : zero.windows)
	{
		CAPTURE(w.name);
		CHECK(std::isnan(w.value));
		CHECK(w.status == Status::NotApplicable);
	}
	CHECK(zero.pass());
	CHECK(row_of(rows, "weight").pass());
}

TEST_CASE("single atom: trace class norm and Berezin ladder")
{
	Scenario s = parse(R"({"r_max": [0.5, 0.7, 0.9], "lattice_r_max": 0.5, "dim": 32, "p": [1],
	                       "checks": ["schatten_equivalence", "berezin_equivalence"],
	                       "measures": [{"id": "atom", "atoms": [[0.3, 0.0, 2.0]]}]})");
	auto rows = run_scenario(s);
	const ReportRow& atom = row_of(rows, "atom");
	REQUIRE(atom.error.empty());
	CHECK(atom.quantity("S_p[p=1]") == doctest::Approx(2.0 * kernel_diagonal_alpha_one(0.3)).epsilon(1e-9));
	CHECK(atom.quantity("S_p.tail_flag[p=1]") == 0.0);
	double b5 = atom.quantity("lp_berezin[p=1]@0.5");
	double b7 = atom.quantity("lp_berezin[p=1]@0.7");
	double b9 = atom.quantity("lp_berezin[p=1]@0.9");
	CHECK(b5 > 0.0);
	CHECK(b5 < b7);
	CHECK(b7 < b9);
	CHECK(atom.quantity("lp_mu_hat[p=1]@0.5") == atom.quantity("lp_mu_hat[p=1]@0.9"));
	double r = atom.window("ratio.B/mu_hat[p=1]").value;
	CHECK(std::isfinite(r));
	CHECK(r > 0.0);
	CHECK(atom.window("pointwise.B/mu_hat").status == Status::Pass);
}

TEST_CASE("identical scenarios give byte-identical reports")
{
	const char* text = R"({"id": "det", "r_max": [0.5, 0.7], "lattice_r_max": 0.4, "dim": 24, "p": [0.5, 2],
	                       "checks": "all", "kernel_grid": 20, "sample_pairs": 30, "pointwise_samples": 16, "seed": 9,
	                       "measures": [{"id": "a", "atoms": [[0.2, 0.1, 1.0], [-0.3, 0.0, 0.5]]},
	                                    {"id": "ring", "density": "indicator", "support": [0.1, 0.4]}]})";
	std::string first = report_csv(run_scenario(parse(text)));
	std::string second = report_csv(run_scenario(parse(text)));
	CHECK(first == second);
	CHECK(first.rfind("scenario,measure,type,name,value,lo,hi,status\n", 0) == 0);
	CHECK(first.find("det,weight,window,kernel.spread,") != std::string::npos);
	CHECK(first.find("det,family,window,spread.schatten[p=2],") != std::string::npos);
}

TEST_CASE("rows fail independently")
{
	Scenario s = parse(R"({"weight": {"family": "double_exponential", "alpha": 1, "beta": 1, "gamma": 1},
	                       "r_max": [0.9], "lattice_r_max": 0.5, "dim": 16, "checks": ["lattice_cert", "boundedness"],
	                       "measures": [{"id": "a", "atoms": [[0.3, 0.0, 1.0]]}]})");
	auto rows = run_scenario(s);
	const ReportRow& weight = row_of(rows, "weight");
	CHECK_FALSE(weight.error.empty());
	CHECK_FALSE(weight.pass());
	const ReportRow& a = row_of(rows, "a");
	CHECK(a.error.empty());
	CHECK(a.quantity("lambda1") > 0.0);
	CHECK_FALSE(all_pass(rows));
	std::string csv = report_csv(rows);
	CHECK(csv.find(",weight,error,lattice") != std::string::npos);
	Json summary = report_summary(rows);
	CHECK(summary["pass"] == false);
	CHECK(summary["rows"].size() == rows.size());
}

TEST_CASE("window status and CSV rendering")
{
	ReportRow row;
	row.scenario_id = "s";
	row.measure_id = "m";
	row.quantities.push_back({"x", 0.5});
	row.windows.push_back({"w", 2.0, 1.0, 3.0, Status::Pass});
	row.windows.push_back({"v", std::nan(""), 1.0, 3.0, Status::NotApplicable});
	CHECK(row.pass());
	CHECK(report_csv({row}) == "scenario,measure,type,name,value,lo,hi,status\n"
	                           "s,m,quantity,x,0.5,,,\n"
	                           "s,m,window,w,2,1,3,pass\n"
	                           "s,m,window,v,nan,1,3,nan\n");
	row.windows.push_back({"u", 9.0, 1.0, 3.0, Status::Fail});
	CHECK_FALSE(row.pass());
	CHECK_THROWS_AS(row.quantity("y"), ParameterError);
	CHECK_THROWS_AS(row.window("y"), ParameterError);
	row.error = "bad, worse";
	CHECK(report_csv({row}).find("s,m,error,bad; worse,,,,fail\n") != std::string::npos);
}

TEST_CASE("alpha sweep keeps the area Carleson constant at delta squared")
{
	Scenario s = parse(R"({"r_max": [0.9], "dim": 16, "checks": ["boundedness"],
	                       "measures": [{"id": "area", "kind": "radial"}]})");
	SweepTable t = sweep_family(s, "alpha", {0.5, 1.0, 2.0});
	REQUIRE(t.rows.size() == 3);
	for (std::size_t i = 0; i < 3; ++i)
	{
		double delta = make_exponential_weight(t.values[i]).default_delta();
		CAPTURE(t.values[i]);
		CHECK(t.rows[i].measure_id == "alpha=" + format_double(t.values[i]) + "/area");
		CHECK(t.rows[i].quantity("C_mu") == doctest::Approx(delta * delta).epsilon(1e-9));
		CHECK(t.rows[i].quantity("lambda1") == doctest::Approx(1.0).epsilon(1e-10));
	}
	CHECK_THROWS_AS(sweep_family(s, "gamma", {1.0}), ParameterError);
	CHECK_THROWS_AS(sweep_family(s, "alpha", {}), ParameterError);
}

TEST_CASE("atom-count sweep: trace norms add over separated atoms")
{
	Scenario s = parse(R"({"r_max": [0.9], "dim": 32, "p": [1], "checks": ["schatten_equivalence"],
	                       "measures": [{"kind": "zero"}]})");
	SweepTable t = sweep_family(s, "atoms", {1, 2, 4, 8});
	REQUIRE(t.rows.size() == 4);
	double single = t.rows[0].quantity("S_p[p=1]");
	CHECK(single == doctest::Approx(kernel_diagonal_alpha_one(0.5)).epsilon(1e-8));
	for (std::size_t i = 1; i < 4; ++i)
		CHECK(t.rows[i].quantity("S_p[p=1]") / (t.values[i] * single) == doctest::Approx(1.0).epsilon(0.1));
	CHECK_THROWS_AS(sweep_family(s, "atoms", {2.5}), ParameterError);
}

TEST_CASE("beta sweep: both sides finite with a stable ratio")
{
	Scenario s = parse(R"({"r_max": [0.9, 0.99, 0.995], "dim": 64, "p": [1], "checks": ["schatten_equivalence"],
	                       "measures": [{"kind": "zero"}]})");
	SweepTable t = sweep_family(s, "beta", {1, 2, 3, 4, 5});
	REQUIRE(t.rows.size() == 5);
	for (const ReportRow& r : t.rows)
	{
		CAPTURE(r.measure_id);
		double lhs = r.quantity("S_p^p[p=1]");
		double rhs = r.quantity("lp_mu_hat[p=1]@0.995");
		CHECK(std::isfinite(lhs));
		CHECK(std::isfinite(rhs));
		CHECK(lhs > 0.0);
		CHECK(rhs > 0.0);
	}
	bool found = false;
	for (const WindowResult& w : t.stability)
		if (w.name == "spread.ratio.schatten[p=1]")
		{
			found = true;
			MESSAGE("beta sweep spread " << w.value);
			CHECK(w.status == Status::Pass);
		}
	CHECK(found);
}
