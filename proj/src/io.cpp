#include "btk/io.hpp"

#include "btk/errors.hpp"

#include <fstream>
#include <sstream>

namespace btk {

namespace {

double number(const Json& j, const char* key)
{
	if (!j.contains(key))
		throw ParameterError(std::string("missing field \"") + key + "\"");
	if (!j.at(key).is_number())
		throw ParameterError(std::string("field \"") + key + "\" must be a number");
	return j.at(key).get<double>();
}

double number_or(const Json& j, const char* key, double fallback)
{
	return j.contains(key) ? number(j, key) : fallback;
}

int integer(const Json& j, const char* key)
{
	if (!j.contains(key) || !j.at(key).is_number_integer())
		throw ParameterError(std::string("field \"") + key + "\" must be an integer");
	return j.at(key).get<int>();
}

const Json& array(const Json& j, const char* key)
{
	if (!j.contains(key) || !j.at(key).is_array())
		throw ParameterError(std::string("field \"") + key + "\" must be an array");
	return j.at(key);
}

std::vector<double> tuple(const Json& j, std::size_t size, const char* what)
{
	if (!j.is_array() || j.size() != size)
		throw ParameterError(std::string(what) + " entries must be arrays of " + std::to_string(size) + " numbers");
	std::vector<double> out;
	for (const Json& x : j)
	{
		if (!x.is_number())
			throw ParameterError(std::string(what) + " entries must be numeric");
		out.push_back(x.get<double>());
	}
	return out;
}

std::string kind_of(const Json& j)
{
	if (j.contains("kind"))
		return j.at("kind").get<std::string>();
	if (j.contains("atoms"))
		return "atomic";
	if (j.contains("cells"))
		return "grid";
	if (j.contains("density"))
		return "radial";
	throw ParameterError("cannot tell the measure kind: expected \"kind\", \"atoms\", \"density\" or \"cells\"");
}

} // namespace

Json read_json_file(const std::filesystem::path& path)
{
	std::ifstream in(path);
	if (!in)
		throw ParameterError("cannot open " + path.string());
	try
	{
		return Json::parse(in);
	}
	catch (const Json::parse_error& e)
	{
		throw ParameterError(path.string() + ": " + e.what());
	}
}

void write_text_file(const std::filesystem::path& path, const std::string& text)
{
	std::ofstream out(path, std::ios::binary);
	if (!out)
		throw ParameterError("cannot write " + path.string());
	out << text;
	if (!out)
		throw ParameterError("failed writing " + path.string());
}

RadialWeight weight_from_json(const Json& j)
{
	if (!j.is_object() || !j.contains("family"))
		throw ParameterError("weight needs a \"family\"");
	std::string family = j.at("family").get<std::string>();
	if (family == "exponential")
		return make_exponential_weight(number(j, "alpha"));
	if (family == "double_exponential")
		return make_double_exponential_weight(number(j, "alpha"), number(j, "beta"), number(j, "gamma"));
	throw ParameterError("unknown weight family \"" + family + "\"");
}

Json weight_to_json(const RadialWeight& w)
{
	switch (w.family())
	{
	case WeightFamily::Exponential:
		return {{"family", "exponential"}, {"alpha", w.alpha()}};
	case WeightFamily::DoubleExponential:
		return {{"family", "double_exponential"}, {"alpha", w.alpha()}, {"beta", w.beta()}, {"gamma", w.gamma()}};
	case WeightFamily::Custom:
		break;
	}
	throw ParameterError("custom weights have no JSON form");
}

MeasureSpec measure_from_json(const Json& j)
{
	if (!j.is_object())
		throw ParameterError("a measure must be a JSON object");
	std::string kind = kind_of(j);
	if (kind == "zero")
		return MeasureSpec::zero();
	if (kind == "atomic")
	{
		std::vector<Atom> atoms;
		for (const Json& a : array(j, "atoms"))
		{
			auto v = tuple(a, 3, "atom");
			atoms.push_back({Complex(v[0], v[1]), v[2]});
		}
		return MeasureSpec::atomic(std::move(atoms));
	}
	if (kind == "radial")
	{
		RadialDensity d;
		std::string density = j.contains("density") ? j.at("density").get<std::string>() : "power";
		if (density == "power")
			d.family = RadialFamily::Power;
		else if (density == "indicator")
			d.family = RadialFamily::Indicator;
		else if (density == "weight_compensated")
			d.family = RadialFamily::WeightCompensated;
		else
			throw ParameterError("unknown radial density \"" + density + "\"");
		d.beta = number_or(j, "beta", 0.0);
		d.s = number_or(j, "s", 0.0);
		d.scale = number_or(j, "scale", 1.0);
		if (j.contains("support"))
		{
			auto s = tuple(j.at("support"), 2, "support");
			d.lo = s[0];
			d.hi = s[1];
		}
		return MeasureSpec::radial(d);
	}
	if (kind == "grid")
	{
		PolarGrid g;
		g.nr = integer(j, "nr");
		g.ntheta = integer(j, "ntheta");
		for (const Json& c : array(j, "cells"))
		{
			if (!c.is_number())
				throw ParameterError("grid cells must be numbers");
			g.cells.push_back(c.get<double>());
		}
		return MeasureSpec::grid(std::move(g));
	}
	throw ParameterError("unknown measure kind \"" + kind + "\"");
}

Json measure_to_json(const MeasureSpec& mu)
{
	switch (mu.kind())
	{
	case MeasureKind::Atomic:
	{
		Json atoms = Json::array();
		for (const Atom& a : mu.atoms())
			atoms.push_back({a.point.real(), a.point.imag(), a.mass});
		return {{"kind", "atomic"}, {"atoms", atoms}};
	}
	case MeasureKind::Radial:
	{
		const RadialDensity& d = mu.density();
		const char* names[] = {"power", "indicator", "weight_compensated"};
		return {{"kind", "radial"},     {"density", names[static_cast<int>(d.family)]},
		        {"beta", d.beta},       {"s", d.s},
		        {"support", {d.lo, d.hi}}, {"scale", d.scale}};
	}
	case MeasureKind::Grid:
		return {{"kind", "grid"}, {"nr", mu.grid().nr}, {"ntheta", mu.grid().ntheta}, {"cells", mu.grid().cells}};
	}
	return {};
}

Lattice lattice_from_json(const Json& j)
{
	Lattice lat;
	lat.delta = number(j, "delta");
	lat.r_max = number(j, "r_max");
	for (const Json& p : array(j, "points"))
	{
		auto v = tuple(p, 2, "point");
		lat.points.emplace_back(v[0], v[1]);
	}
	if (j.contains("weight_id"))
		lat.weight_id = j.at("weight_id").get<std::string>();
	return lat;
}

Json lattice_to_json(const Lattice& lat)
{
	Json points = Json::array();
	for (Complex z : lat.points)
		points.push_back({z.real(), z.imag()});
	return {{"delta", lat.delta}, {"r_max", lat.r_max}, {"points", points}};
}

} // namespace btk
