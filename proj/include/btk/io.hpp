#pragma once

// JSON readers and writers for weights, measures and lattices.
//
//   weight:  {"family": "exponential", "alpha": 1}
//            {"family": "double_exponential", "alpha": 1, "beta": 1, "gamma": 1}
//   measure: {"kind": "atomic", "atoms": [[x, y, mass], ...]}
//            {"kind": "radial", "density": "power" | "indicator" | "weight_compensated",
//             "beta": b, "s": s, "support": [lo, hi], "scale": c}
//            {"kind": "grid", "nr": n, "ntheta": m, "cells": [...]}
//   lattice: {"delta": d, "r_max": r, "points": [[x, y], ...]}
//
// Malformed documents raise ParameterError naming the offending field.

#include "btk/lattice.hpp"
#include "btk/measure.hpp"
#include "btk/weight.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>

namespace btk {

using Json = nlohmann::json;

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

RadialWeight weight_from_json(const Json& j);
Json weight_to_json(const RadialWeight& w);

MeasureSpec measure_from_json(const Json& j);
Json measure_to_json(const MeasureSpec& mu);

Lattice lattice_from_json(const Json& j);
Json lattice_to_json(const Lattice& lat);

} // namespace btk
