#pragma once

#include <string>
#include <vector>

#include "thermolab/complexdyn.hpp"
#include "thermolab/maps.hpp"
#include "thermolab/potentials.hpp"

namespace thermo {

/// Map from a JSON descriptor. Accepted forms:
///
///   "doubling"                                  built-in by name
///   {"builtin": "logistic", "r": 4}
///   {"name": ..., "domain": [lo, hi],
///    "branches": [{"type": "linear", "domain": [a, b], "slope": s, "intercept": c},
///                 {"type": "logistic", "domain": [a, b], "r": r},
///                 {"type": "polynomial", "domain": [a, b], "coeffs": [c0, c1, ...]}],
///    "critical_points": [...], "markov_partition": [[a, b], ...],
///    "circle": false, "topologically_exact": true, "depth_cap": 24}
///
/// The map is validated before it is returned.
PiecewiseMap map_from_json(const std::string& text);

/// Inverse of map_from_json for closed-form branches. Throws ValidationError
/// for generic branches.
std::string map_to_json(const PiecewiseMap& map);

/// A built-in name ("doubling", "logistic:3.9"), inline JSON, or a path to
/// a JSON file.
PiecewiseMap load_map(const std::string& descriptor);

/// Potential shorthands:
///   const:c   affine:a,b (a x + b)   branch:v0,v1,...   cos:amp,freq
///   trig:a0,a1,..;b0,b1,..           pullback:<inner>  (inner o sin^2(pi x / 2))
/// or a JSON object {"type": "const"|"affine"|"branch"|"cos"|"trig"|"pullback", ...}.
Potential parse_potential(const PiecewiseMap& map, const std::string& descriptor);

/// const:c, re:scale, abs:scale.
ComplexPotential parse_complex_potential(const std::string& descriptor);

/// "a" or "a,b" (real, imaginary).
Complex parse_complex(const std::string& text);

/// Comma-separated numbers.
std::vector<double> parse_list(const std::string& text);

/// sin^2(pi x / 2), the conjugacy from the tent map to the logistic map.
double tent_to_logistic(double x);

}  // namespace thermo
