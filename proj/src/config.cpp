#include "thermolab/config.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "thermolab/errors.hpp"

namespace thermo {

using nlohmann::json;

namespace {

double to_double(std::string_view s, const char* where) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ValidationError(std::string(where) + ": cannot read '" + std::string(s) + "' as a number");
  }
  return v;
}

std::vector<double> list_of(std::string_view s, const char* where) {
  std::vector<double> out;
  if (s.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(to_double(s.substr(start, comma - start), where));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

Interval interval_of(const json& j, const char* where) {
  if (!j.is_array() || j.size() != 2) throw ValidationError(std::string(where) + ": expected [lo, hi]");
  const Interval iv{j[0].get<double>(), j[1].get<double>()};
  if (!(iv.lo < iv.hi)) throw ValidationError(std::string(where) + ": empty interval");
  return iv;
}

json interval_json(const Interval& iv) { return json::array({iv.lo, iv.hi}); }

PiecewiseMap builtin_from(const std::string& text) {
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  if (colon == std::string::npos) return maps::builtin(name);
  if (name == "logistic") return maps::logistic(to_double(text.substr(colon + 1), "config::load_map"));
  throw ValidationError("config::load_map: map '" + name + "' takes no parameter");
}

PiecewiseMap map_from(const json& j) {
  constexpr const char* where = "config::map_from_json";
  if (j.is_string()) return builtin_from(j.get<std::string>());
  if (!j.is_object()) throw ValidationError(std::string(where) + ": descriptor must be a name or an object");
  if (j.contains("builtin")) {
    const auto name = j["builtin"].get<std::string>();
    if (name == "logistic" && j.contains("r")) return maps::logistic(j["r"].get<double>());
    return maps::builtin(name);
  }
  for (const char* key : {"name", "domain", "branches"}) {
    if (!j.contains(key)) throw ValidationError(std::string(where) + ": missing key '" + key + "'");
  }
  const Interval domain = interval_of(j["domain"], where);
  std::vector<Branch> branches;
  int id = 0;
  for (const auto& b : j["branches"]) {
    const auto type = b.value("type", std::string("linear"));
    const Interval dom = interval_of(b.at("domain"), where);
    if (type == "linear") {
      branches.push_back(Branch::linear(id, dom, b.at("slope").get<double>(), b.value("intercept", 0.0)));
    } else if (type == "logistic") {
      branches.push_back(Branch::logistic(id, dom, b.value("r", 4.0)));
    } else if (type == "polynomial") {
      branches.push_back(Branch::polynomial(id, dom, b.at("coeffs").get<std::vector<double>>()));
    } else {
      throw ValidationError(std::string(where) + ": unknown branch type '" + type + "'");
    }
    if (b.contains("flatness_order")) branches.back().with_flatness_order(b["flatness_order"].get<double>());
    ++id;
  }
  if (branches.empty()) throw ValidationError(std::string(where) + ": no branches");
  MapTraits traits;
  traits.critical_points = j.value("critical_points", std::vector<double>{});
  if (j.contains("markov_partition")) {
    std::vector<Interval> cells;
    for (const auto& c : j["markov_partition"]) cells.push_back(interval_of(c, where));
    traits.markov_partition = std::move(cells);
  }
  traits.circle = j.value("circle", false);
  traits.topologically_exact = j.value("topologically_exact", true);
  traits.depth_cap = j.value("depth_cap", kDefaultDepthCap);
  if (traits.depth_cap < 1 || traits.depth_cap > 40) {
    throw ValidationError(std::string(where) + ": depth_cap must lie in [1, 40]");
  }
  PiecewiseMap map(j["name"].get<std::string>(), domain, std::move(branches), std::move(traits));
  map.validate();
  return map;
}

Potential potential_from_json(const PiecewiseMap& map, const json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "const") return Potential::constant(j.at("value").get<double>());
  if (type == "affine") return Potential::affine(j.at("slope").get<double>(), j.value("intercept", 0.0));
  if (type == "branch") return Potential::branch_constant(map, j.at("values").get<std::vector<double>>());
  if (type == "cos") return Potential::cosine(j.at("amplitude").get<double>(), j.value("frequency", 1.0));
  if (type == "trig") {
    return Potential::trigonometric(j.value("cos", std::vector<double>{}), j.value("sin", std::vector<double>{}));
  }
  if (type == "pullback") {
    const auto& inner = j.at("inner");
    const Potential p = inner.is_string() ? parse_potential(map, inner.get<std::string>())
                                          : potential_from_json(map, inner);
    return p.composed(tent_to_logistic, "sin2");
  }
  throw ValidationError("config::parse_potential: unknown potential type '" + type + "'");
}

}  // namespace

double tent_to_logistic(double x) {
  const double s = std::sin(0.5 * std::numbers::pi * x);
  return s * s;
}

std::vector<double> parse_list(const std::string& text) { return list_of(text, "config::parse_list"); }

Complex parse_complex(const std::string& text) {
  const auto v = list_of(text, "config::parse_complex");
  if (v.empty() || v.size() > 2) throw ValidationError("config::parse_complex: expected 're' or 're,im'");
  return {v[0], v.size() == 2 ? v[1] : 0.0};
}

PiecewiseMap map_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config::map_from_json: ") + e.what());
  }
  try {
    return map_from(j);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config::map_from_json: ") + e.what());
  }
}

std::string map_to_json(const PiecewiseMap& map) {
  json j;
  j["name"] = map.name();
  j["domain"] = interval_json(map.domain());
  json branches = json::array();
  for (const auto& b : map.branches()) {
    json e;
    e["domain"] = interval_json(b.domain());
    switch (b.kind()) {
      case Branch::Kind::Linear:
        e["type"] = "linear";
        e["slope"] = b.slope();
        e["intercept"] = b.intercept();
        break;
      case Branch::Kind::Logistic:
        e["type"] = "logistic";
        e["r"] = b.logistic_r();
        break;
      case Branch::Kind::Polynomial:
        e["type"] = "polynomial";
        e["coeffs"] = b.coefficients();
        break;
      case Branch::Kind::Generic:
        throw ValidationError("config::map_to_json: branch " + std::to_string(b.id()) + " has no closed form");
    }
    if (b.flatness_order() != 1.0) e["flatness_order"] = b.flatness_order();
    branches.push_back(e);
  }
  j["branches"] = branches;
  const auto& t = map.traits();
  j["critical_points"] = t.critical_points;
  if (t.markov_partition) {
    json cells = json::array();
    for (const auto& c : *t.markov_partition) cells.push_back(interval_json(c));
    j["markov_partition"] = cells;
  }
  j["circle"] = t.circle;
  j["topologically_exact"] = t.topologically_exact;
  j["depth_cap"] = t.depth_cap;
  return j.dump();
}

PiecewiseMap load_map(const std::string& descriptor) {
  if (descriptor.empty()) throw ValidationError("config::load_map: empty map descriptor");
  if (descriptor.front() == '{' || descriptor.front() == '"') return map_from_json(descriptor);
  if (std::filesystem::exists(descriptor)) {
    std::ifstream in(descriptor);
    std::stringstream ss;
    ss << in.rdbuf();
    return map_from_json(ss.str());
  }
  return builtin_from(descriptor);
}

Potential parse_potential(const PiecewiseMap& map, const std::string& descriptor) {
  constexpr const char* where = "config::parse_potential";
  if (!descriptor.empty() && descriptor.front() == '{') {
    try {
      return potential_from_json(map, json::parse(descriptor));
    } catch (const json::exception& e) {
      throw ValidationError(std::string(where) + ": " + e.what());
    }
  }
  const auto colon = descriptor.find(':');
  if (colon == std::string::npos) {
    if (descriptor == "x") return Potential::affine(1.0, 0.0);
    throw ValidationError(std::string(where) + ": expected kind:params, got '" + descriptor + "'");
  }
  const std::string kind = descriptor.substr(0, colon);
  const std::string rest = descriptor.substr(colon + 1);
  if (kind == "pullback") return parse_potential(map, rest).composed(tent_to_logistic, "sin2");
  if (kind == "trig") {
    const auto semi = rest.find(';');
    return Potential::trigonometric(list_of(rest.substr(0, semi), where),
                                    semi == std::string::npos ? std::vector<double>{}
                                                              : list_of(rest.substr(semi + 1), where));
  }
  const auto v = list_of(rest, where);
  auto arity = [&](std::size_t lo, std::size_t hi) {
    if (v.size() < lo || v.size() > hi) {
      throw ValidationError(std::string(where) + ": wrong number of parameters in '" + descriptor + "'");
    }
  };
  if (kind == "const") {
    arity(1, 1);
    return Potential::constant(v[0]);
  }
  if (kind == "affine") {
    arity(1, 2);
    return Potential::affine(v[0], v.size() > 1 ? v[1] : 0.0);
  }
  if (kind == "branch") return Potential::branch_constant(map, v);
  if (kind == "cos") {
    arity(1, 2);
    return Potential::cosine(v[0], v.size() > 1 ? v[1] : 1.0);
  }
  throw ValidationError(std::string(where) + ": unknown potential kind '" + kind + "'");
}

ComplexPotential parse_complex_potential(const std::string& descriptor) {
  constexpr const char* where = "config::parse_complex_potential";
  const auto colon = descriptor.find(':');
  const std::string kind = descriptor.substr(0, colon);
  const double v = colon == std::string::npos ? 1.0 : to_double(descriptor.substr(colon + 1), where);
  if (kind == "const") return ComplexPotential::constant(colon == std::string::npos ? 0.0 : v);
  if (kind == "re") return ComplexPotential::real_part(v);
  if (kind == "abs") return ComplexPotential::modulus(v);
  throw ValidationError(std::string(where) + ": unknown complex potential '" + descriptor + "'");
}

}  // namespace thermo
