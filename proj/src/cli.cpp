#include "thermolab/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "thermolab/backward.hpp"
#include "thermolab/complexdyn.hpp"
#include "thermolab/config.hpp"
#include "thermolab/errors.hpp"
#include "thermolab/ldp.hpp"
#include "thermolab/numerics.hpp"
#include "thermolab/periodic.hpp"
#include "thermolab/pressure.hpp"
#include "thermolab/transfer.hpp"

namespace thermo {

using Json = nlohmann::ordered_json;

namespace {

std::string csv_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<bool> flags(const std::vector<char>& v) { return {v.begin(), v.end()}; }

Json estimate_json(const PressureEstimate& e) {
  Json iters = Json::array();
  for (const auto& it : e.iterates) iters.push_back({{"index", it.index}, {"value", it.value}});
  return {{"method", to_string(e.method)},   {"extrapolated", e.extrapolated}, {"uncertainty", e.uncertainty},
          {"model", e.model},                {"iterates", iters},              {"inputs_digest", e.inputs_digest}};
}

Json margin_json(const HyperbolicityMargin& m) {
  return {{"margin", m.margin},   {"sup_average", m.sup_average},   {"argmax", m.argmax},
          {"n", m.n},             {"grid_spacing", m.grid_spacing}, {"candidates", m.candidates}};
}

void estimate_csv(std::string& csv, const PressureEstimate& e) {
  for (const auto& it : e.iterates) {
    csv += to_string(e.method) + "," + std::to_string(it.index) + "," + csv_num(it.value) + "\n";
  }
  csv += to_string(e.method) + ",extrapolated," + csv_num(e.extrapolated) + "\n";
}

struct Payload {
  Json result;
  std::string csv;
};

// Everything the subcommands share.
struct Context {
  const RunConfig& cfg;
  std::optional<PiecewiseMap> map;
  std::optional<Potential> phi;

  // ldp-check spends n_max on the decay range, so it keeps the default depths.
  Schedule schedule(bool use_n_max = true) const {
    Schedule s;
    if (use_n_max) {
      s.n_min = cfg.n_min;
      if (cfg.n_max > 0) s.preimage_n_max = cfg.n_max;
    }
    s.periodic_n_max = cfg.periodic_n_max > 0 ? cfg.periodic_n_max : std::min(s.preimage_n_max, 12);
    if (!cfg.m.empty()) s.spectral_m = cfg.m;
    s.x0 = cfg.x0;
    return s;
  }
  std::vector<double> t_grid(double span, int count) const {
    return uniform_grid(cfg.t_min.value_or(-span), cfg.t_max.value_or(span), cfg.t_count.value_or(count));
  }
  int m_last(int fallback) const { return cfg.m.empty() ? fallback : cfg.m.back(); }
  void write_records(const std::function<void(std::ostream&)>& body) const {
    if (cfg.records.empty()) return;
    std::ofstream os(cfg.records);
    if (!os) throw ValidationError("cli::run: cannot open records file '" + cfg.records + "'");
    body(os);
  }
};

Payload cmd_pressure(const Context& ctx) {
  Payload p;
  p.csv = "method,index,value\n";
  const auto sch = ctx.schedule();
  if (!ctx.cfg.method.empty()) {
    const auto est = estimate(*ctx.map, *ctx.phi, method_from_string(ctx.cfg.method), sch);
    p.result = {{"estimate", estimate_json(est)}};
    estimate_csv(p.csv, est);
    return p;
  }
  const auto rep = cross_validate(*ctx.map, *ctx.phi, sch, ctx.cfg.tolerance);
  Json ests = Json::array();
  for (const auto& e : rep.estimates) {
    ests.push_back(estimate_json(e));
    estimate_csv(p.csv, e);
  }
  p.result = {{"estimates", ests},
              {"consensus", rep.consensus},
              {"max_difference", rep.max_difference},
              {"tolerance", rep.tolerance},
              {"verdict", rep.verdict}};
  if (rep.lower_bound) {
    p.result["lower_bound"] = estimate_json(*rep.lower_bound);
    p.result["lower_bound_sound"] = rep.lower_bound_sound;
    estimate_csv(p.csv, *rep.lower_bound);
  }
  if (rep.margin) p.result["hyperbolicity"] = margin_json(*rep.margin);
  return p;
}

Payload cmd_preimages(const Context& ctx) {
  const int n = ctx.cfg.n_max > 0 ? ctx.cfg.n_max : 12;
  const double x0 = ctx.cfg.x0.value_or(default_x0(*ctx.map));
  const auto policy = ctx.cfg.prune_delta ? PruningPolicy::threshold(*ctx.cfg.prune_delta) : PruningPolicy::none();
  const auto tree = backward_orbit(*ctx.map, *ctx.phi, x0, n, policy);
  Json iters = Json::array();
  for (int k = 1; k <= n; ++k) {
    iters.push_back({{"n", k}, {"value", tree.level_log_partition[static_cast<std::size_t>(k)] / k}});
  }
  Payload p;
  p.result = {{"root", tree.root},
              {"depth", tree.depth},
              {"nodes", tree.size()},
              {"level_log_partition", tree.level_log_partition},
              {"iterates", iters},
              {"pruning",
               {{"policy", tree.pruning.policy},
                {"discarded_count", tree.pruning.discarded_count},
                {"discarded_log_mass_bound", tree.pruning.discarded_log_mass_bound}}},
              {"warnings", tree.warnings}};
  p.csv = "word,point,log_weight\n";
  for (std::size_t i = 0; i < tree.size(); ++i) {
    p.csv += word_to_string(tree.word(i)) + "," + csv_num(tree.points[i]) + "," + csv_num(tree.log_weights[i]) + "\n";
  }
  ctx.write_records([&](std::ostream& os) { write_tree_records(os, tree); });
  return p;
}

Payload cmd_periodic(const Context& ctx) {
  const int n_max = ctx.cfg.n_max > 0 ? ctx.cfg.n_max : 10;
  if (ctx.cfg.n_min < 1 || n_max < ctx.cfg.n_min) throw ValidationError("cli::periodic: bad n range");
  Payload p;
  p.csv = "n,word,point,log_weight,multiplier\n";
  Json rows = Json::array();
  std::vector<std::vector<PeriodicPoint>> all;
  for (int n = ctx.cfg.n_min; n <= n_max; ++n) {
    auto set = enumerate_periodic(*ctx.map, n);
    const auto lw = periodic_log_weights(*ctx.map, set.points, *ctx.phi, n);
    for (std::size_t i = 0; i < lw.size(); ++i) set.points[i].log_weight = lw[i];
    const double z = log_sum_exp(lw);
    rows.push_back({{"n", n},
                    {"count", set.points.size()},
                    {"words_scanned", set.words_scanned},
                    {"boundary_merges", set.boundary_merges},
                    {"log_partition", z},
                    {"iterate", z / n},
                    {"warnings", set.warnings}});
    for (const auto& q : set.points) {
      p.csv += std::to_string(n) + "," + word_to_string(q.word) + "," + csv_num(q.point) + "," +
               csv_num(q.log_weight) + "," + csv_num(q.multiplier) + "\n";
    }
    all.push_back(std::move(set.points));
  }
  p.result = {{"levels", rows}};
  ctx.write_records([&](std::ostream& os) {
    for (const auto& pts : all) write_periodic_records(os, pts);
  });
  return p;
}

Payload cmd_ulam(const Context& ctx) {
  const std::vector<int> sizes = ctx.cfg.m.empty() ? std::vector<int>{1024} : ctx.cfg.m;
  Json rows = Json::array();
  Payload p;
  double pressure = 0.0;
  for (int m : sizes) {
    const auto disc = build_discretization(*ctx.map, *ctx.phi, m);
    const auto sp = leading_eigen(disc);
    pressure = sp.pressure;
    rows.push_back({{"m", m},
                    {"lambda", sp.lambda},
                    {"pressure", sp.pressure},
                    {"power_iterations", sp.power_iterations},
                    {"residual_right", sp.residual_right},
                    {"residual_left", sp.residual_left},
                    {"shifted", sp.shifted},
                    {"irreducible", disc.irreducible}});
    if (m == sizes.back()) {
      std::ostringstream os;
      write_spectral_csv(os, disc, sp);
      p.csv = os.str();
    }
  }
  p.result = {{"sizes", rows}};
  if (ctx.cfg.growth_n > 0) {
    const auto grid = interior_grid(*ctx.map, 64);
    Json growth = Json::array();
    for (const auto& g : normalized_growth_check(*ctx.map, *ctx.phi, pressure, ctx.cfg.growth_n, grid)) {
      growth.push_back({{"n", g.n}, {"a", g.a}, {"b", g.b}});
    }
    p.result["growth"] = growth;
  }
  return p;
}

SCGFCurve run_scgf(const Context& ctx, const Potential& psi, const std::vector<double>& t, ScgfMethod method,
                   bool use_n_max = true) {
  ScgfOptions opt;
  opt.schedule = ctx.schedule(use_n_max);
  opt.mc_n = ctx.cfg.mc_n;
  opt.trials = ctx.cfg.trials;
  opt.seed = ctx.cfg.seed;
  return scgf(*ctx.map, *ctx.phi, psi, t, method, opt);
}

ScgfMethod scgf_method(const std::string& s) {
  if (s.empty() || s == "pressure" || s == "pressure-difference") return ScgfMethod::PressureDifference;
  if (s == "monte-carlo" || s == "mc") return ScgfMethod::MonteCarlo;
  throw ValidationError("cli::scgf: unknown method '" + s + "' (pressure, monte-carlo)");
}

Payload cmd_scgf(const Context& ctx) {
  const auto psi = parse_potential(*ctx.map, ctx.cfg.observable);
  const auto curve = run_scgf(ctx, psi, ctx.t_grid(2.0, 41), scgf_method(ctx.cfg.method));
  Payload p;
  p.result = {{"observable", curve.observable}, {"method", to_string(curve.method)},
              {"t", curve.t},                   {"lambda", curve.lambda},
              {"margins", curve.margins},       {"n", curve.n},
              {"trials", curve.trials},         {"convex", is_convex(curve.t, curve.lambda)}};
  p.csv = "t,lambda\n";
  for (std::size_t i = 0; i < curve.t.size(); ++i) p.csv += csv_num(curve.t[i]) + "," + csv_num(curve.lambda[i]) + "\n";
  return p;
}

Payload cmd_rate(const Context& ctx) {
  const auto psi = parse_potential(*ctx.map, ctx.cfg.observable);
  const auto curve = run_scgf(ctx, psi, ctx.t_grid(4.0, 81), scgf_method(ctx.cfg.method));
  const auto s = uniform_grid(ctx.cfg.s_min, ctx.cfg.s_max, ctx.cfg.s_count);
  const auto prof = legendre_rate(curve, s);
  Payload p;
  p.result = {{"observable", curve.observable},
              {"scgf_method", to_string(curve.method)},
              {"t_range", {curve.t.front(), curve.t.back()}},
              {"s", prof.s},
              {"rate", prof.rate},
              {"bounded", flags(prof.bounded)},
              {"s_star", prof.s_star}};
  p.csv = "s,rate\n";
  for (std::size_t i = 0; i < prof.s.size(); ++i) p.csv += csv_num(prof.s[i]) + "," + csv_num(prof.rate[i]) + "\n";
  return p;
}

std::vector<Source> sources_of(const std::string& s) {
  if (s.empty() || s == "all") return {Source::Preimages, Source::Periodic, Source::Birkhoff};
  return {source_from_string(s)};
}

Payload cmd_ldp_check(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto psi = parse_potential(*ctx.map, cfg.observable);
  const int n_max = cfg.n_max > 0 ? cfg.n_max : 200;

  // Reference -I(s0) from the Legendre transform of the pressure-difference SCGF.
  const auto curve = run_scgf(ctx, psi, ctx.t_grid(4.0, 81), ScgfMethod::PressureDifference, false);
  const double s_one[1] = {cfg.s0};
  const auto prof = legendre_rate(curve, s_one);
  std::optional<double> reference;
  if (prof.bounded[0]) reference = -prof.rate[0];

  const auto eq = equilibrium_data(*ctx.map, *ctx.phi, ctx.m_last(1024));
  const Potential obs[1] = {psi};
  const auto eq_means = equilibrium_means(eq, obs);
  Level2Options opt;
  opt.x0 = cfg.x0;
  opt.trials = cfg.trials;
  opt.seed = cfg.seed;
  opt.equilibrium = &eq;

  Payload p;
  p.csv = "source,n,log_mass\n";
  Json decay = Json::array(), weak = Json::array();
  std::vector<Level2Projection> kept;
  for (Source src : sources_of(cfg.source)) {
    const auto d = deviation_decay(*ctx.map, *ctx.phi, src, psi, cfg.s0, cfg.n_min, n_max, opt, reference);
    decay.push_back({{"source", to_string(src)},
                     {"exact_dp", d.exact_dp},
                     {"slope", d.slope},
                     {"agrees", d.agrees},
                     {"n", d.n},
                     {"log_mass", d.log_mass},
                     {"skipped", d.skipped}});
    for (std::size_t i = 0; i < d.n.size(); ++i) {
      p.csv += to_string(src) + "," + std::to_string(d.n[i]) + "," + csv_num(d.log_mass[i]) + "\n";
    }
    std::vector<Level2Projection> projs;
    for (int n : cfg.weakstar_n) projs.push_back(project_level2(*ctx.map, *ctx.phi, src, obs, n, opt));
    const auto w = weakstar_check(projs, eq_means);
    Json rows = Json::array();
    for (const auto& r : w.rows) {
      rows.push_back({{"n", r.n}, {"means", r.means}, {"deviation", r.deviation}, {"standard_error", r.standard_error}});
    }
    weak.push_back({{"source", to_string(src)},
                    {"rows", rows},
                    {"max_deviation_last", w.max_deviation_last},
                    {"decreasing", w.decreasing}});
    if (!cfg.records.empty()) {
      for (auto& q : projs) kept.push_back(std::move(q));
    }
  }
  p.result = {{"observable", psi.name()},
              {"s0", cfg.s0},
              {"reference", reference ? Json(*reference) : Json(nullptr)},
              {"equilibrium_means", eq_means},
              {"deviation_decay", decay},
              {"weakstar", weak}};
  ctx.write_records([&](std::ostream& os) {
    for (const auto& q : kept) write_projection_records(os, q);
  });
  return p;
}

Payload cmd_shrinking(const Context& ctx) {
  const int n_max = ctx.cfg.n_max > 0 ? ctx.cfg.n_max : 14;
  const auto centers = default_centers(*ctx.map, ctx.cfg.rho0);
  const auto r = shrinking_diagnostic(*ctx.map, ctx.cfg.rho0, centers, n_max);
  Payload p;
  p.result = {{"rho0", r.rho0},
              {"centers", r.centers},
              {"n", r.n},
              {"max_diameter", r.max_diameter},
              {"law", r.law},
              {"rate", r.rate},
              {"beta", r.beta},
              {"c0", r.c0},
              {"rss_exponential", r.rss_exponential},
              {"rss_polynomial", r.rss_polynomial},
              {"nonincreasing", r.nonincreasing},
              {"hypothesis_evidenced", r.hypothesis_evidenced}};
  p.csv = "n,max_diameter\n";
  for (std::size_t i = 0; i < r.n.size(); ++i) p.csv += std::to_string(r.n[i]) + "," + csv_num(r.max_diameter[i]) + "\n";
  return p;
}

Payload cmd_conformal_check(const Context& ctx) {
  const int m = ctx.m_last(1024);
  const auto disc = build_discretization(*ctx.map, *ctx.phi, m);
  const auto sp = leading_eigen(disc);
  std::vector<Interval> cells;
  for (const auto& b : ctx.map->branches()) {
    const auto& d = b.domain();
    for (int k = 0; k < 8; ++k) cells.push_back({d.lo + d.length() * k / 8, d.lo + d.length() * (k + 1) / 8});
  }
  const double lo = ctx.map->domain().lo, len = ctx.map->domain().length();
  const std::vector<std::function<double(double)>> tests = {
      [](double) { return 1.0; },
      [=](double x) { return (x - lo) / len; },
      [=](double x) { return (x - lo) * (x - lo) / (len * len); },
      [=](double x) { return std::cos(2.0 * std::numbers::pi * (x - lo) / len); },
      [=](double x) { return std::sin(2.0 * std::numbers::pi * (x - lo) / len); },
      [=](double x) { return std::cos(4.0 * std::numbers::pi * (x - lo) / len); },
  };
  const double conf = conformal_residual(*ctx.map, *ctx.phi, disc, sp, cells);
  const double dual = duality_residual(disc, sp, tests);
  Payload p;
  p.result = {{"m", m},
              {"pressure", sp.pressure},
              {"cells", cells.size()},
              {"tests", tests.size()},
              {"conformal_residual", conf},
              {"duality_residual", dual}};
  p.csv = "m,conformal_residual,duality_residual\n" + std::to_string(m) + "," + csv_num(conf) + "," + csv_num(dual) + "\n";
  return p;
}

Payload cmd_hyperbolic_check(const Context& ctx) {
  const auto rep = cross_validate(*ctx.map, *ctx.phi, ctx.schedule(), ctx.cfg.tolerance);
  const auto m = hyperbolicity_margin(*ctx.map, *ctx.phi, rep.consensus, ctx.cfg.margin_n);
  Payload p;
  p.result = {{"pressure", rep.consensus}, {"verdict", rep.verdict}, {"margin", margin_json(m)},
              {"hyperbolic_evidence", m.margin > 0.0}};
  std::optional<int> order;
  if (m.margin <= 0.0) {
    order = find_sharpening_order(*ctx.map, *ctx.phi, rep.consensus, ctx.cfg.margin_n);
    p.result["sharpening_order"] = order ? Json(*order) : Json(nullptr);
  }
  p.csv = "n,pressure,sup_average,margin\n" + std::to_string(m.n) + "," + csv_num(rep.consensus) + "," +
          csv_num(m.sup_average) + "," + csv_num(m.margin) + "\n";
  return p;
}

Payload cmd_complex_pressure(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  const ComplexQuadratic q{parse_complex(cfg.c)};
  const auto phi = parse_complex_potential(cfg.potential);
  const Complex z0 = cfg.z0.empty() ? q.beta_fixed_point() : parse_complex(cfg.z0);
  const int n_pre = cfg.n_max > 0 ? cfg.n_max : 16;
  const int n_per = cfg.periodic_n_max > 0 ? cfg.periodic_n_max : 10;
  const auto pre = complex_preimage_pressure(q, phi, z0, cfg.n_min, n_pre);
  const auto per = complex_periodic_pressure(q, phi, cfg.n_min, n_per);
  const auto summ = critical_summability(q, 50);
  Payload p;
  p.result = {{"c", {q.c.real(), q.c.imag()}},
              {"z0", {z0.real(), z0.imag()}},
              {"preimage", estimate_json(pre)},
              {"periodic", estimate_json(per)},
              {"difference", std::abs(pre.extrapolated - per.extrapolated)},
              {"critical_partial_sums", summ}};
  p.csv = "method,index,value\n";
  estimate_csv(p.csv, pre);
  estimate_csv(p.csv, per);
  ctx.write_records([&](std::ostream& os) {
    const auto tree = complex_preimage_tree(q, phi, z0, n_pre);
    write_complex_csv(os, tree.points, tree.log_weights);
  });
  return p;
}

struct Command {
  const char* name;
  Payload (*body)(const Context&);
  bool real_map;
};

constexpr Command kCommands[] = {
    {"pressure", cmd_pressure, true},
    {"preimages", cmd_preimages, true},
    {"periodic", cmd_periodic, true},
    {"ulam", cmd_ulam, true},
    {"scgf", cmd_scgf, true},
    {"rate", cmd_rate, true},
    {"ldp-check", cmd_ldp_check, true},
    {"shrinking", cmd_shrinking, true},
    {"conformal-check", cmd_conformal_check, true},
    {"hyperbolic-check", cmd_hyperbolic_check, true},
    {"complex-pressure", cmd_complex_pressure, false},
};

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

// The values needed to reproduce a run; threads and output paths are left out.
Json config_echo(const RunConfig& c) {
  Json j = {{"command", c.command}};
  if (c.command == "complex-pressure") {
    j["c"] = c.c;
    j["z0"] = c.z0;
  } else {
    j["map"] = c.map;
  }
  j["potential"] = c.potential;
  j["observable"] = c.observable;
  j["method"] = c.method;
  j["source"] = c.source;
  j["n_min"] = c.n_min;
  j["n_max"] = c.n_max;
  j["periodic_n_max"] = c.periodic_n_max;
  j["m"] = c.m;
  j["tolerance"] = c.tolerance;
  j["x0"] = optional_json(c.x0);
  j["prune_delta"] = optional_json(c.prune_delta);
  j["t_min"] = optional_json(c.t_min);
  j["t_max"] = optional_json(c.t_max);
  j["t_count"] = c.t_count ? Json(*c.t_count) : Json(nullptr);
  j["s_min"] = c.s_min;
  j["s_max"] = c.s_max;
  j["s_count"] = c.s_count;
  j["s0"] = c.s0;
  j["mc_n"] = c.mc_n;
  j["trials"] = c.trials;
  j["weakstar_n"] = c.weakstar_n;
  j["growth_n"] = c.growth_n;
  j["rho0"] = c.rho0;
  j["margin_n"] = c.margin_n;
  j["seed"] = c.seed;
  j["format"] = c.format;
  return j;
}

void check_config(const RunConfig& c) {
  if (c.format != "json" && c.format != "csv") throw ValidationError("cli::run: format must be json or csv");
  if (c.threads < 1 || c.threads > 256) throw ValidationError("cli::run: threads must lie in [1, 256]");
  if (c.n_min < 1) throw ValidationError("cli::run: n_min must be at least 1");
  if (c.n_max < 0 || c.periodic_n_max < 0) throw ValidationError("cli::run: n_max must be nonnegative");
  for (int m : c.m) {
    if (m < 16 || m > (1 << 20)) throw ValidationError("cli::run: m must lie in [16, 2^20]");
  }
  if (c.trials < 1 || c.trials > 100'000'000) throw ValidationError("cli::run: trials must lie in [1, 1e8]");
  if (c.mc_n < 1 || c.mc_n > 100'000) throw ValidationError("cli::run: mc_n must lie in [1, 1e5]");
  if (c.t_count && *c.t_count < 3) throw ValidationError("cli::run: t_count must be at least 3");
  if (c.s_count < 1) throw ValidationError("cli::run: s_count must be at least 1");
  if (!(c.tolerance > 0.0)) throw ValidationError("cli::run: tolerance must be positive");
  if (!(c.rho0 > 0.0)) throw ValidationError("cli::run: rho0 must be positive");
  for (int n : c.weakstar_n) {
    if (n < 1) throw ValidationError("cli::run: weakstar n must be positive");
  }
}

}  // namespace

std::vector<std::string> command_names() {
  std::vector<std::string> out;
  for (const auto& c : kCommands) out.emplace_back(c.name);
  return out;
}

RunResult execute(const RunConfig& config, bool include_wall_time) {
  const auto start = std::chrono::steady_clock::now();
  RunResult res;
  try {
    check_config(config);
    const Command* cmd = nullptr;
    for (const auto& c : kCommands) {
      if (config.command == c.name) cmd = &c;
    }
    if (!cmd) throw ValidationError("cli::run: unknown subcommand '" + config.command + "'");
    ScopedThreadCount threads(config.threads);

    Context ctx{config, std::nullopt, std::nullopt};
    if (cmd->real_map) {
      ctx.map.emplace(load_map(config.map));
      ctx.phi.emplace(parse_potential(*ctx.map, config.potential));
    }
    const Json echo = config_echo(config);
    const std::string digest = hex_digest(echo.dump());
    Payload payload = cmd->body(ctx);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (config.format == "csv") {
      std::string head = "# thermolab " THERMOLAB_VERSION " " + config.command + " seed=" +
                         std::to_string(config.seed) + " inputs_digest=" + digest + "\n";
      head += "# config " + echo.dump() + "\n";
      res.report = head + payload.csv;
      if (include_wall_time) res.report += "# wall_time_s=" + csv_num(wall) + "\n";
    } else {
      Json report = {{"tool", "thermolab"},
                     {"version", THERMOLAB_VERSION},
                     {"command", config.command},
                     {"config", echo},
                     {"seed", config.seed},
                     {"inputs_digest", digest},
                     {"result", std::move(payload.result)}};
      if (ctx.map) {
        try {
          report["map_descriptor"] = Json::parse(map_to_json(*ctx.map));
        } catch (const ValidationError&) {
          report["map_descriptor"] = nullptr;  // generic branches have no closed form
        }
      }
      if (include_wall_time) report["wall_time_s"] = wall;
      res.report = report.dump(2) + "\n";
    }
  } catch (const ValidationError& e) {
    res.exit_code = 2;
    res.error = e.what();
  } catch (const NumericalError& e) {
    res.exit_code = 3;
    res.error = e.what();
  } catch (const nlohmann::json::exception& e) {
    res.exit_code = 2;
    res.error = std::string("cli::run: ") + e.what();
  }
  return res;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const auto res = execute(config, true);
  if (res.exit_code != 0) {
    err << "error: " << res.error << "\n";
    return res.exit_code;
  }
  if (config.output.empty()) {
    out << res.report;
  } else {
    std::ofstream os(config.output);
    if (!os) {
      err << "error: cli::run: cannot open output file '" << config.output << "'\n";
      return 2;
    }
    os << res.report;
  }
  return 0;
}

}  // namespace thermo
