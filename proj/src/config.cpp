#include "spinsync/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <regex>
#include <set>

#include "spinsync/common.hpp"

namespace spinsync {

namespace {

// Walks one JSON object, remembering which keys were consumed so that typos
// are reported instead of silently ignored.
class Reader {
 public:
  Reader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) {
      throw ValidationError(where() + " must be an object");
    }
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const Json& at(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void number(const std::string& key, double& out) {
    if (!has(key)) return;
    const Json& v = at(key);
    if (!v.is_number()) {
      throw ValidationError(field(key) + " must be a number");
    }
    out = v.get<double>();
    if (!std::isfinite(out)) {
      throw ValidationError(field(key) + " must be finite");
    }
  }

  void number(const std::string& key, std::optional<double>& out) {
    if (!has(key)) return;
    double v = 0.0;
    number(key, v);
    out = v;
  }

  void count(const std::string& key, std::size_t& out) {
    if (!has(key)) return;
    const Json& v = at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      throw ValidationError(field(key) + " must be a non-negative integer");
    }
    out = v.get<std::size_t>();
  }

  void flag(const std::string& key, bool& out) {
    if (!has(key)) return;
    const Json& v = at(key);
    if (!v.is_boolean()) {
      throw ValidationError(field(key) + " must be true or false");
    }
    out = v.get<bool>();
  }

  void text(const std::string& key, std::string& out) {
    if (!has(key)) return;
    const Json& v = at(key);
    if (!v.is_string()) {
      throw ValidationError(field(key) + " must be a string");
    }
    out = v.get<std::string>();
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.contains(key)) {
        throw ValidationError("unknown field " + field(key));
      }
    }
  }

 private:
  std::string where() const { return path_.empty() ? "config" : path_; }

  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

AngleDist read_angle(const Json& j, const std::string& path) {
  AngleDist d;
  if (j.is_number() || j.is_string()) {
    d.mean = parse_angle(j, path);
    return d;
  }
  Reader r(j, path);
  if (r.has("mean")) d.mean = parse_angle(r.at("mean"), r.field("mean"));
  if (r.has("sigma")) d.sigma = parse_angle(r.at("sigma"), r.field("sigma"));
  r.finish();
  return d;
}

Json angle_json(const AngleDist& d) { return Json{{"mean", d.mean}, {"sigma", d.sigma}}; }

std::vector<double> read_values(const Json& j, const std::string& path) {
  std::vector<double> values;
  if (j.is_array()) {
    for (const auto& v : j) {
      if (!v.is_number()) {
        throw ValidationError(path + " entries must be numbers");
      }
      values.push_back(v.get<double>());
    }
    return values;
  }
  Reader r(j, path);
  const bool geom = r.has("geomspace");
  if (!geom && !r.has("linspace")) {
    throw ValidationError(path + " must be a list or {linspace|geomspace: {start, stop, count}}");
  }
  const std::string key = geom ? "geomspace" : "linspace";
  Reader g(r.at(key), r.field(key));
  double start = 0.0, stop = 0.0;
  std::size_t count = 0;
  g.number("start", start);
  g.number("stop", stop);
  g.count("count", count);
  g.finish();
  r.finish();
  if (geom && (!(start > 0.0) || !(stop > 0.0))) {
    throw ValidationError(path + ".geomspace bounds must be positive");
  }
  for (std::size_t k = 0; k < count; ++k) {
    const double f = count > 1 ? static_cast<double>(k) / static_cast<double>(count - 1) : 0.0;
    values.push_back(geom ? start * std::pow(stop / start, f) : start + (stop - start) * f);
  }
  return values;
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::size_t begin = 0;
  while (begin <= path.size()) {
    const std::size_t dot = path.find('.', begin);
    parts.push_back(path.substr(begin, dot == std::string::npos ? std::string::npos : dot - begin));
    if (dot == std::string::npos) break;
    begin = dot + 1;
  }
  return parts;
}

Json* find_path(Json& j, const std::string& path) {
  Json* node = &j;
  for (const auto& part : split_path(path)) {
    if (!node->is_object() || !node->contains(part)) {
      return nullptr;
    }
    node = &(*node)[part];
  }
  return node;
}

}  // namespace

double parse_angle(const Json& value, const std::string& field) {
  if (value.is_number()) {
    return value.get<double>();
  }
  if (!value.is_string()) {
    throw ValidationError(field + " must be a number or an expression like \"pi/8\"");
  }
  const std::string s = value.get<std::string>();
  static const std::regex pattern(
      R"(^\s*([+-]?)\s*([0-9]*\.?[0-9]+(?:[eE][+-]?[0-9]+)?)?\s*\*?\s*pi\s*(?:/\s*([0-9]*\.?[0-9]+))?\s*$)");
  std::smatch m;
  if (std::regex_match(s, m, pattern)) {
    double v = kPi;
    if (m[2].matched) v *= std::stod(m[2].str());
    if (m[3].matched) {
      const double div = std::stod(m[3].str());
      if (div == 0.0) throw ValidationError(field + ": division by zero in \"" + s + "\"");
      v /= div;
    }
    return m[1].str() == "-" ? -v : v;
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ValidationError(field + ": cannot parse angle \"" + s + "\"");
}

double PhysicsConfig::gamma_value() const {
  if (gamma) return *gamma;
  if (gamma_over_omega) return *gamma_over_omega * omega;
  return 0.0;
}

void RunConfig::validate() const {
  static const std::set<std::string> engines = {"bloch", "meanfield", "tops", "master"};
  if (!engines.contains(engine)) {
    throw ValidationError("engine must be one of bloch, meanfield, tops, master (got \"" + engine +
                          "\")");
  }
  const auto& p = physics;
  if (p.gamma && p.gamma_over_omega) {
    throw ValidationError("physics.gamma and physics.gamma_over_omega are mutually exclusive");
  }
  if (!p.gamma && !p.gamma_over_omega) {
    throw ValidationError("physics.gamma_over_omega (or physics.gamma) is required");
  }
  if (p.gamma_value() < 0.0) {
    throw ValidationError(p.gamma ? "physics.gamma must be non-negative"
                                  : "physics.gamma_over_omega must be non-negative");
  }
  if (!(p.omega > 0.0)) throw ValidationError("physics.omega must be positive");
  if (p.N == 0) throw ValidationError("physics.N must be at least 1");
  if (p.omega_spread < 0.0) throw ValidationError("physics.omega_spread must be non-negative");
  const double twice = 2.0 * p.I;
  if (p.I <= 0.0 || std::abs(twice - std::round(twice)) > 1e-12) {
    throw ValidationError("physics.I must be a positive half-integer");
  }
  if ((engine == "bloch" || engine == "tops" || engine == "meanfield") && p.I != 0.5) {
    throw ValidationError("physics.I must be 1/2 for engine " + engine);
  }
  if (engine == "tops" && p.gamma_value() <= 0.0) {
    throw ValidationError("physics.gamma_over_omega must be positive for engine tops");
  }
  if (p.coupling.kind != "uniform" && p.coupling.kind != "random") {
    throw ValidationError("physics.coupling.kind must be uniform or random");
  }
  if (p.coupling.kind == "random" && p.N < 2) {
    throw ValidationError("physics.coupling.kind random needs physics.N >= 2");
  }
  for (const auto* a : {&p.tilt.theta_y, &p.tilt.theta_z, &p.tilt.phi_y, &p.tilt.phi_z}) {
    if (a->sigma < 0.0) throw ValidationError("physics.tilt sigma values must be non-negative");
  }
  const auto& n = numerics;
  if (!(n.t_end > 0.0)) throw ValidationError("numerics.t_end must be positive");
  if (!(n.sample_dt > 0.0) || n.sample_dt > n.t_end) {
    throw ValidationError("numerics.sample_dt must be positive and at most t_end");
  }
  if (!(n.rtol > 0.0)) throw ValidationError("numerics.rtol must be positive");
  if (!(n.atol > 0.0)) throw ValidationError("numerics.atol must be positive");
  if (analysis.max_order == 0) throw ValidationError("analysis.max_order must be positive");
  if (analysis.mode_window_start &&
      (*analysis.mode_window_start < 0.0 || *analysis.mode_window_start >= n.t_end)) {
    throw ValidationError("analysis.mode_window_start must lie in [0, t_end)");
  }
  if (!(analysis.sync_threshold > 0.0)) {
    throw ValidationError("analysis.sync_threshold must be positive");
  }
}

double RunConfig::mode_window_start() const {
  if (analysis.mode_window_start) return *analysis.mode_window_start;
  const double g = physics.gamma_value();
  const double quarter = numerics.t_end / 4.0;
  return g > 0.0 ? std::min(20.0 / g, quarter) : quarter;
}

std::size_t RunConfig::emitted_atoms() const {
  const std::size_t atoms = (engine == "meanfield" || (engine == "master" && physics.mean_field))
                                ? 1
                                : physics.N;
  return std::min(atoms, output.atoms.value_or(std::min<std::size_t>(atoms, 10)));
}

RunConfig RunConfig::from_json(const Json& j) {
  RunConfig c;
  Reader r(j, "");
  if (r.has("kind")) {
    std::string kind;
    r.text("kind", kind);
    if (kind != "run") throw ValidationError("kind must be \"run\" for a run config");
  }
  r.text("name", c.name);
  r.text("engine", c.engine);
  if (r.has("seed")) {
    const Json& s = r.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
      throw ValidationError("seed must be a non-negative integer");
    }
    c.seed = s.get<std::uint64_t>();
  }
  if (r.has("physics")) {
    Reader p(r.at("physics"), "physics");
    auto& ph = c.physics;
    p.number("I", ph.I);
    p.number("omega", ph.omega);
    p.number("gamma_over_omega", ph.gamma_over_omega);
    p.number("gamma", ph.gamma);
    p.count("N", ph.N);
    p.number("beta", ph.beta);
    p.number("omega_spread", ph.omega_spread);
    p.flag("mean_field", ph.mean_field);
    if (p.has("tilt")) {
      Reader t(p.at("tilt"), "physics.tilt");
      const std::pair<const char*, AngleDist*> angles[] = {{"theta_y", &ph.tilt.theta_y},
                                                           {"theta_z", &ph.tilt.theta_z},
                                                           {"phi_y", &ph.tilt.phi_y},
                                                           {"phi_z", &ph.tilt.phi_z}};
      for (const auto& [key, dist] : angles) {
        if (t.has(key)) *dist = read_angle(t.at(key), t.field(key));
      }
      t.finish();
    }
    if (p.has("coupling")) {
      Reader cp(p.at("coupling"), "physics.coupling");
      cp.text("kind", ph.coupling.kind);
      cp.flag("symmetric", ph.coupling.symmetric);
      cp.flag("zero_diagonal", ph.coupling.zero_diagonal);
      cp.finish();
    }
    p.finish();
  }
  if (r.has("numerics")) {
    Reader n(r.at("numerics"), "numerics");
    n.number("t_end", c.numerics.t_end);
    n.number("sample_dt", c.numerics.sample_dt);
    n.number("rtol", c.numerics.rtol);
    n.number("atol", c.numerics.atol);
    n.finish();
  }
  if (r.has("analysis")) {
    Reader a(r.at("analysis"), "analysis");
    a.flag("modes", c.analysis.modes);
    a.flag("sync", c.analysis.sync);
    a.number("mode_window_start", c.analysis.mode_window_start);
    a.count("max_order", c.analysis.max_order);
    a.number("sync_threshold", c.analysis.sync_threshold);
    a.finish();
  }
  if (r.has("output")) {
    Reader o(r.at("output"), "output");
    if (o.has("atoms")) {
      std::size_t atoms = 0;
      o.count("atoms", atoms);
      c.output.atoms = atoms;
    }
    o.flag("density_snapshots", c.output.density_snapshots);
    o.finish();
  }
  r.finish();
  c.validate();
  return c;
}

Json RunConfig::to_json() const {
  const auto& p = physics;
  Json phys;
  phys["I"] = p.I;
  phys["omega"] = p.omega;
  if (p.gamma_over_omega) phys["gamma_over_omega"] = *p.gamma_over_omega;
  if (p.gamma) phys["gamma"] = *p.gamma;
  phys["N"] = p.N;
  phys["beta"] = p.beta;
  phys["tilt"] = Json{{"theta_y", angle_json(p.tilt.theta_y)},
                      {"theta_z", angle_json(p.tilt.theta_z)},
                      {"phi_y", angle_json(p.tilt.phi_y)},
                      {"phi_z", angle_json(p.tilt.phi_z)}};
  phys["omega_spread"] = p.omega_spread;
  phys["coupling"] = Json{{"kind", p.coupling.kind},
                          {"symmetric", p.coupling.symmetric},
                          {"zero_diagonal", p.coupling.zero_diagonal}};
  phys["mean_field"] = p.mean_field;

  Json ana{{"modes", analysis.modes}, {"sync", analysis.sync}};
  if (analysis.mode_window_start) ana["mode_window_start"] = *analysis.mode_window_start;
  ana["max_order"] = analysis.max_order;
  ana["sync_threshold"] = analysis.sync_threshold;

  Json out{{"density_snapshots", output.density_snapshots}};
  if (output.atoms) out["atoms"] = *output.atoms;

  Json j;
  j["kind"] = "run";
  j["name"] = name;
  j["engine"] = engine;
  j["seed"] = seed;
  j["physics"] = phys;
  j["numerics"] = Json{{"t_end", numerics.t_end},
                       {"sample_dt", numerics.sample_dt},
                       {"rtol", numerics.rtol},
                       {"atol", numerics.atol}};
  j["analysis"] = ana;
  j["output"] = out;
  return j;
}

void SweepConfig::validate() const {
  base.validate();
  if (workers < 1) throw ValidationError("workers must be at least 1");
  Json j = base.to_json();
  const Json* node = find_path(j, axis);
  if (node == nullptr || !node->is_number() || axis == "seed") {
    throw ValidationError("axis \"" + axis + "\" is not a numeric field of the base config");
  }
}

RunConfig SweepConfig::point(double value) const {
  Json j = base.to_json();
  Json* node = find_path(j, axis);
  if (node == nullptr) {
    throw ValidationError("axis \"" + axis + "\" is not a numeric field of the base config");
  }
  if (node->is_number_integer()) {
    if (value < 0.0 || value != std::floor(value)) {
      throw ValidationError("axis \"" + axis + "\" takes non-negative integer values");
    }
    *node = static_cast<std::size_t>(value);
  } else {
    *node = value;
  }
  return RunConfig::from_json(j);
}

SweepConfig SweepConfig::from_json(const Json& j) {
  SweepConfig s;
  Reader r(j, "");
  std::string kind;
  r.text("kind", kind);
  if (kind != "sweep") throw ValidationError("kind must be \"sweep\" for a sweep config");
  if (!r.has("base")) throw ValidationError("base is required");
  try {
    s.base = RunConfig::from_json(r.at("base"));
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("base: ") + e.what());
  }
  r.text("axis", s.axis);
  if (s.axis.empty()) throw ValidationError("axis is required");
  if (r.has("values")) s.values = read_values(r.at("values"), "values");
  if (r.has("workers")) {
    std::size_t w = 1;
    r.count("workers", w);
    s.workers = static_cast<int>(w);
  }
  r.finish();
  std::stable_sort(s.values.begin(), s.values.end());
  s.validate();
  return s;
}

Json SweepConfig::to_json() const {
  Json j;
  j["kind"] = "sweep";
  j["base"] = base.to_json();
  j["axis"] = axis;
  j["values"] = values;
  j["workers"] = workers;
  return j;
}

BudgetConfig BudgetConfig::from_json(const Json& j) {
  BudgetConfig b;
  Reader r(j, "");
  std::string kind;
  r.text("kind", kind);
  if (kind != "budget") throw ValidationError("kind must be \"budget\" for a budget config");
  if (r.has("vapor")) {
    const Json& v = r.at("vapor");
    if (!v.is_object()) throw ValidationError("vapor must be an object");
    for (const auto& [key, value] : v.items()) {
      const std::string field = "vapor." + key;
      double parsed = 0.0;
      if (key == "T" && value.is_object()) {
        Reader t(value, field);
        std::string unit = "K";
        t.number("value", parsed);
        t.text("unit", unit);
        t.finish();
        if (unit == "C") {
          parsed += 273.15;
        } else if (unit != "K") {
          throw ValidationError(field + ".unit must be \"C\" or \"K\"");
        }
      } else if (value.is_number()) {
        parsed = value.get<double>();
      } else {
        throw ValidationError(field + " must be a number");
      }
      b.vapor.field(key) = parsed;
      b.vapor.provenance[key] = "config override";
    }
    b.vapor.validate();
  }
  r.number("omega_hf", b.omega_hf);
  r.number("r_pump", b.r_pump);
  r.number("omega_b", b.omega_b);
  r.number("g_s", b.g_s);
  r.number("b_perp", b.b_perp);
  r.finish();
  if (!(b.omega_hf > 0.0) || !(b.omega_b > 0.0)) {
    throw ValidationError("omega_hf and omega_b must be positive");
  }
  if (b.r_pump < 0.0 || b.g_s < 0.0 || b.b_perp < 0.0) {
    throw ValidationError("r_pump, g_s and b_perp must be non-negative");
  }
  return b;
}

Json BudgetConfig::to_json() const {
  Json vapor;
  for (const auto& [name, unit] : VaporConfig::units()) {
    vapor[name] = this->vapor.get(name);
  }
  return Json{{"kind", "budget"}, {"vapor", vapor},  {"omega_hf", omega_hf},
              {"r_pump", r_pump}, {"omega_b", omega_b}, {"g_s", g_s},
              {"b_perp", b_perp}};
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open config file " + path);
  }
  try {
    return Json::parse(in, nullptr, true, true);
  } catch (const Json::parse_error& e) {
    throw ValidationError("config file " + path + " is not valid JSON: " + e.what());
  }
}

std::string config_kind(const Json& j) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  if (!j.contains("kind")) return "run";
  if (!j["kind"].is_string()) throw ValidationError("kind must be a string");
  return j["kind"].get<std::string>();
}

}  // namespace spinsync
