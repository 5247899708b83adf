#pragma once

// Experiment registry, configuration parsing and report serialization for the
// gfspec command-line runner.

#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "gfspec/gfspec.hpp"

namespace gfspec::cli {

using json = nlohmann::json;

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kSchemaVersion = "1.0";

/// Invalid configuration or command line (exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

using Params = std::map<std::string, double>;

struct ParamSpec {
  double fallback = 0.0;
  double lo = -1e300, hi = 1e300;
  bool integer = false;
};

struct RegionSpec {
  std::vector<std::pair<double, double>> box;  // one interval per axis
  std::vector<int> points;                     // grid points per axis
};

struct ExperimentEntry {
  std::string name;
  std::string description;
  int dim = 1;
  std::map<std::string, ParamSpec> params;
  std::string default_target = "C0";
  RegionSpec default_region;
  std::function<Net(const Params&)> build;
};

namespace detail {

inline int as_int(const Params& p, const std::string& k) { return static_cast<int>(std::lround(p.at(k))); }

/// The standard four-net suite of the regularity classifier.
struct ClassifyCase {
  std::string name;
  Net net;
};

inline std::vector<ClassifyCase> classify_suite() {
  const SmoothFunction one = SmoothFunction::constant(1, 1.0);
  return {{"eps_inverse", eps_power_log_net(one, 1.0, 0.0)},
          {"log_eps", eps_power_log_net(one, 0.0, 1.0)},
          {"heaviside", heaviside_net()},
          {"delta", delta_net()}};
}

inline Net semilinear_from(SemilinearTag tag, const Params& p) {
  SemilinearKind kind;
  kind.tag = tag;
  if (as_int(p, "k") >= 0) {
    kind.initial = SemilinearKind::Initial::delta_derivative;
    kind.order = as_int(p, "k");
  } else {
    kind.initial = SemilinearKind::Initial::delta_power;
    kind.order = as_int(p, "m");
  }
  return semilinear_solution(kind);
}

}  // namespace detail

/// Registered experiments, in listing order.
inline const std::vector<ExperimentEntry>& registry() {
  static const std::vector<ExperimentEntry> entries = [] {
    using detail::as_int;
    const RegionSpec line{{{-2.0, 2.0}}, {81}};
    const RegionSpec slab{{{-1.0, 1.0}, {0.5, 2.0}}, {9, 9}};
    const ParamSpec m_param{2, 1, 8, true};
    const ParamSpec k_off{-1, -1, 4, true};
    std::vector<ExperimentEntry> e;
    e.push_back({"delta_pow", "delta^m = eps^{-md} phi^m(x/eps)", 1, {{"m", m_param}}, "C0", line,
                 [](const Params& p) { return delta_power_net(as_int(p, "m")); }});
    e.push_back({"delta_deriv", "k-th derivative of delta, eps^{-1-k} phi^(k)(x/eps)", 1, {{"k", {1, 0, 4, true}}},
                 "C1", line, [](const Params& p) { return delta_derivative_net(as_int(p, "k")); }});
    e.push_back({"heaviside", "H * phi_eps", 1, {}, "C1", line, [](const Params&) { return heaviside_net(); }});
    e.push_back({"osc", "A eps^a sin(x/eps)", 1, {{"A", {1.0, -1e6, 1e6, false}}, {"a", {1.0, -4, 4, false}}}, "C1",
                 RegionSpec{{{-1.0, 1.0}}, {41}},
                 [](const Params& p) { return oscillatory_net(p.at("A"), p.at("a")); }});
    e.push_back({"wave1d", "d'Alembert solution with delta-power data", 2,
                 {{"c0", {1.0, -1e6, 1e6, false}}, {"c1", {0.0, -1e6, 1e6, false}}, {"m", m_param},
                  {"n", {1, 1, 8, true}}},
                 "Dprime", RegionSpec{{{-1.6, 1.6}, {0.6, 1.4}}, {17, 9}}, [](const Params& p) {
                   return dalembert_wave(WaveData1D{p.at("c0"), p.at("c1"), as_int(p, "m"), as_int(p, "n")});
                 }});
    e.push_back({"semilinear:dissipative", "u_t = -u^3 with delta-type data", 2, {{"m", m_param}, {"k", k_off}},
                 "Dprime", slab,
                 [](const Params& p) { return detail::semilinear_from(SemilinearTag::dissipative_cubic, p); }});
    e.push_back({"semilinear:sqrt", "u_t = sqrt(1+u^2) with delta-type data", 2,
                 {{"m", {1, 1, 8, true}}, {"k", k_off}}, "Dprime", slab,
                 [](const Params& p) { return detail::semilinear_from(SemilinearTag::sqrt_growth, p); }});
    e.push_back({"semilinear:log", "u_t = (u+1)log(u+1) with delta-type data", 2,
                 {{"m", {1, 1, 8, true}}, {"k", k_off}}, "Dprime", RegionSpec{{{-1.0, 1.0}, {0.25, 1.0}}, {9, 9}},
                 [](const Params& p) { return detail::semilinear_from(SemilinearTag::log_growth, p); }});
    e.push_back({"blowup", "u_t = chi_eps(u) u^2 with Heaviside data", 2,
                 {{"s", {1.0, 0.05, 4.0, false}}, {"t_max", {2.0, 1.0001, 10.0, false}}}, "C0",
                 RegionSpec{{{-1.0, 1.0}, {0.25, 1.75}}, {9, 9}}, [](const Params& p) {
                   BlowupConfig cfg;
                   cfg.s = p.at("s");
                   cfg.t_max = p.at("t_max");
                   return blowup_truncated(cfg);
                 }});
    e.push_back({"rauch_reed", "interaction term w of the Rauch-Reed system", 2,
                 {{"m", {1, 1, 4, true}}, {"n", {1, 1, 4, true}}}, "C1",
                 RegionSpec{{{-0.5, 0.5}, {0.5, 2.0}}, {9, 9}},
                 [](const Params& p) { return rauch_reed_w(as_int(p, "m"), as_int(p, "n")); }});
    e.push_back({"classify", "regularity classes of eps^-1, |ln eps|, H and delta", 1, {}, "C0",
                 RegionSpec{{{-0.5, 0.5}}, {33}}, [](const Params&) { return delta_net(); }});
    e.push_back({"zero", "the zero net", 1, {{"dim", {1, 1, 2, true}}}, "C0", line,
                 [](const Params& p) { return zero_net(as_int(p, "dim")); }});
    e.push_back({"eps_power", "eps^{-p} |ln eps|^q", 1, {{"p", {1.0, -8, 8, false}}, {"q", {0.0, -8, 8, false}}}, "C0",
                 RegionSpec{{{-1.0, 1.0}}, {21}}, [](const Params& p) {
                   return eps_power_log_net(SmoothFunction::constant(1, 1.0), p.at("p"), p.at("q"));
                 }});
    return e;
  }();
  return entries;
}

inline const ExperimentEntry& find_experiment(const std::string& name) {
  for (const auto& e : registry())
    if (e.name == name) return e;
  throw ConfigError("unknown experiment or net '" + name + "' (see `gfspec list`)");
}

inline std::string list_experiments() {
  std::ostringstream out;
  for (const auto& e : registry()) {
    out << e.name;
    if (!e.params.empty()) {
      out << " [";
      bool first = true;
      for (const auto& [k, spec] : e.params) {
        out << (first ? "" : " ") << k << "=" << spec.fallback;
        first = false;
      }
      out << "]";
    }
    out << " : " << e.description << "\n";
  }
  return out.str();
}

/// Defaults merged with overrides, range-checked.
inline Params resolve_params(const ExperimentEntry& e, const Params& given) {
  Params out;
  for (const auto& [k, spec] : e.params) out[k] = spec.fallback;
  for (const auto& [k, v] : given) {
    auto it = e.params.find(k);
    if (it == e.params.end()) throw ConfigError("parameter '" + k + "' is not accepted by '" + e.name + "'");
    const ParamSpec& spec = it->second;
    if (!std::isfinite(v) || v < spec.lo || v > spec.hi)
      throw ConfigError("parameter '" + k + "' of '" + e.name + "' is out of range");
    if (spec.integer && v != std::round(v)) throw ConfigError("parameter '" + k + "' must be an integer");
    out[k] = v;
  }
  return out;
}

/// "name:k=v,k=v" to a name and parameter map.
inline std::pair<std::string, Params> parse_net_spec(const std::string& text) {
  std::string name = text;
  Params params;
  // parameters follow the last ':' before the first '=' (semilinear ids contain a ':')
  const auto eq = text.find('=');
  std::size_t cut = std::string::npos;
  if (eq != std::string::npos) {
    cut = text.rfind(':', eq);
    if (cut == std::string::npos) throw ConfigError("net spec must look like name:key=value,...");
  }
  if (cut != std::string::npos) {
    name = text.substr(0, cut);
    std::stringstream ss(text.substr(cut + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw ConfigError("malformed net parameter '" + item + "'");
      try {
        std::size_t used = 0;
        const std::string value = item.substr(eq + 1);
        params[item.substr(0, eq)] = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
      } catch (const std::exception&) {
        throw ConfigError("non-numeric value in net parameter '" + item + "'");
      }
    }
  }
  return {name, params};
}

inline Target parse_target(const std::string& s) {
  if (s == "Dprime" || s == "dprime" || s == "D'") return Target::dprime();
  if (s.size() >= 2 && (s[0] == 'C' || s[0] == 'c')) {
    try {
      std::size_t used = 0;
      const int p = std::stoi(s.substr(1), &used);
      if (used == s.size() - 1 && p >= 0 && p <= kDefaultMaxOrder) return Target::cp_order(p);
    } catch (const std::exception&) {
    }
  }
  throw ConfigError("target must be C<p> with 0 <= p <= " + std::to_string(kDefaultMaxOrder) + " or Dprime");
}

struct ExperimentConfig {
  std::string experiment;
  std::string net_id;
  Params params;
  std::string target = "C0";
  RegionSpec region;
  EpsilonSchedule schedule;
  std::vector<double> scale_exponents;
  FiberOptions options;
  long long seed = 0;
  std::string json_out;
  std::string csv_out;

  json to_json() const {
    json j;
    j["experiment"] = experiment;
    j["net"] = {{"id", net_id}, {"params", params}};
    j["target"] = target;
    json box = json::array();
    for (const auto& [a, b] : region.box) box.push_back({a, b});
    j["region"] = {{"box", box}, {"points", region.points}};
    j["schedule"] = {{"eps_max", schedule.eps_max}, {"rho", schedule.rho}, {"n", schedule.n}};
    j["scale"] = {{"id", "power"}, {"exponents", scale_exponents}};
    j["options"] = {{"refine", options.refine}, {"quad_tol", options.quad_tol}};
    j["seed"] = seed;
    return j;
  }

  CompactRegion compact_region() const {
    const int d = static_cast<int>(region.box.size());
    if (d == 1)
      return CompactRegion(Box::interval(region.box[0].first, region.box[0].second), region.points[0]);
    return CompactRegion(Box::rect(region.box[0].first, region.box[0].second, region.box[1].first,
                                   region.box[1].second),
                         region.points[0], region.points[1]);
  }

  Net build_net() const { return find_experiment(net_id).build(params); }
};

/// Fills gaps from the registry defaults and validates every field.
inline void finalize(ExperimentConfig& c) {
  if (c.net_id.empty()) c.net_id = c.experiment;
  if (c.experiment.empty()) c.experiment = c.net_id;
  const ExperimentEntry& e = find_experiment(c.net_id);
  c.params = resolve_params(e, c.params);
  int dim = e.dim;
  if (e.params.count("dim")) dim = detail::as_int(c.params, "dim");
  if (c.region.box.empty()) {
    c.region = e.default_region;
    if (dim == 2 && c.region.box.size() == 1) {
      c.region.box.push_back(c.region.box[0]);
      c.region.points = {21, 21};
    }
  }
  if (c.region.points.size() == 1 && c.region.box.size() == 2) c.region.points.push_back(c.region.points[0]);
  if (static_cast<int>(c.region.box.size()) != dim || c.region.points.size() != c.region.box.size())
    throw ConfigError("region must give one interval and one point count per axis (" + std::to_string(dim) +
                      " axes)");
  for (const auto& [a, b] : c.region.box)
    if (!(std::isfinite(a) && std::isfinite(b) && a < b)) throw ConfigError("region intervals need lo < hi");
  for (int n : c.region.points)
    if (n < 9 || n > 161 || n % 2 == 0) throw ConfigError("grid points per axis must be odd and within 9..161");
  if (c.target.empty()) c.target = e.default_target;
  parse_target(c.target);
  try {
    c.schedule.validate();
  } catch (const DomainError& err) {
    throw ConfigError(std::string("schedule: ") + err.what());
  }
  for (double r : c.scale_exponents)
    if (!(r >= 0.0) || !std::isfinite(r)) throw ConfigError("scale exponents must be finite and non-negative");
  if (!(c.options.quad_tol > 0.0 && c.options.quad_tol < 0.1)) throw ConfigError("quad_tol must lie in (0, 0.1)");
}

namespace detail {

template <class T>
T read(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("field '") + key + "' has the wrong type");
  }
}

inline void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& where) {
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* name : known) ok = ok || k == name;
    if (!ok) throw ConfigError("unknown field '" + k + "' in " + where);
  }
}

}  // namespace detail

inline ExperimentConfig parse_config(const json& j) {
  using detail::read;
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  detail::reject_unknown(j, {"experiment", "net", "target", "region", "schedule", "scale", "options", "output", "seed"},
                         "config");
  ExperimentConfig c;
  c.experiment = read<std::string>(j, "experiment", "");
  if (j.contains("net")) {
    const json& n = j.at("net");
    if (n.is_string()) {
      auto [id, params] = parse_net_spec(n.get<std::string>());
      c.net_id = id;
      c.params = params;
    } else if (n.is_object()) {
      detail::reject_unknown(n, {"id", "params"}, "net");
      c.net_id = read<std::string>(n, "id", "");
      if (n.contains("params")) {
        if (!n.at("params").is_object()) throw ConfigError("net.params must be an object");
        for (const auto& [k, v] : n.at("params").items()) {
          if (!v.is_number()) throw ConfigError("net parameter '" + k + "' must be numeric");
          c.params[k] = v.get<double>();
        }
      }
    } else {
      throw ConfigError("net must be a string or an object");
    }
  }
  c.target = read<std::string>(j, "target", "");
  if (j.contains("region")) {
    const json& r = j.at("region");
    detail::reject_unknown(r, {"box", "points"}, "region");
    try {
      for (const auto& iv : r.at("box")) {
        if (!iv.is_array() || iv.size() != 2) throw ConfigError("region.box entries must be [lo, hi] pairs");
        c.region.box.emplace_back(iv[0].get<double>(), iv[1].get<double>());
      }
      const json& pts = r.at("points");
      if (pts.is_number_integer()) {
        c.region.points.push_back(pts.get<int>());
      } else {
        for (const auto& p : pts) c.region.points.push_back(p.get<int>());
      }
    } catch (const json::exception&) {
      throw ConfigError("region needs numeric 'box' pairs and integer 'points'");
    }
  }
  if (j.contains("schedule")) {
    const json& s = j.at("schedule");
    detail::reject_unknown(s, {"eps_max", "rho", "n"}, "schedule");
    c.schedule.eps_max = read<double>(s, "eps_max", c.schedule.eps_max);
    c.schedule.rho = read<double>(s, "rho", c.schedule.rho);
    c.schedule.n = read<int>(s, "n", c.schedule.n);
  }
  if (j.contains("scale")) {
    const json& s = j.at("scale");
    detail::reject_unknown(s, {"id", "exponents"}, "scale");
    if (read<std::string>(s, "id", "power") != "power") throw ConfigError("only the power scale is supported");
    c.scale_exponents = read<std::vector<double>>(s, "exponents", {});
  }
  if (j.contains("options")) {
    const json& o = j.at("options");
    detail::reject_unknown(o, {"refine", "quad_tol"}, "options");
    c.options.refine = read<bool>(o, "refine", c.options.refine);
    c.options.quad_tol = read<double>(o, "quad_tol", c.options.quad_tol);
  }
  if (j.contains("output")) {
    const json& o = j.at("output");
    detail::reject_unknown(o, {"json", "csv"}, "output");
    c.json_out = read<std::string>(o, "json", "");
    c.csv_out = read<std::string>(o, "csv", "");
  }
  c.seed = read<long long>(j, "seed", 0);
  if (c.experiment.empty() && c.net_id.empty()) throw ConfigError("config needs 'experiment' or 'net'");
  finalize(c);
  return c;
}

// ---------------------------------------------------------------------------
// Canonical serialization
// ---------------------------------------------------------------------------

inline std::string format_double(double v) {
  if (std::isnan(v)) return "null";
  if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

namespace detail {

inline void write_canonical(const json& j, std::string& out, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(indent * depth), ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [k, v] : j.items()) {  // nlohmann::json keeps keys sorted
        if (!first) out += ",\n";
        first = false;
        out += pad + json(k).dump() + ": ";
        write_canonical(v, out, indent, depth + 1);
      }
      out += "\n" + close + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      bool scalar = true;
      for (const auto& v : j) scalar = scalar && !v.is_structured();
      if (scalar) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          write_canonical(j[i], out, indent, depth + 1);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        write_canonical(j[i], out, indent, depth + 1);
      }
      out += "\n" + close + "]";
      return;
    }
    case json::value_t::number_float: out += format_double(j.get<double>()); return;
    default: out += j.dump(); return;
  }
}

}  // namespace detail

/// Sorted keys, two-space indent, floats as %.6e.
inline std::string canonical_dump(const json& j) {
  std::string out;
  detail::write_canonical(j, out, 2, 0);
  out += "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline std::string hex64(std::uint64_t h) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline json fiber_json(const Point& x, int dim, const SigmaFiber& f, const std::vector<double>& exponents) {
  json rec;
  json xs = json::array();
  for (int i = 0; i < dim; ++i) xs.push_back(x[static_cast<std::size_t>(i)]);
  rec["x"] = xs;
  rec["R"] = std::isfinite(f.R) ? json(f.R) : json(nullptr);
  rec["endpoint"] = to_string(f.endpoint);
  rec["classification"] = to_string(f.classification);
  rec["residual"] = f.residual;
  rec["log_exponent"] = f.log_exponent;
  rec["shape_defect"] = f.shape_defect;
  rec["radius"] = f.radius;
  json slopes = json::array();
  for (const auto& [l, s] : f.per_order_slopes) slopes.push_back({{"l", l}, {"slope", s}});
  rec["per_order_slopes"] = slopes;
  if (!exponents.empty()) {
    // r ∈ Σ_x exactly when r < R, or r = R with an open endpoint
    json member = json::array();
    for (double r : exponents) {
      bool in = false;
      if (f.endpoint == Endpoint::all_of_Rplus) in = true;
      else if (f.nonempty()) in = r < f.R - kFitTol || (std::abs(r - f.R) <= kFitTol && f.endpoint != Endpoint::closed_at_R);
      member.push_back({{"r", r}, {"in_fiber", in}});
    }
    rec["fiber_membership"] = member;
  }
  return rec;
}

/// Smallest box holding the nonempty fibers, per axis; null when there are none.
inline json support_extent(const Spectrum& sp) {
  const auto idx = sp.projection();
  if (idx.empty()) return nullptr;
  const int d = sp.region.dim();
  json ext = json::array();
  for (int i = 0; i < d; ++i) {
    double lo = 1e300, hi = -1e300;
    for (std::size_t k : idx) {
      lo = std::min(lo, sp.points[k][static_cast<std::size_t>(i)]);
      hi = std::max(hi, sp.points[k][static_cast<std::size_t>(i)]);
    }
    ext.push_back({lo, hi});
  }
  return ext;
}

inline json spectrum_report(const ExperimentConfig& c, const Spectrum& sp) {
  json rep;
  rep["schema_version"] = kSchemaVersion;
  rep["tool"] = {{"name", "gfspec"}, {"version", kToolVersion}};
  rep["config"] = c.to_json();
  rep["schedule_hash"] = hex64(c.schedule.hash());
  rep["target"] = sp.target.name();
  json pts = json::array();
  const int d = sp.region.dim();
  for (std::size_t i = 0; i < sp.points.size(); ++i) pts.push_back(fiber_json(sp.points[i], d, sp.fibers[i], c.scale_exponents));
  rep["points"] = pts;
  const auto idx = sp.projection();
  const double max_r = sp.max_R();
  rep["summary"] = {{"grid_points", sp.points.size()},
                    {"nonempty_fibers", idx.size()},
                    {"max_R", std::isfinite(max_r) ? json(max_r) : json(nullptr)},
                    {"singular_support_extent", support_extent(sp)}};
  return rep;
}

inline std::string spectrum_csv(const Spectrum& sp, int p_max) {
  std::ostringstream out;
  const int d = sp.region.dim();
  out << "x";
  if (d == 2) out << ",t";
  out << ",R,endpoint,classification,residual";
  for (int l = 0; l <= p_max; ++l) out << ",slope_l" << l;
  out << "\n";
  for (std::size_t i = 0; i < sp.points.size(); ++i) {
    const SigmaFiber& f = sp.fibers[i];
    out << format_double(sp.points[i][0]);
    if (d == 2) out << "," << format_double(sp.points[i][1]);
    out << "," << (std::isfinite(f.R) ? format_double(f.R) : "inf") << "," << to_string(f.endpoint) << ","
        << to_string(f.classification) << "," << format_double(f.residual);
    for (int l = 0; l <= p_max; ++l) {
      out << ",";
      for (const auto& [ll, s] : f.per_order_slopes)
        if (ll == l) out << format_double(s);
    }
    out << "\n";
  }
  return out.str();
}

/// Highest slope index carried by any fiber (C^p orders or dictionary members).
inline int slope_columns(const Spectrum& sp) {
  int p = 0;
  for (const auto& f : sp.fibers)
    for (const auto& [l, s] : f.per_order_slopes) p = std::max(p, l);
  return p;
}

struct RunResult {
  json report;
  std::string csv;
};

inline json classify_report(const ExperimentConfig& c, int l_max) {
  json rep;
  rep["schema_version"] = kSchemaVersion;
  rep["tool"] = {{"name", "gfspec"}, {"version", kToolVersion}};
  rep["config"] = c.to_json();
  rep["schedule_hash"] = hex64(c.schedule.hash());
  json cases = json::array();
  const CompactRegion K = c.compact_region();
  auto add = [&](const std::string& name, const Net& net) {
    const RegularityResult r = classify_regularity(net, K, c.schedule, l_max);
    cases.push_back({{"net", name}, {"class", to_string(r.kind)}, {"m", r.m}, {"slopes", r.slopes}});
  };
  if (c.net_id == "classify") {
    for (const auto& cs : detail::classify_suite()) add(cs.name, cs.net);
  } else {
    add(c.net_id, c.build_net());
  }
  rep["classifications"] = cases;
  return rep;
}

/// Runs a configured experiment: a regularity classification for "classify",
/// a singular spectrum otherwise.
inline RunResult run(const ExperimentConfig& c) {
  if (c.net_id == "classify") return {classify_report(c, 4), {}};
  const Net net = c.build_net();
  const Target target = parse_target(c.target);
  if (target.kind == Target::Kind::cp && target.p > net.max_order())
    throw ConfigError("target order exceeds the derivative order of net '" + c.net_id + "'");
  const Spectrum sp = singular_spectrum(net, c.compact_region(), target, c.schedule, c.options);
  return {spectrum_report(c, sp), spectrum_csv(sp, slope_columns(sp))};
}

inline json valuation_report(const ExperimentConfig& c, int l) {
  const Net net = c.build_net();
  if (l < 0 || l > net.max_order()) throw ConfigError("seminorm order l is out of range for this net");
  const OrderFit fit = valuation_fit(net, c.compact_region(), l, c.schedule);
  json rep;
  rep["schema_version"] = kSchemaVersion;
  rep["tool"] = {{"name", "gfspec"}, {"version", kToolVersion}};
  rep["config"] = c.to_json();
  rep["schedule_hash"] = hex64(c.schedule.hash());
  rep["l"] = l;
  rep["valuation"] = fit.slope;
  rep["clamped_valuation"] = std::max(fit.slope, 0.0);
  rep["classification"] = to_string(fit.classification);
  rep["residual"] = fit.residual;
  rep["log_exponent"] = fit.log_exponent;
  return rep;
}

}  // namespace gfspec::cli
