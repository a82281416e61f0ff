#pragma once
// Run configuration: a strict INI dialect. Lines are `key = value` grouped
// under `[section]`; `#`-lines are comments. Unknown sections, unknown keys,
// duplicate keys and malformed values are all hard errors that name the
// offender, so a typo cannot silently fall back to a default.

#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "seeding.hpp"
#include "solve.hpp"

namespace ymh {

struct SimConfig {
  // [grid]
  int dim = 2;
  std::array<int, 3> n{16, 16, 1};
  std::array<double, 3> len{1, 1, 1};
  // [bundle]
  std::array<int, 3> degree{0, 0, 0};
  // [physics]
  double epsilon = -1;        // required by commands that use a single coupling
  std::vector<double> sweep;  // required by the sweep command
  // [init]
  enum class Init { Random, Constant, Profile } init = Init::Random;
  std::uint64_t seed = 1;
  double amplitude = 0.1;
  cplx constant_value{1.0, 0.0};
  std::vector<std::array<double, 2>> zeros;
  std::vector<int> charges;
  int axis = 2;  // extrusion axis for dim-3 profile seeds
  // [solver]
  SolverOptions solver;
  // [saddle]
  SymmetrySpec symmetry;
  int phase1_iters = 400;
  double fd_step = 1e-5;
  double trivial_threshold = 1e-6;
  // [diagnostics]
  std::vector<double> center;  // ball center for the monotonicity profile
  std::vector<double> radii;
  double cm = 0;
  double beta = 0.5;
  double concentration_k = 10;
  double chi_radius = -1;  // <0: automatic
  int slice_axis = 2;
  // [output]
  std::string out_dir = ".";
  bool write_state = true;
  bool write_density = false;
};

namespace detail {

inline std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace((unsigned char)s[b])) ++b;
  while (e > b && std::isspace((unsigned char)s[e - 1])) --e;
  return s.substr(b, e - b);
}

struct IniData {
  // section -> key -> value, plus insertion-order bookkeeping for errors
  std::map<std::string, std::map<std::string, std::string>> kv;
};

inline IniData parse_ini(const std::string& text) {
  IniData ini;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": malformed section header");
      section = trim(t.substr(1, t.size() - 2));
      if (section.empty())
        throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty section");
      continue;
    }
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(t.substr(0, eq)), val = trim(t.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
    if (section.empty())
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": key outside any section");
    auto& sec = ini.kv[section];
    if (sec.count(key))
      throw std::invalid_argument("config: duplicate key '" + key + "' in [" + section + "]");
    sec[key] = val;
  }
  return ini;
}

inline const std::map<std::string, std::set<std::string>>& config_schema() {
  static const std::map<std::string, std::set<std::string>> schema = {
      {"grid", {"dim", "n", "len"}},
      {"bundle", {"degree"}},
      {"physics", {"epsilon", "sweep"}},
      {"init", {"kind", "seed", "amplitude", "value", "zeros", "charges", "axis"}},
      {"solver",
       {"tol", "max_iters", "memory", "gauge_cadence", "c1", "shrink", "max_backtracks", "trace"}},
      {"saddle", {"elements", "phase1_iters", "fd_step", "trivial_threshold"}},
      {"diagnostics",
       {"center", "radii", "cm", "beta", "concentration_k", "chi_radius", "slice_axis"}},
      {"output", {"dir", "write_state", "write_density"}},
  };
  return schema;
}

class ConfigReader {
 public:
  explicit ConfigReader(IniData ini) : ini_(std::move(ini)) {
    const auto& schema = config_schema();
    for (const auto& [sec, keys] : ini_.kv) {
      auto it = schema.find(sec);
      if (it == schema.end())
        throw std::invalid_argument("config: unknown section [" + sec + "]");
      for (const auto& [key, val] : keys)
        if (!it->second.count(key))
          throw std::invalid_argument("config: unknown key '" + key + "' in [" + sec + "]");
    }
  }

  bool has(const std::string& sec, const std::string& key) const {
    auto s = ini_.kv.find(sec);
    return s != ini_.kv.end() && s->second.count(key);
  }
  std::string str(const std::string& sec, const std::string& key) const {
    return ini_.kv.at(sec).at(key);
  }

  long integer(const std::string& sec, const std::string& key) const {
    return parse_long(str(sec, key), sec, key);
  }
  double number(const std::string& sec, const std::string& key) const {
    return parse_double(str(sec, key), sec, key);
  }
  bool boolean(const std::string& sec, const std::string& key) const {
    std::string v = str(sec, key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument(where(sec, key) + ": expected a boolean, got '" + v + "'");
  }
  std::vector<double> numbers(const std::string& sec, const std::string& key) const {
    std::vector<double> out;
    for (const std::string& p : split_list(str(sec, key), ','))
      out.push_back(parse_double(p, sec, key));
    return out;
  }
  std::vector<long> integers(const std::string& sec, const std::string& key) const {
    std::vector<long> out;
    for (const std::string& p : split_list(str(sec, key), ','))
      out.push_back(parse_long(p, sec, key));
    return out;
  }
  // semicolon-separated groups of comma-separated numbers
  std::vector<std::vector<double>> groups(const std::string& sec, const std::string& key) const {
    std::vector<std::vector<double>> out;
    for (const std::string& grp : split_list(str(sec, key), ';')) {
      std::vector<double> g;
      for (const std::string& p : split_list(grp, ',')) g.push_back(parse_double(p, sec, key));
      out.push_back(std::move(g));
    }
    return out;
  }

 private:
  static std::vector<std::string> split_list(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
      if (c == sep) {
        out.push_back(trim(cur));
        cur.clear();
      } else {
        cur += c;
      }
    }
    out.push_back(trim(cur));
    return out;
  }
  static std::string where(const std::string& sec, const std::string& key) {
    return "config [" + sec + "] " + key;
  }
  static long parse_long(const std::string& v, const std::string& sec, const std::string& key) {
    try {
      size_t pos = 0;
      long r = std::stol(v, &pos);
      if (pos != v.size()) throw std::invalid_argument("");
      return r;
    } catch (...) {
      throw std::invalid_argument(where(sec, key) + ": expected an integer, got '" + v + "'");
    }
  }
  static double parse_double(const std::string& v, const std::string& sec,
                             const std::string& key) {
    try {
      size_t pos = 0;
      double r = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument("");
      return r;
    } catch (...) {
      throw std::invalid_argument(where(sec, key) + ": expected a number, got '" + v + "'");
    }
  }

  IniData ini_;
};

}  // namespace detail

inline SimConfig parse_config_text(const std::string& text) {
  detail::ConfigReader r(detail::parse_ini(text));
  SimConfig c;

  if (!r.has("grid", "dim")) throw std::invalid_argument("config [grid] dim: required");
  c.dim = int(r.integer("grid", "dim"));
  if (c.dim != 2 && c.dim != 3)
    throw std::invalid_argument("config [grid] dim: must be 2 or 3");
  {
    auto nv = r.integers("grid", "n");
    auto lv = r.numbers("grid", "len");
    if (int(nv.size()) != c.dim)
      throw std::invalid_argument("config [grid] n: expected " + std::to_string(c.dim) + " values");
    if (int(lv.size()) != c.dim)
      throw std::invalid_argument("config [grid] len: expected " + std::to_string(c.dim) +
                                  " values");
    for (int j = 0; j < c.dim; ++j) {
      c.n[j] = int(nv[j]);
      c.len[j] = lv[j];
    }
    if (c.dim == 2) {
      c.n[2] = 1;
      c.len[2] = 1;
    }
  }
  if (r.has("bundle", "degree")) {
    auto dv = r.integers("bundle", "degree");
    size_t want = (c.dim == 2) ? 1 : 3;
    if (dv.size() != want)
      throw std::invalid_argument("config [bundle] degree: expected " + std::to_string(want) +
                                  " value(s) for dim " + std::to_string(c.dim));
    for (size_t p = 0; p < want; ++p) c.degree[p] = int(dv[p]);
  }
  if (r.has("physics", "epsilon")) {
    c.epsilon = r.number("physics", "epsilon");
    if (!(c.epsilon > 0)) throw std::invalid_argument("config [physics] epsilon: must be positive");
  }
  if (r.has("physics", "sweep")) {
    c.sweep = r.numbers("physics", "sweep");
    for (double e : c.sweep)
      if (!(e > 0)) throw std::invalid_argument("config [physics] sweep: values must be positive");
  }

  if (r.has("init", "kind")) {
    std::string k = r.str("init", "kind");
    if (k == "random") c.init = SimConfig::Init::Random;
    else if (k == "constant") c.init = SimConfig::Init::Constant;
    else if (k == "profile") c.init = SimConfig::Init::Profile;
    else
      throw std::invalid_argument("config [init] kind: expected random|constant|profile, got '" +
                                  k + "'");
  }
  if (r.has("init", "seed")) c.seed = std::uint64_t(r.integer("init", "seed"));
  if (r.has("init", "amplitude")) c.amplitude = r.number("init", "amplitude");
  if (r.has("init", "value")) {
    auto v = r.numbers("init", "value");
    if (v.size() != 2) throw std::invalid_argument("config [init] value: expected re,im");
    c.constant_value = cplx(v[0], v[1]);
  }
  if (r.has("init", "zeros")) {
    for (const auto& grp : r.groups("init", "zeros")) {
      if (grp.size() != 2)
        throw std::invalid_argument("config [init] zeros: each entry needs 2 coordinates");
      c.zeros.push_back({grp[0], grp[1]});
    }
  }
  if (r.has("init", "charges")) {
    for (long q : r.integers("init", "charges")) c.charges.push_back(int(q));
  }
  if (c.zeros.size() != c.charges.size())
    throw std::invalid_argument("config [init]: zeros and charges must have equal length");
  if (r.has("init", "axis")) c.axis = int(r.integer("init", "axis"));
  if (c.init == SimConfig::Init::Profile && c.zeros.empty())
    throw std::invalid_argument("config [init]: profile seed needs zeros and charges");

  if (r.has("solver", "tol")) c.solver.tol = r.number("solver", "tol");
  if (r.has("solver", "max_iters")) c.solver.max_iters = int(r.integer("solver", "max_iters"));
  if (r.has("solver", "memory")) c.solver.memory = int(r.integer("solver", "memory"));
  if (r.has("solver", "gauge_cadence"))
    c.solver.gauge_cadence = int(r.integer("solver", "gauge_cadence"));
  if (r.has("solver", "c1")) c.solver.c1 = r.number("solver", "c1");
  if (r.has("solver", "shrink")) c.solver.shrink = r.number("solver", "shrink");
  if (r.has("solver", "max_backtracks"))
    c.solver.max_backtracks = int(r.integer("solver", "max_backtracks"));
  if (r.has("solver", "trace")) c.solver.trace = r.boolean("solver", "trace");

  if (r.has("saddle", "elements")) {
    bool has_id = false;
    for (const auto& grp : r.groups("saddle", "elements")) {
      if (grp.size() != 4 && grp.size() != 5)
        throw std::invalid_argument(
            "config [saddle] elements: each entry is shift0,shift1,shift2,conjugate[,negate]");
      SymmetryElement el;
      for (int j = 0; j < 3; ++j) {
        double v = grp[j];
        if (v != std::floor(v))
          throw std::invalid_argument("config [saddle] elements: shifts must be integers (sites)");
        el.shift[j] = int(v);
      }
      for (size_t j = 3; j < grp.size(); ++j)
        if (grp[j] != 0 && grp[j] != 1)
          throw std::invalid_argument(
              "config [saddle] elements: conjugate/negate flags must be 0 or 1");
      el.conjugate = grp[3] == 1;
      el.negate = grp.size() == 5 && grp[4] == 1;
      if (el.shift == std::array<int, 3>{0, 0, 0} && !el.conjugate && !el.negate) has_id = true;
      c.symmetry.elements.push_back(el);
    }
    if (!has_id) c.symmetry.elements.insert(c.symmetry.elements.begin(), SymmetryElement{});
  }
  if (r.has("saddle", "phase1_iters")) c.phase1_iters = int(r.integer("saddle", "phase1_iters"));
  if (r.has("saddle", "fd_step")) c.fd_step = r.number("saddle", "fd_step");
  if (r.has("saddle", "trivial_threshold"))
    c.trivial_threshold = r.number("saddle", "trivial_threshold");

  if (r.has("diagnostics", "center")) {
    c.center = r.numbers("diagnostics", "center");
    if (int(c.center.size()) != c.dim)
      throw std::invalid_argument("config [diagnostics] center: expected " +
                                  std::to_string(c.dim) + " coordinates");
  }
  if (r.has("diagnostics", "radii")) c.radii = r.numbers("diagnostics", "radii");
  if (r.has("diagnostics", "cm")) c.cm = r.number("diagnostics", "cm");
  if (r.has("diagnostics", "beta")) c.beta = r.number("diagnostics", "beta");
  if (r.has("diagnostics", "concentration_k"))
    c.concentration_k = r.number("diagnostics", "concentration_k");
  if (r.has("diagnostics", "chi_radius")) c.chi_radius = r.number("diagnostics", "chi_radius");
  if (r.has("diagnostics", "slice_axis")) c.slice_axis = int(r.integer("diagnostics", "slice_axis"));

  if (r.has("output", "dir")) c.out_dir = r.str("output", "dir");
  if (r.has("output", "write_state")) c.write_state = r.boolean("output", "write_state");
  if (r.has("output", "write_density")) c.write_density = r.boolean("output", "write_density");
  return c;
}

inline SimConfig parse_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("config: cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config_text(ss.str());
}

// Builders -----------------------------------------------------------------

inline Grid config_grid(const SimConfig& c) { return Grid::make(c.dim, c.n, c.len); }

inline BundleTwist config_twist(const SimConfig& c) { return BundleTwist::make(c.dim, c.degree); }

// Initial state per [init]; profile seeds need a positive coupling.
inline FieldState config_initial_state(const SimConfig& c, double eps) {
  Grid g = config_grid(c);
  BundleTwist tw = config_twist(c);
  switch (c.init) {
    case SimConfig::Init::Random:
      return build_state(g, tw, InitSpec::random(c.seed, c.amplitude));
    case SimConfig::Init::Constant:
      return build_state(g, tw, InitSpec::constant(c.constant_value));
    case SimConfig::Init::Profile:
      if (!(eps > 0))
        throw std::invalid_argument("config: profile seed needs a positive coupling");
      return seed_from_profile(g, tw, eps, c.zeros, c.charges, c.axis);
  }
  throw std::logic_error("config: unreachable init kind");
}

}  // namespace ymh
