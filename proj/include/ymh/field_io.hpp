#pragma once
// On-disk state dumps: a short text header (key=value lines, terminated by
// "end-header") followed by a raw little-endian float64 payload. The payload
// round-trips bit exactly; header floats are printed with 17 significant
// digits so they round-trip too.
//
// kind=state  payload: Re u, Im u interleaved in site order, then the
//             connection a direction-major (a_0 all sites, a_1, ...).
// kind=scalar payload: one value per site.

#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "field.hpp"

namespace ymh {

inline constexpr int DUMP_FORMAT_VERSION = 1;

namespace detail {

inline void write_f64le(std::ostream& os, double v) {
  std::uint64_t b;
  std::memcpy(&b, &v, 8);
  char c[8];
  for (int i = 0; i < 8; ++i) c[i] = char((b >> (8 * i)) & 0xff);
  os.write(c, 8);
}

inline double read_f64le(std::istream& is) {
  char c[8];
  is.read(c, 8);
  if (!is) throw std::runtime_error("dump: truncated payload");
  std::uint64_t b = 0;
  for (int i = 0; i < 8; ++i) b |= std::uint64_t(std::uint8_t(c[i])) << (8 * i);
  double v;
  std::memcpy(&v, &b, 8);
  return v;
}

inline std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

struct DumpHeader {
  std::map<std::string, std::string> kv;

  const std::string& need(const std::string& key) const {
    auto it = kv.find(key);
    if (it == kv.end()) throw std::runtime_error("dump: missing header key '" + key + "'");
    return it->second;
  }
  long get_long(const std::string& key) const {
    const std::string& v = need(key);
    size_t pos = 0;
    long r = std::stol(v, &pos);
    if (pos != v.size()) throw std::runtime_error("dump: bad integer for '" + key + "'");
    return r;
  }
  double get_double(const std::string& key) const {
    const std::string& v = need(key);
    size_t pos = 0;
    double r = std::stod(v, &pos);
    if (pos != v.size()) throw std::runtime_error("dump: bad number for '" + key + "'");
    return r;
  }
  template <class T, class F>
  std::array<T, 3> get_triple(const std::string& key, F parse) const {
    auto parts = split_on(need(key), ',');
    if (parts.size() != 3) throw std::runtime_error("dump: '" + key + "' needs 3 values");
    std::array<T, 3> out;
    for (int i = 0; i < 3; ++i) out[i] = parse(parts[i]);
    return out;
  }
};

inline DumpHeader read_header(std::istream& is, const std::string& expect_kind) {
  std::string line;
  if (!std::getline(is, line) || line != "ymh-dump")
    throw std::runtime_error("dump: not a dump file (bad magic line)");
  DumpHeader h;
  while (std::getline(is, line)) {
    if (line == "end-header") {
      int ver = int(h.get_long("format_version"));
      if (ver != DUMP_FORMAT_VERSION)
        throw std::runtime_error("dump: format version " + std::to_string(ver) +
                                 " not supported (this build reads version " +
                                 std::to_string(DUMP_FORMAT_VERSION) + ")");
      if (h.need("kind") != expect_kind)
        throw std::runtime_error("dump: kind '" + h.need("kind") + "', expected '" + expect_kind +
                                 "'");
      return h;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0)
      throw std::runtime_error("dump: malformed header line '" + line + "'");
    h.kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  throw std::runtime_error("dump: header not terminated by end-header");
}

inline void check_payload_end(std::istream& is, const std::string& path) {
  is.peek();
  if (!is.eof()) throw std::runtime_error("dump: trailing bytes after payload in " + path);
}

}  // namespace detail

inline void save_state(const std::string& path, const FieldState& s, double eps) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("dump: cannot open " + path + " for writing");
  const Grid& g = s.grid;
  os << "ymh-dump\n";
  os << "format_version=" << DUMP_FORMAT_VERSION << "\n";
  os << "kind=state\n";
  os << "dim=" << g.dim << "\n";
  os << "n=" << g.n[0] << "," << g.n[1] << "," << g.n[2] << "\n";
  os << "len=" << detail::fmt_g17(g.len[0]) << "," << detail::fmt_g17(g.len[1]) << ","
     << detail::fmt_g17(g.len[2]) << "\n";
  os << "degree=" << s.twist.d[0] << "," << s.twist.d[1] << "," << s.twist.d[2] << "\n";
  os << "epsilon=" << detail::fmt_g17(eps) << "\n";
  os << "end-header\n";
  for (int64_t i = 0; i < g.nsites; ++i) {
    detail::write_f64le(os, s.u[i].real());
    detail::write_f64le(os, s.u[i].imag());
  }
  for (int j = 0; j < g.dim; ++j)
    for (int64_t i = 0; i < g.nsites; ++i) detail::write_f64le(os, s.a_at(j, i));
  if (!os) throw std::runtime_error("dump: write failed for " + path);
}

struct LoadedState {
  FieldState state;
  double eps = 0;
};

inline LoadedState load_state(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("dump: cannot open " + path);
  detail::DumpHeader h = detail::read_header(is, "state");
  int dim = int(h.get_long("dim"));
  auto n = h.template get_triple<int>("n", [](const std::string& v) { return std::stoi(v); });
  auto len =
      h.template get_triple<double>("len", [](const std::string& v) { return std::stod(v); });
  auto deg =
      h.template get_triple<int>("degree", [](const std::string& v) { return std::stoi(v); });

  Grid g = Grid::make(dim, n, len);
  BundleTwist tw = BundleTwist::make(dim, deg);
  LoadedState out{build_state(g, tw, InitSpec::constant(cplx(0, 0))), h.get_double("epsilon")};
  FieldState& s = out.state;
  for (int64_t i = 0; i < g.nsites; ++i) {
    double re = detail::read_f64le(is);
    double im = detail::read_f64le(is);
    s.u[i] = cplx(re, im);
  }
  for (int j = 0; j < g.dim; ++j)
    for (int64_t i = 0; i < g.nsites; ++i) s.a[size_t(j) * g.nsites + i] = detail::read_f64le(is);
  detail::check_payload_end(is, path);
  return out;
}

inline void save_scalar(const std::string& path, const Grid& g, const std::string& field,
                        const std::vector<double>& values) {
  if (int64_t(values.size()) != g.nsites)
    throw std::invalid_argument("dump: scalar size does not match grid");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("dump: cannot open " + path + " for writing");
  os << "ymh-dump\n";
  os << "format_version=" << DUMP_FORMAT_VERSION << "\n";
  os << "kind=scalar\n";
  os << "field=" << field << "\n";
  os << "dim=" << g.dim << "\n";
  os << "n=" << g.n[0] << "," << g.n[1] << "," << g.n[2] << "\n";
  os << "len=" << detail::fmt_g17(g.len[0]) << "," << detail::fmt_g17(g.len[1]) << ","
     << detail::fmt_g17(g.len[2]) << "\n";
  os << "end-header\n";
  for (double v : values) detail::write_f64le(os, v);
  if (!os) throw std::runtime_error("dump: write failed for " + path);
}

struct LoadedScalar {
  Grid grid;
  std::string field;
  std::vector<double> values;
};

inline LoadedScalar load_scalar(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("dump: cannot open " + path);
  detail::DumpHeader h = detail::read_header(is, "scalar");
  int dim = int(h.get_long("dim"));
  auto n = h.template get_triple<int>("n", [](const std::string& v) { return std::stoi(v); });
  auto len =
      h.template get_triple<double>("len", [](const std::string& v) { return std::stod(v); });
  LoadedScalar out{Grid::make(dim, n, len), h.need("field"), {}};
  out.values.resize(size_t(out.grid.nsites));
  for (double& v : out.values) v = detail::read_f64le(is);
  detail::check_payload_end(is, path);
  return out;
}

}  // namespace ymh
