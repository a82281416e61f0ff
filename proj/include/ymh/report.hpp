#pragma once
// Machine-readable run artifacts: a versioned JSON summary plus flat CSV
// tables. All floating-point values are printed with 17 significant digits
// so re-parsing reproduces them exactly.

#include <fstream>

#include <json.hpp>

#include "diagnostics.hpp"
#include "solve.hpp"

namespace ymh {

inline constexpr int REPORT_SCHEMA_VERSION = 1;

using json = nlohmann::json;

namespace detail {
inline std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("report: cannot open " + path + " for writing");
  os.precision(17);
  return os;
}
}  // namespace detail

inline json energy_json(const EnergyBreakdown& e) {
  return json{{"dirichlet", e.dirichlet},
              {"maxwell", e.maxwell},
              {"potential", e.potential},
              {"total", e.total}};
}

inline json state_json(const FieldState& s, double eps) {
  const Grid& g = s.grid;
  json j;
  j["schema_version"] = REPORT_SCHEMA_VERSION;
  j["grid"] = {{"dim", g.dim},
               {"n", {g.n[0], g.n[1], g.n[2]}},
               {"len", {g.len[0], g.len[1], g.len[2]}}};
  j["bundle"] = {{"degree", {s.twist.d[0], s.twist.d[1], s.twist.d[2]}}};
  j["epsilon"] = eps;
  j["energy"] = energy_json(energy(s, eps));
  j["max_abs_u"] = max_abs_u(s);
  json flux = json::array();
  for (int p = 0; p < plane_count(g.dim); ++p) flux.push_back(total_flux(s, p) / TWO_PI);
  j["flux_over_2pi"] = flux;
  return j;
}

inline json solve_json(const SolveResult& r, double eps) {
  json j = state_json(r.state, eps);
  j["solver"] = {{"converged", r.converged},
                 {"iters", r.iters},
                 {"grad_sup", r.grad_sup},
                 {"stop_reason", r.stop_reason}};
  return j;
}

inline json vortices_json(const VortexSet& vs) {
  json j;
  j["count"] = vs.plaquettes.size();
  j["plane_total"] = {vs.plane_total[0], vs.plane_total[1], vs.plane_total[2]};
  j["lines"] = vs.lines.size();
  j["tangled"] = vs.tangled;
  return j;
}

inline void write_json(const std::string& path, const json& j) {
  auto os = detail::open_out(path);
  os << j.dump(2) << "\n";
}

// CSV ------------------------------------------------------------------

inline void write_energy_csv(const std::string& path,
                             const std::vector<std::pair<double, EnergyBreakdown>>& rows) {
  auto os = detail::open_out(path);
  os << "epsilon,dirichlet,maxwell,potential,total\n";
  for (const auto& [eps, e] : rows)
    os << eps << "," << e.dirichlet << "," << e.maxwell << "," << e.potential << "," << e.total
       << "\n";
}

inline void write_sweep_csv(const std::string& path, const SweepResult& sw) {
  auto os = detail::open_out(path);
  os << "epsilon,dirichlet,maxwell,potential,total,grad_sup,iters,converged,max_u,max_xi\n";
  for (const auto& r : sw.rows)
    os << r.eps << "," << r.energy.dirichlet << "," << r.energy.maxwell << ","
       << r.energy.potential << "," << r.energy.total << "," << r.grad_sup << "," << r.iters << ","
       << (r.converged ? 1 : 0) << "," << r.max_u << "," << r.max_xi << "\n";
}

inline void write_vortices_csv(const std::string& path, const VortexSet& vs) {
  auto os = detail::open_out(path);
  os << "plane,site,charge,x,y,z\n";
  for (const auto& c : vs.plaquettes)
    os << c.plane << "," << c.site << "," << c.charge << "," << c.center[0] << "," << c.center[1]
       << "," << c.center[2] << "\n";
}

inline void write_lines_csv(const std::string& path, const VortexSet& vs) {
  auto os = detail::open_out(path);
  os << "line,vertex,charge,x,y,z\n";
  for (size_t l = 0; l < vs.lines.size(); ++l)
    for (size_t v = 0; v < vs.lines[l].vertices.size(); ++v) {
      const auto& p = vs.lines[l].vertices[v];
      os << l << "," << v << "," << vs.lines[l].charge << "," << p[0] << "," << p[1] << "," << p[2]
         << "\n";
    }
}

inline void write_decay_csv(const std::string& path, const DecayFit& f) {
  auto os = detail::open_out(path);
  os << "r,mean_density,count\n";
  for (size_t i = 0; i < f.shell_r.size(); ++i)
    os << f.shell_r[i] << "," << f.shell_mean[i] << "," << f.shell_count[i] << "\n";
}

inline void write_monotonicity_csv(const std::string& path, const MonotonicityProfile& m) {
  auto os = detail::open_out(path);
  os << "r,density\n";
  for (size_t i = 0; i < m.radii.size(); ++i) os << m.radii[i] << "," << m.density[i] << "\n";
}

inline void write_slices_csv(const std::string& path, const SliceQuantization& sq) {
  auto os = detail::open_out(path);
  os << "slice,value,distance\n";
  for (size_t t = 0; t < sq.value.size(); ++t)
    os << t << "," << sq.value[t] << "," << sq.distance[t] << "\n";
}

inline void write_trace_csv(const std::string& path, const std::vector<TraceRow>& rows) {
  auto os = detail::open_out(path);
  os << "iter,energy,grad_sup,step\n";
  for (const auto& r : rows)
    os << r.iter << "," << r.energy << "," << r.grad_sup << "," << r.step << "\n";
}

}  // namespace ymh
