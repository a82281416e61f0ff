#pragma once
// Geometric diagnostics over converged (or arbitrary) states:
//
//  * extract_vortices   - gauge-invariant integer plaquette winding; dim-3
//                         charges are strung into closed polylines.
//  * monotonicity_profile - almost-monotone density e^{C r} r^{2-n} E(B_r)/w,
//                         partial boundary cells subsampled.
//  * decay_fit          - log-linear fit of shell-averaged energy density vs
//                         distance from the core region {|u|^2 <= 1 - beta}.
//  * concentration_fraction - energy fraction within K*eps of the vortex set.
//  * slice_quantization - per-slice cutoff energy integrals vs multiples of
//                         2 pi (dim 3).

#include <algorithm>
#include <limits>
#include <map>
#include <queue>

#include "energy.hpp"

namespace ymh {

// --------------------------------------------------------------------------
// Vortex extraction.

struct VortexSet {
  struct Charged {
    int plane;
    int64_t site;  // plaquette base corner
    int charge;
    std::array<double, 3> center;
  };
  struct Line {
    std::vector<std::array<double, 3>> vertices;  // face centers, closed loop
    int charge = 1;
  };
  std::vector<Charged> plaquettes;
  std::array<long, 3> plane_total{0, 0, 0};  // sum of charges, per plane
  std::vector<Line> lines;                   // dim 3 only
  bool tangled = false;  // some cube had more than one strand pairing choice
};

namespace detail {
// Principal transported phase step along a link. Exact zeros of u (possible
// in hand-built seeds) are replaced by 1 at the site level, so both
// plaquettes sharing a link see the same value and the loop sums still
// telescope exactly.
inline double arg_transported(const FieldState& s, int axis, int64_t i) {
  cplx ui = s.u[i];
  cplx un = s.u[s.rule->next(axis, i)];
  if (ui == cplx(0, 0)) ui = 1.0;
  if (un == cplx(0, 0)) un = 1.0;
  return std::arg(s.transport(axis, i) * un * std::conj(ui));
}
}  // namespace detail

// Plaquette winding: q = (loop sum of principal transported phase steps
// + F*h_j*h_k) / 2pi. Integer by construction (the loop sum equals -F*h*h
// modulo 2 pi); gauge invariant because each factor is.
inline int plaquette_winding(const FieldState& s, int plane, int64_t i) {
  const Grid& g = s.grid;
  const TwistRule& R = *s.rule;
  auto [j, k] = plane_axes(plane);
  int64_t ij = R.next(j, i), ik = R.next(k, i);
  double loop = detail::arg_transported(s, j, i) + detail::arg_transported(s, k, ij) -
                detail::arg_transported(s, j, ik) - detail::arg_transported(s, k, i);
  double q = (loop + s.plaquette_curvature(plane, i) * g.h[j] * g.h[k]) / TWO_PI;
  long qi = std::lround(q);
  if (std::fabs(q - double(qi)) > 1e-6)
    throw std::runtime_error("plaquette_winding: non-integer winding (corrupt state?)");
  return int(qi);
}

inline VortexSet extract_vortices(const FieldState& s) {
  const Grid& g = s.grid;
  VortexSet vs;
  for (int p = 0; p < plane_count(g.dim); ++p) {
    auto [j, k] = plane_axes(p);
    for (int64_t i = 0; i < g.nsites; ++i) {
      int q = plaquette_winding(s, p, i);
      if (q == 0) continue;
      auto pos = g.position(i);
      pos[j] += 0.5 * g.h[j];
      pos[k] += 0.5 * g.h[k];
      vs.plaquettes.push_back({p, i, q, pos});
      vs.plane_total[p] += q;
    }
  }
  if (g.dim == 3 && !vs.plaquettes.empty()) {
    // String charged faces into closed lines. Model: cubes are vertices,
    // each charged face contributes |q| directed edges between the two cubes
    // it separates. A (j,k)-face at base x is the m-low face of cube x and
    // the m-high face of cube x - e_m; the strand runs in +m when
    // sgn(q) * sgn(j,k,m) > 0 (plane (0,2) is the odd permutation). Flux
    // conservation over each closed cube surface makes in-degree equal
    // out-degree everywhere, so greedy edge peeling yields closed circuits.
    auto into_cube = [&](const VortexSet::Charged& c) -> int64_t {
      auto [j, k] = plane_axes(c.plane);
      int m = 3 - j - k;
      int sigma = (c.plane == 1) ? -1 : 1;  // parity of (j,k,m)
      bool forward = sigma * c.charge > 0;  // strand along +m: enters cube x
      return forward ? c.site : s.rule->prev(m, c.site);
    };
    auto from_cube = [&](const VortexSet::Charged& c) -> int64_t {
      auto [j, k] = plane_axes(c.plane);
      int m = 3 - j - k;
      int sigma = (c.plane == 1) ? -1 : 1;
      bool forward = sigma * c.charge > 0;
      return forward ? s.rule->prev(m, c.site) : c.site;
    };
    std::map<int64_t, std::vector<int>> by_cube_out;  // cube -> faces leaving it
    std::vector<int> remaining(vs.plaquettes.size());
    for (size_t f = 0; f < vs.plaquettes.size(); ++f) {
      remaining[f] = std::abs(vs.plaquettes[f].charge);
      by_cube_out[from_cube(vs.plaquettes[f])].push_back(int(f));
    }
    for (auto& [cube, outs] : by_cube_out) {
      int units = 0;
      for (int f : outs) units += remaining[f];
      if (units > 1) vs.tangled = true;
    }
    for (size_t f0 = 0; f0 < vs.plaquettes.size(); ++f0) {
      while (remaining[f0] > 0) {
        VortexSet::Line line;
        line.charge = vs.plaquettes[f0].charge > 0 ? 1 : -1;
        int f = int(f0);
        for (;;) {
          remaining[f]--;
          line.vertices.push_back(vs.plaquettes[f].center);
          int64_t cube = into_cube(vs.plaquettes[f]);
          int nf = -1;
          auto it = by_cube_out.find(cube);
          if (it != by_cube_out.end())
            for (int cand : it->second)
              if (remaining[cand] > 0) {
                nf = cand;
                break;
              }
          if (nf < 0) break;  // stuck: only possible back at the start cube
          f = nf;
        }
        vs.lines.push_back(std::move(line));
      }
    }
  }
  return vs;
}

// --------------------------------------------------------------------------
// Shared geometry helpers.

inline double periodic_dist2(const Grid& g, const std::array<double, 3>& a,
                             const std::array<double, 3>& b) {
  double s = 0;
  for (int j = 0; j < g.dim; ++j) {
    double d = std::remainder(a[j] - b[j], g.len[j]);
    s += d * d;
  }
  return s;
}

// --------------------------------------------------------------------------
// Monotonicity of the scaled energy density.

struct MonotonicityProfile {
  std::vector<double> radii;
  std::vector<double> density;  // e^{cm r} r^{2-n} E(B_r) / w_{n-2}, w_0=1, w_1=2
  double cm = 0;
  double tol = 0;                                // additive slack used
  std::vector<std::pair<int, int>> violations;   // adjacent radius index pairs
};

inline MonotonicityProfile monotonicity_profile(const FieldState& s, double eps,
                                                const std::array<double, 3>& center,
                                                const std::vector<double>& radii, double cm = 0,
                                                double tol_frac = 0.05) {
  const Grid& g = s.grid;
  if (radii.size() < 2) throw std::invalid_argument("monotonicity_profile: need >= 2 radii");
  for (size_t i = 0; i + 1 < radii.size(); ++i)
    if (!(radii[i] < radii[i + 1]))
      throw std::invalid_argument("monotonicity_profile: radii must increase");
  std::vector<double> e = energy_density(s, eps);
  std::vector<double> dist(g.nsites);
  parallel_for(g.nsites, [&](int64_t i) {
    dist[i] = std::sqrt(periodic_dist2(g, g.position(i), center));
  });
  double half_diag = 0;
  for (int j = 0; j < g.dim; ++j) half_diag += 0.25 * g.h[j] * g.h[j];
  half_diag = std::sqrt(half_diag);
  const int sub = (g.dim == 2) ? 3 : 2;  // 9 / 8 subsamples per boundary cell

  MonotonicityProfile out;
  out.cm = cm;
  out.radii = radii;
  const double omega = (g.dim == 3) ? 2.0 : 1.0;
  for (double r : radii) {
    KahanSum acc;
    for (int64_t i = 0; i < g.nsites; ++i) {
      double d = dist[i];
      if (d <= r - half_diag) {
        acc.add(e[i]);
      } else if (d < r + half_diag) {
        auto pos = g.position(i);
        int inside = 0, total = 0;
        std::array<double, 3> q = pos;
        for (int a0 = 0; a0 < sub; ++a0)
          for (int a1 = 0; a1 < sub; ++a1)
            for (int a2 = 0; a2 < (g.dim == 3 ? sub : 1); ++a2) {
              q[0] = pos[0] + ((a0 + 0.5) / sub - 0.5) * g.h[0];
              q[1] = pos[1] + ((a1 + 0.5) / sub - 0.5) * g.h[1];
              if (g.dim == 3) q[2] = pos[2] + ((a2 + 0.5) / sub - 0.5) * g.h[2];
              ++total;
              if (periodic_dist2(g, q, center) <= r * r) ++inside;
            }
        if (inside) acc.add(e[i] * double(inside) / double(total));
      }
    }
    double scale = std::exp(cm * r) * std::pow(r, 2 - g.dim) / omega;
    out.density.push_back(scale * acc.value() * g.cell_vol);
  }
  double dmax = *std::max_element(out.density.begin(), out.density.end());
  out.tol = tol_frac * dmax;
  for (size_t i = 0; i + 1 < out.radii.size(); ++i) {
    double lhs = out.density[i + 1] + cm * out.radii[i + 1];
    double rhs = out.density[i] + cm * out.radii[i] - out.tol;
    if (lhs < rhs) out.violations.emplace_back(int(i), int(i + 1));
  }
  return out;
}

// --------------------------------------------------------------------------
// Distance from the core region and exponential-decay fit.

// Multi-source shortest path with the 8/26-neighbor stencil, edge weights =
// Euclidean step length (periodic). Overestimates true distance by <= 8%.
inline std::vector<double> distance_to_set(const Grid& g, const TwistRule& R,
                                           const std::vector<char>& in_set) {
  std::vector<double> dist(g.nsites, std::numeric_limits<double>::infinity());
  using QE = std::pair<double, int64_t>;
  std::priority_queue<QE, std::vector<QE>, std::greater<QE>> pq;
  for (int64_t i = 0; i < g.nsites; ++i)
    if (in_set[i]) {
      dist[i] = 0;
      pq.push({0.0, i});
    }
  if (pq.empty()) throw std::runtime_error("distance_to_set: empty source set");

  // Neighbor offsets in {-1,0,1}^dim minus the origin.
  struct Hop {
    std::array<int, 3> o;
    double w;
  };
  std::vector<Hop> hops;
  for (int o0 = -1; o0 <= 1; ++o0)
    for (int o1 = -1; o1 <= 1; ++o1)
      for (int o2 = (g.dim == 3 ? -1 : 0); o2 <= (g.dim == 3 ? 1 : 0); ++o2) {
        if (!o0 && !o1 && !o2) continue;
        double w = std::sqrt(o0 * o0 * g.h[0] * g.h[0] + o1 * o1 * g.h[1] * g.h[1] +
                             o2 * o2 * g.h[2] * g.h[2]);
        hops.push_back({{o0, o1, o2}, w});
      }
  auto hop_index = [&](int64_t i, const std::array<int, 3>& o) {
    int64_t r = i;
    for (int j = 0; j < g.dim; ++j) {
      if (o[j] == 1) r = R.next(j, r);
      else if (o[j] == -1) r = R.prev(j, r);
    }
    return r;
  };
  while (!pq.empty()) {
    auto [d, i] = pq.top();
    pq.pop();
    if (d > dist[i]) continue;
    for (const Hop& hp : hops) {
      int64_t t = hop_index(i, hp.o);
      double nd = d + hp.w;
      if (nd < dist[t]) {
        dist[t] = nd;
        pq.push({nd, t});
      }
    }
  }
  return dist;
}

struct DecayFit {
  double rate = 0;     // density ~ exp(-rate * r / eps)
  double log_rms = 0;  // RMS residual of the fit, log units
  double r_lo = 0, r_hi = 0;
  double beta = 0.5;
  std::vector<double> shell_r;     // shell midpoints (physical)
  std::vector<double> shell_mean;  // mean energy density per shell
  std::vector<int64_t> shell_count;
};

inline DecayFit decay_fit(const FieldState& s, double eps, double beta = 0.5, double r_lo = -1,
                          double r_hi = -1) {
  const Grid& g = s.grid;
  std::vector<double> e = energy_density(s, eps);
  std::vector<char> core(g.nsites, 0);
  int64_t ncore = 0;
  for (int64_t i = 0; i < g.nsites; ++i)
    if (std::norm(s.u[i]) <= 1.0 - beta) {
      core[i] = 1;
      ++ncore;
    }
  if (!ncore) throw std::runtime_error("decay_fit: no sites with |u|^2 <= 1 - beta");
  std::vector<double> dist = distance_to_set(g, *s.rule, core);
  double dmax = 0;
  for (double d : dist) dmax = std::max(dmax, d);

  DecayFit fit;
  fit.beta = beta;
  fit.r_lo = (r_lo > 0) ? r_lo : 3.0 * eps;
  fit.r_hi = (r_hi > 0) ? r_hi : std::min(10.0 * eps, 0.9 * dmax);
  if (!(fit.r_hi > fit.r_lo)) throw std::runtime_error("decay_fit: empty window");

  const double w = 0.5 * eps;  // shell width
  int nsh = int(std::floor((fit.r_hi - fit.r_lo) / w));
  if (nsh < 10)
    throw std::runtime_error(
        "decay_fit: fewer than 10 shells in window [" + std::to_string(fit.r_lo) + ", " +
        std::to_string(fit.r_hi) + "] at shell width eps/2 = " + std::to_string(w) +
        " (farthest site is " + std::to_string(dmax) +
        " from the core; shrink epsilon or enlarge the torus to clear more tail)");
  std::vector<KahanSum> acc(nsh);
  std::vector<int64_t> cnt(nsh, 0);
  for (int64_t i = 0; i < g.nsites; ++i) {
    double d = dist[i];
    if (d < fit.r_lo || d >= fit.r_lo + nsh * w) continue;
    int b = int((d - fit.r_lo) / w);
    acc[b].add(e[i]);
    cnt[b]++;
  }
  for (int b = 0; b < nsh; ++b) {
    if (!cnt[b]) continue;
    double mean = acc[b].value() / double(cnt[b]);
    if (mean <= 0) continue;
    fit.shell_r.push_back(fit.r_lo + (b + 0.5) * w);
    fit.shell_mean.push_back(mean);
    fit.shell_count.push_back(cnt[b]);
  }
  if (fit.shell_r.size() < 10)
    throw std::runtime_error("decay_fit: fewer than 10 populated shells (" +
                             std::to_string(fit.shell_r.size()) + " of " + std::to_string(nsh) +
                             " in window [" + std::to_string(fit.r_lo) + ", " +
                             std::to_string(fit.r_hi) + "] carry positive tail energy)");

  double xs = 0, ys = 0, xx = 0, xy = 0;
  int n = int(fit.shell_r.size());
  for (int b = 0; b < n; ++b) {
    double x = fit.shell_r[b] / eps, y = std::log(fit.shell_mean[b]);
    xs += x; ys += y; xx += x * x; xy += x * y;
  }
  double slope = (n * xy - xs * ys) / (n * xx - xs * xs);
  double icept = (ys - slope * xs) / n;
  fit.rate = -slope;
  double r2 = 0;
  for (int b = 0; b < n; ++b) {
    double x = fit.shell_r[b] / eps, y = std::log(fit.shell_mean[b]);
    double res = y - (icept + slope * x);
    r2 += res * res;
  }
  fit.log_rms = std::sqrt(r2 / n);
  return fit;
}

// --------------------------------------------------------------------------
// Energy concentration near the vortex set.

inline double concentration_fraction(const FieldState& s, double eps, const VortexSet& vs,
                                     double K) {
  const Grid& g = s.grid;
  if (vs.plaquettes.empty()) throw std::invalid_argument("concentration_fraction: empty vortex set");
  std::vector<double> e = energy_density(s, eps);
  const double r2max = K * eps * K * eps;
  KahanSum inside, total;
  for (int64_t i = 0; i < g.nsites; ++i) {
    total.add(e[i]);
    auto pos = g.position(i);
    for (const auto& c : vs.plaquettes) {
      if (periodic_dist2(g, pos, c.center) <= r2max) {
        inside.add(e[i]);
        break;
      }
    }
  }
  return inside.value() / total.value();
}

// --------------------------------------------------------------------------
// Per-slice quantization (dim 3).

struct SliceQuantization {
  int axis = 2;
  double chi_radius = 0;
  std::vector<double> value;     // cutoff energy integral per slice
  std::vector<double> distance;  // distance to nearest 2*pi*m, m >= 0
  double median = 0, worst = 0;
};

inline SliceQuantization slice_quantization(const FieldState& s, double eps, int axis,
                                            double chi_radius = -1,
                                            const VortexSet* vset = nullptr) {
  const Grid& g = s.grid;
  if (g.dim != 3) throw std::invalid_argument("slice_quantization: dim 3 only");
  if (axis < 0 || axis > 2) throw std::invalid_argument("slice_quantization: bad axis");
  int j = (axis == 0) ? 1 : 0;
  int k = (axis == 2) ? 1 : 2;
  const int plane = plane_of(j, k);

  VortexSet local;
  if (!vset) {
    local = extract_vortices(s);
    vset = &local;
  }
  std::vector<double> e = energy_density(s, eps);
  SliceQuantization out;
  out.axis = axis;
  out.chi_radius = (chi_radius > 0) ? chi_radius
                                    : std::min(5.0 * eps, 0.3 * std::min(g.len[j], g.len[k]));
  const double R = out.chi_radius, Rout = 4.0 * R / 3.0;

  for (int t = 0; t < g.n[axis]; ++t) {
    // Slice center: vortex intersections if present, else energy barycenter.
    // Torus mean: average wrapped displacements from a reference point.
    double cj = 0, ck = 0;
    {
      double ref_j = 0, ref_k = 0, wsum = 0, accj = 0, acck = 0;
      bool have_ref = false;
      for (const auto& c : vset->plaquettes) {
        if (c.plane != plane) continue;
        auto xc = g.coords(c.site);
        if (xc[axis] != t) continue;
        if (!have_ref) {
          ref_j = c.center[j];
          ref_k = c.center[k];
          have_ref = true;
        }
        double wq = std::abs(c.charge);
        accj += wq * wrap_delta(c.center[j] - ref_j, g.len[j]);
        acck += wq * wrap_delta(c.center[k] - ref_k, g.len[k]);
        wsum += wq;
      }
      if (!have_ref) {
        // energy barycenter of the slice, reference = densest site
        std::array<int, 3> x{0, 0, 0};
        x[axis] = t;
        double best = -1;
        for (int xj = 0; xj < g.n[j]; ++xj)
          for (int xk = 0; xk < g.n[k]; ++xk) {
            x[j] = xj;
            x[k] = xk;
            double v = e[g.index(x[0], x[1], x[2])];
            if (v > best) {
              best = v;
              ref_j = xj * g.h[j];
              ref_k = xk * g.h[k];
            }
          }
        for (int xj = 0; xj < g.n[j]; ++xj)
          for (int xk = 0; xk < g.n[k]; ++xk) {
            x[j] = xj;
            x[k] = xk;
            double v = e[g.index(x[0], x[1], x[2])];
            accj += v * wrap_delta(xj * g.h[j] - ref_j, g.len[j]);
            acck += v * wrap_delta(xk * g.h[k] - ref_k, g.len[k]);
            wsum += v;
          }
      }
      cj = ref_j + (wsum > 0 ? accj / wsum : 0);
      ck = ref_k + (wsum > 0 ? acck / wsum : 0);
    }

    KahanSum acc;
    std::array<int, 3> x{0, 0, 0};
    x[axis] = t;
    for (int xj = 0; xj < g.n[j]; ++xj)
      for (int xk = 0; xk < g.n[k]; ++xk) {
        x[j] = xj;
        x[k] = xk;
        double dj = wrap_delta(xj * g.h[j] - cj, g.len[j]);
        double dk = wrap_delta(xk * g.h[k] - ck, g.len[k]);
        double rho = std::hypot(dj, dk);
        double chi;
        if (rho <= R) chi = 1.0;
        else if (rho >= Rout) chi = 0.0;
        else chi = 0.5 * (1.0 + std::cos(PI * (rho - R) / (Rout - R)));
        if (chi > 0) acc.add(chi * e[g.index(x[0], x[1], x[2])]);
      }
    double v = acc.value() * g.h[j] * g.h[k];
    out.value.push_back(v);
    long m = std::max(0L, std::lround(v / TWO_PI));
    out.distance.push_back(std::fabs(v - TWO_PI * double(m)));
  }
  std::vector<double> d = out.distance;
  std::sort(d.begin(), d.end());
  out.median = d.empty() ? 0 : (d.size() % 2 ? d[d.size() / 2]
                                             : 0.5 * (d[d.size() / 2 - 1] + d[d.size() / 2]));
  out.worst = d.empty() ? 0 : d.back();
  return out;
}

}  // namespace ymh
