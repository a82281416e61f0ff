#pragma once
// Energy descent and constrained critical-point search.
//
//  * minimize       - L-BFGS with Armijo backtracking on the full energy.
//                     The returned state is gauge-normalized (harmonic_reduce +
//                     coulomb_project); both are exact symmetries, so they
//                     change neither the energy nor sup|grad|. Renormalizing
//                     *during* the run is possible (gauge_cadence > 0) but it
//                     invalidates the curvature history and slows convergence
//                     badly, so it is off by default; the gradient is exactly
//                     orthogonal to gauge orbits, so iterates do not drift.
//  * epsilon_sweep  - warm-started continuation down a strictly decreasing
//                     list of coupling values.
//  * find_critical  - two-phase search for critical points inside the fixed
//                     subspace of a finite symmetry group: descent on the
//                     energy first, then descent on Phi = |grad E|^2 / 2 to
//                     kill any residual gradient (saddles included).
//
// Conventions: gradients carry no cell-volume factor; the inner product
// tangent_dot supplies it, so dE along v equals tangent_dot(grad, v).

#include <algorithm>
#include <deque>
#include <functional>
#include <string>

#include "gauge_fix.hpp"

namespace ymh {

struct SolverOptions {
  double tol = 1e-6;       // stop when sup|grad| <= tol
  int max_iters = 20000;
  int memory = 10;         // L-BFGS history length
  int gauge_cadence = 0;  // iterations between in-run gauge renormalizations; 0 = only at the end
  double c1 = 1e-4;        // Armijo fraction
  double shrink = 0.5;     // backtracking factor
  int max_backtracks = 60;
  bool trace = false;
};

struct TraceRow {
  int iter;
  double energy;
  double grad_sup;
  double step;
};

struct SolveResult {
  FieldState state;
  bool converged = false;
  int iters = 0;
  double grad_sup = 0;
  EnergyBreakdown energy;
  std::string stop_reason;
  std::vector<TraceRow> trace;
};

// --------------------------------------------------------------------------
// Finite symmetry groups acting on states: lattice translations composed
// with (optional) conjugation u -> conj(u), a -> -a, and (optional) global
// sign flip u -> -u. These are exact energy symmetries on trivial bundles;
// with nonzero degrees the stored transition phases are position-dependent,
// so every use is gated by an explicit invariance check on the starting
// state. The sign flag matters when a configuration is invariant only up to
// a constant -1 (e.g. a balanced defect checkerboard, where translating by
// half a period winds the phase by pi): because -1 is real, adding it keeps
// the group closed where a general phase would only close projectively.

struct SymmetryElement {
  std::array<int, 3> shift{0, 0, 0};  // lattice translation, in sites
  bool conjugate = false;
  bool negate = false;  // compose with u -> -u
};

struct SymmetrySpec {
  std::vector<SymmetryElement> elements;  // must form a group incl. identity
  bool trivial() const { return elements.size() <= 1; }
};

namespace detail {
// Index of x - t on the periodic lattice.
inline int64_t shifted_index(const Grid& g, int64_t i, const std::array<int, 3>& t) {
  auto x = g.coords(i);
  for (int j = 0; j < g.dim; ++j) {
    int v = (x[j] - t[j]) % g.n[j];
    if (v < 0) v += g.n[j];
    x[j] = v;
  }
  return g.index(x[0], x[1], x[2]);
}
}  // namespace detail

inline FieldState apply_symmetry(const FieldState& s, const SymmetryElement& el) {
  const Grid& g = s.grid;
  FieldState out = s;
  const double sa = el.conjugate ? -1.0 : 1.0;
  const double su = el.negate ? -1.0 : 1.0;
  parallel_for(g.nsites, [&](int64_t i) {
    int64_t src = detail::shifted_index(g, i, el.shift);
    out.u[i] = su * (el.conjugate ? std::conj(s.u[src]) : s.u[src]);
    for (int j = 0; j < g.dim; ++j) out.a[j * g.nsites + i] = sa * s.a_at(j, src);
  });
  return out;
}

// Group average of the fields (linear projection onto the fixed subspace).
inline void symmetrize_state(FieldState& s, const SymmetrySpec& sym) {
  if (sym.trivial()) return;
  const Grid& g = s.grid;
  std::vector<cplx> u(g.nsites, cplx(0, 0));
  std::vector<double> a(size_t(g.dim) * g.nsites, 0.0);
  const double w = 1.0 / double(sym.elements.size());
  for (const auto& el : sym.elements) {
    FieldState t = apply_symmetry(s, el);
    for (int64_t i = 0; i < g.nsites; ++i) u[i] += w * t.u[i];
    for (size_t i = 0; i < a.size(); ++i) a[i] += w * t.a[i];
  }
  s.u = std::move(u);
  s.a = std::move(a);
}

// Rotate u by one global phase so a configuration that is invariant up to a
// constant phase under a conjugating element becomes exactly invariant (a
// global rotation is itself an exact symmetry, so this costs nothing). Seeds
// built from profiles are symmetric only up to such a constant; without the
// alignment the group average would wash out their winding structure.
inline void align_global_phase(FieldState& s, const SymmetrySpec& sym) {
  for (const auto& el : sym.elements) {
    if (!el.conjugate) continue;
    FieldState t = apply_symmetry(s, el);
    cplx acc(0, 0);
    for (int64_t i = 0; i < s.grid.nsites; ++i) acc += t.u[i] * std::conj(s.u[i]);
    if (!(std::abs(acc) > 0)) return;
    double half = 0.5 * std::arg(acc);
    cplx rot(std::cos(half), std::sin(half));
    for (auto& z : s.u) z *= rot;
    return;  // one conjugating element pins the global phase; the rest follow by closure
  }
}

inline void project_tangent(const Grid& g, TangentState& v, const SymmetrySpec& sym) {
  if (sym.trivial()) return;
  TangentState acc = TangentState::zeros(g);
  const double w = 1.0 / double(sym.elements.size());
  for (const auto& el : sym.elements) {
    const double sa = el.conjugate ? -1.0 : 1.0;
    const double su = el.negate ? -1.0 : 1.0;
    for (int64_t i = 0; i < g.nsites; ++i) {
      int64_t src = detail::shifted_index(g, i, el.shift);
      acc.du[i] += w * su * (el.conjugate ? std::conj(v.du[src]) : v.du[src]);
      for (int j = 0; j < g.dim; ++j)
        acc.da[j * g.nsites + i] += w * sa * v.da[j * g.nsites + src];
    }
  }
  v = std::move(acc);
}

// Throws unless every group element preserves the energy of `s` to near
// machine precision (relative 1e-8). Catches, in particular, attempted use
// of translations or conjugation on bundles whose transition phases they
// do not commute with.
inline void check_symmetry_invariance(const FieldState& s, double eps, const SymmetrySpec& sym) {
  double e0 = energy(s, eps).total;
  double scale = std::max(1.0, std::fabs(e0));
  for (const auto& el : sym.elements) {
    double e1 = energy(apply_symmetry(s, el), eps).total;
    if (std::fabs(e1 - e0) > 1e-8 * scale)
      throw std::invalid_argument(
          "symmetry check: group element changes the energy (not a symmetry of this bundle)");
  }
}

// --------------------------------------------------------------------------
// L-BFGS on a generic objective over tangent directions. The objective is
// supplied as two callbacks so the same loop serves both the energy and the
// squared-gradient functional.

namespace detail {

struct LbfgsMemory {
  std::deque<TangentState> svec, yvec;
  std::deque<double> rho;
  void clear() {
    svec.clear();
    yvec.clear();
    rho.clear();
  }
};

// Two-loop recursion; returns the (descent) direction -H*g.
inline TangentState lbfgs_direction(const Grid& g, const TangentState& grad, LbfgsMemory& mem) {
  TangentState q = grad;
  const int m = int(mem.svec.size());
  std::vector<double> alpha(m, 0.0);
  for (int i = m - 1; i >= 0; --i) {
    alpha[i] = mem.rho[i] * tangent_dot(g, mem.svec[i], q);
    tangent_axpy(q, -alpha[i], mem.yvec[i]);
  }
  if (m > 0) {
    double yy = tangent_dot(g, mem.yvec[m - 1], mem.yvec[m - 1]);
    double sy = 1.0 / mem.rho[m - 1];
    if (yy > 0 && sy > 0) tangent_scale(q, sy / yy);
  }
  for (int i = 0; i < m; ++i) {
    double beta = mem.rho[i] * tangent_dot(g, mem.yvec[i], q);
    tangent_axpy(q, alpha[i] - beta, mem.svec[i]);
  }
  tangent_scale(q, -1.0);
  return q;
}

}  // namespace detail

// Minimizes the energy (or stays inside the symmetric subspace if `sym` is
// nontrivial; pass {} for unconstrained descent).
inline SolveResult minimize(const FieldState& start, double eps, const SolverOptions& opt = {},
                            const SymmetrySpec& sym = {}) {
  if (!(eps > 0)) throw std::invalid_argument("minimize: eps must be positive");
  SolveResult res;
  res.state = start;
  FieldState& x = res.state;
  const Grid& g = x.grid;
  Spectral spectral(g);
  if (!sym.trivial()) {
    check_symmetry_invariance(x, eps, sym);
    align_global_phase(x, sym);
    symmetrize_state(x, sym);
  }

  detail::LbfgsMemory mem;
  TangentState grad, grad_new;
  EnergyBreakdown eb = energy_and_gradient(x, eps, grad);
  if (!sym.trivial()) project_tangent(g, grad, sym);
  double gsup = tangent_sup(grad);

  int iter = 0;
  std::string reason;
  for (; iter < opt.max_iters; ++iter) {
    if (opt.trace) res.trace.push_back({iter, eb.total, gsup, 0.0});
    if (gsup <= opt.tol) {
      res.converged = true;
      reason = "gradient below tolerance";
      break;
    }
    if (opt.gauge_cadence > 0 && iter > 0 && iter % opt.gauge_cadence == 0) {
      harmonic_reduce(x);
      coulomb_project(x, spectral);
      if (!sym.trivial()) symmetrize_state(x, sym);
      mem.clear();
      eb = energy_and_gradient(x, eps, grad);
      if (!sym.trivial()) project_tangent(g, grad, sym);
      gsup = tangent_sup(grad);
    }

    TangentState dir = detail::lbfgs_direction(g, grad, mem);
    if (!sym.trivial()) project_tangent(g, dir, sym);
    double slope = tangent_dot(g, grad, dir);
    if (!(slope < 0) || !std::isfinite(slope)) {
      mem.clear();
      dir = grad;
      tangent_scale(dir, -1.0);
      slope = -tangent_dot(g, grad, grad);
    }

    double t = mem.svec.empty() ? 1.0 / std::max(1.0, tangent_sup(dir)) : 1.0;
    bool accepted = false;
    FieldState trial = x;
    for (int bt = 0; bt < opt.max_backtracks; ++bt) {
      trial = x;
      state_axpy(trial, t, dir);
      double et = energy(trial, eps).total;
      if (std::isfinite(et) && et <= eb.total + opt.c1 * t * slope) {
        accepted = true;
        break;
      }
      t *= opt.shrink;
    }
    if (!accepted) {
      reason = "line search failed";
      break;
    }

    EnergyBreakdown eb_new = energy_and_gradient(trial, eps, grad_new);
    if (!sym.trivial()) project_tangent(g, grad_new, sym);

    // curvature pair s = t*dir, y = grad_new - grad
    TangentState svec = dir;
    tangent_scale(svec, t);
    TangentState yvec = grad_new;
    tangent_axpy(yvec, -1.0, grad);
    double sy = tangent_dot(g, svec, yvec);
    if (sy > 1e-14 * tangent_dot(g, yvec, yvec)) {
      if (int(mem.svec.size()) == opt.memory) {
        mem.svec.pop_front();
        mem.yvec.pop_front();
        mem.rho.pop_front();
      }
      mem.svec.push_back(std::move(svec));
      mem.yvec.push_back(std::move(yvec));
      mem.rho.push_back(1.0 / sy);
    }

    x = std::move(trial);
    eb = eb_new;
    grad = grad_new;
    gsup = tangent_sup(grad);
    if (opt.trace) res.trace.back().step = t;
  }
  if (iter == opt.max_iters) reason = "iteration limit";

  // Hand back a canonical gauge representative. Both operations are exact
  // symmetries of the energy, and the gradient transforms covariantly
  // (|grad_u| is phase-rotated, grad_a is untouched), so the reported
  // energy and sup|grad| are re-measured only to absorb roundoff.
  harmonic_reduce(x);
  coulomb_project(x, spectral);
  if (!sym.trivial()) symmetrize_state(x, sym);
  eb = energy_and_gradient(x, eps, grad);
  if (!sym.trivial()) project_tangent(g, grad, sym);
  gsup = tangent_sup(grad);

  res.iters = iter;
  res.grad_sup = gsup;
  res.energy = eb;
  res.stop_reason = reason;
  return res;
}

// --------------------------------------------------------------------------
// Continuation in the coupling.

struct SweepRow {
  double eps;
  EnergyBreakdown energy;
  double grad_sup;
  int iters;
  bool converged;
  double max_u;
  double max_xi;  // sup of the discrepancy eps|F| - (1-|u|^2)/(2 eps)
};

struct SweepResult {
  std::vector<SweepRow> rows;
  FieldState state;  // minimizer at the last coupling
  bool all_converged = true;
};

inline SweepResult epsilon_sweep(const FieldState& start, const std::vector<double>& eps_list,
                                 const SolverOptions& opt = {}) {
  if (eps_list.empty()) throw std::invalid_argument("epsilon_sweep: empty coupling list");
  for (size_t i = 0; i + 1 < eps_list.size(); ++i)
    if (!(eps_list[i + 1] < eps_list[i]))
      throw std::invalid_argument("epsilon_sweep: couplings must strictly decrease");
  const Grid& g = start.grid;
  for (double e : eps_list)
    if (g.max_h() > e / 4.0 + 1e-12)
      throw std::invalid_argument("epsilon_sweep: grid spacing exceeds eps/4 (refine the grid)");

  SweepResult sw;
  sw.state = start;
  for (double e : eps_list) {
    SolveResult r = minimize(sw.state, e, opt);
    sw.state = std::move(r.state);
    std::vector<double> xi = discrepancy(sw.state, e);
    double mx = xi.empty() ? 0.0 : *std::max_element(xi.begin(), xi.end());
    sw.rows.push_back({e, r.energy, r.grad_sup, r.iters, r.converged, max_abs_u(sw.state), mx});
    sw.all_converged = sw.all_converged && r.converged;
  }
  return sw;
}

// --------------------------------------------------------------------------
// Squared-gradient descent for critical points (minimizers and saddles).

struct CriticalResult {
  FieldState state;
  bool converged = false;        // sup|grad E| <= tol at the end
  double grad_sup = 0;           // of the energy gradient
  EnergyBreakdown energy;
  int phase1_iters = 0;          // energy descent
  int phase2_iters = 0;          // squared-gradient descent
  bool trivial_minimum = false;  // E below classification threshold
  std::vector<TraceRow> trace;
};

// Critical-point search. Phase 1 runs plain (projected) descent until either
// convergence or stagnation; phase 2 minimizes Phi = |grad E|^2 / 2, whose
// gradient H*gradE is formed by a central difference of the energy gradient
// along the normalized gradient direction.
inline CriticalResult find_critical(const FieldState& start, double eps,
                                    const SymmetrySpec& sym = {}, const SolverOptions& opt = {},
                                    int phase1_iters = 400, double fd_step = 1e-5,
                                    double trivial_threshold = 1e-6) {
  if (!(eps > 0)) throw std::invalid_argument("find_critical: eps must be positive");
  CriticalResult out;
  if (!sym.trivial()) check_symmetry_invariance(start, eps, sym);

  // Phase 1: bounded-length energy descent inside the symmetric subspace.
  SolverOptions o1 = opt;
  o1.max_iters = phase1_iters;
  o1.trace = false;
  SolveResult r1 = minimize(start, eps, o1, sym);
  out.phase1_iters = r1.iters;
  FieldState x = std::move(r1.state);
  const Grid& g = x.grid;

  auto grad_of = [&](const FieldState& s, TangentState& gr) {
    EnergyBreakdown eb = energy_and_gradient(s, eps, gr);
    if (!sym.trivial()) project_tangent(g, gr, sym);
    return eb;
  };

  TangentState grad;
  EnergyBreakdown eb = grad_of(x, grad);
  double gsup = tangent_sup(grad);

  if (gsup > opt.tol) {
    // Phase 2: L-BFGS on Phi(x) = 0.5 <grad, grad>.
    detail::LbfgsMemory mem;
    TangentState tmp;
    auto phi_of = [&](const FieldState& s) {
      EnergyBreakdown dummy = grad_of(s, tmp);
      (void)dummy;
      return 0.5 * tangent_dot(g, tmp, tmp);
    };
    // grad Phi = H * gradE by central difference along gradE/|gradE|.
    auto phi_grad = [&](const FieldState& s, const TangentState& gE, TangentState& gPhi) {
      double nrm = std::sqrt(tangent_dot(g, gE, gE));
      if (nrm == 0) {
        gPhi = TangentState::zeros(g);
        return;
      }
      double sup = tangent_sup(gE) / nrm;  // sup of the normalized direction
      double tau = fd_step / std::max(sup, 1e-300);
      FieldState sp = s, sm = s;
      TangentState dirn = gE;
      tangent_scale(dirn, 1.0 / nrm);
      state_axpy(sp, tau, dirn);
      state_axpy(sm, -tau, dirn);
      TangentState gp, gm;
      grad_of(sp, gp);
      grad_of(sm, gm);
      gPhi = gp;
      tangent_axpy(gPhi, -1.0, gm);
      tangent_scale(gPhi, nrm / (2.0 * tau));
      if (!sym.trivial()) project_tangent(g, gPhi, sym);
    };

    double phi = 0.5 * tangent_dot(g, grad, grad);
    TangentState gphi;
    phi_grad(x, grad, gphi);
    int iter = 0;
    for (; iter < opt.max_iters; ++iter) {
      if (opt.trace) out.trace.push_back({iter, eb.total, gsup, 0.0});
      if (gsup <= opt.tol) break;
      TangentState dir = detail::lbfgs_direction(g, gphi, mem);
      double slope = tangent_dot(g, gphi, dir);
      if (!(slope < 0) || !std::isfinite(slope)) {
        mem.clear();
        dir = gphi;
        tangent_scale(dir, -1.0);
        slope = -tangent_dot(g, gphi, gphi);
      }
      double t = mem.svec.empty() ? 1.0 / std::max(1.0, tangent_sup(dir)) : 1.0;
      bool accepted = false;
      FieldState trial = x;
      double phi_t = 0;
      for (int bt = 0; bt < opt.max_backtracks; ++bt) {
        trial = x;
        state_axpy(trial, t, dir);
        phi_t = phi_of(trial);
        if (std::isfinite(phi_t) && phi_t <= phi + opt.c1 * t * slope) {
          accepted = true;
          break;
        }
        t *= opt.shrink;
      }
      if (!accepted) break;

      TangentState gphi_new;
      eb = grad_of(trial, grad);
      phi_grad(trial, grad, gphi_new);

      TangentState svec = dir;
      tangent_scale(svec, t);
      TangentState yvec = gphi_new;
      tangent_axpy(yvec, -1.0, gphi);
      double sy = tangent_dot(g, svec, yvec);
      if (sy > 1e-14 * tangent_dot(g, yvec, yvec)) {
        if (int(mem.svec.size()) == opt.memory) {
          mem.svec.pop_front();
          mem.yvec.pop_front();
          mem.rho.pop_front();
        }
        mem.svec.push_back(std::move(svec));
        mem.yvec.push_back(std::move(yvec));
        mem.rho.push_back(1.0 / sy);
      }
      x = std::move(trial);
      phi = 0.5 * tangent_dot(g, grad, grad);
      gphi = std::move(gphi_new);
      gsup = tangent_sup(grad);
    }
    out.phase2_iters = iter;
  }

  out.state = std::move(x);
  out.grad_sup = gsup;
  out.energy = eb;
  out.converged = gsup <= opt.tol;
  out.trivial_minimum = eb.total <= trivial_threshold;
  return out;
}

}  // namespace ymh
