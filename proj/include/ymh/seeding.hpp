#pragma once
// Multi-vortex initial data from radial profiles. Given zeros z_k with
// integer charges q_k in the transverse plane (sum q_k = bundle degree), the
// seed reproduces the superposed self-dual fields up to image tails:
//
//  1. curvature target  G = sum_k sign(q_k) (1 - f_{|q_k|}(r_k/eps)^2)/(2 eps^2)
//     at plaquette centers (shortest periodic displacement r_k);
//  2. periodic connection a with curl(a) + seam shift = G + uniform remainder,
//     via the spectral curl-inverse (a from a dual Poisson potential) - the
//     seam bookkeeping keeps every plane's total flux exactly 2 pi d;
//  3. modulus rho = prod_k f_{|q_k|}(r_k/eps);
//  4. phase Theta by path integration of a corrected step form whose curl is
//     an exact multiple of 2 pi, pinning one 2 pi q winding defect to the
//     plaquette containing each zero (see the inline comment below).
//
// In dim 3 the transverse solution is extruded along `axis` (a_axis = 0).

#include <map>

#include "bps.hpp"
#include "energy.hpp"
#include "fft.hpp"

namespace ymh {


inline FieldState seed_from_profile(const Grid& g, const BundleTwist& tw, double eps,
                                    const std::vector<std::array<double, 2>>& zeros,
                                    const std::vector<int>& charges, int axis = 2) {
  if (zeros.size() != charges.size())
    throw std::invalid_argument("seed_from_profile: zeros/charges size mismatch");
  if (zeros.empty()) throw std::invalid_argument("seed_from_profile: need at least one zero");
  if (!(eps > 0)) throw std::invalid_argument("seed_from_profile: eps must be positive");

  // Transverse plane axes (j < k).
  int j = 0, k = 1;
  if (g.dim == 3) {
    if (axis < 0 || axis > 2) throw std::invalid_argument("seed_from_profile: bad axis");
    j = (axis == 0) ? 1 : 0;
    k = (axis == 2) ? 1 : 2;
  }
  const int plane = plane_of(j, k);

  long qsum = 0;
  for (int q : charges) {
    if (q == 0) throw std::invalid_argument("seed_from_profile: zero charge");
    qsum += q;
  }
  if (qsum != tw.d[plane])
    throw std::invalid_argument("seed_from_profile: degree mismatch (sum of charges " +
                                std::to_string(qsum) + " != bundle degree " +
                                std::to_string(tw.d[plane]) + " in the transverse plane)");
  if (g.dim == 3)
    for (int p = 0; p < 3; ++p)
      if (p != plane && tw.d[p] != 0)
        throw std::invalid_argument(
            "seed_from_profile: degree mismatch (nonzero degree in a plane containing the "
            "extrusion axis)");
  if (std::max(g.h[j], g.h[k]) > eps / 4.0 + 1e-12)
    throw std::invalid_argument("seed_from_profile: transverse spacing exceeds eps/4");
  for (size_t p = 0; p < zeros.size(); ++p)
    for (size_t q = p + 1; q < zeros.size(); ++q) {
      double dx = wrap_delta(zeros[p][0] - zeros[q][0], g.len[j]);
      double dy = wrap_delta(zeros[p][1] - zeros[q][1], g.len[k]);
      if (std::hypot(dx, dy) < 6.0 * eps)
        throw std::invalid_argument("seed_from_profile: zeros closer than 6*eps");
    }

  // Radial profiles per distinct |charge|.
  double half_diag = 0.5 * std::hypot(g.len[j], g.len[k]);
  double rmax = std::max(24.0, half_diag / eps + 4.0);
  std::map<int, RadialProfile> prof;
  for (int q : charges) {
    int m = std::abs(q);
    if (!prof.count(m)) prof.emplace(m, solve_bps(m, rmax, int(std::ceil(rmax * 100))));
  }

  // 2D problem on the transverse torus.
  Grid g2 = Grid::make(2, {g.n[j], g.n[k], 1}, {g.len[j], g.len[k], 1});
  BundleTwist tw2 = BundleTwist::make(2, {tw.d[plane], 0, 0});
  FieldState s2 = build_state(g2, tw2, InitSpec::constant(cplx(0, 0)));
  Spectral sp(g2);

  // Curvature target at plaquette centers minus the seam shift, mean removed.
  std::vector<double> C(g2.nsites);
  {
    KahanSum mean;
    for (int64_t i = 0; i < g2.nsites; ++i) {
      auto pos = g2.position(i);
      double cx = pos[0] + 0.5 * g2.h[0], cy = pos[1] + 0.5 * g2.h[1];
      double val = 0;
      for (size_t z = 0; z < zeros.size(); ++z) {
        double dx = wrap_delta(cx - zeros[z][0], g2.len[0]);
        double dy = wrap_delta(cy - zeros[z][1], g2.len[1]);
        double f = prof.at(std::abs(charges[z])).f_at(std::hypot(dx, dy) / eps);
        val += (charges[z] > 0 ? 1.0 : -1.0) * (1.0 - f * f) / (2.0 * eps * eps);
      }
      val -= s2.rule->plaq_shift(0, i);
      C[i] = val;
      mean.add(val);
    }
    double mu = mean.value() / double(g2.nsites);
    for (double& v : C) v -= mu;
  }

  // a = curl-inverse of C via dual potential chi.
  {
    std::vector<double> chi = sp.poisson(C);
    const TwistRule& R2 = *s2.rule;
    for (int64_t i = 0; i < g2.nsites; ++i) {
      s2.a_at(0, i) = -(chi[i] - chi[R2.prev(1, i)]) / g2.h[1];
      s2.a_at(1, i) = (chi[i] - chi[R2.prev(0, i)]) / g2.h[0];
    }
  }

  // Modulus.
  std::vector<double> rho(g2.nsites);
  for (int64_t i = 0; i < g2.nsites; ++i) {
    auto pos = g2.position(i);
    double val = 1.0;
    for (size_t z = 0; z < zeros.size(); ++z) {
      double dx = wrap_delta(pos[0] - zeros[z][0], g2.len[0]);
      double dy = wrap_delta(pos[1] - zeros[z][1], g2.len[1]);
      val *= prof.at(std::abs(charges[z])).f_at(std::hypot(dx, dy) / eps);
    }
    rho[i] = val;
  }

  // Phase: integrate the step 1-form psi = gamma - h*eta, where eta is the
  // co-exact field whose curl removes everything from curl(gamma) except an
  // exact 2 pi q on each zero's plaquette (and the -2 pi d fold the seam
  // already carries at the far corner). curl(psi) is then an exact multiple
  // of 2 pi everywhere, so integrating psi along a spanning tree defines
  // exp(i Theta) unambiguously - the section winds q_z around each zero -
  // and the link mismatch |D u| ~ rho |eta| decays like the profile tails.
  {
    const TwistRule& R2 = *s2.rule;
    const double hh = g2.h[0] * g2.h[1];
    std::vector<double> rhs(g2.nsites);
    for (int64_t i = 0; i < g2.nsites; ++i)
      rhs[i] = s2.link_phase(0, i) + s2.link_phase(1, R2.next(0, i)) -
               s2.link_phase(0, R2.next(1, i)) - s2.link_phase(1, i);
    for (size_t z = 0; z < zeros.size(); ++z) {
      auto cell = [&](double w, int ax) {
        int c = int(std::floor(w / g2.h[ax])) % g2.n[ax];
        return c < 0 ? c + g2.n[ax] : c;
      };
      rhs[g2.index(cell(zeros[z][0], 0), cell(zeros[z][1], 1))] -= TWO_PI * charges[z];
    }
    rhs[g2.index(g2.n[0] - 1, g2.n[1] - 1)] += TWO_PI * double(tw.d[plane]);
    for (double& v : rhs) v /= hh;
    std::vector<double> pot = sp.poisson(rhs);

    auto psi_step = [&](int ax, int64_t i) {
      double eta = (ax == 0) ? -(pot[i] - pot[R2.prev(1, i)]) / g2.h[1]
                             : (pot[i] - pot[R2.prev(0, i)]) / g2.h[0];
      return s2.link_phase(ax, i) - g2.h[ax] * eta;
    };
    // Torus holonomies: shift the harmonic (constant) part of a so both
    // noncontractible cycle sums of psi are exact multiples of 2 pi; with
    // curl(psi) already in 2 pi Z this makes every wraparound link
    // consistent too. A constant shift changes neither curvature nor flux.
    for (int ax = 0; ax < 2; ++ax) {
      KahanSum cyc;
      for (int t = 0; t < g2.n[ax]; ++t)
        cyc.add(psi_step(ax, ax == 0 ? g2.index(t, 0) : g2.index(0, t)));
      double c = -wrap_delta(cyc.value(), TWO_PI) / g2.len[ax];
      for (int64_t i = 0; i < g2.nsites; ++i) s2.a_at(ax, i) += c;
    }
    std::vector<double> theta(g2.nsites, 0.0);
    for (int x0 = 1; x0 < g2.n[0]; ++x0) {
      int64_t p = g2.index(x0 - 1, 0);
      theta[g2.index(x0, 0)] = theta[p] + psi_step(0, p);
    }
    for (int x0 = 0; x0 < g2.n[0]; ++x0)
      for (int x1 = 1; x1 < g2.n[1]; ++x1) {
        int64_t p = g2.index(x0, x1 - 1);
        theta[g2.index(x0, x1)] = theta[p] + psi_step(1, p);
      }
    for (int64_t i = 0; i < g2.nsites; ++i)
      s2.u[i] = rho[i] * cplx(std::cos(theta[i]), std::sin(theta[i]));
  }

  if (g.dim == 2) return s2;

  // Extrude along `axis`.
  FieldState s = build_state(g, tw, InitSpec::constant(cplx(0, 0)));
  std::array<int, 3> x{0, 0, 0};
  for (int64_t i = 0; i < g.nsites; ++i) {
    x = g.coords(i);
    int64_t i2 = g2.index(x[j], x[k]);
    s.u[i] = s2.u[i2];
    s.a_at(j, i) = s2.a_at(0, i2);
    s.a_at(k, i) = s2.a_at(1, i2);
  }
  return s;
}

}  // namespace ymh
