#pragma once
// Planar radial self-dual vortex profiles at critical coupling: the ansatz
// u = f(r) e^{i N theta}, A = a(r) d(theta) solves
//
//   f' = f (N - a) / r,     a' = r (1 - f^2) / 2,
//   f(0) = 0, a(0) = 0, f(inf) = 1, a(inf) = N,
//
// whose energy is exactly 2 pi |N|. Solved by damped Newton on a midpoint
// (central-difference) collocation over a uniform mesh on (0, rmax], closed
// at the left by the indicial relation a(r0) = (r0^2/4)(1 - f(r0)^2/(N+1))
// (from f ~ c r^N, a ~ r^2/4) and at the right by f(rmax) = 1 (the tail error
// e^{-rmax} is far below mesh resolution for rmax >= 20).

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "grid.hpp"

namespace ymh {

// Small general band-matrix LU with partial pivoting (LAPACK-style layout:
// column-major, entry (i,j) at ab[j*ldab + kl + ku + i - j], fill rows included).
class BandLU {
 public:
  BandLU(int n, int kl, int ku)
      : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1), ab_(size_t(ldab_) * n, 0.0), ipiv_(n) {}

  void clear() { std::fill(ab_.begin(), ab_.end(), 0.0); }
  double& at(int i, int j) { return ab_[size_t(j) * ldab_ + kl_ + ku_ + i - j]; }

  void factor() {
    const int width = ku_ + kl_;  // effective superdiagonals after fill
    for (int j = 0; j < n_; ++j) {
      int pmax = std::min(n_ - 1, j + kl_);
      int piv = j;
      double best = std::fabs(at(j, j));
      for (int i = j + 1; i <= pmax; ++i)
        if (std::fabs(at(i, j)) > best) {
          best = std::fabs(at(i, j));
          piv = i;
        }
      ipiv_[j] = piv;
      if (best == 0.0) throw std::runtime_error("band LU: singular matrix");
      if (piv != j)
        for (int c = j; c <= std::min(n_ - 1, j + width); ++c) std::swap(at(piv, c), at(j, c));
      for (int i = j + 1; i <= pmax; ++i) {
        double m = at(i, j) / at(j, j);
        at(i, j) = m;
        for (int c = j + 1; c <= std::min(n_ - 1, j + width); ++c) at(i, c) -= m * at(j, c);
      }
    }
  }

  void solve(std::vector<double>& b) const {
    const int width = ku_ + kl_;
    for (int j = 0; j < n_; ++j) {
      if (ipiv_[j] != j) std::swap(b[j], b[ipiv_[j]]);
      for (int i = j + 1; i <= std::min(n_ - 1, j + kl_); ++i) b[i] -= cat(i, j) * b[j];
    }
    for (int j = n_ - 1; j >= 0; --j) {
      b[j] /= cat(j, j);
      for (int i = std::max(0, j - width); i < j; ++i) b[i] -= cat(i, j) * b[j];
    }
  }

 private:
  double cat(int i, int j) const { return ab_[size_t(j) * ldab_ + kl_ + ku_ + i - j]; }
  int n_, kl_, ku_, ldab_;
  std::vector<double> ab_;
  std::vector<int> ipiv_;
};

struct RadialProfile {
  int N = 1;          // winding (positive)
  double rmax = 24;
  double dr = 0.01;
  std::vector<double> r, f, a;  // nodes r_i = (i+1)*dr

  double r0() const { return r.front(); }

  double f_at(double rr) const {
    if (rr >= rmax) return 1.0;
    if (rr <= r0()) return f[0] * std::pow(rr / r0(), N);
    double v = interp(f, rr);
    return v < 0 ? 0.0 : (v > 1 ? 1.0 : v);
  }
  double a_at(double rr) const {
    if (rr >= rmax) return double(N);
    if (rr <= r0()) return a[0] * (rr / r0()) * (rr / r0());
    return interp(a, rr);
  }

  // sup over mesh midpoints of both first-order equation residuals. The
  // first f-interval is governed by the indicial relation f ~ c r^N and is
  // measured against it.
  double max_residual() const {
    double m = 0;
    for (size_t i = 0; i + 1 < r.size(); ++i) {
      double rm = 0.5 * (r[i] + r[i + 1]);
      double fm = 0.5 * (f[i] + f[i + 1]);
      double am = 0.5 * (a[i] + a[i + 1]);
      double rf = (i == 0) ? (f[1] - f[0] * std::pow(r[1] / r[0], N)) / dr
                           : (f[i + 1] - f[i]) / dr - fm * (N - am) / rm;
      double ra = (a[i + 1] - a[i]) / dr - rm * (1.0 - fm * fm) / 2.0;
      m = std::max(m, std::max(std::fabs(rf), std::fabs(ra)));
    }
    return m;
  }

  // Total energy 2 pi int [f'^2 + f^2 (N-a)^2/r^2 + a'^2/r^2 + (1-f^2)^2/4] r dr
  // by midpoint quadrature, plus the analytic [0, r0] sliver.
  double energy() const {
    double s = 0;
    for (size_t i = 0; i + 1 < r.size(); ++i) {
      double rm = 0.5 * (r[i] + r[i + 1]);
      double fm = 0.5 * (f[i] + f[i + 1]);
      double am = 0.5 * (a[i] + a[i + 1]);
      double fp = (f[i + 1] - f[i]) / dr;
      double ap = (a[i + 1] - a[i]) / dr;
      double q = 1.0 - fm * fm;
      s += (fp * fp + fm * fm * (N - am) * (N - am) / (rm * rm) + ap * ap / (rm * rm) +
            q * q / 4.0) *
           rm * dr;
    }
    double sliver = f[0] * f[0] * N + 2.0 * a[0] * a[0] / (r0() * r0()) + r0() * r0() / 8.0;
    return TWO_PI * (s + sliver);
  }

  // Least-squares slope of log f vs log r over [4*r0, 40*r0] (expect ~ N).
  // The window starts past the first nodes, where the relative collocation
  // truncation is largest, and ends before the regular r^2 correction bites.
  double core_slope() const { return lsq_slope_logs(f, 4.0 * r0(), 40.0 * r0(), true); }
  // Least-squares slope of log(1 - f) vs r over [rlo, rhi] (expect ~ -1).
  double tail_slope(double rlo = 8.0, double rhi = 15.0) const {
    double xs = 0, ys = 0, xx = 0, xy = 0;
    int cnt = 0;
    for (size_t i = 0; i < r.size(); ++i) {
      if (r[i] < rlo || r[i] > rhi || f[i] >= 1.0) continue;
      double x = r[i], y = std::log(1.0 - f[i]);
      xs += x; ys += y; xx += x * x; xy += x * y;
      ++cnt;
    }
    if (cnt < 4) throw std::runtime_error("tail_slope: window has too few nodes");
    return (cnt * xy - xs * ys) / (cnt * xx - xs * xs);
  }

 private:
  double interp(const std::vector<double>& v, double rr) const {
    // 4-point Lagrange on the uniform mesh.
    double t = (rr - r[0]) / dr;
    std::int64_t i = std::int64_t(std::floor(t));
    std::int64_t lo = std::max<std::int64_t>(0, std::min<std::int64_t>(i - 1, std::int64_t(v.size()) - 4));
    double x = t - double(lo);  // in [~1, ~2] within the 4-node window
    double w0 = -(x - 1) * (x - 2) * (x - 3) / 6.0;
    double w1 = x * (x - 2) * (x - 3) / 2.0;
    double w2 = -x * (x - 1) * (x - 3) / 2.0;
    double w3 = x * (x - 1) * (x - 2) / 6.0;
    return w0 * v[lo] + w1 * v[lo + 1] + w2 * v[lo + 2] + w3 * v[lo + 3];
  }

  double lsq_slope_logs(const std::vector<double>& v, double rlo, double rhi, bool log_x) const {
    double xs = 0, ys = 0, xx = 0, xy = 0;
    int cnt = 0;
    for (size_t i = 0; i < r.size(); ++i) {
      if (r[i] < rlo || r[i] > rhi || v[i] <= 0) continue;
      double x = log_x ? std::log(r[i]) : r[i];
      double y = std::log(v[i]);
      xs += x; ys += y; xx += x * x; xy += x * y;
      ++cnt;
    }
    if (cnt < 4) throw std::runtime_error("slope fit: window has too few nodes");
    return (cnt * xy - xs * ys) / (cnt * xx - xs * xs);
  }
};

inline RadialProfile solve_bps(int N, double rmax = 24.0, int mesh = 2400) {
  if (N < 1) throw std::invalid_argument("solve_bps: winding must be >= 1");
  if (!(rmax > 5.0)) throw std::invalid_argument("solve_bps: rmax too small");
  if (mesh < 10 * rmax) throw std::invalid_argument("solve_bps: mesh too coarse (need >= 10*rmax)");

  const int M = mesh;
  const double dr = rmax / M;
  RadialProfile prof;
  prof.N = N;
  prof.rmax = rmax;
  prof.dr = dr;
  prof.r.resize(M);
  prof.f.resize(M);
  prof.a.resize(M);
  for (int i = 0; i < M; ++i) {
    double rr = (i + 1) * dr;
    prof.r[i] = rr;
    double t = rr / std::sqrt(rr * rr + 2.0 * N);
    prof.f[i] = std::pow(t, N);
    prof.a[i] = N * rr * rr / (rr * rr + 2.0 * N);
  }

  const int n = 2 * M;  // unknowns f_0,a_0,...,f_{M-1},a_{M-1}
  auto residual = [&](const std::vector<double>& f, const std::vector<double>& a,
                      std::vector<double>& R) {
    double rr0 = prof.r[0];
    R[0] = a[0] - (rr0 * rr0 / 4.0) * (1.0 - f[0] * f[0] / double(N + 1));
    // First f-interval: indicial relation f ~ c r^N instead of midpoint
    // collocation, whose truncation error near 0 would exceed f itself for
    // N >= 2 (f''' ~ r^{N-3}).
    const double ratio0 = std::pow(prof.r[1] / prof.r[0], N);
    R[1] = f[1] - f[0] * ratio0;
    for (int i = 0; i + 1 < M; ++i) {
      double rm = 0.5 * (prof.r[i] + prof.r[i + 1]);
      double fm = 0.5 * (f[i] + f[i + 1]);
      double am = 0.5 * (a[i] + a[i + 1]);
      if (i > 0) R[2 * i + 1] = (f[i + 1] - f[i]) / dr - fm * (N - am) / rm;
      R[2 * i + 2] = (a[i + 1] - a[i]) / dr - rm * (1.0 - fm * fm) / 2.0;
    }
    R[n - 1] = f[M - 1] - 1.0;
  };
  auto norm2 = [&](const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
  };

  BandLU lu(n, 2, 2);
  std::vector<double> R(n), step(n), ftry(M), atry(M);
  residual(prof.f, prof.a, R);
  double rn = norm2(R);
  bool done = false;
  for (int iter = 0; iter < 80 && !done; ++iter) {
    lu.clear();
    {
      double rr0 = prof.r[0];
      lu.at(0, 0) = (rr0 * rr0 / 4.0) * 2.0 * prof.f[0] / double(N + 1);
      lu.at(0, 1) = 1.0;
      lu.at(1, 0) = -std::pow(prof.r[1] / prof.r[0], N);
      lu.at(1, 2) = 1.0;
      for (int i = 0; i + 1 < M; ++i) {
        double rm = 0.5 * (prof.r[i] + prof.r[i + 1]);
        double fm = 0.5 * (prof.f[i] + prof.f[i + 1]);
        double am = 0.5 * (prof.a[i] + prof.a[i + 1]);
        int rf = 2 * i + 1, ra = 2 * i + 2;
        int cf0 = 2 * i, ca0 = 2 * i + 1, cf1 = 2 * i + 2, ca1 = 2 * i + 3;
        if (i > 0) {
          lu.at(rf, cf0) = -1.0 / dr - 0.5 * (N - am) / rm;
          lu.at(rf, cf1) = 1.0 / dr - 0.5 * (N - am) / rm;
          lu.at(rf, ca0) = fm / (2.0 * rm);
          lu.at(rf, ca1) = fm / (2.0 * rm);
        }
        lu.at(ra, cf0) = rm * fm / 2.0;
        lu.at(ra, cf1) = rm * fm / 2.0;
        lu.at(ra, ca0) = -1.0 / dr;
        lu.at(ra, ca1) = 1.0 / dr;
      }
      lu.at(n - 1, 2 * (M - 1)) = 1.0;
    }
    lu.factor();
    for (int i = 0; i < n; ++i) step[i] = -R[i];
    lu.solve(step);

    double lam = 1.0;
    for (int bt = 0; bt < 30; ++bt, lam *= 0.5) {
      for (int i = 0; i < M; ++i) {
        ftry[i] = prof.f[i] + lam * step[2 * i];
        atry[i] = prof.a[i] + lam * step[2 * i + 1];
      }
      std::vector<double> Rtry(n);
      residual(ftry, atry, Rtry);
      double rt = norm2(Rtry);
      if (rt <= (1.0 - 0.25 * lam) * rn || rt < 1e-14) {
        prof.f = ftry;
        prof.a = atry;
        R = Rtry;
        rn = rt;
        break;
      }
      if (bt == 29) throw std::runtime_error("solve_bps: line search stalled");
    }
    double rinf = 0;
    for (double x : R) rinf = std::max(rinf, std::fabs(x));
    if (rinf <= 1e-12) done = true;
  }
  if (!done) throw std::runtime_error("solve_bps: Newton did not converge");
  return prof;
}

inline double profile_energy(const RadialProfile& p) { return p.energy(); }

}  // namespace ymh
