#pragma once
// Flat periodic lattice (T^2 / T^3) carrying a U(1) line bundle of arbitrary
// degree. The bundle is realized by 't Hooft-style twisted boundary
// conditions: fields are stored strictly periodically and every wraparound
// link in direction k picks up a fixed transition phase that winds once in
// the lower coordinate of each 2-plane. The per-plaquette curvature shift
// that goes with it makes total flux through any coordinate 2-torus equal
// 2*pi*degree exactly, independent of the connection.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ymh {

using cplx = std::complex<double>;
using std::int32_t;
using std::int64_t;

inline constexpr double PI = 3.14159265358979323846264338327950288;
inline constexpr double TWO_PI = 2.0 * PI;

// Displacement folded to (-period/2, period/2].
inline double wrap_delta(double d, double period) { return std::remainder(d, period); }

// Coordinate 2-planes, ordered (0,1), (0,2), (1,2). dim 2 has only plane 0.
inline constexpr int plane_count(int dim) { return dim == 3 ? 3 : 1; }

inline constexpr std::array<int, 2> plane_axes(int plane) {
  switch (plane) {
    case 0: return {0, 1};
    case 1: return {0, 2};
    default: return {1, 2};
  }
}

inline constexpr int plane_of(int j, int k) {  // requires j < k
  return (j == 0) ? (k == 1 ? 0 : 1) : 2;
}

struct Grid {
  int dim = 2;
  std::array<int, 3> n{1, 1, 1};        // sites per axis; n[2] == 1 when dim == 2
  std::array<double, 3> len{1, 1, 1};   // periods
  std::array<double, 3> h{1, 1, 1};     // spacings len/n
  int64_t nsites = 1;
  double cell_vol = 1;

  static Grid make(int dim, std::array<int, 3> sizes, std::array<double, 3> lengths) {
    if (dim != 2 && dim != 3) throw std::invalid_argument("grid: dim must be 2 or 3");
    Grid g;
    g.dim = dim;
    g.nsites = 1;
    g.cell_vol = 1.0;
    for (int j = 0; j < 3; ++j) {
      if (j < dim) {
        if (sizes[j] < 8) throw std::invalid_argument("grid: need at least 8 sites per axis");
        if (!(lengths[j] > 0)) throw std::invalid_argument("grid: lengths must be positive");
        g.n[j] = sizes[j];
        g.len[j] = lengths[j];
        g.h[j] = lengths[j] / sizes[j];
        g.nsites *= sizes[j];
        g.cell_vol *= g.h[j];
      } else {
        g.n[j] = 1;
        g.len[j] = 1.0;
        g.h[j] = 1.0;
      }
    }
    return g;
  }

  // Row-major: x2 fastest. idx = (x0*n1 + x1)*n2 + x2.
  int64_t index(int x0, int x1, int x2 = 0) const {
    return (int64_t(x0) * n[1] + x1) * n[2] + x2;
  }
  std::array<int, 3> coords(int64_t i) const {
    std::array<int, 3> x;
    x[2] = int(i % n[2]);
    int64_t r = i / n[2];
    x[1] = int(r % n[1]);
    x[0] = int(r / n[1]);
    return x;
  }
  // Physical position of a site (cell center convention: sites at x_j*h_j,
  // cells [x_j*h_j - h_j/2, x_j*h_j + h_j/2)).
  std::array<double, 3> position(int64_t i) const {
    auto x = coords(i);
    return {x[0] * h[0], x[1] * h[1], x[2] * h[2]};
  }
  double max_h() const {
    double m = 0;
    for (int j = 0; j < dim; ++j) m = std::max(m, h[j]);
    return m;
  }
  bool same_shape(const Grid& o) const {
    return dim == o.dim && n == o.n && len == o.len;
  }
};

struct BundleTwist {
  // Degree per 2-plane in plane order; dim 2 uses d[0] only.
  std::array<int, 3> d{0, 0, 0};

  static BundleTwist make(int dim, std::array<int, 3> degrees) {
    BundleTwist t;
    for (int p = 0; p < plane_count(dim); ++p) t.d[p] = degrees[p];
    return t;
  }
  bool trivial() const { return d[0] == 0 && d[1] == 0 && d[2] == 0; }
  bool operator==(const BundleTwist& o) const { return d == o.d; }
};

// Precomputed hop tables and seam phases. Shared (immutably) by all field
// states on the same (Grid, BundleTwist); everything hot loops need.
//
// Conventions (fixed across the library):
//   link phase      gamma_j(x) = h_j*a_j(x) + s_j(x)
//   transport       T_j(x)     = exp(-i*gamma_j(x))   (pulls u(x+e_j) back to x)
//   seam shift      s_j(x)     = sum_{i<j} 2*pi*d_{ij}*x_i/N_i   on links that
//                                wrap in direction j, else 0
//   curvature       F_{jk}(x)  = [a_k(x+e_j)-a_k(x)]/h_j - [a_j(x+e_k)-a_j(x)]/h_k
//                                + S_{jk}(x)/(h_j*h_k)
//   curvature shift S_{jk}(x)  = 2*pi*d_{jk}/N_j     on plaquettes with
//                                x_k = N_k-1, else 0
// With these choices the plaquette transport equals exp(-i*h_j*h_k*F_{jk})
// exactly as a U(1) phase (the corner plaquette differs by e^{2*pi*i*d} = 1),
// and sum(F*h_j*h_k) over a (j,k)-torus telescopes to 2*pi*d_{jk}.
class TwistRule {
 public:
  TwistRule(const Grid& g, const BundleTwist& tw) : grid_(g), twist_(tw) {
    const int64_t ns = g.nsites;
    for (int j = 0; j < g.dim; ++j) {
      next_[j].resize(ns);
      prev_[j].resize(ns);
      link_shift_[j].assign(ns, 0.0);
    }
    for (int p = 0; p < plane_count(g.dim); ++p) plaq_shift_[p].assign(ns, 0.0);

    std::array<int, 3> x{0, 0, 0};
    for (int64_t i = 0; i < ns; ++i) {
      x = g.coords(i);
      for (int j = 0; j < g.dim; ++j) {
        std::array<int, 3> y = x;
        y[j] = (x[j] + 1) % g.n[j];
        next_[j][i] = int32_t(g.index(y[0], y[1], y[2]));
        y[j] = (x[j] + g.n[j] - 1) % g.n[j];
        prev_[j][i] = int32_t(g.index(y[0], y[1], y[2]));
        if (x[j] == g.n[j] - 1) {
          double s = 0;
          for (int i2 = 0; i2 < j; ++i2) {
            int p = plane_of(i2, j);
            if (tw.d[p] != 0) s += TWO_PI * tw.d[p] * double(x[i2]) / double(g.n[i2]);
          }
          link_shift_[j][i] = s;
        }
      }
      for (int p = 0; p < plane_count(g.dim); ++p) {
        auto [j, k] = plane_axes(p);
        if (tw.d[p] != 0 && x[k] == g.n[k] - 1)
          plaq_shift_[p][i] = TWO_PI * tw.d[p] / (double(g.n[j]) * g.h[j] * g.h[k]);
      }
    }
  }

  const Grid& grid() const { return grid_; }
  const BundleTwist& twist() const { return twist_; }

  int32_t next(int axis, int64_t i) const { return next_[axis][i]; }
  int32_t prev(int axis, int64_t i) const { return prev_[axis][i]; }
  // Transition phase s_j(x) (0 on interior links).
  double link_shift(int axis, int64_t i) const { return link_shift_[axis][i]; }
  // S_{jk}(x)/(h_j*h_k), already divided: add directly to the a-curl.
  double plaq_shift(int plane, int64_t i) const { return plaq_shift_[plane][i]; }

 private:
  Grid grid_;
  BundleTwist twist_;
  std::vector<int32_t> next_[3], prev_[3];
  std::vector<double> link_shift_[3];
  std::vector<double> plaq_shift_[3];
};

}  // namespace ymh
