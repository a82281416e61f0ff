#pragma once
// Spectral solver for the discrete (stencil) Poisson equation on the
// periodic grid, backed by FFTW. The symbol is the exact eigenvalue of the
// 5/7-point Laplacian, sum_j (2 cos(2 pi k_j / N_j) - 2)/h_j^2, so
// "Laplacian(poisson(rhs)) == rhs - mean(rhs)" holds at stencil level to
// roundoff. Plans use FFTW_ESTIMATE: deterministic results run to run.

#include <fftw3.h>

#include "grid.hpp"

namespace ymh {

class Spectral {
 public:
  explicit Spectral(const Grid& g) : g_(g) {
    buf_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * g.nsites));
    if (!buf_) throw std::bad_alloc();
    int n[3] = {g.n[0], g.n[1], g.n[2]};
    fwd_ = fftw_plan_dft(g.dim, n, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft(g.dim, n, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!fwd_ || !bwd_) throw std::runtime_error("fftw plan creation failed");
    symbol_.resize(g.nsites);
    for (int64_t i = 0; i < g.nsites; ++i) {
      auto k = g.coords(i);
      double lam = 0;
      for (int j = 0; j < g.dim; ++j)
        lam += (2.0 * std::cos(TWO_PI * k[j] / g.n[j]) - 2.0) / (g.h[j] * g.h[j]);
      symbol_[i] = lam;
    }
  }
  Spectral(const Spectral&) = delete;
  Spectral& operator=(const Spectral&) = delete;
  ~Spectral() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(buf_);
  }

  const Grid& grid() const { return g_; }

  // Zero-mean solution of Laplacian(theta) = rhs - mean(rhs).
  std::vector<double> poisson(const std::vector<double>& rhs) {
    if (int64_t(rhs.size()) != g_.nsites) throw std::invalid_argument("poisson: size mismatch");
    for (int64_t i = 0; i < g_.nsites; ++i) {
      buf_[i][0] = rhs[i];
      buf_[i][1] = 0.0;
    }
    fftw_execute(fwd_);
    buf_[0][0] = buf_[0][1] = 0.0;  // zero mean
    for (int64_t i = 1; i < g_.nsites; ++i) {
      buf_[i][0] /= symbol_[i];
      buf_[i][1] /= symbol_[i];
    }
    fftw_execute(bwd_);
    std::vector<double> out(g_.nsites);
    const double scale = 1.0 / double(g_.nsites);
    for (int64_t i = 0; i < g_.nsites; ++i) out[i] = buf_[i][0] * scale;
    return out;
  }

 private:
  Grid g_;
  fftw_complex* buf_ = nullptr;
  fftw_plan fwd_ = nullptr, bwd_ = nullptr;
  std::vector<double> symbol_;
};

}  // namespace ymh
