#pragma once
// Deterministic reductions and a small parallel map helper.
//
// Contract: every reduction in the library runs in fixed site order with
// compensated (Kahan) accumulation, never sharded across threads, so results
// are bit-identical for any thread count. Threads are only used for
// element-wise maps whose outputs are independent per site.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace ymh {

inline int& thread_count() {
  static int n = 1;
  return n;
}
inline void set_thread_count(int n) {
  thread_count() = std::max(1, n);
}

// Fixed-order compensated accumulator.
struct KahanSum {
  double s = 0, c = 0;
  void add(double x) {
    double y = x - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  double value() const { return s; }
};

inline double kahan_total(const std::vector<double>& v) {
  KahanSum k;
  for (double x : v) k.add(x);
  return k.value();
}

// Map fn(i) over [0, n); shards only when more than one thread is configured.
template <class F>
void parallel_for(std::int64_t n, F&& fn) {
  int nt = thread_count();
  if (nt <= 1 || n < 4096) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::int64_t chunk = (n + nt - 1) / nt;
  for (int t = 0; t < nt; ++t) {
    std::int64_t lo = t * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::int64_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace ymh
