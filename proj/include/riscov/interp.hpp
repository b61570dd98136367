#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace riscov {

inline std::vector<double> log_spaced(double lo, double hi, int n) {
  std::vector<double> g(n);
  double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < n; ++i)
    g[i] = std::exp(llo + (lhi - llo) * i / static_cast<double>(n - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

/// Piecewise-linear interpolation over a strictly increasing grid, clamped at
/// both ends.
struct LinearTable {
  std::vector<double> x;
  std::vector<double> y;

  double eval(double q) const {
    if (x.empty()) return 0.0;
    if (q <= x.front()) return y.front();
    if (q >= x.back()) return y.back();
    auto it = std::upper_bound(x.begin(), x.end(), q);
    size_t i = static_cast<size_t>(it - x.begin()) - 1;
    double t = (q - x[i]) / (x[i + 1] - x[i]);
    return y[i] + t * (y[i + 1] - y[i]);
  }
};

/// Monotone cubic (Fritsch-Carlson) interpolation. C1-smooth, so adaptive
/// quadrature over interpolated tables converges without chasing the
/// derivative kinks a piecewise-linear table would introduce at every knot.
struct CubicTable {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> d;  // knot derivatives, filled by build()

  void build() {
    const size_t n = x.size();
    d.assign(n, 0.0);
    if (n < 2) return;
    std::vector<double> h(n - 1), delta(n - 1);
    for (size_t i = 0; i + 1 < n; ++i) {
      h[i] = x[i + 1] - x[i];
      delta[i] = (y[i + 1] - y[i]) / h[i];
    }
    if (n == 2) {
      d[0] = d[1] = delta[0];
      return;
    }
    for (size_t i = 1; i + 1 < n; ++i) {
      if (delta[i - 1] * delta[i] <= 0.0) {
        d[i] = 0.0;
      } else {
        double w1 = 2.0 * h[i] + h[i - 1];
        double w2 = h[i] + 2.0 * h[i - 1];
        d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
      }
    }
    auto end_slope = [](double h0, double h1, double d0, double d1) {
      double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
      if (s * d0 <= 0.0) return 0.0;
      if (std::fabs(s) > 3.0 * std::fabs(d0)) return 3.0 * d0;
      return s;
    };
    d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
  }

  double eval(double q) const {
    if (x.empty()) return 0.0;
    if (q <= x.front()) return y.front();
    if (q >= x.back()) return y.back();
    auto it = std::upper_bound(x.begin(), x.end(), q);
    size_t i = static_cast<size_t>(it - x.begin()) - 1;
    double h = x[i + 1] - x[i];
    double t = (q - x[i]) / h;
    double t2 = t * t, t3 = t2 * t;
    return y[i] * (2.0 * t3 - 3.0 * t2 + 1.0) + h * d[i] * (t3 - 2.0 * t2 + t) +
           y[i + 1] * (-2.0 * t3 + 3.0 * t2) + h * d[i + 1] * (t3 - t2);
  }
};

}  // namespace riscov
