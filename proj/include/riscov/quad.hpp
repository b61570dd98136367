#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace riscov {

/// Tolerances and limits shared by all integration routines.
struct QuadSpec {
  double rel_tol = 1e-6;
  double abs_tol = 1e-10;
  int max_depth = 30;
  double truncation_factor = 40.0;  // decay lengths kept for improper upper limits
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;     // accumulated embedded-rule estimate
  bool converged = true;  // false if any subinterval hit max_depth above tolerance
  long evals = 0;
};

namespace quad_detail {

// Gauss 7 / Kronrod 15 nodes and weights on [-1, 1] (positive half).
inline constexpr double kNodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
inline constexpr double kWeights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double kGaussWeights[8] = {
    0.0, 0.129484966168870, 0.0, 0.279705391489277,
    0.0, 0.381830050505119, 0.0, 0.417959183673469};

template <class F>
inline void gk15(F& f, double a, double b, double& kronrod, double& err) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double fc = f(mid);
  double k = kWeights[7] * fc;
  double g = kGaussWeights[7] * fc;
  for (int i = 0; i < 7; ++i) {
    double dx = half * kNodes[i];
    double s = f(mid + dx) + f(mid - dx);
    k += kWeights[i] * s;
    g += kGaussWeights[i] * s;
  }
  kronrod = k * half;
  err = std::fabs((k - g) * half);
}

struct Seg {
  double a, b, v, e;
  int depth;
};

}  // namespace quad_detail

/// Globally adaptive bisection with an embedded G7/K15 error estimate: the
/// interval with the largest estimate is split first and the tolerance test
/// max(abs_tol, rel_tol*|I|) applies to the total, which also converges for
/// integrable endpoint singularities where any per-leaf relative test would
/// stall. Intervals that reach max_depth stop refining; if the remaining
/// total error still exceeds the tolerance the result is flagged.
template <class F>
QuadResult integrate_1d(F&& f, double a, double b, const QuadSpec& spec = {}) {
  if (!(a <= b)) throw std::invalid_argument("integrate_1d: requires a <= b");
  QuadResult out;
  if (a == b) return out;

  using quad_detail::Seg;
  auto worse = [](const Seg& x, const Seg& y) { return x.e < y.e; };
  std::vector<Seg> heap;
  heap.reserve(64);

  double val = 0.0, err = 0.0;     // running totals over all leaves
  double frozen_v = 0.0, frozen_e = 0.0;  // leaves at max_depth
  auto push = [&](double lo, double hi, int depth) {
    Seg s{lo, hi, 0.0, 0.0, depth};
    quad_detail::gk15(f, lo, hi, s.v, s.e);
    out.evals += 15;
    val += s.v;
    err += s.e;
    if (depth >= spec.max_depth) {
      frozen_v += s.v;
      frozen_e += s.e;
    } else {
      heap.push_back(s);
      std::push_heap(heap.begin(), heap.end(), worse);
    }
  };
  push(a, b, 0);

  constexpr long kMaxLeaves = 200000;
  while (!heap.empty() && out.evals / 15 < kMaxLeaves) {
    double tol = std::max(spec.abs_tol, spec.rel_tol * std::fabs(val));
    if (err <= tol) break;
    std::pop_heap(heap.begin(), heap.end(), worse);
    Seg s = heap.back();
    heap.pop_back();
    val -= s.v;
    err -= s.e;
    double m = 0.5 * (s.a + s.b);
    push(s.a, m, s.depth + 1);
    push(m, s.b, s.depth + 1);
  }
  out.value = val;
  out.error = err;
  out.converged = err <= std::max(spec.abs_tol, spec.rel_tol * std::fabs(val));
  return out;
}

/// Integral over [0, inf) of an integrand whose envelope decays like
/// exp(-decay_rate * x): truncate at truncation_factor decay lengths, then
/// extend while the analytic tail bound ~|f(U)|/c stays above abs_tol.
template <class F>
QuadResult integrate_improper(F&& f, double decay_rate, const QuadSpec& spec = {}) {
  if (!(decay_rate > 0.0))
    throw std::domain_error("integrate_improper: nonpositive decay rate (divergent)");
  double upper = spec.truncation_factor / decay_rate;
  QuadResult out = integrate_1d(f, 0.0, upper, spec);
  for (int i = 0; i < 8; ++i) {
    double tail = 2.0 * std::fabs(f(upper)) / decay_rate;
    out.evals += 1;
    if (tail <= spec.abs_tol) break;
    double next = 1.5 * upper;
    QuadResult ext = integrate_1d(f, upper, next, spec);
    out.value += ext.value;
    out.error += ext.error;
    out.evals += ext.evals;
    out.converged = out.converged && ext.converged;
    upper = next;
  }
  return out;
}

/// Nested 2-D integral; the inner bounds may depend on the outer variable.
template <class F, class Lo, class Hi>
QuadResult integrate_2d(F&& f, double ax, double bx, Lo&& ylo, Hi&& yhi,
                        const QuadSpec& spec = {}) {
  QuadSpec inner = spec;
  inner.abs_tol = spec.abs_tol * 1e-2;
  bool inner_ok = true;
  long inner_evals = 0;
  auto outer = [&](double x) {
    double lo = ylo(x), hi = yhi(x);
    if (!(hi > lo)) return 0.0;
    auto r = integrate_1d([&](double y) { return f(x, y); }, lo, hi, inner);
    inner_ok = inner_ok && r.converged;
    inner_evals += r.evals;
    return r.value;
  };
  QuadResult out = integrate_1d(outer, ax, bx, spec);
  out.converged = out.converged && inner_ok;
  out.evals += inner_evals;
  return out;
}

/// Nested 3-D integral with bounds depending on the outer variables.
template <class F, class YLo, class YHi, class ZLo, class ZHi>
QuadResult integrate_3d(F&& f, double ax, double bx, YLo&& ylo, YHi&& yhi,
                        ZLo&& zlo, ZHi&& zhi, const QuadSpec& spec = {}) {
  QuadSpec mid = spec;
  mid.abs_tol = spec.abs_tol * 1e-2;
  bool ok = true;
  long evals = 0;
  auto outer = [&](double x) {
    double lo = ylo(x), hi = yhi(x);
    if (!(hi > lo)) return 0.0;
    auto r = integrate_2d([&](double y, double z) { return f(x, y, z); }, lo, hi,
                          [&](double y) { return zlo(x, y); },
                          [&](double y) { return zhi(x, y); }, mid);
    ok = ok && r.converged;
    evals += r.evals;
    return r.value;
  };
  QuadResult out = integrate_1d(outer, ax, bx, spec);
  out.converged = out.converged && ok;
  out.evals += evals;
  return out;
}

/// Density of the product of two independent exponentials with means mean_a and
/// mean_b, computed from the convolution integral
///   (1/(ab)) \int_0^inf (1/x) exp(-x/a - z/(b x)) dx
/// after the log substitution x = sqrt(a z / b) e^u, which turns the integrand
/// into exp(-2 sqrt(z/(ab)) cosh u) and removes the 1/x singularity.
inline double product_exp_pdf(double z, double mean_a, double mean_b,
                              const QuadSpec& spec = {}) {
  if (!(mean_a > 0.0) || !(mean_b > 0.0))
    throw std::invalid_argument("product_exp_pdf: means must be positive");
  if (!(z > 0.0)) return 0.0;
  const double w = std::sqrt(z / (mean_a * mean_b));
  const double upper = std::acosh(1.0 + 45.0 / (2.0 * w));
  auto g = [w](double u) { return std::exp(-2.0 * w * std::cosh(u)); };
  QuadResult r = integrate_1d(g, 0.0, upper, spec);
  return 2.0 * r.value / (mean_a * mean_b);
}

}  // namespace riscov
