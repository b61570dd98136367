#pragma once

// Test-only reference implementations, kept independent of the library code
// paths they are used to check.

#include <cmath>
#include <stdexcept>

namespace oracle {

// Modified Bessel K0 by the ascending series; accurate to ~1e-14 for x <= 4,
// which covers every point the tests evaluate.
inline double bessel_k0(double x) {
  if (!(x > 0.0)) throw std::invalid_argument("bessel_k0: x must be positive");
  const double euler = 0.57721566490153286;
  const double q = 0.25 * x * x;
  double term = 1.0, i0 = 1.0, hsum = 0.0, acc = 0.0;
  for (int k = 1; k <= 80; ++k) {
    term *= q / (static_cast<double>(k) * k);
    hsum += 1.0 / k;
    i0 += term;
    acc += term * hsum;
  }
  return -(std::log(0.5 * x) + euler) * i0 + acc;
}

// Lower regularized-series route for the upper incomplete gamma, extended to
// a in (-1, 0) by one step of the recurrence Gamma(a,x) = (Gamma(a+1,x) -
// x^a e^-x) / a.
inline double upper_inc_gamma(double a, double x) {
  if (!(x > 0.0)) throw std::invalid_argument("upper_inc_gamma: x must be positive");
  if (a <= -1.0 || a == 0.0 || a >= 1.0)
    throw std::invalid_argument("upper_inc_gamma: a must lie in (-1,1) \\ {0}");
  if (a < 0.0) return (upper_inc_gamma(a + 1.0, x) - std::pow(x, a) * std::exp(-x)) / a;
  // gamma(a,x) = x^a e^-x sum_n x^n / (a (a+1) ... (a+n))
  double denom = a, term = 1.0 / a, sum = term;
  for (int n = 1; n <= 500; ++n) {
    denom = a + n;
    term *= x / denom;
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  double lower = std::pow(x, a) * std::exp(-x) * sum;
  return std::tgamma(a) - lower;
}

// Segment intersection by solving the parametric 2x2 system; same
// closed-segment convention as the library (touching counts).
inline bool segments_intersect_param(double ax0, double ay0, double ax1, double ay1,
                                     double bx0, double by0, double bx1, double by1) {
  double dax = ax1 - ax0, day = ay1 - ay0;
  double dbx = bx1 - bx0, dby = by1 - by0;
  double denom = dax * dby - day * dbx;
  double qpx = bx0 - ax0, qpy = by0 - ay0;
  if (std::fabs(denom) > 1e-12) {
    double t = (qpx * dby - qpy * dbx) / denom;
    double u = (qpx * day - qpy * dax) / denom;
    return t >= 0.0 && t <= 1.0 && u >= 0.0 && u <= 1.0;
  }
  // parallel: intersect only if collinear and the 1-D projections overlap
  if (std::fabs(qpx * day - qpy * dax) > 1e-9) return false;
  double len2 = dax * dax + day * day;
  if (len2 < 1e-30) return false;
  double t0 = (qpx * dax + qpy * day) / len2;
  double t1 = t0 + (dbx * dax + dby * day) / len2;
  if (t0 > t1) std::swap(t0, t1);
  return t1 >= 0.0 && t0 <= 1.0;
}

}  // namespace oracle
