#include "riscov/single_cell.hpp"

#include <cmath>
#include <stdexcept>

#include "riscov/interp.hpp"

namespace riscov {

namespace {
constexpr int kEtaTablePoints = 96;
}

SingleCellAnalysis::SingleCellAnalysis(const SystemParams& p, const QuadSpec& q)
    : p_(checked(p)), q_(q) {
  if (!p_.is_single_cell())
    throw std::invalid_argument("SingleCellAnalysis requires a single-cell scenario");
  c_ = p_.los_decay_rate();
  R_ = p_.cell_radius();
  g1_ = std::pow(10.0, p_.alpha);
  g2_ = std::pow(10.0, 2.0 * p_.alpha);
  // Outer averages integrate table-backed integrands whose interpolation
  // error sits near 1e-4; a tighter outer tolerance would only chase that
  // noise without improving the result.
  outer_ = q_;
  outer_.rel_tol = std::max(q_.rel_tol, 1e-4);
  outer_.abs_tol = std::max(q_.abs_tol, 1e-7);
}

void SingleCellAnalysis::note(const QuadResult& r) const {
  if (!r.converged) converged_.store(false, std::memory_order_relaxed);
}

double SingleCellAnalysis::p_los(double d) const {
  if (!(d >= 0.0)) throw std::domain_error("p_los: distance must be nonnegative");
  return std::exp(-c_ * d);
}

double SingleCellAnalysis::reflection_prob(double xi) const {
  if (!(xi >= 0.0 && xi <= R_)) throw std::domain_error("reflection_prob: xi outside [0, R]");
  if (p_.lambda_r == 0.0) return 0.0;
  // Mean count of LoS RISs in the cell, in polar coordinates around the user:
  // the cell boundary sits at r(psi) = sqrt(R^2 - xi^2 sin^2 psi) - xi cos psi.
  auto r_edge = [&](double psi) {
    double s2 = xi * std::sin(psi);
    return std::sqrt(std::max(R_ * R_ - s2 * s2, 0.0)) - xi * std::cos(psi);
  };
  auto f = [&](double, double r) { return p_.lambda_r * std::exp(-c_ * r) * r; };
  QuadResult m = integrate_2d(f, 0.0, 2.0 * kPi, [](double) { return 0.0; }, r_edge, q_);
  note(m);
  return -std::expm1(-m.value);
}

SingleCellAnalysis::AssocProbs SingleCellAnalysis::assoc_probs(double xi) const {
  double pl = p_los(xi);
  double pr = reflection_prob(xi);
  return {pl, (1.0 - pl) * pr, (1.0 - pl) * (1.0 - pr)};
}

double SingleCellAnalysis::theta_max(double s, double xi, double x) const {
  if (!(x > 0.0)) return 0.0;
  double denom = 2.0 * s * s * s * xi;
  double num = s * s * (s * s + xi * xi) - x * x;
  if (denom < 1e-300) return num < 0.0 ? kPi : 0.0;
  double u = num / denom;
  if (u <= -1.0) return kPi;
  if (u >= 1.0) return 0.0;
  return std::acos(u);
}

double SingleCellAnalysis::eta_mass(double x, double xi) const {
  if (!(x > 0.0) || p_.lambda_r == 0.0) return 0.0;
  // Integrate the LoS-thinned RIS density over {(s, theta): s * r(s, theta) <= x},
  // theta-window doubled for the +-theta symmetry. The support in s is
  // {s : s|s - xi| <= x}, split into up to two bands.
  auto f = [&](double s, double th) {
    double r = std::sqrt(std::max(s * s + xi * xi - 2.0 * s * xi * std::cos(th), 0.0));
    return 2.0 * p_.lambda_r * std::exp(-c_ * r) * s;
  };
  auto band = [&](double lo, double hi) {
    lo = std::max(lo, 0.0);
    hi = std::min(hi, R_);
    if (!(hi > lo)) return 0.0;
    QuadResult m = integrate_2d(f, lo, hi, [](double) { return 0.0; },
                                [&](double s) { return theta_max(s, xi, x); }, q_);
    note(m);
    return m.value;
  };
  double s_outer = 0.5 * (xi + std::sqrt(xi * xi + 4.0 * x));
  if (x < 0.25 * xi * xi) {
    double d = std::sqrt(xi * xi - 4.0 * x);
    return band(0.0, 0.5 * (xi - d)) + band(0.5 * (xi + d), s_outer);
  }
  return band(0.0, s_outer);
}

double SingleCellAnalysis::eta_cdf(double x, double xi) const {
  if (!(xi >= 0.0 && xi <= R_)) throw std::domain_error("eta_cdf: xi outside [0, R]");
  if (!(x > 0.0)) return 0.0;
  return -std::expm1(-eta_mass(x, xi));
}

double SingleCellAnalysis::EtaProfile::eval_cov(double scale) const {
  if (!(scale > 0.0)) return 0.0;
  if (scale >= s_hi) return cov.y.back();
  if (scale < s_lo) return cov.y.front() * std::pow(scale / s_lo, p_lo);
  return std::max(0.0, cov.eval(std::log(scale)));
}

const SingleCellAnalysis::EtaProfile& SingleCellAnalysis::table_for(double xi) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = tables_.find(xi);
  if (it != tables_.end()) return *it->second;

  // stage 1: the eta sub-CDF on a log grid
  const double x_hi = R_ * (R_ + xi) * (1.0 + 1e-9);
  const double x_lo = x_hi * 1e-7;
  auto x_grid = log_spaced(x_lo, x_hi, kEtaTablePoints);
  CubicTable fx;
  fx.x.reserve(x_grid.size());
  fx.y.reserve(x_grid.size());
  double prev = 0.0;
  for (double x : x_grid) {
    prev = std::max(prev, -std::expm1(-eta_mass(x, xi)));
    fx.x.push_back(std::log(x));
    fx.y.push_back(prev);
  }
  fx.build();
  const double sat = fx.y.back();
  const double f0 = fx.y.front();
  auto f_eval = [&](double x) {
    if (!(x > 0.0)) return 0.0;
    if (x >= x_hi) return sat;
    if (x < x_lo) return f0 * (x / x_lo) * (x / x_lo);
    return fx.eval(std::log(x));
  };

  // stage 2: G(m) = E_v[F((m v)^(1/beta))], v ~ Exp(1)
  const double T = q_.truncation_factor;
  const double inv_beta = 1.0 / p_.beta;
  const double xb_lo = std::pow(x_lo, p_.beta), xb_hi = std::pow(x_hi, p_.beta);
  auto m_grid = log_spaced(xb_lo * 1e-2, xb_hi * 1e2, 150);
  CubicTable gm;
  gm.x.reserve(m_grid.size());
  gm.y.reserve(m_grid.size());
  for (double m : m_grid) {
    QuadResult r = integrate_1d(
        [&](double v) { return f_eval(std::pow(m * v, inv_beta)) * std::exp(-v); }, 0.0, T, q_);
    note(r);
    gm.x.push_back(std::log(m));
    gm.y.push_back(std::max(0.0, r.value));
  }
  gm.build();
  double g_plo = 2.0 / p_.beta;
  if (gm.y[0] > 0.0 && gm.y[1] > gm.y[0])
    g_plo = std::log(gm.y[1] / gm.y[0]) / (gm.x[1] - gm.x[0]);
  auto g_eval = [&](double m) {
    if (!(m > 0.0)) return 0.0;
    if (m >= m_grid.back()) return gm.y.back();
    if (m < m_grid.front()) return gm.y.front() * std::pow(m / m_grid.front(), g_plo);
    return std::max(0.0, gm.eval(std::log(m)));
  };

  // stage 3: I(scale) = E_u[G(scale * u)], u ~ Exp(1)
  auto tbl = std::make_unique<EtaProfile>();
  tbl->sat = sat;
  auto s_grid = log_spaced(xb_lo * 1e-3, xb_hi * 1e3, 140);
  tbl->cov.x.reserve(s_grid.size());
  tbl->cov.y.reserve(s_grid.size());
  for (double s : s_grid) {
    QuadResult r =
        integrate_1d([&](double u) { return g_eval(s * u) * std::exp(-u); }, 0.0, T, q_);
    note(r);
    tbl->cov.x.push_back(std::log(s));
    tbl->cov.y.push_back(std::max(0.0, r.value));
  }
  tbl->cov.build();
  tbl->s_lo = s_grid.front();
  tbl->s_hi = s_grid.back();
  tbl->p_lo = 2.0 / p_.beta;
  if (tbl->cov.y[0] > 0.0 && tbl->cov.y[1] > tbl->cov.y[0])
    tbl->p_lo = std::log(tbl->cov.y[1] / tbl->cov.y[0]) / (tbl->cov.x[1] - tbl->cov.x[0]);

  const EtaProfile& ref = *tbl;
  tables_.emplace(xi, std::move(tbl));
  return ref;
}

double SingleCellAnalysis::cond_coverage(double xi, double gamma0) const {
  if (!(xi >= 0.0 && xi <= R_)) throw std::domain_error("cond_coverage: xi outside [0, R]");
  if (!(gamma0 > 0.0)) throw std::domain_error("cond_coverage: gamma0 must be positive");
  double pl = p_los(xi);
  double tau1 = std::pow(xi, p_.beta) * p_.noise_w * gamma0 / (p_.p0_w * g1_);
  double cov = pl * std::exp(-tau1 / (static_cast<double>(p_.n_bs) * p_.n_ue));
  if (p_.lambda_r > 0.0 && pl < 1.0) {
    const double a = static_cast<double>(p_.n_bs) * p_.n_ris;
    const double b = static_cast<double>(p_.n_ris) * p_.n_ue;
    double scale = p_.p0_w * g2_ * a * b / (p_.noise_w * gamma0);
    cov += (1.0 - pl) * table_for(xi).eval_cov(scale);
  }
  return cov;
}

double SingleCellAnalysis::ergodic_coverage(double gamma0) const {
  QuadResult r = integrate_1d(
      [&](double xi) { return cond_coverage(xi, gamma0) * xi; }, 0.0, R_, outer_);
  note(r);
  return 2.0 * r.value / (R_ * R_);
}

double SingleCellAnalysis::achievable_rate() const {
  const double ln2 = std::log(2.0);
  auto rate_at = [&](double xi) {
    auto cov_t = [&](double t) {
      double g = std::expm1(t * ln2 / p_.bw_hz);
      return g > 0.0 ? cond_coverage(xi, g) : 1.0;
    };
    double t_max = p_.bw_hz;
    for (int i = 0; i < 60 && cov_t(t_max) > q_.abs_tol; ++i) t_max *= 2.0;
    QuadResult r = integrate_1d(cov_t, 0.0, t_max, outer_);
    note(r);
    return r.value;
  };
  QuadResult r = integrate_1d([&](double xi) { return rate_at(xi) * xi; }, 0.0, R_, outer_);
  note(r);
  return 2.0 * r.value / (R_ * R_);
}

double SingleCellAnalysis::blind_ratio() const {
  QuadResult r = integrate_1d(
      [&](double xi) {
        double pl = p_los(xi);
        return (1.0 - pl) * (1.0 - reflection_prob(xi)) * xi;
      },
      0.0, R_, outer_);
  note(r);
  return 2.0 * r.value / (R_ * R_);
}

double SingleCellAnalysis::avg_assoc_direct() const {
  QuadResult r = integrate_1d([&](double xi) { return p_los(xi) * xi; }, 0.0, R_, outer_);
  note(r);
  return 2.0 * r.value / (R_ * R_);
}

double SingleCellAnalysis::avg_assoc_reflected() const {
  QuadResult r = integrate_1d(
      [&](double xi) { return (1.0 - p_los(xi)) * reflection_prob(xi) * xi; }, 0.0, R_, outer_);
  note(r);
  return 2.0 * r.value / (R_ * R_);
}

double SingleCellAnalysis::mean_user_count() const {
  QuadResult r =
      integrate_1d([&](double xi) { return p_.lambda_u * 2.0 * kPi * xi; }, 0.0, R_, q_);
  note(r);
  return r.value;
}

}  // namespace riscov
