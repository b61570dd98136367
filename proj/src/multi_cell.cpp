#include "riscov/multi_cell.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "riscov/channel.hpp"

namespace riscov {

namespace {
constexpr int kEtaGridPoints = 140;
constexpr int kKernelGridPoints = 40;
constexpr int kProductTailPoints = 220;

double clamped_acos(double num, double denom) {
  if (denom < 1e-300) return num < 0.0 ? kPi : 0.0;
  double u = num / denom;
  if (u <= -1.0) return kPi;
  if (u >= 1.0) return 0.0;
  return std::acos(u);
}
}  // namespace

MultiCellAnalysis::MultiCellAnalysis(const SystemParams& p, const QuadSpec& q)
    : p_(checked(p)), q_(q) {
  if (p_.is_single_cell())
    throw std::invalid_argument("MultiCellAnalysis requires a multi-cell scenario");
  c_ = p_.los_decay_rate();
  lam_y_ = p_.bs_density();
  outer_ = q_;
  outer_.rel_tol = std::max(q_.rel_tol, 1e-4);
  outer_.abs_tol = std::max(q_.abs_tol, 1e-7);
  g1_ = std::pow(10.0, p_.alpha);
  g2_ = std::pow(10.0, 2.0 * p_.alpha);
  assoc_const_ = std::pow(g1_ * p_.n_ris * p_.n_ris, 1.0 / p_.beta);
  e_hd_ = mean_directional_gain(p_.n_bs, p_.n_ue, p_.psi_bs, p_.psi_ue);
  e_hs_ = mean_directional_gain(p_.n_bs, p_.n_ris, p_.psi_bs, p_.psi_ris);
  e_hr_ = mean_directional_gain(p_.n_ris, p_.n_ue, p_.psi_ris, p_.psi_ue);
  fade_a_ = static_cast<double>(p_.n_bs) * p_.n_ris;
  fade_b_ = static_cast<double>(p_.n_ris) * p_.n_ue;

  if (p_.lambda_r > 0.0) {
    auto f = [&](double r) { return p_.lambda_r * std::exp(-c_ * r) * 2.0 * kPi * r; };
    QuadResult m = c_ > 0.0 ? integrate_improper(f, c_, q_)
                            : integrate_1d(f, 0.0, p_.trunc_radius, q_);
    note(m);
    p_r_m_ = -std::expm1(-m.value);
  }
  has_ris_ = p_.lambda_r > 0.0 && p_r_m_ > 0.0;

  {
    auto f = [&](double xi) { return lam_y_ * std::exp(-c_ * xi) * 2.0 * kPi * xi; };
    QuadResult m = c_ > 0.0 ? integrate_improper(f, c_, q_)
                            : integrate_1d(f, 0.0, p_.trunc_radius, q_);
    note(m);
    m_y_inf_ = m.value;
    p_l_ = -std::expm1(-m_y_inf_);
  }

  build_product_tail();
  if (has_ris_) {
    build_eta0_table();
    build_kernels();
  }
}

void MultiCellAnalysis::note(const QuadResult& r) const {
  if (!r.converged) converged_.store(false, std::memory_order_relaxed);
}

double MultiCellAnalysis::upper_radial() const {
  return c_ > 0.0 ? q_.truncation_factor / c_ : p_.trunc_radius;
}

double MultiCellAnalysis::p_los(double d) const {
  if (!(d >= 0.0)) throw std::domain_error("p_los: distance must be nonnegative");
  return std::exp(-c_ * d);
}

MultiCellAnalysis::BsDensities MultiCellAnalysis::bs_densities(double xi) const {
  if (!(xi >= 0.0)) throw std::domain_error("bs_densities: xi must be nonnegative");
  double pl = p_los(xi);
  return {lam_y_ * pl, lam_y_ * (1.0 - pl) * p_r_m_, lam_y_ * (1.0 - pl) * (1.0 - p_r_m_)};
}

ExistsProbs MultiCellAnalysis::exists_probs() const {
  ExistsProbs e;
  e.p_los_bs = p_l_;
  // Mean count of reflective NLoS BSs over the plane diverges whenever the
  // thinned density has a positive limit, so the existence probability is 1.
  if (c_ > 0.0 && lam_y_ * p_r_m_ > 0.0) {
    e.p_nlos_reflective = 1.0;
    e.divergent_mean_count = true;
  } else {
    e.p_nlos_reflective = 0.0;
    e.divergent_mean_count = false;
  }
  return e;
}

double MultiCellAnalysis::mean_ris_count(double r) const {
  if (!(r > 0.0)) return 0.0;
  if (c_ > 0.0) {
    double cr = c_ * r;
    return 2.0 * kPi * p_.lambda_r * (1.0 - std::exp(-cr) * (1.0 + cr)) / (c_ * c_);
  }
  double rr = std::min(r, p_.trunc_radius);
  return kPi * p_.lambda_r * rr * rr;
}

double MultiCellAnalysis::mean_bs_count(double x) const {
  if (!(x > 0.0)) return 0.0;
  if (c_ > 0.0) {
    double cx = c_ * x;
    return 2.0 * kPi * lam_y_ * (1.0 - std::exp(-cx) * (1.0 + cx)) / (c_ * c_);
  }
  double xx = std::min(x, p_.trunc_radius);
  return kPi * lam_y_ * xx * xx;
}

double MultiCellAnalysis::nearest_los_bs_pdf(double x) const {
  if (!(x > 0.0)) return 0.0;
  return lam_y_ * std::exp(-c_ * x) * 2.0 * kPi * x * std::exp(-mean_bs_count(x));
}

double MultiCellAnalysis::nearest_los_ris_pdf(double r) const {
  if (!(r > 0.0)) return 0.0;
  if (c_ == 0.0 && r > p_.trunc_radius) return 0.0;
  return p_.lambda_r * std::exp(-c_ * r) * 2.0 * kPi * r * std::exp(-mean_ris_count(r));
}

double MultiCellAnalysis::xi0_tail(double y) const {
  return std::exp(-mean_bs_count(y)) - std::exp(-m_y_inf_);
}

double MultiCellAnalysis::eta0_cond_cdf(double x, double r0) const {
  if (!(x > 0.0) || !(r0 > 0.0)) return 0.0;
  double half = x / r0;
  double lo = std::max(0.0, r0 - half);
  double hi = r0 + half;
  if (c_ == 0.0) hi = std::min(hi, p_.trunc_radius);
  if (!(hi > lo)) return 0.0;
  double r3 = 2.0 * r0 * r0 * r0;
  auto f = [&](double xi) {
    double num = r0 * r0 * (r0 * r0 + xi * xi) - x * x;
    double th = clamped_acos(num, r3 * xi);
    double thinned = lam_y_ * (1.0 - std::exp(-c_ * xi)) * p_r_m_;
    return 2.0 * th * thinned * xi;
  };
  QuadResult m = integrate_1d(f, lo, hi, q_);
  note(m);
  return -std::expm1(-m.value);
}

double MultiCellAnalysis::eta0_cdf_exact(double x) const {
  if (!(x > 0.0) || !has_ris_) return 0.0;
  auto f = [&](double r) { return eta0_cond_cdf(x, r) * nearest_los_ris_pdf(r); };
  QuadResult m = c_ > 0.0 ? integrate_improper(f, c_, q_)
                          : integrate_1d(f, 0.0, p_.trunc_radius, q_);
  note(m);
  return m.value;
}

void MultiCellAnalysis::build_eta0_table() {
  // Characteristic scales of the nearest LoS RIS and the nearest reflective BS.
  auto solve_scale = [](auto&& count, double target, double hi_cap) {
    double lo = 1e-3, hi = 1e-3;
    while (count(hi) < target && hi < hi_cap) hi *= 2.0;
    for (int i = 0; i < 80; ++i) {
      double mid = 0.5 * (lo + hi);
      (count(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  double cap = std::max(upper_radial(), 10.0);
  double r_scale = solve_scale([&](double r) { return mean_ris_count(r); }, std::log(2.0), cap);
  double s_scale = solve_scale(
      [&](double s) {
        QuadResult m = integrate_1d(
            [&](double xi) {
              return lam_y_ * (1.0 - std::exp(-c_ * xi)) * p_r_m_ * 2.0 * kPi * xi;
            },
            0.0, s, q_);
        return m.value;
      },
      1.0, 100.0 * cap);

  double x0 = r_scale * s_scale;
  double x_lo = x0 * 1e-4, x_hi = x0 * 30.0;
  for (int i = 0; i < 60 && eta0_cdf_exact(x_hi) < p_r_m_ * (1.0 - 1e-6); ++i) x_hi *= 2.0;
  double floor = std::max(1e-10, 1e-7 * p_r_m_);
  for (int i = 0; i < 60 && eta0_cdf_exact(x_lo) > floor; ++i) x_lo *= 0.25;

  auto grid = log_spaced(x_lo, x_hi, kEtaGridPoints);
  std::vector<double> lx(grid.size()), cdf(grid.size());
  double prev = 0.0;
  for (size_t i = 0; i < grid.size(); ++i) {
    prev = std::max(prev, eta0_cdf_exact(grid[i]));
    lx[i] = std::log(grid[i]);
    cdf[i] = prev;
  }
  eta0_x_lo_ = x_lo;
  eta0_x_hi_ = x_hi;
  eta0_cdf_tab_.x = lx;
  eta0_cdf_tab_.y = cdf;
  eta0_cdf_tab_.build();

  // dF/dx by central differences on the log-spaced grid
  std::vector<double> pdf(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) {
    size_t a = i == 0 ? 0 : i - 1;
    size_t b = i + 1 == grid.size() ? i : i + 1;
    pdf[i] = std::max(0.0, (cdf[b] - cdf[a]) / (grid[b] - grid[a]));
  }
  eta0_pdf_tab_.x = lx;
  eta0_pdf_tab_.y = pdf;
  eta0_pdf_tab_.build();
}

double MultiCellAnalysis::eta0_cdf(double x) const {
  if (!(x >= 0.0)) throw std::domain_error("eta0_cdf: x must be nonnegative");
  if (!has_ris_ || x <= 0.0) return 0.0;
  if (x >= eta0_x_hi_) return eta0_cdf_tab_.y.back();
  if (x < eta0_x_lo_) {
    double t = x / eta0_x_lo_;
    return eta0_cdf_tab_.y.front() * t * t;
  }
  return eta0_cdf_tab_.eval(std::log(x));
}

double MultiCellAnalysis::served_direct_density(double x) const {
  if (!(x > 0.0)) return 0.0;
  return nearest_los_bs_pdf(x) * (1.0 - eta0_cdf(assoc_const_ * x));
}

double MultiCellAnalysis::served_reflected_density(double x) const {
  if (!has_ris_ || !(x >= eta0_x_lo_) || !(x <= eta0_x_hi_)) return 0.0;
  double dcdf = eta0_pdf_tab_.eval(std::log(x));
  return dcdf * (xi0_tail(x / assoc_const_) + 1.0 - p_l_);
}

MultiCellAnalysis::AssocProbs MultiCellAnalysis::assoc_probs() const {
  // P_AI's first integral is int F(A xi) f_xi0 = int f_xi0 - int (1-F(A xi)) f_xi0,
  // evaluated through the complement so that the partition with P_Ad is exact
  // and the blind ratio carries no dependence on the association threshold.
  auto fd = [&](double xi) {
    return (1.0 - eta0_cdf(assoc_const_ * xi)) * nearest_los_bs_pdf(xi);
  };
  QuadResult ad = c_ > 0.0 ? integrate_improper(fd, c_, outer_)
                           : integrate_1d(fd, 0.0, p_.trunc_radius, outer_);
  note(ad);
  auto fl = [&](double xi) { return nearest_los_bs_pdf(xi); };
  QuadResult pl = c_ > 0.0 ? integrate_improper(fl, c_, outer_)
                           : integrate_1d(fl, 0.0, p_.trunc_radius, outer_);
  note(pl);
  AssocProbs out;
  out.direct = ad.value;
  out.reflected = (pl.value - ad.value) + (1.0 - p_l_) * p_r_m_;
  out.blind = 1.0 - out.direct - out.reflected;
  return out;
}

std::pair<double, double> MultiCellAnalysis::served_masses() const {
  auto fd = [&](double x) { return served_direct_density(x); };
  QuadResult md = c_ > 0.0 ? integrate_improper(fd, c_, outer_)
                           : integrate_1d(fd, 0.0, p_.trunc_radius, outer_);
  note(md);
  double mr = 0.0;
  if (has_ris_) {
    auto fr = [&](double w) {
      double x = std::exp(w);
      return served_reflected_density(x) * x;
    };
    QuadResult r = integrate_1d(fr, std::log(eta0_x_lo_), std::log(eta0_x_hi_), outer_);
    note(r);
    mr = r.value;
  }
  return {md.value, mr};
}

double MultiCellAnalysis::q1_raw(double lower) const {
  double hi = upper_radial() * 1.5;
  if (!(lower < hi)) return 0.0;
  QuadSpec tight = q_;
  tight.rel_tol = std::min(q_.rel_tol * 1e-2, 1e-8);
  auto f = [&](double xi) { return std::pow(xi, 1.0 - p_.beta) * std::exp(-c_ * xi); };
  QuadResult r = integrate_1d(f, std::max(lower, 1e-12), hi, tight);
  note(r);
  return r.value;
}

double MultiCellAnalysis::reflective_kernel(double xi, bool with_ris_los) const {
  const double eps = p_.eps_int;
  const double beta = p_.beta;
  const double upper = upper_radial();
  auto inner = [&](double th) {
    double cth = std::cos(th);
    auto g = [&](double r) {
      double s2 = xi * xi + r * r - 2.0 * xi * r * cth;
      double s = std::sqrt(std::max(s2, 0.0));
      double num = nearest_los_ris_pdf(r);
      if (with_ris_los) num *= std::exp(-c_ * r);
      return num / (std::pow(std::max(r, eps), beta) * std::pow(std::max(s, eps), beta));
    };
    // split around the closest-approach radius so the adaptive rule cannot
    // step over the clamped peak
    double r_star = xi * cth;
    double pieces[4] = {0.0, 0.0, 0.0, upper};
    int n = 2;
    if (r_star > 0.0 && r_star < upper) {
      double w = std::max(4.0 * eps, 0.02 * r_star);
      pieces[1] = std::max(0.0, r_star - w);
      pieces[2] = std::min(upper, r_star + w);
      pieces[3] = upper;
      n = 4;
    }
    double total = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
      if (!(pieces[i + 1] > pieces[i])) continue;
      QuadResult r = integrate_1d(g, pieces[i], pieces[i + 1], q_);
      note(r);
      total += r.value;
    }
    return total;
  };
  QuadResult outer = integrate_1d(inner, 0.0, kPi, q_);
  note(outer);
  return 2.0 * outer.value;
}

void MultiCellAnalysis::build_kernels() {
  double j_lo = std::max(0.25, 0.5 * p_.eps_int);
  j_hi_ = std::max(c_ > 0.0 ? 12.0 / c_ : p_.trunc_radius, 40.0 * std::exp(eta0_cdf_tab_.x.front()));
  j_hi_ = std::max(j_hi_, 4.0 * j_lo);
  auto grid = log_spaced(j_lo, j_hi_, kKernelGridPoints);
  std::vector<double> lx(grid.size()), j2(grid.size()), j4(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) {
    lx[i] = std::log(grid[i]);
    j2[i] = reflective_kernel(grid[i], true);
    j4[i] = reflective_kernel(grid[i], false);
  }
  j2_tab_.x = lx;
  j2_tab_.y = j2;
  j2_tab_.build();
  j4_tab_.x = lx;
  j4_tab_.y = j4;
  j4_tab_.build();
  j2_tail_coeff_ = j2.back() * std::pow(j_hi_, p_.beta);
  j4_tail_coeff_ = j4.back() * std::pow(j_hi_, p_.beta);

  // cumulative tails W(x) = int_x^inf (1 - P_LoS(xi)) xi J(xi) dxi, with the
  // analytic xi^(2-beta)/(beta-2) continuation beyond the grid
  auto build_w = [&](const CubicTable& j, double tail_coeff) {
    std::vector<double> w(grid.size());
    w.back() = tail_coeff * std::pow(j_hi_, 2.0 - p_.beta) / (p_.beta - 2.0);
    for (size_t i = grid.size() - 1; i-- > 0;) {
      auto f = [&](double xi) {
        return (1.0 - std::exp(-c_ * xi)) * xi * j.eval(std::log(xi));
      };
      QuadResult seg = integrate_1d(f, grid[i], grid[i + 1], q_);
      note(seg);
      w[i] = w[i + 1] + seg.value;
    }
    CubicTable t;
    t.x = lx;
    t.y = w;
    t.build();
    return t;
  };
  w2_tab_ = build_w(j2_tab_, j2_tail_coeff_);
  w4_tab_ = build_w(j4_tab_, j4_tail_coeff_);
}

double MultiCellAnalysis::w_tail(const CubicTable& w, double tail_coeff, double x) const {
  if (w.x.empty()) return 0.0;
  if (x >= j_hi_) return tail_coeff * std::pow(x, 2.0 - p_.beta) / (p_.beta - 2.0);
  if (x <= std::exp(w.x.front())) return w.y.front();
  return w.eval(std::log(x));
}

std::pair<double, double> MultiCellAnalysis::interference_moments_direct(double xi0) const {
  if (!(xi0 > 0.0)) throw std::domain_error("interference moments need a positive boundary");
  double q1 = p_.p0_w * e_hd_ * g1_ * 2.0 * kPi * lam_y_ * q1_raw(xi0);
  double q2 = has_ris_
                  ? p_.p0_w * e_hs_ * e_hr_ * g2_ * lam_y_ * w_tail(w2_tab_, j2_tail_coeff_, xi0)
                  : 0.0;
  return {q1, q2};
}

std::pair<double, double> MultiCellAnalysis::interference_moments_reflected(double eta0) const {
  if (!(eta0 > 0.0)) throw std::domain_error("interference moments need a positive boundary");
  double lower = eta0 / assoc_const_;
  double q3 = p_.p0_w * e_hd_ * g1_ * 2.0 * kPi * lam_y_ * q1_raw(lower);
  double q4 = has_ris_ ? p_.p0_w * e_hs_ * e_hr_ * g2_ * lam_y_ * p_r_m_ *
                             w_tail(w4_tab_, j4_tail_coeff_, lower)
                       : 0.0;
  return {q3, q4};
}

void MultiCellAnalysis::build_product_tail() {
  gtail_lo_ = 1e-12;
  gtail_hi_ = 700.0;
  auto grid = log_spaced(gtail_lo_, gtail_hi_, kProductTailPoints);
  auto pdf = [&](double u) { return product_exp_pdf(u, 1.0, 1.0, q_); };
  // mass below the grid, integrated with u = t^2 to absorb the log endpoint
  QuadResult head = integrate_1d(
      [&](double t) { return 2.0 * t * pdf(t * t); }, 0.0, std::sqrt(gtail_lo_), q_);
  note(head);
  std::vector<double> lx(grid.size()), g(grid.size());
  double acc = head.value;
  lx[0] = std::log(grid[0]);
  g[0] = std::max(0.0, 1.0 - acc);
  for (size_t i = 1; i < grid.size(); ++i) {
    QuadResult seg = integrate_1d(pdf, grid[i - 1], grid[i], q_);
    note(seg);
    acc += seg.value;
    lx[i] = std::log(grid[i]);
    g[i] = std::max(0.0, 1.0 - acc);
  }
  gtail_tab_.x = lx;
  gtail_tab_.y = g;
  gtail_tab_.build();
}

double MultiCellAnalysis::product_tail(double threshold) const {
  if (!(threshold > 0.0)) return 1.0;
  double u = threshold / (fade_a_ * fade_b_);
  if (u <= gtail_lo_) return gtail_tab_.y.front();
  if (u >= gtail_hi_) return 0.0;
  return gtail_tab_.eval(std::log(u));
}

double MultiCellAnalysis::coverage(double gamma0) const {
  if (!(gamma0 > 0.0)) throw std::domain_error("coverage: gamma0 must be positive");
  const double denom_d = static_cast<double>(p_.n_bs) * p_.n_ue * p_.p0_w * g1_;
  auto fd = [&](double x) {
    double ft = served_direct_density(x);
    if (!(ft > 0.0)) return 0.0;
    auto [q1, q2] = interference_moments_direct(x);
    double arg = gamma0 * (p_.noise_w + q1 + q2) * std::pow(x, p_.beta) / denom_d;
    return std::exp(-arg) * ft;
  };
  QuadResult direct = c_ > 0.0 ? integrate_improper(fd, c_, outer_)
                               : integrate_1d(fd, 0.0, p_.trunc_radius, outer_);
  note(direct);

  double reflected = 0.0;
  if (has_ris_) {
    auto fr = [&](double w) {
      double x = std::exp(w);
      double ft = served_reflected_density(x);
      if (!(ft > 0.0)) return 0.0;
      auto [q3, q4] = interference_moments_reflected(x);
      double thr = gamma0 * (p_.noise_w + q3 + q4) * std::pow(x, p_.beta) / (p_.p0_w * g2_);
      return product_tail(thr) * ft * x;
    };
    QuadResult r = integrate_1d(fr, std::log(eta0_x_lo_), std::log(eta0_x_hi_), outer_);
    note(r);
    reflected = r.value;
  }
  return direct.value + reflected;
}

double MultiCellAnalysis::rate() const {
  const double ln2 = std::log(2.0);
  auto cov_t = [&](double t) {
    double g = std::expm1(t * ln2 / p_.bw_hz);
    return g > 0.0 ? coverage(g) : assoc_probs().direct + assoc_probs().reflected;
  };
  double t_max = p_.bw_hz;
  for (int i = 0; i < 60 && cov_t(t_max) > q_.abs_tol; ++i) t_max *= 2.0;
  QuadResult r = integrate_1d(cov_t, 0.0, t_max, outer_);
  note(r);
  return r.value;
}

double MultiCellAnalysis::blind_ratio() const {
  AssocProbs a = assoc_probs();
  return a.blind;
}

}  // namespace riscov
