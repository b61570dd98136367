#pragma once

#include <atomic>
#include <utility>
#include <vector>

#include "riscov/interp.hpp"
#include "riscov/params.hpp"
#include "riscov/quad.hpp"

namespace riscov {

struct ExistsProbs {
  double p_los_bs = 0.0;          // at least one LoS BS
  double p_nlos_reflective = 0.0; // at least one NLoS BS with a reflective link
  // The mean count behind p_nlos_reflective grows like lambda_Y*P_R^m*2*pi*xi
  // at large xi, so the integral is formally infinite whenever that product is
  // positive; the probability is then exactly 1 and this flag is set.
  bool divergent_mean_count = false;
};

/// Closed-form multi-cell performance for the typical user at the origin.
/// Construction precomputes the eta0 distribution, the interference-moment
/// kernels and the product-fading tail on shared read-only grids; all methods
/// are const afterwards and safe to call concurrently.
class MultiCellAnalysis {
 public:
  explicit MultiCellAnalysis(const SystemParams& p, const QuadSpec& q = {});

  struct BsDensities {
    double los = 0.0;
    double nlos_reflective = 0.0;
    double idle = 0.0;
  };
  BsDensities bs_densities(double xi) const;

  double p_los(double d) const;
  double multi_reflection_prob() const { return p_r_m_; }
  ExistsProbs exists_probs() const;

  /// Density of the nearest-LoS-BS distance (sub-density with mass P_L).
  double nearest_los_bs_pdf(double x) const;

  /// Sub-CDF of the minimum reflective path product eta0 (saturates at P_R^m);
  /// evaluated on the precomputed monotone grid.
  double eta0_cdf(double x) const;

  struct AssocProbs {
    double direct = 0.0;
    double reflected = 0.0;
    double blind = 0.0;
  };
  AssocProbs assoc_probs() const;

  /// Serving-distance sub-densities given the association type.
  double served_direct_density(double x) const;     // over xi0
  double served_reflected_density(double x) const;  // over eta0
  std::pair<double, double> served_masses() const;

  /// (Q1, Q2) for a direct-served user at serving distance xi0.
  std::pair<double, double> interference_moments_direct(double xi0) const;
  /// (Q3, Q4) for a reflection-served user at path product eta0.
  std::pair<double, double> interference_moments_reflected(double eta0) const;

  double coverage(double gamma0) const;
  double rate() const;  // bit/s
  double blind_ratio() const;

  /// Association threshold (10^alpha N_R^2)^(1/beta): direct association wins
  /// iff eta0 > assoc_const * xi0.
  double assoc_const() const { return assoc_const_; }

  bool converged() const { return converged_.load(std::memory_order_relaxed); }
  const SystemParams& params() const { return p_; }

 private:
  double mean_ris_count(double r) const;  // LoS-thinned RIS count in a disk
  double mean_bs_count(double x) const;   // LoS-thinned BS count in a disk
  double nearest_los_ris_pdf(double r) const;
  double eta0_cdf_exact(double x) const;
  double eta0_cond_cdf(double x, double r0) const;
  double xi0_tail(double y) const;  // P(xi0 > y and a LoS BS exists)
  double q1_raw(double lower) const;
  double reflective_kernel(double xi, bool with_ris_los) const;  // J2 / J4
  double w_tail(const CubicTable& w, double tail_coeff, double x) const;
  double upper_radial() const;  // effective infinity for radial integrals
  void note(const QuadResult& r) const;
  void build_eta0_table();
  void build_kernels();
  void build_product_tail();
  double product_tail(double threshold) const;  // P(h_s h_r > threshold)

  SystemParams p_;
  QuadSpec q_;
  QuadSpec outer_;  // for averages over table-backed integrands
  double c_ = 0.0;
  double lam_y_ = 0.0;
  double g1_ = 0.0, g2_ = 0.0;
  double assoc_const_ = 0.0;
  double e_hd_ = 0.0, e_hs_ = 0.0, e_hr_ = 0.0;  // misaligned-link fading means
  double fade_a_ = 0.0, fade_b_ = 0.0;           // aligned reflected fading means
  double p_r_m_ = 0.0;
  double p_l_ = 0.0;
  double m_y_inf_ = 0.0;  // saturated mean LoS-BS count
  bool has_ris_ = false;

  CubicTable eta0_cdf_tab_;    // over log x
  CubicTable eta0_pdf_tab_;    // central differences of the above
  double eta0_x_lo_ = 0.0, eta0_x_hi_ = 0.0;
  CubicTable j2_tab_, j4_tab_;  // reflective interference kernels over log xi
  CubicTable w2_tab_, w4_tab_;  // cumulative tails of the kernels
  double j_hi_ = 0.0, j2_tail_coeff_ = 0.0, j4_tail_coeff_ = 0.0;
  CubicTable gtail_tab_;  // unit product-exponential tail over log u
  double gtail_lo_ = 0.0, gtail_hi_ = 0.0;

  mutable std::atomic<bool> converged_{true};
};

}  // namespace riscov
