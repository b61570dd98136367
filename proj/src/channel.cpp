#include "riscov/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace riscov {

LobeGains lobe_gains(int n_elements) {
  if (n_elements < 1) throw std::invalid_argument("lobe_gains: element count must be >= 1");
  double n = static_cast<double>(n_elements);
  double s = std::sin(3.0 * kPi / (2.0 * std::sqrt(n)));
  return {n, 1.0 / (s * s)};
}

DirectionalGain sample_directional_gain(int nt, int nr, double psit, double psir, Rng& rng) {
  LobeGains t = lobe_gains(nt);
  LobeGains r = lobe_gains(nr);
  bool tm = rng.uniform() < psit / (2.0 * kPi);
  bool rm = rng.uniform() < psir / (2.0 * kPi);
  double v = (tm ? t.main_lobe : t.side_lobe) * (rm ? r.main_lobe : r.side_lobe);
  return {v, tm, rm};
}

double mean_directional_gain(int nt, int nr, double psit, double psir) {
  LobeGains t = lobe_gains(nt);
  LobeGains r = lobe_gains(nr);
  double pt = psit / (2.0 * kPi);
  double pr = psir / (2.0 * kPi);
  return pt * pr * t.main_lobe * r.main_lobe + pt * (1.0 - pr) * t.main_lobe * r.side_lobe +
         (1.0 - pt) * pr * t.side_lobe * r.main_lobe +
         (1.0 - pt) * (1.0 - pr) * t.side_lobe * r.side_lobe;
}

double large_scale_gain(double d, double alpha, double beta) {
  if (!(d > 0.0)) throw std::domain_error("large_scale_gain: distance must be positive");
  return std::pow(10.0, alpha) * std::pow(d, -beta);
}

double sample_small_scale(double mean_gain, Rng& rng) {
  if (!(mean_gain > 0.0)) throw std::invalid_argument("sample_small_scale: mean must be positive");
  return rng.exponential(mean_gain);
}

double sinr_direct_single(double xi, double h, const SystemParams& p) {
  if (!(xi > 0.0)) throw std::domain_error("sinr_direct_single: distance must be positive");
  return std::pow(10.0, p.alpha) * p.p0_w * h / (std::pow(xi, p.beta) * p.noise_w);
}

double sinr_reflect_single(double s, double r, double hs, double hr, const SystemParams& p) {
  if (!(s > 0.0) || !(r > 0.0))
    throw std::domain_error("sinr_reflect_single: distances must be positive");
  return std::pow(10.0, 2.0 * p.alpha) * p.p0_w * hs * hr /
         (std::pow(s * r, p.beta) * p.noise_w);
}

double sinr_multi(const LinkBudget& target, const std::vector<LinkBudget>& interferers,
                  double noise_w) {
  if (!(noise_w > 0.0)) throw std::domain_error("sinr_multi: noise must be positive");
  double denom = noise_w;
  for (const LinkBudget& i : interferers) denom += i.power_w;
  return target.power_w / denom;
}

}  // namespace riscov
