#pragma once

#include <vector>

#include "riscov/params.hpp"
#include "riscov/rng.hpp"

namespace riscov {

/// Two-level sectored antenna pattern: main lobe M = N, side lobe
/// m = 1/sin^2(3*pi/(2*sqrt(N))).
struct LobeGains {
  double main_lobe = 1.0;
  double side_lobe = 1.0;
};
LobeGains lobe_gains(int n_elements);

/// One draw of the transmitter/receiver lobe pair.
struct DirectionalGain {
  double value = 1.0;
  bool tx_main = false;
  bool rx_main = false;
};

/// Four-point lobe-pair distribution: each side lands in its main lobe with
/// probability psi/(2*pi), independently.
DirectionalGain sample_directional_gain(int nt, int nr, double psit, double psir, Rng& rng);

/// Exact expectation of the four-point distribution above.
double mean_directional_gain(int nt, int nr, double psit, double psir);

/// g = 10^alpha * d^-beta. Throws std::domain_error for d <= 0.
double large_scale_gain(double d, double alpha, double beta);

/// Exponential small-scale gain with the given mean.
double sample_small_scale(double mean_gain, Rng& rng);

double sinr_direct_single(double xi, double h, const SystemParams& p);
double sinr_reflect_single(double s, double r, double hs, double hr, const SystemParams& p);

/// Received-power bookkeeping for one link: power_w = large_scale * P0 * small_scale
/// (small_scale is h for a direct link, hs*hr for a reflected one).
struct LinkBudget {
  double large_scale = 0.0;
  double small_scale = 0.0;
  double power_w = 0.0;
  static LinkBudget make(double g, double p0_w, double h) { return {g, h, g * p0_w * h}; }
};

/// Target power over noise plus the sum of interferer powers.
double sinr_multi(const LinkBudget& target, const std::vector<LinkBudget>& interferers,
                  double noise_w);

}  // namespace riscov
