#pragma once

#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace riscov {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kBoltzmann = 1.380649e-23;  // J/K
inline constexpr double kNoiseTempK = 290.0;

/// Intercept exponent of the large-scale gain model g = 10^alpha * d^-beta,
/// derived from the carrier frequency.
double derive_alpha(double fc_hz);

/// Beamwidth default for an N-element array: 2*pi/sqrt(N).
double default_beamwidth(int n_elements);

/// Thermal noise power k*T*W at T = 290 K.
double thermal_noise_w(double bw_hz);

struct SingleCell {
  double radius_m = 100.0;
};

struct MultiCell {
  double lambda_y = 7.957747154594767e-6;  // BS density, 1/m^2 (r_v = 200 m)
};

using Scenario = std::variant<SingleCell, MultiCell>;

/// All physical and statistical constants of one network configuration.
/// Immutable after validation; safe to share across threads.
struct SystemParams {
  double fc_hz = 28e9;              // carrier frequency
  double alpha = -5.694316062684438;  // derived from fc_hz unless overridden
  double beta = 2.2;                // path-loss exponent (> 2)
  double lambda_b = 1.59e-3;        // blockage center density, 1/m^2
  double len_min = 10.0;            // blockage length bounds, m
  double len_max = 20.0;
  double lambda_r = 9.55e-4;        // RIS density, 1/m^2
  double lambda_u = 3.18e-3;        // user density, 1/m^2
  int n_bs = 64;                    // antennas / elements per node
  int n_ris = 100;
  int n_ue = 4;
  double psi_bs = 0.7853981633974483;   // main-lobe beamwidths, rad
  double psi_ris = 0.6283185307179586;
  double psi_ue = 3.141592653589793;
  double p0_w = 1.0;                // per-user transmit power
  double noise_w = 8.00776420e-13;  // k*T*W at 200 MHz
  double bw_hz = 200e6;             // per-user bandwidth
  Scenario scenario = SingleCell{};

  // numerics / simulation knobs
  double eps_int = 0.5;       // path-leg distance floor, m
  double r_sim = 0.0;         // MC disk radius; 0 = auto max(6/c, 5 r_v)
  double trunc_radius = 0.0;  // improper-integral cutoff when the LoS decay is 0
  bool idle_bs_interfere = false;  // reserved; no effect under this propagation model

  double mean_len() const { return 0.5 * (len_min + len_max); }
  /// LoS decay rate c = 2 lambda_b E[L] / pi, 1/m.
  double los_decay_rate() const { return 2.0 * lambda_b * mean_len() / kPi; }
  bool is_single_cell() const { return std::holds_alternative<SingleCell>(scenario); }
  double cell_radius() const { return std::get<SingleCell>(scenario).radius_m; }
  double bs_density() const { return std::get<MultiCell>(scenario).lambda_y; }
  /// r_v = sqrt(1/(lambda_Y pi)) in multi-cell; the configured R in single-cell.
  double virtual_radius() const;
  /// Disk radius used by the multi-cell Monte Carlo.
  double sim_radius() const;
};

/// Returns one message per violated invariant; empty means valid.
std::vector<std::string> validate(const SystemParams& p);

/// validate() or throw std::invalid_argument with all messages joined.
const SystemParams& checked(const SystemParams& p);

/// Config I/O. Every field is optional on input; alpha, psi_* and noise_w are
/// recomputed from fc_hz / element counts / bandwidth unless given explicitly.
SystemParams params_from_json(const nlohmann::json& j);
nlohmann::json params_to_json(const SystemParams& p);

}  // namespace riscov
