#pragma once

#include <cstdint>
#include <vector>

#include "riscov/geom.hpp"
#include "riscov/params.hpp"

namespace riscov {

/// Monte Carlo mean with a 95% confidence half-width.
struct Estimate {
  double mean = 0.0;
  double half_width_95 = 0.0;
  long n_trials = 0;
  long n_effective = 0;  // non-blind trials
};

struct AssociationOutcome {
  enum class Kind { direct, reflected, blind };
  Kind kind = Kind::blind;
  int bs = -1;   // index into scene.bss
  int ris = -1;  // index into scene.ris (reflected only)
  double xi = 0.0;  // user-BS distance
  double s = 0.0;   // BS-RIS distance (reflected only)
  double r = 0.0;   // RIS-user distance (reflected only)
};

/// Applies the association rule to one scene: in a single cell, direct iff the
/// BS link is LoS, otherwise the LoS RIS minimizing s*r, otherwise blind; in
/// multi-cell, the argmax of the time-averaged received powers over LoS BSs
/// and reflective NLoS BSs.
AssociationOutcome associate(const Scene& scene, const Point& user, const SystemParams& p);

Scene sample_single_cell_scene(const SystemParams& p, Rng& rng);
Scene sample_multi_cell_scene(const SystemParams& p, Rng& rng);

struct McResults {
  std::vector<Estimate> coverage;  // one per gamma0 grid point
  Estimate rate;                   // bit/s
  Estimate blind_ratio;
  Estimate p_direct;
  Estimate p_reflected;
  double interference_tail_bound_w = 0.0;  // bound on truncated interference, W
};

/// Runs n_trials independent scenes and derives every metric from the shared
/// per-trial SINR draws (common random numbers across the gamma0 grid).
/// Deterministic for fixed (params, seed, n_trials) regardless of n_threads.
McResults run_all(const SystemParams& p, const std::vector<double>& gamma0_grid,
                  long n_trials, std::uint64_t seed, int n_threads = 0);

std::vector<Estimate> run_coverage(const SystemParams& p, const std::vector<double>& gamma0_grid,
                                   long n_trials, std::uint64_t seed);
Estimate run_rate(const SystemParams& p, long n_trials, std::uint64_t seed);
Estimate run_blind_ratio(const SystemParams& p, long n_trials, std::uint64_t seed);

}  // namespace riscov
