#include "riscov/mc_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "riscov/channel.hpp"

namespace riscov {

namespace {

double grid_cell_size(const SystemParams& p) { return std::max(p.len_max, 5.0); }

struct ReflectedPath {
  int ris = -1;
  double s = 0.0;
  double r = 0.0;
  double eta = 0.0;  // clamped product
};

struct LinkSets {
  std::vector<int> los_bs;
  std::vector<int> nlos_bs;
  std::vector<double> bs_dist;           // per scene BS index
  std::vector<int> los_ris;
  std::vector<double> los_ris_dist;      // parallel to los_ris
  std::vector<ReflectedPath> best_path;  // parallel to nlos_bs
};

LinkSets classify(const Scene& scene, const Point& user, const SystemParams& p,
                  const SegmentGrid& grid) {
  LinkSets ls;
  ls.bs_dist.resize(scene.bss.size());
  for (size_t i = 0; i < scene.bss.size(); ++i) {
    ls.bs_dist[i] = dist(user, scene.bss[i]);
    if (grid.is_los(user, scene.bss[i]))
      ls.los_bs.push_back(static_cast<int>(i));
    else
      ls.nlos_bs.push_back(static_cast<int>(i));
  }
  for (size_t l = 0; l < scene.ris.size(); ++l) {
    if (grid.is_los(user, scene.ris[l])) {
      ls.los_ris.push_back(static_cast<int>(l));
      ls.los_ris_dist.push_back(dist(user, scene.ris[l]));
    }
  }
  // strongest reflected path per NLoS BS: the LoS RIS minimizing s*r
  // (the BS-RIS leg is always LoS)
  ls.best_path.resize(ls.nlos_bs.size());
  if (!ls.los_ris.empty()) {
    for (size_t k = 0; k < ls.nlos_bs.size(); ++k) {
      const Point& bs = scene.bss[ls.nlos_bs[k]];
      ReflectedPath best;
      best.eta = std::numeric_limits<double>::infinity();
      for (size_t m = 0; m < ls.los_ris.size(); ++m) {
        double s = std::max(dist(bs, scene.ris[ls.los_ris[m]]), p.eps_int);
        double r = std::max(ls.los_ris_dist[m], p.eps_int);
        if (s * r < best.eta) {
          best = {ls.los_ris[m], s, r, s * r};
        }
      }
      ls.best_path[k] = best;
    }
  }
  return ls;
}

AssociationOutcome decide(const SystemParams& p, const LinkSets& ls) {
  AssociationOutcome out;
  if (p.is_single_cell()) {
    if (!ls.los_bs.empty()) {
      out.kind = AssociationOutcome::Kind::direct;
      out.bs = ls.los_bs.front();
      out.xi = ls.bs_dist[out.bs];
      return out;
    }
    if (!ls.nlos_bs.empty() && !ls.los_ris.empty()) {
      const ReflectedPath& bp = ls.best_path.front();
      out.kind = AssociationOutcome::Kind::reflected;
      out.bs = ls.nlos_bs.front();
      out.ris = bp.ris;
      out.s = bp.s;
      out.r = bp.r;
      out.xi = ls.bs_dist[out.bs];
      return out;
    }
    return out;
  }

  const double g1 = std::pow(10.0, p.alpha);
  const double g2 = std::pow(10.0, 2.0 * p.alpha);
  const double nr2 = static_cast<double>(p.n_ris) * p.n_ris;
  double best_metric = 0.0;
  // direct candidate: nearest LoS BS
  int best_los = -1;
  for (int i : ls.los_bs) {
    if (best_los < 0 || ls.bs_dist[i] < ls.bs_dist[best_los]) best_los = i;
  }
  if (best_los >= 0) {
    double xi = std::max(ls.bs_dist[best_los], p.eps_int);
    best_metric = g1 * std::pow(xi, -p.beta);
    out.kind = AssociationOutcome::Kind::direct;
    out.bs = best_los;
    out.xi = ls.bs_dist[best_los];
  }
  // reflected candidate: NLoS BS with the smallest path product
  if (!ls.los_ris.empty()) {
    for (size_t k = 0; k < ls.nlos_bs.size(); ++k) {
      const ReflectedPath& bp = ls.best_path[k];
      double metric = nr2 * g2 * std::pow(bp.eta, -p.beta);
      if (metric > best_metric) {
        best_metric = metric;
        out.kind = AssociationOutcome::Kind::reflected;
        out.bs = ls.nlos_bs[k];
        out.ris = bp.ris;
        out.s = bp.s;
        out.r = bp.r;
        out.xi = ls.bs_dist[ls.nlos_bs[k]];
      }
    }
  }
  return out;
}

struct TrialOut {
  double gamma = 0.0;
  AssociationOutcome::Kind kind = AssociationOutcome::Kind::blind;
};

TrialOut simulate_single(const SystemParams& p, Rng& rng) {
  Scene scene = sample_single_cell_scene(p, rng);
  SegmentGrid grid(scene.blockages, grid_cell_size(p));
  const Point& user = scene.users.front();
  TrialOut t;
  if (grid.is_los(user, scene.bss.front())) {
    double xi = std::max(dist(user, scene.bss.front()), p.eps_int);
    double h = rng.exponential(static_cast<double>(p.n_bs) * p.n_ue);
    t.gamma = sinr_direct_single(xi, h, p);
    t.kind = AssociationOutcome::Kind::direct;
    return t;
  }
  double best = std::numeric_limits<double>::infinity();
  double bs_r = 0.0, bs_s = 0.0;
  for (const Point& ris : scene.ris) {
    if (!grid.is_los(user, ris)) continue;
    double r = std::max(dist(user, ris), p.eps_int);
    double s = std::max(dist(scene.bss.front(), ris), p.eps_int);
    if (s * r < best) {
      best = s * r;
      bs_r = r;
      bs_s = s;
    }
  }
  if (!std::isfinite(best)) return t;  // blind
  double hs = rng.exponential(static_cast<double>(p.n_bs) * p.n_ris);
  double hr = rng.exponential(static_cast<double>(p.n_ris) * p.n_ue);
  t.gamma = sinr_reflect_single(bs_s, bs_r, hs, hr, p);
  t.kind = AssociationOutcome::Kind::reflected;
  return t;
}

TrialOut simulate_multi(const SystemParams& p, Rng& rng) {
  Scene scene = sample_multi_cell_scene(p, rng);
  SegmentGrid grid(scene.blockages, grid_cell_size(p));
  const Point user{0.0, 0.0};
  LinkSets ls = classify(scene, user, p, grid);
  AssociationOutcome assoc = decide(p, ls);
  TrialOut t;
  t.kind = assoc.kind;
  if (assoc.kind == AssociationOutcome::Kind::blind) return t;

  const double g1 = std::pow(10.0, p.alpha);
  const double g2 = std::pow(10.0, 2.0 * p.alpha);

  LinkBudget target;
  if (assoc.kind == AssociationOutcome::Kind::direct) {
    double xi = std::max(assoc.xi, p.eps_int);
    double h = rng.exponential(static_cast<double>(p.n_bs) * p.n_ue);
    target = LinkBudget::make(g1 * std::pow(xi, -p.beta), p.p0_w, h);
  } else {
    double hs = rng.exponential(static_cast<double>(p.n_bs) * p.n_ris);
    double hr = rng.exponential(static_cast<double>(p.n_ris) * p.n_ue);
    target = LinkBudget::make(g2 * std::pow(assoc.s * assoc.r, -p.beta), p.p0_w, hs * hr);
  }

  // Interference: misaligned links with a fresh lobe-pair draw per link.
  std::vector<LinkBudget> interferers;
  interferers.reserve(ls.los_bs.size() + ls.nlos_bs.size());
  for (int i : ls.los_bs) {
    if (assoc.kind == AssociationOutcome::Kind::direct && i == assoc.bs) continue;
    double rho = sample_directional_gain(p.n_bs, p.n_ue, p.psi_bs, p.psi_ue, rng).value;
    double h = rng.exponential(rho);
    double xi = std::max(ls.bs_dist[i], p.eps_int);
    interferers.push_back(LinkBudget::make(g1 * std::pow(xi, -p.beta), p.p0_w, h));
  }
  if (!ls.los_ris.empty()) {
    for (size_t k = 0; k < ls.nlos_bs.size(); ++k) {
      if (assoc.kind == AssociationOutcome::Kind::reflected && ls.nlos_bs[k] == assoc.bs)
        continue;
      const ReflectedPath& bp = ls.best_path[k];
      double rho_s = sample_directional_gain(p.n_bs, p.n_ris, p.psi_bs, p.psi_ris, rng).value;
      double rho_r = sample_directional_gain(p.n_ris, p.n_ue, p.psi_ris, p.psi_ue, rng).value;
      double hs = rng.exponential(rho_s);
      double hr = rng.exponential(rho_r);
      interferers.push_back(LinkBudget::make(g2 * std::pow(bp.eta, -p.beta), p.p0_w, hs * hr));
    }
  }
  t.gamma = sinr_multi(target, interferers, p.noise_w);
  return t;
}

Estimate binomial_estimate(long hits, long n, long n_eff) {
  Estimate e;
  e.n_trials = n;
  e.n_effective = n_eff;
  if (n == 0) return e;
  double ph = static_cast<double>(hits) / n;
  e.mean = ph;
  e.half_width_95 = 1.96 * std::sqrt(std::max(ph * (1.0 - ph), 0.0) / n);
  return e;
}

double direct_tail_bound(const SystemParams& p) {
  // interference ignored beyond the simulation disk, bounded by the decay of
  // the LoS probability (direct) and the beta > 2 path loss (reflected)
  double rs = p.sim_radius();
  double c = p.los_decay_rate();
  double lam_y = p.bs_density();
  double e_hd = mean_directional_gain(p.n_bs, p.n_ue, p.psi_bs, p.psi_ue);
  double e_hs = mean_directional_gain(p.n_bs, p.n_ris, p.psi_bs, p.psi_ris);
  double e_hr = mean_directional_gain(p.n_ris, p.n_ue, p.psi_ris, p.psi_ue);
  double g1 = std::pow(10.0, p.alpha);
  double g2 = std::pow(10.0, 2.0 * p.alpha);
  double direct = c > 0.0 ? p.p0_w * e_hd * g1 * 2.0 * kPi * lam_y *
                                std::pow(rs, 1.0 - p.beta) * std::exp(-c * rs) / c
                          : p.p0_w * e_hd * g1 * 2.0 * kPi * lam_y *
                                std::pow(rs, 2.0 - p.beta) / (p.beta - 2.0);
  double reflected = 0.0;
  if (p.lambda_r > 0.0) {
    reflected = p.p0_w * e_hs * e_hr * g2 * 2.0 * kPi * lam_y *
                std::pow(2.0, p.beta) / std::pow(p.eps_int, p.beta) *
                std::pow(rs, 2.0 - p.beta) / (p.beta - 2.0);
  }
  return direct + reflected;
}

}  // namespace

Scene sample_single_cell_scene(const SystemParams& p, Rng& rng) {
  Scene s;
  s.region = {{0.0, 0.0}, p.cell_radius()};
  s.bss = {{0.0, 0.0}};
  s.blockages = sample_blockages(p, s.region, rng);
  s.ris = sample_ppp(p.lambda_r, s.region, rng);
  s.users = {uniform_in_disk(s.region, rng)};
  return s;
}

Scene sample_multi_cell_scene(const SystemParams& p, Rng& rng) {
  Scene s;
  s.region = {{0.0, 0.0}, p.sim_radius()};
  s.blockages = sample_blockages(p, s.region, rng);
  s.ris = sample_ppp(p.lambda_r, s.region, rng);
  s.bss = sample_ppp(p.bs_density(), s.region, rng);
  s.users = {{0.0, 0.0}};
  return s;
}

AssociationOutcome associate(const Scene& scene, const Point& user, const SystemParams& p) {
  SegmentGrid grid(scene.blockages, grid_cell_size(p));
  return decide(p, classify(scene, user, p, grid));
}

McResults run_all(const SystemParams& p, const std::vector<double>& gamma0_grid, long n_trials,
                  std::uint64_t seed, int n_threads) {
  checked(p);
  if (n_trials < 1) throw std::invalid_argument("run_all: n_trials must be >= 1");
  const bool single = p.is_single_cell();

  std::vector<TrialOut> outs(static_cast<size_t>(n_trials));
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  int nt = n_threads > 0 ? n_threads : std::clamp(hw, 1, 8);
  nt = static_cast<int>(std::min<long>(nt, n_trials));
  auto worker = [&](long lo, long hi) {
    for (long i = lo; i < hi; ++i) {
      Rng rng(seed, static_cast<std::uint64_t>(i));
      outs[static_cast<size_t>(i)] = single ? simulate_single(p, rng) : simulate_multi(p, rng);
    }
  };
  if (nt <= 1) {
    worker(0, n_trials);
  } else {
    std::vector<std::thread> pool;
    long chunk = (n_trials + nt - 1) / nt;
    for (int k = 0; k < nt; ++k) {
      long lo = k * chunk, hi = std::min<long>(n_trials, lo + chunk);
      if (lo < hi) pool.emplace_back(worker, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  // deterministic reduction in trial order
  McResults res;
  long n_blind = 0, n_direct = 0, n_reflected = 0;
  std::vector<long> cov_hits(gamma0_grid.size(), 0);
  double rate_sum = 0.0, rate_sq = 0.0;
  const double inv_ln2 = 1.0 / std::log(2.0);
  for (const TrialOut& t : outs) {
    switch (t.kind) {
      case AssociationOutcome::Kind::blind: ++n_blind; break;
      case AssociationOutcome::Kind::direct: ++n_direct; break;
      case AssociationOutcome::Kind::reflected: ++n_reflected; break;
    }
    for (size_t j = 0; j < gamma0_grid.size(); ++j)
      if (t.gamma > gamma0_grid[j]) ++cov_hits[j];
    double rate = p.bw_hz * std::log1p(t.gamma) * inv_ln2;
    rate_sum += rate;
    rate_sq += rate * rate;
  }
  long n_eff = n_trials - n_blind;
  res.coverage.reserve(gamma0_grid.size());
  for (size_t j = 0; j < gamma0_grid.size(); ++j)
    res.coverage.push_back(binomial_estimate(cov_hits[j], n_trials, n_eff));
  res.blind_ratio = binomial_estimate(n_blind, n_trials, n_eff);
  res.p_direct = binomial_estimate(n_direct, n_trials, n_eff);
  res.p_reflected = binomial_estimate(n_reflected, n_trials, n_eff);
  res.rate.n_trials = n_trials;
  res.rate.n_effective = n_eff;
  res.rate.mean = rate_sum / n_trials;
  if (n_trials > 1) {
    double var = std::max(0.0, (rate_sq - n_trials * res.rate.mean * res.rate.mean) /
                                   (n_trials - 1));
    res.rate.half_width_95 = 1.96 * std::sqrt(var / n_trials);
  }
  if (!single) res.interference_tail_bound_w = direct_tail_bound(p);
  return res;
}

std::vector<Estimate> run_coverage(const SystemParams& p, const std::vector<double>& gamma0_grid,
                                   long n_trials, std::uint64_t seed) {
  return run_all(p, gamma0_grid, n_trials, seed).coverage;
}

Estimate run_rate(const SystemParams& p, long n_trials, std::uint64_t seed) {
  return run_all(p, {}, n_trials, seed).rate;
}

Estimate run_blind_ratio(const SystemParams& p, long n_trials, std::uint64_t seed) {
  return run_all(p, {}, n_trials, seed).blind_ratio;
}

}  // namespace riscov
