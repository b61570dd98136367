#include "riscov/params.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace riscov {

double derive_alpha(double fc_hz) {
  if (!(fc_hz > 0.0)) throw std::invalid_argument("carrier frequency must be positive");
  return -2.8 - 2.0 * std::log10(fc_hz / 1e9);
}

double default_beamwidth(int n_elements) {
  return 2.0 * kPi / std::sqrt(static_cast<double>(n_elements));
}

double thermal_noise_w(double bw_hz) { return kBoltzmann * kNoiseTempK * bw_hz; }

double SystemParams::virtual_radius() const {
  if (is_single_cell()) return cell_radius();
  return std::sqrt(1.0 / (bs_density() * kPi));
}

double SystemParams::sim_radius() const {
  if (r_sim > 0.0) return r_sim;
  double c = los_decay_rate();
  double by_decay = c > 0.0 ? 6.0 / c : 0.0;
  return std::max(by_decay, 5.0 * virtual_radius());
}

std::vector<std::string> validate(const SystemParams& p) {
  std::vector<std::string> errs;
  auto bad = [&errs](const std::string& m) { errs.push_back(m); };

  if (!(p.fc_hz > 0.0)) bad("fc_hz must be positive");
  if (!(p.beta > 2.0)) bad("beta must exceed 2");
  if (!(p.lambda_b >= 0.0)) bad("lambda_b must be nonnegative");
  if (!(p.lambda_r >= 0.0)) bad("lambda_r must be nonnegative");
  if (!(p.lambda_u >= 0.0)) bad("lambda_u must be nonnegative");
  if (!(p.len_min >= 0.0)) bad("len_min must be nonnegative");
  if (!(p.len_min <= p.len_max)) bad("len_min must not exceed len_max");
  if (p.n_bs < 1) bad("n_bs must be at least 1");
  if (p.n_ris < 1) bad("n_ris must be at least 1");
  if (p.n_ue < 1) bad("n_ue must be at least 1");
  for (auto [psi, name] : {std::pair{p.psi_bs, "psi_bs"}, {p.psi_ris, "psi_ris"}, {p.psi_ue, "psi_ue"}}) {
    if (!(psi > 0.0 && psi <= 2.0 * kPi)) bad(std::string(name) + " must lie in (0, 2pi]");
  }
  if (!(p.p0_w > 0.0)) bad("p0_w must be positive");
  if (!(p.noise_w > 0.0)) bad("noise_w must be positive");
  if (!(p.bw_hz > 0.0)) bad("bw_hz must be positive");
  if (!(p.eps_int > 0.0)) bad("eps_int must be positive");
  if (p.is_single_cell()) {
    if (!(p.cell_radius() > 0.0)) bad("scenario.radius_m must be positive");
  } else {
    if (!(p.bs_density() > 0.0)) bad("scenario.lambda_y must be positive");
    if (!(p.los_decay_rate() > 0.0) && !(p.trunc_radius > 0.0))
      bad("multi-cell requires lambda_b*E[L] > 0 or an explicit trunc_radius "
          "(otherwise the improper integrals over xi diverge)");
  }
  return errs;
}

const SystemParams& checked(const SystemParams& p) {
  auto errs = validate(p);
  if (!errs.empty()) {
    std::ostringstream os;
    os << "invalid parameters:";
    for (const auto& e : errs) os << "\n  - " << e;
    throw std::invalid_argument(os.str());
  }
  return p;
}

SystemParams params_from_json(const nlohmann::json& j) {
  SystemParams p;
  auto get = [&j](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };

  get("fc_hz", p.fc_hz);
  get("beta", p.beta);
  get("lambda_b", p.lambda_b);
  get("len_min", p.len_min);
  get("len_max", p.len_max);
  get("lambda_r", p.lambda_r);
  get("lambda_u", p.lambda_u);
  get("n_bs", p.n_bs);
  get("n_ris", p.n_ris);
  get("n_ue", p.n_ue);
  get("p0_w", p.p0_w);
  get("bw_hz", p.bw_hz);
  get("eps_int", p.eps_int);
  get("r_sim", p.r_sim);
  get("trunc_radius", p.trunc_radius);
  get("idle_bs_interfere", p.idle_bs_interfere);

  // derived unless overridden
  p.alpha = j.contains("alpha") ? j.at("alpha").get<double>() : derive_alpha(p.fc_hz);
  p.psi_bs = j.contains("psi_bs") ? j.at("psi_bs").get<double>() : default_beamwidth(p.n_bs);
  p.psi_ris = j.contains("psi_ris") ? j.at("psi_ris").get<double>() : default_beamwidth(p.n_ris);
  p.psi_ue = j.contains("psi_ue") ? j.at("psi_ue").get<double>() : default_beamwidth(p.n_ue);
  p.noise_w = j.contains("noise_w") ? j.at("noise_w").get<double>() : thermal_noise_w(p.bw_hz);

  if (j.contains("scenario")) {
    const auto& s = j.at("scenario");
    const std::string type = s.value("type", "single_cell");
    if (type == "single_cell") {
      SingleCell sc;
      sc.radius_m = s.value("radius_m", sc.radius_m);
      p.scenario = sc;
    } else if (type == "multi_cell") {
      MultiCell mc;
      if (s.contains("lambda_y")) {
        mc.lambda_y = s.at("lambda_y").get<double>();
      } else if (s.contains("r_v_m")) {
        double rv = s.at("r_v_m").get<double>();
        if (!(rv > 0.0)) throw std::invalid_argument("scenario.r_v_m must be positive");
        mc.lambda_y = 1.0 / (kPi * rv * rv);
      }
      p.scenario = mc;
    } else {
      throw std::invalid_argument("scenario.type must be single_cell or multi_cell");
    }
  }
  return p;
}

nlohmann::json params_to_json(const SystemParams& p) {
  nlohmann::json j;
  j["fc_hz"] = p.fc_hz;
  j["alpha"] = p.alpha;
  j["beta"] = p.beta;
  j["lambda_b"] = p.lambda_b;
  j["len_min"] = p.len_min;
  j["len_max"] = p.len_max;
  j["lambda_r"] = p.lambda_r;
  j["lambda_u"] = p.lambda_u;
  j["n_bs"] = p.n_bs;
  j["n_ris"] = p.n_ris;
  j["n_ue"] = p.n_ue;
  j["psi_bs"] = p.psi_bs;
  j["psi_ris"] = p.psi_ris;
  j["psi_ue"] = p.psi_ue;
  j["p0_w"] = p.p0_w;
  j["noise_w"] = p.noise_w;
  j["bw_hz"] = p.bw_hz;
  j["eps_int"] = p.eps_int;
  j["r_sim"] = p.r_sim;
  j["trunc_radius"] = p.trunc_radius;
  j["idle_bs_interfere"] = p.idle_bs_interfere;
  if (p.is_single_cell()) {
    j["scenario"] = {{"type", "single_cell"}, {"radius_m", p.cell_radius()}};
  } else {
    j["scenario"] = {{"type", "multi_cell"}, {"lambda_y", p.bs_density()}};
  }
  return j;
}

}  // namespace riscov
