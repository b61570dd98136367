#include "riscov/runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>
#include <stdexcept>

#include "riscov/mc_sim.hpp"
#include "riscov/multi_cell.hpp"
#include "riscov/single_cell.hpp"

namespace riscov {

namespace {

const std::vector<std::string> kAllMetrics = {"coverage", "rate", "blind_ratio", "p_ad", "p_ai"};

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

struct AnalyticOut {
  std::vector<double> coverage;  // per gamma0
  double rate = 0.0, blind = 0.0, p_ad = 0.0, p_ai = 0.0;
  bool converged = true;
};

AnalyticOut run_analytic(const SystemParams& p, const QuadSpec& q,
                         const std::vector<double>& gammas,
                         const std::vector<std::string>& metrics) {
  auto want = [&](const std::string& m) {
    return std::find(metrics.begin(), metrics.end(), m) != metrics.end();
  };
  AnalyticOut out;
  if (p.is_single_cell()) {
    SingleCellAnalysis a(p, q);
    if (want("coverage"))
      for (double g : gammas) out.coverage.push_back(a.ergodic_coverage(g));
    if (want("rate")) out.rate = a.achievable_rate();
    if (want("blind_ratio")) out.blind = a.blind_ratio();
    if (want("p_ad")) out.p_ad = a.avg_assoc_direct();
    if (want("p_ai")) out.p_ai = a.avg_assoc_reflected();
    out.converged = a.converged();
  } else {
    MultiCellAnalysis a(p, q);
    if (want("coverage"))
      for (double g : gammas) out.coverage.push_back(a.coverage(g));
    if (want("rate")) out.rate = a.rate();
    auto assoc = a.assoc_probs();
    out.blind = assoc.blind;
    out.p_ad = assoc.direct;
    out.p_ai = assoc.reflected;
    out.converged = a.converged();
  }
  return out;
}

}  // namespace

SystemParams apply_sweep(const SystemParams& base, const std::string& param, double value) {
  SystemParams p = base;
  if (param == "none") return p;
  if (param == "lambda_r") p.lambda_r = value;
  else if (param == "lambda_b") p.lambda_b = value;
  else if (param == "lambda_u") p.lambda_u = value;
  else if (param == "p0_w") p.p0_w = value;
  else if (param == "noise_w") p.noise_w = value;
  else if (param == "n_ris") p.n_ris = static_cast<int>(value);
  else if (param == "n_bs") p.n_bs = static_cast<int>(value);
  else if (param == "n_ue") p.n_ue = static_cast<int>(value);
  else if (param == "radius_m") p.scenario = SingleCell{value};
  else if (param == "lambda_y") p.scenario = MultiCell{value};
  else if (param == "r_v_m") p.scenario = MultiCell{1.0 / (kPi * value * value)};
  else throw std::invalid_argument("unknown sweep parameter: " + param);
  return p;
}

ExperimentSpec spec_from_json(const nlohmann::json& j) {
  ExperimentSpec s;
  s.name = j.value("name", s.name);
  s.description = j.value("description", s.description);
  if (j.contains("params")) s.base = params_from_json(j.at("params"));
  if (j.contains("mode")) {
    std::string m = j.at("mode").get<std::string>();
    if (m == "analytic") s.mode = RunMode::analytic;
    else if (m == "mc" || m == "montecarlo") s.mode = RunMode::montecarlo;
    else if (m == "both") s.mode = RunMode::both;
    else throw std::invalid_argument("mode must be analytic, mc or both");
  }
  if (j.contains("sweep")) {
    s.sweep_param = j.at("sweep").value("param", "none");
    if (j.at("sweep").contains("values"))
      s.sweep_values = j.at("sweep").at("values").get<std::vector<double>>();
  }
  if (j.contains("gamma0_grid_db"))
    s.gamma0_grid_db = j.at("gamma0_grid_db").get<std::vector<double>>();
  if (j.contains("metrics")) s.metrics = j.at("metrics").get<std::vector<std::string>>();
  s.n_trials = j.value("n_trials", s.n_trials);
  s.seed = j.value("seed", s.seed);
  if (j.contains("quad")) {
    const auto& q = j.at("quad");
    s.quad.rel_tol = q.value("rel_tol", s.quad.rel_tol);
    s.quad.abs_tol = q.value("abs_tol", s.quad.abs_tol);
    s.quad.max_depth = q.value("max_depth", s.quad.max_depth);
    s.quad.truncation_factor = q.value("truncation_factor", s.quad.truncation_factor);
  }
  s.agreement_slack_abs = j.value("agreement_slack_abs", s.agreement_slack_abs);
  s.agreement_slack_rate_rel = j.value("agreement_slack_rate_rel", s.agreement_slack_rate_rel);
  s.out_dir = j.value("out_dir", s.out_dir);

  if (s.sweep_values.empty()) throw std::invalid_argument("sweep.values must be non-empty");
  if (s.metrics.empty()) s.metrics = kAllMetrics;
  for (const auto& m : s.metrics)
    if (std::find(kAllMetrics.begin(), kAllMetrics.end(), m) == kAllMetrics.end())
      throw std::invalid_argument("unknown metric: " + m);
  bool wants_cov = std::find(s.metrics.begin(), s.metrics.end(), "coverage") != s.metrics.end();
  if (wants_cov && s.gamma0_grid_db.empty())
    throw std::invalid_argument("gamma0_grid_db must be non-empty for the coverage metric");
  if (s.n_trials < 1) throw std::invalid_argument("n_trials must be >= 1");
  return s;
}

ExperimentSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    size_t line = 1, col = 1;
    for (size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') { ++line; col = 1; } else ++col;
    }
    std::ostringstream os;
    os << path << ":" << line << ":" << col << ": " << e.what();
    throw std::runtime_error(os.str());
  }
  return spec_from_json(j);
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  // validate every sweep point up front so errors carry the offending value
  for (double v : spec.sweep_values) {
    SystemParams p = apply_sweep(spec.base, spec.sweep_param, v);
    auto errs = validate(p);
    if (!errs.empty()) {
      std::ostringstream os;
      os << "invalid parameters at " << spec.sweep_param << " = " << v << ":";
      for (const auto& e : errs) os << "\n  - " << e;
      throw std::invalid_argument(os.str());
    }
  }

  std::vector<double> gammas;
  for (double db : spec.gamma0_grid_db) gammas.push_back(db_to_linear(db));
  const bool do_analytic = spec.mode != RunMode::montecarlo;
  const bool do_mc = spec.mode != RunMode::analytic;

  struct PerValue {
    AnalyticOut analytic;
    McResults mc;
  };
  std::vector<std::future<PerValue>> futs;
  futs.reserve(spec.sweep_values.size());
  for (double v : spec.sweep_values) {
    futs.push_back(std::async(std::launch::async, [&, v]() {
      PerValue out;
      SystemParams p = apply_sweep(spec.base, spec.sweep_param, v);
      if (do_analytic) out.analytic = run_analytic(p, spec.quad, gammas, spec.metrics);
      if (do_mc) out.mc = run_all(p, gammas, spec.n_trials, spec.seed);
      return out;
    }));
  }

  ExperimentResult result;
  for (size_t i = 0; i < futs.size(); ++i) {
    PerValue pv = futs[i].get();
    double v = spec.sweep_values[i];
    bool conv = !do_analytic || pv.analytic.converged;
    result.all_converged = result.all_converged && conv;
    if (do_mc && !spec.base.is_single_cell())
      result.mc_tail_bounds_w.push_back(pv.mc.interference_tail_bound_w);

    auto push = [&](const std::string& metric, double gamma_db, double a, double m, double hw,
                    double slack) {
      ResultRow row;
      row.sweep_param = spec.sweep_param;
      row.sweep_value = v;
      row.metric = metric;
      row.gamma0_db = gamma_db;
      row.analytic = a;
      row.mc_mean = m;
      row.mc_half_width = hw;
      row.quad_converged = conv;
      if (!std::isnan(a) && !std::isnan(m)) row.engines_agree = std::fabs(a - m) <= hw + slack;
      result.rows.push_back(std::move(row));
    };
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& metric : spec.metrics) {
      if (metric == "coverage") {
        for (size_t g = 0; g < gammas.size(); ++g) {
          push("coverage", spec.gamma0_grid_db[g],
               do_analytic ? pv.analytic.coverage[g] : nan,
               do_mc ? pv.mc.coverage[g].mean : nan,
               do_mc ? pv.mc.coverage[g].half_width_95 : nan, spec.agreement_slack_abs);
        }
      } else if (metric == "rate") {
        double a = do_analytic ? pv.analytic.rate : nan;
        double m = do_mc ? pv.mc.rate.mean : nan;
        double slack = spec.agreement_slack_rate_rel *
                       std::max(std::fabs(do_analytic ? a : 0.0), std::fabs(do_mc ? m : 0.0));
        push("rate", nan, a, m, do_mc ? pv.mc.rate.half_width_95 : nan, slack);
      } else if (metric == "blind_ratio") {
        push("blind_ratio", nan, do_analytic ? pv.analytic.blind : nan,
             do_mc ? pv.mc.blind_ratio.mean : nan,
             do_mc ? pv.mc.blind_ratio.half_width_95 : nan, spec.agreement_slack_abs);
      } else if (metric == "p_ad") {
        push("p_ad", nan, do_analytic ? pv.analytic.p_ad : nan,
             do_mc ? pv.mc.p_direct.mean : nan,
             do_mc ? pv.mc.p_direct.half_width_95 : nan, spec.agreement_slack_abs);
      } else if (metric == "p_ai") {
        push("p_ai", nan, do_analytic ? pv.analytic.p_ai : nan,
             do_mc ? pv.mc.p_reflected.mean : nan,
             do_mc ? pv.mc.p_reflected.half_width_95 : nan, spec.agreement_slack_abs);
      }
    }
  }
  return result;
}

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  os << "sweep_param,sweep_value,metric,gamma0_db,analytic,mc_mean,mc_half_width,engines_agree\n";
  for (const ResultRow& r : rows) {
    os << r.sweep_param << ',' << fmt(r.sweep_value) << ',' << r.metric << ','
       << fmt(r.gamma0_db) << ',' << fmt(r.analytic) << ',' << fmt(r.mc_mean) << ','
       << fmt(r.mc_half_width) << ',';
    if (r.engines_agree >= 0) os << r.engines_agree;
    os << '\n';
  }
  return os.str();
}

nlohmann::json result_to_json(const ExperimentSpec& spec, const ExperimentResult& result) {
  nlohmann::json j;
  j["name"] = spec.name;
  j["sweep_param"] = spec.sweep_param;
  j["all_converged"] = result.all_converged;
  if (!result.mc_tail_bounds_w.empty())
    j["mc_interference_tail_bounds_w"] = result.mc_tail_bounds_w;
  nlohmann::json values = nlohmann::json::array();
  for (double v : spec.sweep_values) {
    nlohmann::json entry;
    entry["sweep_value"] = v;
    nlohmann::json rows = nlohmann::json::array();
    for (const ResultRow& r : result.rows) {
      if (r.sweep_value != v || r.sweep_param != spec.sweep_param) continue;
      nlohmann::json row;
      row["metric"] = r.metric;
      row["gamma0_db"] = r.gamma0_db;
      row["analytic"] = r.analytic;
      row["mc_mean"] = r.mc_mean;
      row["mc_half_width"] = r.mc_half_width;
      row["engines_agree"] = r.engines_agree;
      row["quad_converged"] = r.quad_converged;
      rows.push_back(std::move(row));
    }
    entry["rows"] = std::move(rows);
    values.push_back(std::move(entry));
  }
  j["results"] = std::move(values);
  return j;
}

std::vector<ResultRow> rows_from_json(const nlohmann::json& j) {
  std::vector<ResultRow> rows;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto num = [nan](const nlohmann::json& v) { return v.is_null() ? nan : v.get<double>(); };
  for (const auto& entry : j.at("results")) {
    for (const auto& r : entry.at("rows")) {
      ResultRow row;
      row.sweep_param = j.at("sweep_param").get<std::string>();
      row.sweep_value = entry.at("sweep_value").get<double>();
      row.metric = r.at("metric").get<std::string>();
      row.gamma0_db = num(r.at("gamma0_db"));
      row.analytic = num(r.at("analytic"));
      row.mc_mean = num(r.at("mc_mean"));
      row.mc_half_width = num(r.at("mc_half_width"));
      row.engines_agree = r.at("engines_agree").get<int>();
      row.quad_converged = r.at("quad_converged").get<bool>();
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_outputs(const ExperimentSpec& spec, const ExperimentResult& result,
                   const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream csv(std::filesystem::path(out_dir) / "results.csv", std::ios::binary);
    csv << to_csv(result.rows);
  }
  {
    std::ofstream js(std::filesystem::path(out_dir) / "results.json", std::ios::binary);
    js << result_to_json(spec, result).dump(2) << '\n';
  }
}

}  // namespace riscov
