#include "commands.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <variant>

#include "CLI11.hpp"
#include "mudiv/asymptotics.hpp"
#include "mudiv/core_model.hpp"
#include "mudiv/errors.hpp"
#include "mudiv/optimizer.hpp"
#include "mudiv/rate_eval.hpp"
#include "mudiv/sim.hpp"
#include "mudiv/special_functions.hpp"

namespace mudiv::cli {

using ojson = nlohmann::ordered_json;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  // to_chars is %.12g in the C locale, whatever the process locale is
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

namespace {

// Rounded through the 12-digit text form so CSV and JSON agree.
ojson num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return std::stod(format_number(v));
}

using Cell = std::variant<std::int64_t, double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  std::string csv() const {
    std::string s;
    for (std::size_t i = 0; i < columns.size(); ++i) s += (i ? "," : "") + columns[i];
    s += '\n';
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) s += ',';
        if (const auto* n = std::get_if<std::int64_t>(&row[i])) s += std::to_string(*n);
        else if (const auto* d = std::get_if<double>(&row[i])) s += format_number(*d);
        else s += std::get<std::string>(row[i]);
      }
      s += '\n';
    }
    return s;
  }

  ojson json() const {
    ojson arr = ojson::array();
    for (const auto& row : rows) {
      ojson o;
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (const auto* n = std::get_if<std::int64_t>(&row[i])) o[columns[i]] = *n;
        else if (const auto* d = std::get_if<double>(&row[i])) o[columns[i]] = num(*d);
        else o[columns[i]] = std::get<std::string>(row[i]);
      }
      arr.push_back(std::move(o));
    }
    return arr;
  }
};

std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

ojson system_json(const SystemConfig& c) {
  ojson j;
  j["power"] = num(c.power());
  j["sigma_h2"] = num(c.sigma_h2());
  j["sigma_z2"] = num(c.sigma_z2());
  j["snr"] = num(c.snr());
  j["block_length"] = c.block_length();
  return j;
}

ojson header(const char* command, const SystemConfig& c) {
  ojson j;
  j["command"] = command;
  j["config"] = system_json(c);
  return j;
}

void check(CommandResult& r, bool ok, const std::string& what) {
  if (!ok) r.failed_checks.push_back(what);
}

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

void check_policy(CommandResult& r, const TrainingPolicy& p, const SystemConfig& c) {
  const double used = p.alpha() * p.pilot_power() + (1.0 - p.alpha()) * p.data_power();
  check(r, close_rel(used, c.power(), 1e-12), "power conservation");
  const EstimationStats st = estimation_stats(p, c);
  check(r, close_rel(st.sigma_e2 + st.sigma_hhat2, c.sigma_h2(), 1e-12), "variance split");
}

void warn_snr(CommandResult& r, const RunConfig& cfg) {
  if (cfg.snr_db_ignored())
    r.warnings.push_back("--snr-db ignored: --sigma-z2 given explicitly");
}

std::int64_t k_limit(const RunConfig& cfg, std::int64_t L) {
  const std::int64_t full = std::max<std::int64_t>(L - 1, 1);
  return cfg.k_max ? std::min(*cfg.k_max, full) : full;
}

}  // namespace

// ---------------------------------------------------------------- optimize

CommandResult cmd_optimize(const RunConfig& cfg, OutputFormat fmt) {
  CommandResult r;
  warn_snr(r, cfg);
  const SystemConfig c = cfg.system_config();
  const OptimizationReport rep = optimal_user_count(c, Exec::parallel, cfg.k_max);
  const EstimationStats st = estimation_stats(rep.policy, c);

  check_policy(r, rep.policy, c);
  check(r, std::abs(rep.quadratic_residual) < 1e-9, "power-fraction quadratic residual");
  for (const SweepPoint& p : rep.sweep)
    if (p.feasible && p.rate > rep.rate.value) {
      check(r, false, "sweep maximum");
      break;
    }

  if (fmt == OutputFormat::csv) {
    Table t{{"K", "alpha", "eps_bar", "P_T", "P_D", "sigma_e2", "x", "rate", "rate_err",
             "optimal"},
            {}};
    for (const SweepPoint& p : rep.sweep) {
      if (!p.feasible) continue;
      const TrainingPolicy pol = optimal_policy(c, p.users);
      const EstimationStats s = estimation_stats(pol, c);
      t.rows.push_back({p.users, pol.alpha(), pol.eps_bar(), pol.pilot_power(),
                        pol.data_power(), s.sigma_e2, s.x, p.rate, p.err_estimate,
                        std::int64_t{p.users == rep.k_star ? 1 : 0}});
    }
    r.text = t.csv();
    return r;
  }

  ojson j = header("optimize", c);
  j["K_star"] = rep.k_star;
  j["alpha"] = num(rep.policy.alpha());
  j["eps_bar"] = num(rep.policy.eps_bar());
  j["P_T"] = num(rep.policy.pilot_power());
  j["P_D"] = num(rep.policy.data_power());
  j["sigma_e2"] = num(st.sigma_e2);
  j["x"] = num(st.x);
  j["rate"] = num(rep.rate.value);
  j["rate_err"] = num(rep.rate.err_estimate);
  j["quadratic_residual"] = num(rep.quadratic_residual);
  Table sweep{{"K", "rate", "rate_err"}, {}};
  for (const SweepPoint& p : rep.sweep)
    if (p.feasible) sweep.rows.push_back({p.users, p.rate, p.err_estimate});
  j["sweep"] = sweep.json();
  r.text = dump(j);
  return r;
}

// ---------------------------------------------------------------- sweep-k

CommandResult cmd_sweep_k(const RunConfig& cfg, OutputFormat fmt) {
  CommandResult r;
  warn_snr(r, cfg);
  const SystemConfig c = cfg.system_config();
  const std::int64_t kmax = k_limit(cfg, c.block_length());
  if (c.block_length() < 2) throw DomainError("sweep-k needs block-length >= 2");
  const std::vector<SweepPoint> sweep = sweep_achievable_rates(c, 1, kmax, Exec::parallel);
  const std::size_t best = argmax_rate(sweep);

  Table t{{"K", "rate", "rate_err", "optimal"}, {}};
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    const SweepPoint& p = sweep[i];
    check(r, p.feasible, "feasible policy at K=" + std::to_string(p.users));
    t.rows.push_back({p.users, p.rate, p.err_estimate, std::int64_t{i == best ? 1 : 0}});
  }
  if (fmt == OutputFormat::csv) {
    r.text = t.csv();
  } else {
    ojson j = header("sweep-k", c);
    j["K_star"] = sweep[best].users;
    j["rows"] = t.json();
    r.text = dump(j);
  }
  return r;
}

// ---------------------------------------------------------------- approx-gap

CommandResult cmd_approx_gap(const RunConfig& cfg, OutputFormat fmt) {
  CommandResult r;
  warn_snr(r, cfg);
  Table t{{"L", "K_a1", "rate_at_K_a1", "approx_a1", "gap_a1", "K_a2", "rate_at_K_a2",
           "approx_a2", "gap_a2"},
          {}};
  for (const std::int64_t L : cfg.l_grid) {
    const SystemConfig c = cfg.system_config(L);
    if (L < 3) throw DomainError("approx-gap needs every L >= 3");
    const double S = c.snr();

    const std::int64_t k1 = approx_a1_user_count(c);
    const TrainingPolicy p1 = optimal_policy(c, k1);
    const double x1 = effective_inverse_snr(p1, c);
    const double rate1 = achievable_rate(p1, c).value;
    const double a1 = approx_rate_a1(static_cast<double>(k1), static_cast<double>(L), x1);

    const std::int64_t k2 = approx_user_count(c);
    const double rate2 = achievable_rate(optimal_policy(c, k2), c).value;
    const double a2 = approx_rate_a2(static_cast<double>(k2), static_cast<double>(L), S);

    const double gap1 = std::abs(rate1 - a1) / rate1;
    const double gap2 = std::abs(rate2 - a2) / rate2;
    check(r, std::isfinite(gap1) && std::isfinite(gap2), "finite gaps at L=" + std::to_string(L));
    t.rows.push_back({L, k1, rate1, a1, gap1, k2, rate2, a2, gap2});
  }
  if (fmt == OutputFormat::csv) {
    r.text = t.csv();
  } else {
    ojson j = header("approx-gap", cfg.system_config());
    j["config"].erase("block_length");
    j["rows"] = t.json();
    r.text = dump(j);
  }
  return r;
}

// ---------------------------------------------------------------- scaling

CommandResult cmd_scaling(const RunConfig& cfg, OutputFormat fmt) {
  CommandResult r;
  warn_snr(r, cfg);
  Table t{{"parameter", "L", "exact", "first_order", "second_order", "rel_err_first",
           "rel_err_second", "K_star", "K_a", "exact_at_K_a"},
          {}};
  for (const std::int64_t L : cfg.l_grid) {
    const SystemConfig c = cfg.system_config(L);
    if (L < 16) throw DomainError("scaling needs every L >= 16");
    const OptimizationReport rep = optimal_user_count(c, Exec::parallel, cfg.k_max);
    const AsymptoticParameters ap =
        asymptotic_parameters(L, c.snr(), c.power(), c.sigma_z2());
    check_policy(r, rep.policy, c);
    check(r, rep.policy.alpha() == optimal_alpha(rep.k_star, L),
          "alpha equals K*/L at L=" + std::to_string(L));

    const double sigma_e2 = mmse_error_variance(c.sigma_h2(), 1.0, rep.policy.pilot_power(),
                                                c.sigma_z2());
    auto add = [&](const char* name, double exact, const ExpansionResult& e) {
      const double ref = std::abs(exact);
      t.rows.push_back({std::string(name), L, exact, e.first_order, e.second_order,
                        std::abs(e.first_order - exact) / ref,
                        std::abs(e.second_order - exact) / ref, rep.k_star, ap.k_approx,
                        e.exact.value_or(std::nan(""))});
    };
    add("K", static_cast<double>(rep.k_star), ap.users);
    add("alpha", rep.policy.alpha(), ap.alpha);
    add("eps_bar", rep.policy.eps_bar(), ap.eps_bar);
    add("P_T", rep.policy.pilot_power(), ap.pilot_power);
    add("sigma_e2", sigma_e2, ap.error_variance);
  }
  if (fmt == OutputFormat::csv) {
    r.text = t.csv();
  } else {
    ojson j = header("scaling", cfg.system_config());
    j["config"].erase("block_length");
    j["rows"] = t.json();
    r.text = dump(j);
  }
  return r;
}

// ---------------------------------------------------------------- simulate

CommandResult cmd_simulate(const RunConfig& cfg, OutputFormat fmt) {
  CommandResult r;
  warn_snr(r, cfg);
  const SystemConfig c = cfg.system_config();
  if (c.block_length() < 2) throw DomainError("simulate needs block-length >= 2");
  if (cfg.n_blocks < 1) throw DomainError("n-blocks must be >= 1");

  std::int64_t users = 0;
  if (cfg.users) {
    users = *cfg.users;
  } else {
    users = optimal_user_count(c, Exec::parallel, cfg.k_max).k_star;
  }
  const TrainingPolicy policy = cfg.eps_bar
                                    ? TrainingPolicy::from_power_fraction(c, users, *cfg.eps_bar)
                                    : optimal_policy(c, users);
  check_policy(r, policy, c);

  const SimOutcome sim = simulate_blocks(policy, c, cfg.n_blocks, cfg.seed, Exec::parallel);
  const RateResult analytic = achievable_rate(policy, c);
  const EstimationStats st = estimation_stats(policy, c);
  const double max_expected = harmonic_number(users) * st.sigma_hhat2;
  check(r, std::isfinite(sim.mean_rate), "finite simulated rate");

  const bool ci_defined = sim.ci_halfwidth_99.has_value();
  const double diff = sim.mean_rate - analytic.value;
  // -1: undefined, 0: outside, 1: inside
  const int within = ci_defined ? (std::abs(diff) <= *sim.ci_halfwidth_99 ? 1 : 0) : -1;

  if (fmt == OutputFormat::csv) {
    Table t{{"seed", "n_blocks", "K", "alpha", "eps_bar", "P_T", "P_D", "mean_rate",
             "ci_halfwidth_99", "ci_defined", "analytic_rate", "analytic_within_ci",
             "empirical_sigma_e2", "analytic_sigma_e2", "empirical_max_hhat2_mean",
             "analytic_max_hhat2_mean"},
            {}};
    t.rows.push_back({std::to_string(sim.seed), sim.n_blocks, users, policy.alpha(),
                      policy.eps_bar(), policy.pilot_power(), policy.data_power(),
                      sim.mean_rate,
                      ci_defined ? Cell{*sim.ci_halfwidth_99} : Cell{std::string()},
                      std::int64_t{ci_defined ? 1 : 0}, analytic.value,
                      within >= 0 ? Cell{std::int64_t{within}} : Cell{std::string()},
                      sim.empirical_sigma_e2, st.sigma_e2, sim.empirical_max_hhat2_mean,
                      max_expected});
    r.text = t.csv();
    return r;
  }

  ojson j = header("simulate", c);
  j["seed"] = sim.seed;
  j["n_blocks"] = sim.n_blocks;
  ojson pol;
  pol["K"] = users;
  pol["alpha"] = num(policy.alpha());
  pol["eps_bar"] = num(policy.eps_bar());
  pol["P_T"] = num(policy.pilot_power());
  pol["P_D"] = num(policy.data_power());
  j["policy"] = pol;

  ojson o;
  o["mean_rate"] = num(sim.mean_rate);
  o["ci_halfwidth_99"] = ci_defined ? num(*sim.ci_halfwidth_99) : ojson(nullptr);
  o["ci_defined"] = ci_defined;
  if (!ci_defined) o["note"] = "variance undefined for a single block";
  o["n_blocks"] = sim.n_blocks;
  o["empirical_sigma_e2"] = num(sim.empirical_sigma_e2);
  o["empirical_max_hhat2_mean"] = num(sim.empirical_max_hhat2_mean);
  o["seed"] = sim.seed;
  o["rate_std"] = num(sim.rate_std);
  o["empirical_sigma_hhat2"] = num(sim.empirical_sigma_hhat2);
  o["cross_moment"] = num(sim.cross_moment);
  j["outcome"] = o;

  ojson a;
  a["rate"] = num(analytic.value);
  a["rate_err"] = num(analytic.err_estimate);
  a["rate_difference"] = num(diff);
  a["within_ci"] = within >= 0 ? ojson(within == 1) : ojson(nullptr);
  a["sigma_e2"] = num(st.sigma_e2);
  a["sigma_hhat2"] = num(st.sigma_hhat2);
  a["max_hhat2_mean"] = num(max_expected);
  j["analytic"] = a;
  r.text = dump(j);
  return r;
}

// ---------------------------------------------------------------- entry point

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Training/feedback optimization for opportunistic multiuser scheduling"};
  app.require_subcommand(1);
  app.fallthrough();

  double power = 0, sigma_h2 = 0, sigma_z2 = 0, snr_db = 0, eps_bar = 0;
  std::int64_t block_length = 0, k_max = 0, n_blocks = 0, users = 0;
  std::uint64_t seed = 0;
  std::string l_grid, output, format, config_path;

  auto* o_power = app.add_option("--power", power, "Total average power P");
  auto* o_sh = app.add_option("--sigma-h2", sigma_h2, "Channel variance (default 1)");
  auto* o_sz = app.add_option("--sigma-z2", sigma_z2, "Noise variance (default 0.1)");
  auto* o_snr = app.add_option("--snr-db", snr_db,
                               "SNR in dB; sets sigma-z2 unless that is given explicitly");
  auto* o_L = app.add_option("--block-length", block_length, "Coherence block length L");
  auto* o_grid = app.add_option("--l-grid", l_grid, "Comma-separated block lengths");
  auto* o_kmax = app.add_option("--k-max", k_max, "Largest K searched");
  auto* o_n = app.add_option("--n-blocks", n_blocks, "Monte Carlo blocks");
  auto* o_seed = app.add_option("--seed", seed, "RNG seed");
  auto* o_out = app.add_option("--output", output, "Write result to this file");
  auto* o_fmt = app.add_option("--format", format, "csv or json")
                    ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--config", config_path, "Flat JSON config mirroring the flags")
      ->check(CLI::ExistingFile);

  auto* s_opt = app.add_subcommand("optimize", "Exhaustive search for K* and its policy");
  auto* s_sweep = app.add_subcommand("sweep-k", "Rate at the optimal policy for every K");
  auto* s_gap = app.add_subcommand("approx-gap", "Normalized gaps of the rate approximations");
  auto* s_scale = app.add_subcommand("scaling", "Exact optima vs large-L expansions");
  auto* s_sim = app.add_subcommand("simulate", "Monte Carlo check of the analytic rate");
  auto* o_users = s_sim->add_option("--users", users, "Fixed K (default: K*)");
  auto* o_eps = s_sim->add_option("--eps-bar", eps_bar, "Fixed training power fraction");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  RunConfig cfg;
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      cfg = merge_json(cfg, nlohmann::json::parse(in));
    }
    if (*o_power) cfg.power = power;
    if (*o_sh) cfg.sigma_h2 = sigma_h2;
    if (*o_sz) cfg.sigma_z2 = sigma_z2;
    if (*o_snr) cfg.snr_db = snr_db;
    if (*o_L) cfg.block_length = block_length;
    if (*o_grid) cfg.l_grid = parse_l_grid(l_grid);
    if (*o_kmax) cfg.k_max = k_max;
    if (*o_n) cfg.n_blocks = n_blocks;
    if (*o_seed) cfg.seed = seed;
    if (*o_out) cfg.output = output;
    if (*o_fmt) cfg.format = parse_format(format);
    if (*o_users) cfg.users = users;
    if (*o_eps) cfg.eps_bar = eps_bar;
    if (cfg.k_max && *cfg.k_max < 1) throw std::invalid_argument("k-max must be >= 1");
    (void)cfg.system_config();  // validates P and the variances
  } catch (const std::exception& e) {
    err << "error: invalid configuration: " << e.what() << "\n";
    return kExitInvalid;
  }

  CommandResult result;
  try {
    if (*s_opt) {
      result = cmd_optimize(cfg, cfg.format.value_or(OutputFormat::json));
    } else if (*s_sweep) {
      result = cmd_sweep_k(cfg, cfg.format.value_or(OutputFormat::csv));
    } else if (*s_gap) {
      result = cmd_approx_gap(cfg, cfg.format.value_or(OutputFormat::csv));
    } else if (*s_scale) {
      result = cmd_scaling(cfg, cfg.format.value_or(OutputFormat::csv));
    } else if (*s_sim) {
      result = cmd_simulate(cfg, cfg.format.value_or(OutputFormat::json));
    }
  } catch (const std::logic_error& e) {  // domain, range and argument errors
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }

  for (const auto& w : result.warnings) err << "warning: " << w << "\n";

  if (cfg.output) {
    std::ofstream file(*cfg.output, std::ios::binary | std::ios::trunc);
    file << result.text;
    if (!file) {
      err << "error: cannot write " << *cfg.output << "\n";
      return kExitIo;
    }
  } else {
    out << result.text;
  }

  if (!result.failed_checks.empty()) {
    for (const auto& f : result.failed_checks) err << "consistency check failed: " << f << "\n";
    return kExitCheckFailed;
  }
  return kExitOk;
}

}  // namespace mudiv::cli
