#include "run_config.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mudiv::cli {

double RunConfig::resolved_sigma_h2() const { return sigma_h2.value_or(1.0); }

double RunConfig::resolved_sigma_z2() const {
  if (sigma_z2) return *sigma_z2;
  if (snr_db) return power * resolved_sigma_h2() / std::pow(10.0, *snr_db / 10.0);
  return 0.1;
}

SystemConfig RunConfig::system_config() const { return system_config(block_length); }

SystemConfig RunConfig::system_config(std::int64_t L) const {
  return SystemConfig(power, resolved_sigma_h2(), resolved_sigma_z2(), L);
}

std::string to_string(OutputFormat f) { return f == OutputFormat::csv ? "csv" : "json"; }

OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw std::invalid_argument("format must be csv or json, got '" + s + "'");
}

namespace {
std::int64_t parse_count(const std::string& token) {
  std::size_t used = 0;
  const double v = std::stod(token, &used);
  if (used != token.size() || !(v >= 1.0) || v != std::floor(v) || v > 9.0e15)
    throw std::invalid_argument("not a positive integer: '" + token + "'");
  return static_cast<std::int64_t>(v);
}

std::int64_t json_count(const nlohmann::json& v) {
  if (v.is_string()) return parse_count(v.get<std::string>());
  if (v.is_number_integer()) return v.get<std::int64_t>();
  return parse_count(std::to_string(v.get<double>()));
}
}  // namespace

std::vector<std::int64_t> parse_l_grid(const std::string& text) {
  std::vector<std::int64_t> out;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    const auto first = token.find_first_not_of(" \t");
    const auto last = token.find_last_not_of(" \t");
    if (first == std::string::npos) throw std::invalid_argument("empty entry in --l-grid");
    out.push_back(parse_count(token.substr(first, last - first + 1)));
  }
  if (out.empty()) throw std::invalid_argument("--l-grid is empty");
  return out;
}

RunConfig merge_json(RunConfig cfg, const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("config file must hold a JSON object");
  for (const auto& [key, v] : j.items()) {
    if (key == "power") cfg.power = v.get<double>();
    else if (key == "sigma-h2") cfg.sigma_h2 = v.get<double>();
    else if (key == "sigma-z2") cfg.sigma_z2 = v.get<double>();
    else if (key == "snr-db") cfg.snr_db = v.get<double>();
    else if (key == "block-length") cfg.block_length = json_count(v);
    else if (key == "l-grid") {
      if (v.is_string()) {
        cfg.l_grid = parse_l_grid(v.get<std::string>());
      } else {
        cfg.l_grid.clear();
        for (const auto& e : v) cfg.l_grid.push_back(json_count(e));
      }
    } else if (key == "k-max") cfg.k_max = json_count(v);
    else if (key == "n-blocks") cfg.n_blocks = json_count(v);
    else if (key == "seed") cfg.seed = v.get<std::uint64_t>();
    else if (key == "output") cfg.output = v.get<std::string>();
    else if (key == "format") cfg.format = parse_format(v.get<std::string>());
    else if (key == "users") cfg.users = json_count(v);
    else if (key == "eps-bar") cfg.eps_bar = v.get<double>();
    else throw std::invalid_argument("unknown config key '" + key + "'");
  }
  return cfg;
}

nlohmann::ordered_json to_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["power"] = cfg.power;
  if (cfg.sigma_h2) j["sigma-h2"] = *cfg.sigma_h2;
  if (cfg.sigma_z2) j["sigma-z2"] = *cfg.sigma_z2;
  if (cfg.snr_db) j["snr-db"] = *cfg.snr_db;
  j["block-length"] = cfg.block_length;
  j["l-grid"] = cfg.l_grid;
  if (cfg.k_max) j["k-max"] = *cfg.k_max;
  j["n-blocks"] = cfg.n_blocks;
  j["seed"] = cfg.seed;
  if (cfg.output) j["output"] = *cfg.output;
  if (cfg.format) j["format"] = to_string(*cfg.format);
  if (cfg.users) j["users"] = *cfg.users;
  if (cfg.eps_bar) j["eps-bar"] = *cfg.eps_bar;
  return j;
}

}  // namespace mudiv::cli
