#pragma once

// Command-line / JSON run configuration. JSON keys are the long flag names
// without the leading dashes; flags given on the command line override the
// file.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mudiv/core_model.hpp"

namespace mudiv::cli {

enum class OutputFormat { csv, json };

inline constexpr std::uint64_t kDefaultSeed = 20110906;

struct RunConfig {
  double power = 1.0;
  std::optional<double> sigma_h2;  // default 1
  std::optional<double> sigma_z2;  // default 0.1, or derived from snr_db
  std::optional<double> snr_db;
  std::int64_t block_length = 250;
  std::vector<std::int64_t> l_grid = {250, 1000, 10000, 100000, 1000000};
  std::optional<std::int64_t> k_max;
  std::int64_t n_blocks = 1000000;
  std::uint64_t seed = kDefaultSeed;
  std::optional<std::string> output;
  std::optional<OutputFormat> format;
  std::optional<std::int64_t> users;
  std::optional<double> eps_bar;

  bool operator==(const RunConfig&) const = default;

  double resolved_sigma_h2() const;
  /// Explicit sigma_z2 wins over --snr-db; otherwise snr_db sets
  /// sigma_z2 = P sigma_h2 / 10^(snr_db/10).
  double resolved_sigma_z2() const;
  /// True when --snr-db was given but ignored because sigma_z2 was explicit.
  bool snr_db_ignored() const { return snr_db.has_value() && sigma_z2.has_value(); }

  SystemConfig system_config() const;
  SystemConfig system_config(std::int64_t block_length) const;
};

std::string to_string(OutputFormat f);
OutputFormat parse_format(const std::string& s);

/// Comma-separated positive integers; accepts exponent notation ("1e6").
std::vector<std::int64_t> parse_l_grid(const std::string& text);

/// Applies the keys present in `j` on top of `base`. Unknown keys throw.
RunConfig merge_json(RunConfig base, const nlohmann::json& j);

/// Every field that is set, under its flag name.
nlohmann::ordered_json to_json(const RunConfig& cfg);

}  // namespace mudiv::cli
