#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "kg/data.hpp"
#include "kg/model.hpp"
#include "kg/training.hpp"

namespace kg {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string train_path;
  std::string valid_path;
  std::string test_path;
  TripleFormat format = TripleFormat::plain;
  bool drop_negatives = true;
  ModelSpec model;
  TrainConfig training;
  std::string out_dir = "run";
  bool allow_any = false;

  bool operator==(const RunConfig&) const = default;
};

/// Flat `key = value` text, one setting per line; `#` starts a comment.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);
/// Applies a `key=value` override as given on the command line.
void apply_override(RunConfig& config, const std::string& assignment);
/// Every key in a fixed order; parse_run_config(to_config_text(c)) == c.
std::string to_config_text(const RunConfig& config);

/// Throws ConfigError on any violation. Grid checks (batch size, weight decay,
/// embedding size, hidden multiplier) are skipped when allow_any is set.
void validate_run_config(const RunConfig& config, bool check_paths = true);

inline constexpr std::int64_t kBatchSizeGrid[] = {10000, 20000, 50000};
inline constexpr double kWeightDecayGrid[] = {0.001, 0.01, 0.1};
inline constexpr std::int64_t kDimGrid[] = {100, 200};
inline constexpr std::int64_t kHiddenMultiplierGrid[] = {10, 20};

struct RunManifest {
  std::string config_text;
  std::uint64_t seed = 0;
  std::string code_version;
  std::string started_at;
  std::string finished_at;
  std::map<std::string, std::string> artifacts;
};

std::string manifest_to_json(const RunManifest& manifest);
std::string utc_timestamp();

}  // namespace kg
