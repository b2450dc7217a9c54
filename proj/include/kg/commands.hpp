#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kg/bias.hpp"
#include "kg/evaluation.hpp"

namespace kg {

/// Process exit codes shared by every subcommand.
enum ExitCode : int { kExitOk = 0, kExitRuntime = 1, kExitUsage = 2 };

struct AuditBiasArgs {
  std::string train;
  std::string valid;
  std::string test;
  double threshold = kDefaultInverseThreshold;
  std::string format = "plain";
  std::string out_dir;
};

struct TrainArgs {
  std::string config_path;
  std::vector<std::string> overrides;
};

struct EvaluateArgs {
  std::string checkpoint;
  std::string train;
  std::string valid;
  std::string test;
  std::string format = "plain";
  bool raw = false;
  std::string out;  // report path; empty prints the JSON to stdout
  std::string model_label;
  std::string dataset_label;
};

struct ParamCountArgs {
  std::string model;
  std::int64_t dim = 100;
  std::int64_t hidden_multiplier = 10;
  std::string train;
  std::string valid;
  std::string test;
  std::string format = "plain";
};

/// Writes bias_report.json and bias_summary.txt into out_dir.
int cmd_audit_bias(const AuditBiasArgs& args, std::ostream& out, std::ostream& err);
/// Writes manifest.json, history.jsonl, checkpoint_last.kgc, checkpoint_best.kgc.
int cmd_train(const TrainArgs& args, std::ostream& out, std::ostream& err);
int cmd_evaluate(const EvaluateArgs& args, std::ostream& out, std::ostream& err);
int cmd_param_count(const ParamCountArgs& args, std::ostream& out, std::ostream& err);

std::string code_version();

}  // namespace kg
