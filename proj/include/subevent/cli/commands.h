#pragma once

#include <ostream>
#include <string>
#include <vector>

// Subcommand bodies. Each returns the process exit code and writes reports
// to `out` (JSON) and diagnostics to `err`.
namespace subevent::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailed = 1;
inline constexpr int kExitUsage = 2;

struct CommonOptions {
  std::string config_file;             // flat JSON; empty for defaults
  std::vector<std::string> overrides;  // key=value, applied after the file
};

struct GenerateOptions {
  CommonOptions common;
  std::string out_dir;  // overrides the out_dir key
};

struct TrainOptions {
  CommonOptions common;
  std::string train_dir;
  std::string dev_dir;
  std::string out_dir;
  std::string resume;  // always rejected: training is single-shot
};

struct EvalOptions {
  CommonOptions common;
  std::string model_dir;
  std::string data_dir;
  std::string baseline;  // "" or "burst"
  std::string protocol;  // default: bin-level for BIO models, binary-event otherwise
  std::string aggregation = "micro";
  bool all = false;
};

struct PredictOptions {
  CommonOptions common;
  std::string model_dir;
  std::string data_dir;
};

struct GradCheckOptions {
  CommonOptions common;
  std::string variant = "all";
  bool inject_fault = false;
};

int CmdGenerate(const GenerateOptions &options, std::ostream &out, std::ostream &err);
int CmdTrain(const TrainOptions &options, std::ostream &out, std::ostream &err);
int CmdEval(const EvalOptions &options, std::ostream &out, std::ostream &err);
int CmdPredict(const PredictOptions &options, std::ostream &out, std::ostream &err);
int CmdGradCheck(const GradCheckOptions &options, std::ostream &out, std::ostream &err);

}  // namespace subevent::cli
