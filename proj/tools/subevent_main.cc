#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "subevent/cli/commands.h"

namespace {

using namespace subevent::cli;

void AddCommon(CLI::App *cmd, CommonOptions &common) {
  cmd->add_option("-c,--config", common.config_file, "Flat JSON config file");
  cmd->add_option("--set", common.overrides, "Override a config key (key=value), repeatable")
      ->allow_extra_args(false);
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Sub-event detection in match tweet streams"};
  app.require_subcommand(1);

  GenerateOptions generate;
  auto *gen = app.add_subcommand("generate", "Write a synthetic train/dev/test dataset");
  AddCommon(gen, generate.common);
  gen->add_option("-o,--out", generate.out_dir, "Dataset root directory");

  TrainOptions train;
  auto *tr = app.add_subcommand("train", "Train a labeler and write its checkpoint");
  AddCommon(tr, train.common);
  tr->add_option("--train", train.train_dir, "Training stream directory");
  tr->add_option("--dev", train.dev_dir, "Development stream directory");
  tr->add_option("-o,--out", train.out_dir, "Output directory");
  tr->add_option("--resume", train.resume, "Not supported; rejected with exit code 2");

  EvalOptions eval;
  auto *ev = app.add_subcommand("eval", "Score a model or the burst baseline");
  AddCommon(ev, eval.common);
  ev->add_option("-m,--model", eval.model_dir, "Model directory");
  ev->add_option("-d,--data", eval.data_dir, "Stream directory")->required();
  ev->add_option("--baseline", eval.baseline, "Evaluate a baseline instead of a model")
      ->check(CLI::IsMember({"burst"}));
  ev->add_option("--protocol", eval.protocol, "binary-event | relaxed | bin-level");
  ev->add_option("--agg", eval.aggregation, "micro | macro");
  ev->add_flag("--all", eval.all, "Every protocol and aggregation, as a JSON array");

  PredictOptions predict;
  auto *pr = app.add_subcommand("predict", "Per-bin labels and decoded spans");
  AddCommon(pr, predict.common);
  pr->add_option("-m,--model", predict.model_dir, "Model directory")->required();
  pr->add_option("-d,--data", predict.data_dir, "Stream directory")->required();

  GradCheckOptions gradcheck;
  auto *gc = app.add_subcommand("gradcheck", "Compare backprop with finite differences");
  AddCommon(gc, gradcheck.common);
  gc->add_option("--variant", gradcheck.variant, "Encoder variant, or all");
  gc->add_flag("--inject-fault", gradcheck.inject_fault, "Add a wrong-sign backward (must fail)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kExitUsage;
  }

  if (*gen) return CmdGenerate(generate, std::cout, std::cerr);
  if (*tr) return CmdTrain(train, std::cout, std::cerr);
  if (*ev) return CmdEval(eval, std::cout, std::cerr);
  if (*pr) return CmdPredict(predict, std::cout, std::cerr);
  return CmdGradCheck(gradcheck, std::cout, std::cerr);
}
