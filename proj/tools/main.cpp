#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "penet/errors.hpp"

namespace {

constexpr int kUsageExit = 2;

#ifdef PENET_GRADCHECK_INJECT_BUG
// Checker sanity build: corrupts one analytic gradient so gradcheck must fail.
void inject_bug(penet::ParamRefs<double>& params) {
  for (auto* p : params) {
    if (p->name == "encoder.0.weight") {
      for (double& g : p->grad.data()) g = -g;
    }
  }
}
#endif

}  // namespace

int main(int argc, char** argv) {
  using namespace penet::cli;

  CLI::App app{"Point-embedding network: train, evaluate and inspect models"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train a model on a dataset directory");
  train_cmd->add_option("--config", train.config, "key=value config file")->check(CLI::ExistingFile);
  train_cmd->add_option("--data", train.data, "Dataset root with train.txt")->required();
  train_cmd->add_option("--out", train.out, "Checkpoint path")->required();
  train_cmd->add_option("--log", train.log, "CSV log path (default <out>.log.csv)");
  train_cmd->add_option("--seed", train.seed, "Seed (overrides config)");
  train_cmd->add_option("--set", train.overrides, "Config override key=value (repeatable)");
  train_cmd->add_option("--threads", train.threads, "Worker threads (default PENET_THREADS or 1)");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint");
  eval_cmd->add_option("--ckpt", eval.ckpt, "Checkpoint")->required();
  eval_cmd->add_option("--data", eval.data, "Dataset root")->required();
  eval_cmd->add_option("--split", eval.split, "Split name")->capture_default_str();
  eval_cmd->add_option("--points", eval.points, "Points per cloud (default: training count)");
  eval_cmd->add_option("--threads", eval.threads, "Worker threads");

  SweepArgs sweep;
  std::string sweep_points;
  auto* sweep_cmd = app.add_subcommand("sweep", "Accuracy across inference point counts");
  sweep_cmd->add_option("--ckpt", sweep.ckpt, "Checkpoint")->required();
  sweep_cmd->add_option("--data", sweep.data, "Dataset root")->required();
  sweep_cmd->add_option("--split", sweep.split, "Split name")->capture_default_str();
  sweep_cmd->add_option("--points", sweep_points, "Comma-separated counts, e.g. 64,256,1024")->required();
  sweep_cmd->add_option("--out", sweep.out, "CSV output path")->required();
  sweep_cmd->add_option("--threads", sweep.threads, "Worker threads");

  EmbedArgs embed;
  auto* embed_cmd = app.add_subcommand("embed", "Print the normalized global feature of one cloud");
  embed_cmd->add_option("--ckpt", embed.ckpt, "Checkpoint")->required();
  embed_cmd->add_option("--cloud", embed.cloud, "Text point cloud")->required();

  GradcheckArgs grad;
  auto* grad_cmd = app.add_subcommand("gradcheck", "Finite-difference check of both heads");
  grad_cmd->add_option("--depth", grad.depth, "Encoder depth (1-5)")->capture_default_str();
  grad_cmd->add_option("--k", grad.k, "Embedding width (perfect square)")->capture_default_str();
  grad_cmd->add_option("--seed", grad.seed, "Seed")->capture_default_str();

  SynthArgs synth;
  std::string synth_split;
  auto* synth_cmd = app.add_subcommand("synth", "Write the synthetic shape dataset");
  synth_cmd->add_option("--out", synth.out, "Output directory")->required();
  synth_cmd->add_option("--per-class", synth.per_class, "Clouds per class and split")->capture_default_str();
  synth_cmd->add_option("--points", synth.points, "Points per cloud")->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed, "Seed")->capture_default_str();
  synth_cmd->add_option("--split", synth_split, "Write only this split (default: train and test)");

  MnistArgs mnist;
  auto* mnist_cmd = app.add_subcommand("mnist", "Convert IDX digits to text point clouds");
  mnist_cmd->add_option("--images", mnist.images, "IDX image file")->required()->check(CLI::ExistingFile);
  mnist_cmd->add_option("--labels", mnist.labels, "IDX label file")->required()->check(CLI::ExistingFile);
  mnist_cmd->add_option("--out", mnist.out, "Dataset root")->required();
  mnist_cmd->add_option("--split", mnist.split, "Split name")->capture_default_str();
  mnist_cmd->add_option("--count", mnist.count, "Digits to convert (0 = all)");
  mnist_cmd->add_option("--points", mnist.points, "Points per digit")->capture_default_str();
  mnist_cmd->add_option("--seed", mnist.seed, "Seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageExit;
  }

  try {
    if (*train_cmd) return cmd_train(train, std::cout, std::cerr);
    if (*eval_cmd) return cmd_eval(eval, std::cout, std::cerr);
    if (*sweep_cmd) {
      try {
        sweep.points = parse_count_list(sweep_points);
      } catch (const penet::ConfigError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsageExit;
      }
      return cmd_sweep(sweep, std::cout, std::cerr);
    }
    if (*embed_cmd) return cmd_embed(embed, std::cout, std::cerr);
    if (*grad_cmd) {
#ifdef PENET_GRADCHECK_INJECT_BUG
      grad.after_backward = inject_bug;
#endif
      return cmd_gradcheck(grad, std::cout, std::cerr);
    }
    if (*synth_cmd) {
      if (!synth_split.empty()) synth.splits = {synth_split};
      return cmd_synth(synth, std::cout, std::cerr);
    }
    if (*mnist_cmd) return cmd_mnist(mnist, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kUsageExit;
}
