#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "lipnet/experiment.hpp"

namespace {

using lipnet::ExperimentConfig;

const std::map<std::string, lipnet::NormKind> kNorms{
    {"l1", lipnet::NormKind::L1}, {"l2", lipnet::NormKind::L2}, {"linf", lipnet::NormKind::Linf}};

const std::map<std::string, lipnet::Activation> kActivations{{"relu", lipnet::Activation::Relu},
                                                             {"tanh", lipnet::Activation::Tanh},
                                                             {"softplus", lipnet::Activation::Softplus},
                                                             {"sigmoid", lipnet::Activation::Sigmoid}};

void add_common(CLI::App* sub, ExperimentConfig& cfg) {
  sub->add_option("--out", cfg.out_dir, "Output directory")->capture_default_str();
  sub->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  sub->add_option("--L", cfg.L, "Lipschitz constant")->capture_default_str();
  sub->add_option("--norm", cfg.norm, "Norm: l1, l2 or linf")
      ->transform(CLI::CheckedTransformer(kNorms, CLI::ignore_case));
  sub->add_option("--box", cfg.box, "Lower corner then upper corner")->expected(2, 2 * 64);
}

void add_target(CLI::App* sub, ExperimentConfig& cfg) {
  sub->add_option("--target", cfg.target, "Builtin target name or sample CSV path")->capture_default_str();
  sub->add_option("--dim", cfg.dim, "Dimension of builtin targets")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--activation", cfg.activation, "relu, tanh, softplus or sigmoid")
      ->transform(CLI::CheckedTransformer(kActivations, CLI::ignore_case));
  sub->add_option("--m-max", cfg.m_max, "Largest hidden width")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_flag("!--no-plots", cfg.plots, "Skip the .dat plot files");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified Lipschitz shallow-network approximation experiments"};
  app.require_subcommand(1);

  ExperimentConfig cfg;

  auto* approx = app.add_subcommand("approximate", "Approximate a target and certify the network");
  add_common(approx, cfg);
  add_target(approx, cfg);
  approx->add_option("--eps", cfg.epsilon, "Accuracy")->capture_default_str();

  auto* cert = app.add_subcommand("certify", "Certify the Lipschitz constant of a stored network");
  add_common(cert, cfg);
  cert->add_option("--net", cfg.net_path, "Network JSON file")->required();

  auto* uniform = app.add_subcommand("uniform-m", "Uniform width over an eps-net of Lipschitz functions");
  add_common(uniform, cfg);
  uniform->add_option("--eps", cfg.epsilon, "Accuracy")->capture_default_str();
  uniform->add_option("--dim", cfg.dim, "Dimension (1 or 2)")->check(CLI::Range(1, 2))->capture_default_str();
  uniform->add_option("--activation", cfg.activation, "relu, tanh, softplus or sigmoid")
      ->transform(CLI::CheckedTransformer(kActivations, CLI::ignore_case));
  uniform->add_option("--m-max", cfg.m_max, "Largest hidden width")->check(CLI::PositiveNumber);
  uniform->add_option("--hat-box", cfg.hat_box, "Box of the eps-net, lower corner then upper corner")
      ->expected(2, 4);
  uniform->add_option("--trials", cfg.trials, "Covering-radius trials")->check(CLI::NonNegativeNumber);
  uniform->add_option("--validation", cfg.validation, "Fresh validation functions")->check(CLI::NonNegativeNumber);
  uniform->add_option("--validation-seed", cfg.validation_seed, "Seed of the validation functions");

  auto* sweep = app.add_subcommand("sweep", "Approximate one target over a decreasing list of accuracies");
  add_common(sweep, cfg);
  add_target(sweep, cfg);
  sweep->add_option("--eps-list", cfg.eps_list, "Decreasing accuracies")->required()->delimiter(',');

  std::string config_path;
  bool print_config = false;
  auto* from_file = app.add_subcommand("run", "Run an experiment described by a config file");
  from_file->add_option("--config", config_path, "Config file (key = value lines)")->required();
  app.add_flag("--print-config", print_config, "Print the resolved config instead of running");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? lipnet::kExitOk : lipnet::kExitUsage;
  }

  if (from_file->parsed()) {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "usage error: cannot read config file " << config_path << "\n";
      return lipnet::kExitUsage;
    }
    std::stringstream text;
    text << in.rdbuf();
    try {
      cfg = lipnet::parse_config(text.str());
    } catch (const lipnet::ArgumentError& e) {
      std::cerr << "usage error: " << e.what() << "\n";
      return lipnet::kExitUsage;
    }
  } else if (approx->parsed()) {
    cfg.command = lipnet::Command::Approximate;
  } else if (cert->parsed()) {
    cfg.command = lipnet::Command::Certify;
  } else if (uniform->parsed()) {
    cfg.command = lipnet::Command::UniformM;
  } else {
    cfg.command = lipnet::Command::Sweep;
  }

  if (print_config) {
    std::cout << lipnet::to_text(cfg);
    return lipnet::kExitOk;
  }
  return lipnet::run(cfg, std::cout);
}
