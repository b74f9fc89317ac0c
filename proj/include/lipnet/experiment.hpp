#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lipnet/network.hpp"
#include "lipnet/norm.hpp"

namespace lipnet {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

enum class Command { Approximate, Certify, UniformM, Sweep };

std::string to_string(Command c);
Command parse_command(std::string_view name);

/// One experiment. On disk it is a `key = value` file (blank lines and `#`
/// comments ignored); see to_text for the keys. Output paths are relative to
/// out_dir, input paths to the working directory.
struct ExperimentConfig {
  std::optional<Command> command;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  /// Builtin target name or a lattice / scattered-sample CSV path.
  std::string target = "abs-shift";
  double L = 1.0;
  double epsilon = 0.1;
  std::vector<double> eps_list;
  NormKind norm = NormKind::L1;
  int dim = 1;
  Activation activation = Activation::Relu;
  int m_max = 1024;
  /// Lower corner followed by upper corner; empty means the unit cube (or the
  /// samples' bounding box for file targets).
  std::vector<double> box;
  /// Box of the eps-net for uniform-m; empty means `box`.
  std::vector<double> hat_box;
  std::string net_path;
  int trials = 500;
  int validation = 50;
  std::uint64_t validation_seed = 1;
  /// Also write gnuplot-style .dat files.
  bool plots = true;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Every key, one per line, doubles in shortest round-trip form.
std::string to_text(const ExperimentConfig& config);
/// Throws ArgumentError on unknown keys, bad values or a missing command.
ExperimentConfig parse_config(std::string_view text);

/// Runs the experiment and writes its artifacts under out_dir. Returns
/// kExitOk when every declared success holds, kExitFailure otherwise (the
/// failing stage is named on `log`), kExitUsage for invalid input.
int run(const ExperimentConfig& config, std::ostream& log);

}  // namespace lipnet
