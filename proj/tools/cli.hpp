#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qtur::cli {

enum class Command { kValidate, kPropagate, kTur, kSweep, kFcsCompare, kClassicalCheck, kExample };

std::string to_string(Command command);

// Exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitInput = 2;

struct RunConfig {
  Command command = Command::kValidate;

  std::filesystem::path model;
  std::filesystem::path state;
  std::filesystem::path observable;
  std::filesystem::path output;  // empty writes to stdout

  double time = 1.0;                                         // propagate
  std::vector<double> delta_t = {0.01, 0.02, 0.05, 0.1, 0.2};  // sweep
  std::vector<double> lambda_grid;                           // empty: default grid
  int lambda_points = 41;
  double eigenvalue_floor = 1e-12;
  bool flooring = true;
  double tolerance = 1e-9;

  // Collective example.
  std::string sign = "+";
  std::vector<int> n_values = {4, 8, 16, 32, 64};
  double omega = 1.0;
  double gamma_plus = 1.0;
  double gamma_minus = 1.0;
  double p_g = 0.5;
  std::optional<double> bias;
  std::string basis = "product";

  std::uint64_t seed = 20240601;
  unsigned workers = 1;

  /// Throws qtur::Error(kInvalidArgument) on inconsistent options and kIo on
  /// missing input files.
  void validate() const;
};

/// Executes one command. Reports go to `config.output` or `out`; diagnostics
/// to `err`. Returns one of the exit statuses above.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses the command line and calls run().
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qtur::cli
