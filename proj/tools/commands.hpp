#ifndef PFAB_TOOLS_COMMANDS_HPP_
#define PFAB_TOOLS_COMMANDS_HPP_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace pfab::cli {

enum ExitCode : int { kOk = 0, kInvalidInput = 1, kIoFailure = 2 };

struct ScoreOptions {
  std::size_t l_max = 8192;
  std::size_t l_buffer = 1024;
};

struct SolveOptions {
  std::size_t max_iter = 50;
  double tol = 1e-6;
  bool raw = false;  // skip centering and standardization
};

struct AdvantageOptions {
  std::string engine = "pfab";
  std::vector<double> weights;  // grpo only; empty = uniform
  double tau = 1e-6;
  double eps = 1e-12;
};

struct SimulateOptions {
  std::optional<std::string> engine;  // pfab | grpo | both; overrides config
  std::optional<std::uint64_t> seed;  // overrides train.seed
  std::optional<std::string> output;  // overrides config output path
};

struct CompareOptions {
  std::size_t seeds = 5;
  std::vector<std::string> engines = {"pfab", "grpo"};
  std::optional<std::uint64_t> seed;  // first training seed
};

/// Every command writes its primary output to `out` and human-readable
/// problems to `err`, returning an ExitCode.
int cmd_score(const std::string& input_path, const ScoreOptions& options, std::ostream& out,
              std::ostream& err);
int cmd_solve(const std::string& matrix_path, const SolveOptions& options, std::ostream& out,
              std::ostream& err);
int cmd_advantages(const std::string& matrix_path, const AdvantageOptions& options,
                   std::ostream& out, std::ostream& err);
/// Writes trace CSV file(s) and prints the summary JSON to `out`.
int cmd_simulate(const std::string& config_path, const SimulateOptions& options,
                 std::ostream& out, std::ostream& err);
int cmd_compare(const std::string& config_path, const CompareOptions& options, std::ostream& out,
                std::ostream& err);

/// Rounds to 9 significant digits so JSON output is stable across runs.
double round9(double value);

}  // namespace pfab::cli

#endif  // PFAB_TOOLS_COMMANDS_HPP_
