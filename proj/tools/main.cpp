#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

class NullBuffer : public std::streambuf {
 protected:
  int overflow(int c) override { return c; }
};

std::vector<double> parse_weight_list(const std::string& text) {
  std::vector<double> weights;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    const double w = std::stod(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad weight '" + item + "'");
    weights.push_back(w);
  }
  return weights;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace pfab::cli;

  CLI::App app{"Multi-objective advantage balancing toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::uint64_t> seed;
  std::string output;
  bool quiet = false;
  app.add_option("--seed", seed, "Training seed override (simulate, compare)");
  app.add_option("--output", output, "Write the command output to this path");
  app.add_flag("--quiet", quiet, "Suppress diagnostics on stderr");

  std::string input;

  auto* score = app.add_subcommand("score", "Score JSONL response records");
  ScoreOptions score_opts;
  score->add_option("input", input, "JSONL records")->required();
  score->add_option("--l-max", score_opts.l_max, "Hard length limit in tokens");
  score->add_option("--l-buffer", score_opts.l_buffer, "Length buffer zone in tokens");

  auto* solve = app.add_subcommand("solve", "Min-norm simplex weights of a CSV matrix");
  SolveOptions solve_opts;
  solve->add_option("matrix", input, "CSV matrix, rows = samples")->required();
  solve->add_option("--max-iter", solve_opts.max_iter, "Frank-Wolfe iteration cap");
  solve->add_option("--tol", solve_opts.tol, "Weight-change tolerance");
  solve->add_flag("--raw", solve_opts.raw, "Skip centering and standardization");

  auto* advantages = app.add_subcommand("advantages", "Group advantages of a CSV reward matrix");
  AdvantageOptions adv_opts;
  std::string weight_list;
  advantages->add_option("matrix", input, "CSV with group_id and objective columns")->required();
  advantages->add_option("--engine", adv_opts.engine, "pfab or grpo");
  advantages->add_option("--weights", weight_list, "Comma-separated grpo weights");
  advantages->add_option("--tau", adv_opts.tau, "Objective spread threshold");
  advantages->add_option("--eps", adv_opts.eps, "Normalization guard");

  auto* simulate = app.add_subcommand("simulate", "Run a bandit training experiment");
  std::string sim_engine;
  simulate->add_option("config", input, "Experiment JSON")->required();
  simulate->add_option("--engine", sim_engine, "pfab, grpo or both");

  auto* compare = app.add_subcommand("compare", "Run both engines over several seeds");
  CompareOptions compare_opts;
  std::string engine_list;
  compare->add_option("config", input, "Experiment JSON")->required();
  compare->add_option("--seeds", compare_opts.seeds, "Number of training seeds");
  compare->add_option("--engines", engine_list, "Comma-separated engines (default pfab,grpo)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalidInput;
  }

  NullBuffer null_buffer;
  std::ostream null_stream(&null_buffer);
  std::ostream& err = quiet ? null_stream : std::cerr;
  std::ostringstream out;

  int status = kOk;
  if (score->parsed()) {
    status = cmd_score(input, score_opts, out, err);
  } else if (solve->parsed()) {
    status = cmd_solve(input, solve_opts, out, err);
  } else if (advantages->parsed()) {
    if (!weight_list.empty()) {
      try {
        adv_opts.weights = parse_weight_list(weight_list);
      } catch (const std::exception& e) {
        err << "error: --weights: " << e.what() << '\n';
        return kInvalidInput;
      }
    }
    status = cmd_advantages(input, adv_opts, out, err);
  } else if (simulate->parsed()) {
    SimulateOptions opts;
    opts.seed = seed;
    if (!sim_engine.empty()) opts.engine = sim_engine;
    if (!output.empty()) opts.output = output;
    // The trace goes to --output; the summary always goes to stdout.
    output.clear();
    status = cmd_simulate(input, opts, out, err);
  } else if (compare->parsed()) {
    compare_opts.seed = seed;
    if (!engine_list.empty()) {
      compare_opts.engines.clear();
      std::stringstream in(engine_list);
      std::string item;
      while (std::getline(in, item, ',')) compare_opts.engines.push_back(item);
    }
    status = cmd_compare(input, compare_opts, out, err);
  }

  if (output.empty()) {
    std::cout << out.str();
    std::cout.flush();
    return std::cout ? status : kIoFailure;
  }
  std::ofstream file(output, std::ios::binary | std::ios::trunc);
  file << out.str();
  file.flush();
  if (!file) {
    err << "error: cannot write '" << output << "'\n";
    return kIoFailure;
  }
  return status;
}
