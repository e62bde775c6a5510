#include "commands.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "pfab/advantage.hpp"
#include "pfab/minnorm.hpp"
#include "pfab/rewards.hpp"
#include "pfab/simulator.hpp"

namespace pfab::cli {

using Json = nlohmann::ordered_json;

namespace {

/// Input the user can fix: bad schema, bad cell, bad flag.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("error while reading '" + path + "'");
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << content;
  out.flush();
  if (!out) throw IoError("error while writing '" + path + "'");
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string line;
  std::istringstream in(text);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return std::string(s.substr(first, last - first + 1));
}

bool blank(const std::string& line) { return trim(line).empty(); }

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::optional<double> parse_real(const std::string& cell) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = first + cell.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) return std::nullopt;
  return value;
}

std::optional<GroupId> parse_integer(const std::string& cell) {
  GroupId value = 0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) return std::nullopt;
  return value;
}

struct NumericCsv {
  std::vector<std::string> header;
  std::vector<std::size_t> line_numbers;  // 1-based, per data row
  std::vector<std::vector<std::string>> cells;
};

NumericCsv read_csv(const std::string& path) {
  NumericCsv csv;
  const auto lines = split_lines(read_file(path));
  std::size_t width = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (blank(lines[i])) continue;
    auto row = split_csv_row(lines[i]);
    if (width == 0) {
      width = row.size();
      const bool numeric_free = std::none_of(row.begin(), row.end(), [](const std::string& c) {
        return parse_real(c).has_value();
      });
      if (numeric_free) {
        csv.header = std::move(row);
        continue;
      }
    }
    if (row.size() != width) {
      throw InputError("line " + std::to_string(i + 1) + ": expected " + std::to_string(width) +
                       " columns, found " + std::to_string(row.size()));
    }
    csv.line_numbers.push_back(i + 1);
    csv.cells.push_back(std::move(row));
  }
  if (csv.cells.empty()) throw InputError("'" + path + "' contains no data rows");
  return csv;
}

double cell_value(const NumericCsv& csv, std::size_t row, std::size_t col) {
  const auto value = parse_real(csv.cells[row][col]);
  if (!value) {
    throw InputError("line " + std::to_string(csv.line_numbers[row]) + ", column " +
                     std::to_string(col + 1) + ": non-numeric cell '" + csv.cells[row][col] + "'");
  }
  return *value;
}

Json number_array(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(round9(v[i]));
  return out;
}

Json optional_number(const std::optional<double>& v) {
  return v ? Json(round9(*v)) : Json(nullptr);
}

// ---------------------------------------------------------------- score

char parse_letter(const Json& value) {
  if (!value.is_string() || value.get<std::string>().size() != 1) {
    throw std::invalid_argument("gt_answer must be a single letter");
  }
  return value.get<std::string>()[0];
}

std::size_t positive_count(const Json& value, const char* field) {
  if (!value.is_number_integer() || value.get<long long>() <= 0) {
    throw std::invalid_argument(std::string(field) + " must be a positive integer");
  }
  return static_cast<std::size_t>(value.get<long long>());
}

struct ParsedScoreLine {
  RecordInput record;
  RewardConfig config;
};

ParsedScoreLine parse_score_line(const Json& j, const ScoreOptions& options) {
  ParsedScoreLine parsed;
  auto& rec = parsed.record;
  if (!j.is_object()) throw std::invalid_argument("record must be a JSON object");
  if (!j.contains("id") || !j["id"].is_string()) throw std::invalid_argument("id must be a string");
  rec.id = j["id"].get<std::string>();
  if (!j.contains("group_id") || !j["group_id"].is_number_integer() ||
      j["group_id"].get<long long>() < 0) {
    throw InvalidRecordError(rec.id, "group_id must be a nonnegative integer");
  }
  rec.group_id = j["group_id"].get<long long>();

  const auto task = j.value("task", Json()).is_string() ? j["task"].get<std::string>() : "";
  if (task == "grounding") {
    rec.task = TaskKind::kGrounding;
  } else if (task == "multichoice") {
    rec.task = TaskKind::kMultichoice;
  } else {
    throw InvalidRecordError(rec.id, "task must be \"grounding\" or \"multichoice\"");
  }
  if (!j.contains("response_text") || !j["response_text"].is_string()) {
    throw InvalidRecordError(rec.id, "response_text must be a string");
  }
  rec.response_text = j["response_text"].get<std::string>();

  try {
    if (j.contains("gt_segments") && !j["gt_segments"].is_null()) {
      const auto& segs = j["gt_segments"];
      if (!segs.is_array()) throw std::invalid_argument("gt_segments must be an array of pairs");
      std::vector<TimeSegment> out;
      for (const auto& pair : segs) {
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
          throw std::invalid_argument("gt_segments entries must be [start, end] number pairs");
        }
        out.push_back({pair[0].get<double>(), pair[1].get<double>()});
      }
      rec.gt_segments = std::move(out);
    }
    if (j.contains("gt_answer") && !j["gt_answer"].is_null()) rec.gt_answer = parse_letter(j["gt_answer"]);
    parsed.config.l_max = options.l_max;
    parsed.config.l_buffer = options.l_buffer;
    if (j.contains("l_max") && !j["l_max"].is_null()) parsed.config.l_max = positive_count(j["l_max"], "l_max");
    if (j.contains("l_buffer") && !j["l_buffer"].is_null()) {
      parsed.config.l_buffer = positive_count(j["l_buffer"], "l_buffer");
    }
    parsed.config.validate();
  } catch (const std::invalid_argument& e) {
    throw InvalidRecordError(rec.id, e.what());
  }
  return parsed;
}

Json scored_to_json(const ScoredRecord& s) {
  Json out;
  out["id"] = s.id;
  out["group_id"] = s.group_id;
  out["rewards"] = {{"format", round9(s.reward.format)},
                    {"task", round9(s.reward.task)},
                    {"length", round9(s.reward.length)}};
  out["diagnostics"] = {{"format", s.diagnostics.format},
                        {"task", s.diagnostics.task},
                        {"length", s.diagnostics.length}};
  return out;
}

// ------------------------------------------------------------ simulate

struct ConfigError : std::runtime_error {
  ConfigError(const std::string& field, const std::string& what)
      : std::runtime_error("config field '" + field + "': " + what) {}
};

struct ExperimentConfig {
  sim::EnvConfig env;
  std::uint64_t env_seed = 0;
  sim::TrainConfig train;
  std::optional<std::string> output;
};

void reject_unknown(const Json& object, const std::string& prefix,
                    std::initializer_list<const char*> known) {
  for (const auto& [key, value] : object.items()) {
    const bool ok = std::any_of(known.begin(), known.end(), [&](const char* k) { return key == k; });
    if (!ok) throw ConfigError(prefix + key, "unknown field");
  }
}

std::size_t get_count(const Json& object, const std::string& prefix, const char* key,
                      std::size_t fallback) {
  if (!object.contains(key)) return fallback;
  const auto& v = object[key];
  if (!v.is_number_unsigned()) throw ConfigError(prefix + key, "must be a nonnegative integer");
  return v.get<std::size_t>();
}

double get_real(const Json& object, const std::string& prefix, const char* key, double fallback) {
  if (!object.contains(key)) return fallback;
  const auto& v = object[key];
  if (!v.is_number()) throw ConfigError(prefix + key, "must be a number");
  return v.get<double>();
}

std::string get_string(const Json& object, const std::string& prefix, const char* key,
                       const std::string& fallback) {
  if (!object.contains(key)) return fallback;
  const auto& v = object[key];
  if (!v.is_string()) throw ConfigError(prefix + key, "must be a string");
  return v.get<std::string>();
}

ExperimentConfig parse_experiment(const std::string& path) {
  Json root;
  try {
    root = Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    throw InputError("'" + path + "' is not valid JSON: " + e.what());
  }
  if (!root.is_object()) throw ConfigError("<root>", "must be a JSON object");
  reject_unknown(root, "", {"env", "train", "output"});

  ExperimentConfig cfg;
  const Json env = root.value("env", Json::object());
  if (!env.is_object()) throw ConfigError("env", "must be an object");
  reject_unknown(env, "env.", {"preset", "prompts", "candidates", "objectives", "seed"});
  try {
    cfg.env.preset = sim::parse_preset(get_string(env, "env.", "preset", "anticorrelated"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("env.preset", e.what());
  }
  cfg.env.prompts = get_count(env, "env.", "prompts", cfg.env.prompts);
  cfg.env.candidates = get_count(env, "env.", "candidates", cfg.env.candidates);
  cfg.env.objectives = get_count(env, "env.", "objectives", cfg.env.objectives);
  cfg.env_seed = get_count(env, "env.", "seed", 0);
  if (cfg.env.prompts < 1) throw ConfigError("env.prompts", "must be at least 1");
  if (cfg.env.candidates < 2) throw ConfigError("env.candidates", "must be at least 2");
  if (cfg.env.objectives < 2) throw ConfigError("env.objectives", "must be at least 2");
  if (cfg.env.preset == sim::Preset::kSparseVsDense && cfg.env.candidates < 5) {
    throw ConfigError("env.candidates", "sparse-vs-dense needs at least 5");
  }

  const Json train = root.value("train", Json::object());
  if (!train.is_object()) throw ConfigError("train", "must be an object");
  reject_unknown(train, "train.",
                 {"group_size", "clip_eps", "kl_beta", "learning_rate", "steps", "seed", "engine",
                  "grpo_weights", "tau", "eps", "max_iter", "tol"});
  auto& t = cfg.train;
  t.group_size = get_count(train, "train.", "group_size", t.group_size);
  t.clip_eps = get_real(train, "train.", "clip_eps", t.clip_eps);
  t.kl_beta = get_real(train, "train.", "kl_beta", t.kl_beta);
  t.learning_rate = get_real(train, "train.", "learning_rate", t.learning_rate);
  t.steps = get_count(train, "train.", "steps", t.steps);
  t.seed = get_count(train, "train.", "seed", t.seed);
  t.advantage.tau = get_real(train, "train.", "tau", t.advantage.tau);
  t.advantage.eps = get_real(train, "train.", "eps", t.advantage.eps);
  t.solver.max_iter = get_count(train, "train.", "max_iter", t.solver.max_iter);
  t.solver.tol = get_real(train, "train.", "tol", t.solver.tol);
  try {
    t.engine = sim::parse_engine(get_string(train, "train.", "engine", "pfab"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("train.engine", e.what());
  }
  if (train.contains("grpo_weights")) {
    const auto& w = train["grpo_weights"];
    if (!w.is_array()) throw ConfigError("train.grpo_weights", "must be an array of numbers");
    for (const auto& v : w) {
      if (!v.is_number() || v.get<double>() < 0.0) {
        throw ConfigError("train.grpo_weights", "entries must be nonnegative numbers");
      }
      t.grpo_weights.push_back(v.get<double>());
    }
    if (t.grpo_weights.size() != cfg.env.objectives) {
      throw ConfigError("train.grpo_weights", "length must equal env.objectives");
    }
  }
  if (t.group_size < 2) throw ConfigError("train.group_size", "must be at least 2");
  if (!(t.clip_eps > 0.0 && t.clip_eps < 1.0)) throw ConfigError("train.clip_eps", "must lie in (0, 1)");
  if (!(t.kl_beta >= 0.0)) throw ConfigError("train.kl_beta", "must be nonnegative");
  if (!(t.learning_rate > 0.0)) throw ConfigError("train.learning_rate", "must be positive");
  if (!(t.advantage.tau > 0.0)) throw ConfigError("train.tau", "must be positive");
  if (!(t.advantage.eps > 0.0)) throw ConfigError("train.eps", "must be positive");
  if (t.solver.max_iter < 1) throw ConfigError("train.max_iter", "must be at least 1");
  if (!(t.solver.tol > 0.0)) throw ConfigError("train.tol", "must be positive");

  if (root.contains("output")) {
    if (!root["output"].is_string()) throw ConfigError("output", "must be a string");
    cfg.output = root["output"].get<std::string>();
  }
  return cfg;
}

Json env_to_json(const ExperimentConfig& cfg) {
  return {{"preset", sim::preset_name(cfg.env.preset)},
          {"prompts", cfg.env.prompts},
          {"candidates", cfg.env.candidates},
          {"objectives", cfg.env.objectives},
          {"seed", cfg.env_seed}};
}

std::vector<sim::Engine> resolve_engines(const std::string& name) {
  if (name == "both") return {sim::Engine::kPfab, sim::Engine::kGrpo};
  try {
    return {sim::parse_engine(name)};
  } catch (const std::invalid_argument&) {
    throw InputError("unknown engine '" + name + "' (expected pfab, grpo or both)");
  }
}

std::string engine_trace_path(const std::string& base, sim::Engine engine) {
  const std::filesystem::path p(base);
  auto name = p.stem().string() + "_" + sim::engine_name(engine) + p.extension().string();
  return (p.parent_path() / name).string();
}

Json summary_fields(const sim::ExperimentSummary& s, const std::vector<std::string>& names) {
  Json rewards = Json::object();
  for (std::size_t m = 0; m < names.size(); ++m) rewards[names[m]] = round9(s.final_mean_rewards[m]);
  Json out;
  out["final_mean_rewards"] = std::move(rewards);
  out["min_objective_mean"] = round9(s.min_objective_mean);
  out["residual_mean_last10pct"] = optional_number(s.residual_mean_last10pct);
  out["front_fraction"] = optional_number(s.front_fraction);
  return out;
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& body) {
  try {
    return body();
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  }
}

}  // namespace

double round9(double value) {
  if (!std::isfinite(value)) return value;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  const double rounded = std::strtod(buf, nullptr);
  return rounded == 0.0 ? 0.0 : rounded;
}

int cmd_score(const std::string& input_path, const ScoreOptions& options, std::ostream& out,
              std::ostream& err) {
  return guarded(err, [&] {
    const auto lines = split_lines(read_file(input_path));
    int status = kOk;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (blank(lines[i])) continue;
      Json id = nullptr;
      try {
        const Json j = Json::parse(lines[i]);
        if (j.is_object() && j.contains("id") && j["id"].is_string()) id = j["id"];
        const auto parsed = parse_score_line(j, options);
        out << scored_to_json(score_record(parsed.record, parsed.config)).dump() << '\n';
      } catch (const std::exception& e) {
        status = kInvalidInput;
        Json line;
        line["id"] = id;
        line["error"] = "line " + std::to_string(i + 1) + ": " + e.what();
        out << line.dump() << '\n';
        err << "line " << i + 1 << ": " << e.what() << '\n';
      }
    }
    return status;
  });
}

int cmd_solve(const std::string& matrix_path, const SolveOptions& options, std::ostream& out,
              std::ostream& err) {
  return guarded(err, [&] {
    SolverParams params;
    params.max_iter = options.max_iter;
    params.tol = options.tol;
    params.validate();

    const auto csv = read_csv(matrix_path);
    const auto rows = csv.cells.size();
    const auto cols = csv.cells.front().size();
    Eigen::MatrixXd matrix(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = cell_value(csv, r, c);
      }
    }

    SimplexWeights result;
    if (options.raw) {
      result = min_norm_weights(StandardizedDeltas::from_matrix(matrix), params);
    } else {
      GroupedRewardMatrix grouped{matrix, std::vector<GroupId>(rows, 0), {}};
      const auto st = standardize(center_rewards(grouped), AdvantageParams{}.tau);
      if (st.valid.empty()) {
        result.weights = Eigen::VectorXd::Constant(matrix.cols(), 1.0 / static_cast<double>(cols));
        result.converged = true;
        err << "warning: no column has spread above tau; returning uniform weights\n";
      } else {
        result = min_norm_weights(st.deltas, params);
      }
    }

    Json j;
    j["alpha"] = number_array(result.weights);
    j["residual"] = round9(result.residual);
    j["iterations"] = result.iterations;
    j["converged"] = result.converged;
    out << j.dump() << '\n';
    return kOk;
  });
}

int cmd_advantages(const std::string& matrix_path, const AdvantageOptions& options,
                   std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (options.engine != "pfab" && options.engine != "grpo") {
      throw InputError("unknown engine '" + options.engine + "' (expected pfab or grpo)");
    }
    AdvantageParams params;
    params.tau = options.tau;
    params.eps = options.eps;
    params.validate();

    const auto csv = read_csv(matrix_path);
    if (csv.header.empty() || csv.header.front() != "group_id") {
      throw InputError("header must start with group_id");
    }
    const auto cols = csv.header.size() - 1;
    if (cols == 0) throw InputError("no objective columns after group_id");

    GroupedRewardMatrix m;
    m.objective_names.assign(csv.header.begin() + 1, csv.header.end());
    m.rewards.resize(static_cast<Eigen::Index>(csv.cells.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < csv.cells.size(); ++r) {
      const auto id = parse_integer(csv.cells[r][0]);
      if (!id) {
        throw InputError("line " + std::to_string(csv.line_numbers[r]) +
                         ", column 1: group_id must be an integer");
      }
      m.groups.push_back(*id);
      for (std::size_t c = 0; c < cols; ++c) {
        m.rewards(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            cell_value(csv, r, c + 1);
      }
    }

    AdvantageVector adv;
    const auto residuals = pareto_residual(m, params);
    if (options.engine == "pfab") {
      adv = pfab_advantages(m, params);
    } else {
      GrpoParams grpo;
      grpo.weights = options.weights;
      grpo.eps = options.eps;
      adv = grpo_advantages(m, grpo);
    }
    for (const auto& d : adv.diagnostics) err << "warning: " << d << '\n';

    Json j;
    j["engine"] = options.engine;
    j["objectives"] = m.objective_names;
    j["advantages"] = number_array(adv.values);
    Json groups = Json::array();
    for (const auto& [id, rows] : m.group_rows()) {
      Json g;
      g["group_id"] = id;
      g["size"] = rows.size();
      g["alpha"] = number_array(adv.weights.at(id).weights);
      g["residual"] = round9(residuals.at(id).residual);
      g["degenerate"] = residuals.at(id).degenerate;
      groups.push_back(std::move(g));
    }
    j["groups"] = std::move(groups);
    j["diagnostics"] = adv.diagnostics;
    out << j.dump() << '\n';
    return kOk;
  });
}

int cmd_simulate(const std::string& config_path, const SimulateOptions& options,
                 std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto cfg = parse_experiment(config_path);
    if (options.seed) cfg.train.seed = *options.seed;
    const auto output = options.output ? options.output : cfg.output;
    if (!output || output->empty()) throw ConfigError("output", "trace path is required");
    const auto engines =
        resolve_engines(options.engine.value_or(sim::engine_name(cfg.train.engine)));

    const auto env = sim::build_env(cfg.env, cfg.env_seed);
    Json runs = Json::array();
    for (const auto engine : engines) {
      auto train = cfg.train;
      train.engine = engine;
      sim::PolicyTable final_policy;
      const auto trace = sim::run_experiment(train, env, &final_policy);

      const auto path = engines.size() == 1 ? *output : engine_trace_path(*output, engine);
      std::ostringstream csv;
      sim::write_trace_csv(csv, trace);
      write_file(path, csv.str());

      Json run;
      run["engine"] = sim::engine_name(engine);
      run["train_seed"] = train.seed;
      run["steps"] = train.steps;
      run["trace"] = path;
      const auto fields =
          summary_fields(sim::summarize(trace, final_policy, env), env.objective_names());
      for (const auto& [k, v] : fields.items()) run[k] = v;
      runs.push_back(std::move(run));
    }
    Json summary;
    summary["env"] = env_to_json(cfg);
    summary["runs"] = std::move(runs);
    out << summary.dump(2) << '\n';
    return kOk;
  });
}

int cmd_compare(const std::string& config_path, const CompareOptions& options, std::ostream& out,
                std::ostream& err) {
  return guarded(err, [&] {
    if (options.seeds < 1) throw InputError("--seeds must be at least 1");
    if (options.engines.empty()) throw InputError("no engines requested");
    std::vector<sim::Engine> engines;
    for (const auto& name : options.engines) {
      try {
        engines.push_back(sim::parse_engine(name));
      } catch (const std::invalid_argument&) {
        throw InputError("unknown engine '" + name + "' (expected pfab or grpo)");
      }
    }
    const auto cfg = parse_experiment(config_path);
    const auto env = sim::build_env(cfg.env, cfg.env_seed);
    const std::uint64_t base = options.seed.value_or(cfg.train.seed);

    std::vector<std::string> metrics;
    for (const auto& name : env.objective_names()) metrics.push_back("final_mean_r_" + name);
    metrics.insert(metrics.end(),
                   {"min_objective_mean", "residual_mean_last10pct", "front_fraction"});

    Json report;
    report["env"] = env_to_json(cfg);
    Json seeds = Json::array();
    for (std::size_t s = 0; s < options.seeds; ++s) seeds.push_back(base + s);
    report["seeds"] = seeds;

    Json per_engine = Json::array();
    for (const auto engine : engines) {
      std::map<std::string, std::vector<double>> samples;
      Json runs = Json::array();
      for (std::size_t s = 0; s < options.seeds; ++s) {
        auto train = cfg.train;
        train.engine = engine;
        train.seed = base + s;
        sim::PolicyTable final_policy;
        const auto trace = sim::run_experiment(train, env, &final_policy);
        const auto summary = sim::summarize(trace, final_policy, env);

        std::vector<double> values = summary.final_mean_rewards;
        values.push_back(summary.min_objective_mean);
        values.push_back(summary.residual_mean_last10pct.value_or(0.0));
        values.push_back(summary.front_fraction.value_or(0.0));
        Json run;
        run["seed"] = train.seed;
        for (std::size_t k = 0; k < metrics.size(); ++k) {
          run[metrics[k]] = round9(values[k]);
          samples[metrics[k]].push_back(values[k]);
        }
        runs.push_back(std::move(run));
      }
      Json aggregate;
      for (const auto& metric : metrics) {
        const auto& v = samples[metric];
        const Eigen::Map<const Eigen::VectorXd> vec(v.data(), static_cast<Eigen::Index>(v.size()));
        aggregate[metric] = {{"mean", round9(population_mean(vec))},
                             {"std", round9(population_std(vec))}};
      }
      Json entry;
      entry["engine"] = sim::engine_name(engine);
      entry["runs"] = std::move(runs);
      entry["aggregate"] = std::move(aggregate);
      per_engine.push_back(std::move(entry));
    }
    report["engines"] = std::move(per_engine);
    out << report.dump(2) << '\n';
    return kOk;
  });
}

}  // namespace pfab::cli
