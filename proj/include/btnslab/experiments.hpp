#pragma once

#include "btnslab/errors.hpp"
#include "btnslab/serialize.hpp"
#include "btnslab/variational.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace btns {

/// Malformed or invalid experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// At least one seed hit a numeric failure; partial traces were written.
class ExperimentFailure : public Error {
 public:
  using Error::Error;
};

struct AnsatzConfig {
  std::string kind = "btns";  ///< "tns" or "btns"
  std::size_t D = 2;
  int a = 1;
  int dloc = 1;
  bool translation_invariant = false;
};

struct ExperimentConfig {
  std::string experiment;  ///< tstate-descent, separation-descent, heisenberg-ite, p-sweep
  std::string model;
  std::size_t L = 0;
  AnsatzConfig ansatz;
  OptimizerConfig optimizer;
  ItePlan ite;
  std::vector<double> p_values;
  std::vector<std::uint64_t> seeds;
  std::string out_dir = ".";
  std::string prefix;

  /// Throws ConfigError. Builds the model and one initial state, so every
  /// module precondition is checked before anything is written.
  void validate() const;
};

std::vector<std::string> experiment_names();

/// Parses and validates; unknown keys are rejected.
ExperimentConfig parse_config(const Json& j);
ExperimentConfig parse_config_text(const std::string& text);

/// SHA-1 of "blob <size>\0" + bytes, as git computes object ids.
std::string git_blob_hash(const std::string& bytes);

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;
  std::size_t threads = 1;
};

struct SeedResult {
  std::uint64_t seed = 0;
  double p = 0.0;
  std::vector<TraceRow> trace;
  double final_objective = 0.0;
  std::string error;
};

struct ExperimentSummary {
  double best_objective = 0.0;
  std::uint64_t best_seed = 0;
  double best_p = 0.0;
  double wall_ms = 0.0;
  std::string config_hash;
  std::filesystem::path trace_csv;
  std::filesystem::path summary_json;
  std::vector<SeedResult> runs;
};

/// Runs every seed (and every p for p-sweep), writes <prefix>.seed<N>.csv per
/// run, the merged <prefix>.csv in seed order and <prefix>.summary.json.
/// Throws ExperimentFailure after writing when a run failed numerically.
ExperimentSummary run_experiment(const ExperimentConfig& cfg, const std::string& config_text, const RunOptions& opts);

/// Threads from the command line, else BTNSLAB_THREADS, else 1.
std::size_t resolve_threads(std::optional<std::size_t> cli);

}  // namespace btns
