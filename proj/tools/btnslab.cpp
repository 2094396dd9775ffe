#include "btnslab/checks.hpp"
#include "btnslab/experiments.hpp"
#include "btnslab/models.hpp"
#include "btnslab/serialize.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kInvalid = 2;
constexpr int kNumeric = 3;

int cmd_run(const std::string& config_path, const std::string& out_dir, std::optional<std::size_t> threads) {
  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read config '" << config_path << "'\n";
    return kInvalid;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  btns::ExperimentConfig cfg;
  try {
    cfg = btns::parse_config_text(text);
  } catch (const btns::ConfigError& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return kInvalid;
  }
  btns::RunOptions opts;
  if (!out_dir.empty()) opts.out_dir = out_dir;
  opts.threads = btns::resolve_threads(threads);
  try {
    const auto sum = btns::run_experiment(cfg, text, opts);
    std::cout << "best_objective " << sum.best_objective << " (seed " << sum.best_seed << ")\n"
              << "trace " << sum.trace_csv.string() << "\n"
              << "summary " << sum.summary_json.string() << "\n";
  } catch (const btns::ExperimentFailure& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const btns::Error& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  }
  return kOk;
}

int cmd_list_models() {
  for (const auto& m : btns::list_models()) {
    std::cout << m.name << (m.has_hamiltonian ? "  [hamiltonian]  " : "  [state]  ") << m.description << '\n';
  }
  std::cout << "experiments:";
  for (const auto& e : btns::experiment_names()) std::cout << ' ' << e;
  std::cout << '\n';
  return kOk;
}

int cmd_dump_state(const std::string& model, std::size_t L, const std::string& out) {
  btns::Json j;
  try {
    j = btns::to_json(btns::model_state(model, L));
  } catch (const btns::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  }
  if (out.empty()) {
    std::cout << j.dump() << '\n';
  } else {
    std::ofstream(out) << j.dump() << '\n';
  }
  return kOk;
}

int cmd_check(std::uint64_t seed) {
  bool ok = true;
  for (const auto& r : btns::run_invariant_checks(seed)) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << r.detail << ")\n";
    ok = ok && r.passed;
  }
  return ok ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bTNS experiments and checks"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run an experiment config");
  std::string config;
  std::string out_dir;
  std::optional<std::size_t> threads;
  run->add_option("--config", config, "experiment JSON file")->required();
  run->add_option("--out", out_dir, "output directory (overrides output.dir)");
  run->add_option("--threads", threads, "worker threads (default BTNSLAB_THREADS or 1)")->check(CLI::PositiveNumber);

  auto* list = app.add_subcommand("list-models", "list registered models and experiments");

  auto* dump = app.add_subcommand("dump-state", "write a reference state as JSON");
  std::string model;
  std::size_t L = 0;
  std::string dump_out;
  dump->add_option("--model", model, "model name")->required();
  dump->add_option("--L", L, "ring length where the model needs one");
  dump->add_option("--out", dump_out, "output file (default stdout)");

  auto* check = app.add_subcommand("check", "run the invariant self-test");
  std::uint64_t seed = 1;
  check->add_option("--seed", seed, "seed for the random instances");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  if (run->parsed()) return cmd_run(config, out_dir, threads);
  if (list->parsed()) return cmd_list_models();
  if (dump->parsed()) return cmd_dump_state(model, L, dump_out);
  if (check->parsed()) return cmd_check(seed);
  return kInvalid;
}
