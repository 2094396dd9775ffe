#include "btnslab/experiments.hpp"

#include "btnslab/models.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>
#include <thread>

namespace btns {

namespace {

namespace fs = std::filesystem;

const std::vector<std::string>& names() {
  static const std::vector<std::string> n{"tstate-descent", "separation-descent", "heisenberg-ite", "p-sweep"};
  return n;
}

bool is_ite(const std::string& experiment) { return experiment == "heisenberg-ite" || experiment == "p-sweep"; }

void allow_keys(const Json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items()) {
    if (!allowed.contains(k)) throw ConfigError("unknown key '" + k + "' in " + where);
  }
}

template <class T>
void read(const Json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(where + "." + key + " has the wrong type");
  }
}

std::size_t read_count(const Json& j, const char* key, std::size_t fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError(where + "." + key + " must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::vector<std::uint64_t> read_seeds(const Json& j) {
  std::vector<std::uint64_t> out;
  if (j.is_array()) {
    for (const auto& s : j) {
      if (!s.is_number_integer() || s.get<long long>() < 0) throw ConfigError("seeds must be non-negative integers");
      out.push_back(s.get<std::uint64_t>());
    }
  } else if (j.is_object()) {
    allow_keys(j, "seeds", {"from", "to"});
    if (!j.contains("from") || !j.contains("to")) throw ConfigError("seed range needs 'from' and 'to'");
    const std::size_t from = read_count(j, "from", 0, "seeds");
    const std::size_t to = read_count(j, "to", 0, "seeds");
    if (to < from) throw ConfigError("seed range is empty");
    for (std::size_t s = from; s <= to; ++s) out.push_back(s);
  } else {
    throw ConfigError("seeds must be a list or {from, to}");
  }
  if (out.empty()) throw ConfigError("at least one seed is required");
  if (std::set<std::uint64_t>(out.begin(), out.end()).size() != out.size()) throw ConfigError("seeds must be distinct");
  return out;
}

std::string default_model(const std::string& experiment) {
  if (experiment == "tstate-descent") return "tstate";
  if (experiment == "separation-descent") return "separation";
  return "heisenberg";
}

std::size_t default_length(const std::string& experiment) {
  if (experiment == "tstate-descent") return 3;
  if (experiment == "separation-descent") return 11;
  return 12;
}

struct Problem {
  NetworkShape shape;
  std::optional<Hamiltonian> H;
  std::optional<Tensor> target;
};

Problem build_problem(const ExperimentConfig& cfg) {
  Problem pr;
  std::size_t d = 0;
  std::size_t L = cfg.L;
  if (cfg.experiment == "tstate-descent") {
    const KnownState ks = model_state(cfg.model, cfg.L);
    pr.target = ks.state;
    L = ks.state.rank();
    d = ks.state.extent(0);
  } else {
    pr.H = model_hamiltonian(cfg.model, cfg.L);
    d = pr.H->shape().phys_dim();
    L = pr.H->shape().vertex_count();
  }
  pr.shape = ring(L, cfg.ansatz.D, d);
  return pr;
}

int weight_a(const AnsatzConfig& a) { return a.kind == "tns" ? 0 : a.a; }
int weight_dloc(const AnsatzConfig& a) { return a.kind == "tns" ? 0 : a.dloc; }

BTNSRep initial_state(const ExperimentConfig& cfg, const NetworkShape& shape, std::uint64_t seed) {
  const int a = weight_a(cfg.ansatz);
  const int dl = weight_dloc(cfg.ansatz);
  return cfg.ansatz.translation_invariant ? random_init_ti(shape, a, dl, seed) : random_init(shape, a, dl, seed);
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_header(bool with_p) {
  return with_p ? "iter,objective,grad_norm_or_bondmax,wall_ms,seed,p\n" : "iter,objective,grad_norm_or_bondmax,wall_ms,seed\n";
}

std::string csv_row(const TraceRow& r, std::uint64_t seed, std::optional<double> p) {
  std::string s = std::to_string(r.iter) + "," + fmt(r.objective) + "," + fmt(r.grad_norm_or_bondmax) + "," +
                  fmt(r.wall_ms) + "," + std::to_string(seed);
  if (p) s += "," + fmt(*p);
  return s + "\n";
}

std::string p_tag(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", p);
  return buf;
}

}  // namespace

std::vector<std::string> experiment_names() { return names(); }

void ExperimentConfig::validate() const {
  if (std::find(names().begin(), names().end(), experiment) == names().end()) {
    throw ConfigError("unknown experiment '" + experiment + "'");
  }
  if (ansatz.kind != "tns" && ansatz.kind != "btns") throw ConfigError("ansatz.kind must be 'tns' or 'btns'");
  if (ansatz.D == 0) throw ConfigError("ansatz.D must be at least 1");
  if (ansatz.kind == "btns") {
    if (ansatz.a < 0 || ansatz.dloc < 0) throw ConfigError("ansatz.a and ansatz.dloc must be non-negative");
    if (ansatz.dloc > ansatz.a) throw ConfigError("ansatz.dloc must not exceed ansatz.a");
    if (ansatz.a > 0 && ansatz.dloc == 0) throw ConfigError("ansatz.dloc = 0 with a > 0 gives the zero state");
  }
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (prefix.empty() || prefix.find('/') != std::string::npos) throw ConfigError("output.prefix must be a plain name");
  if (experiment == "p-sweep" && p_values.empty()) throw ConfigError("p-sweep needs ite.p_values");
  try {
    optimizer.validate();
    ite.validate();
    for (double p : p_values) {
      if (!(p > 0.0 && p <= 1.0)) throw ArgumentError("every p must lie in (0, 1]");
    }
    if (is_ite(experiment) && ite.target_bond != ansatz.D) throw ArgumentError("ITE target bond must equal ansatz.D");
    const Problem pr = build_problem(*this);
    const BTNSRep rep = initial_state(*this, pr.shape, seeds.front());
    rep.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

ExperimentConfig parse_config(const Json& j) {
  allow_keys(j, "config", {"experiment", "model", "ansatz", "optimizer", "ite", "seeds", "output"});
  ExperimentConfig cfg;
  if (!j.contains("experiment") || !j.at("experiment").is_string()) throw ConfigError("'experiment' is required");
  cfg.experiment = j.at("experiment").get<std::string>();
  cfg.model = default_model(cfg.experiment);
  cfg.L = default_length(cfg.experiment);
  if (j.contains("model")) {
    const Json& m = j.at("model");
    allow_keys(m, "model", {"name", "L"});
    read(m, "name", cfg.model, "model");
    cfg.L = read_count(m, "L", cfg.L, "model");
  }
  if (j.contains("ansatz")) {
    const Json& a = j.at("ansatz");
    allow_keys(a, "ansatz", {"kind", "D", "a", "dloc", "translation_invariant"});
    read(a, "kind", cfg.ansatz.kind, "ansatz");
    cfg.ansatz.D = read_count(a, "D", cfg.ansatz.D, "ansatz");
    read(a, "a", cfg.ansatz.a, "ansatz");
    read(a, "dloc", cfg.ansatz.dloc, "ansatz");
    read(a, "translation_invariant", cfg.ansatz.translation_invariant, "ansatz");
    if (cfg.ansatz.kind == "tns" && (a.contains("a") || a.contains("dloc"))) {
      throw ConfigError("a plain tns ansatz takes no a or dloc");
    }
  }
  if (j.contains("optimizer")) {
    const Json& o = j.at("optimizer");
    allow_keys(o, "optimizer",
               {"max_iters", "step_size", "armijo_factor", "armijo_c", "max_halvings", "grad_tol", "energy_rel_tol"});
    cfg.optimizer.max_iters = read_count(o, "max_iters", cfg.optimizer.max_iters, "optimizer");
    read(o, "step_size", cfg.optimizer.step_size, "optimizer");
    read(o, "armijo_factor", cfg.optimizer.armijo_factor, "optimizer");
    read(o, "armijo_c", cfg.optimizer.armijo_c, "optimizer");
    cfg.optimizer.max_halvings = read_count(o, "max_halvings", cfg.optimizer.max_halvings, "optimizer");
    read(o, "grad_tol", cfg.optimizer.grad_tol, "optimizer");
    read(o, "energy_rel_tol", cfg.optimizer.energy_rel_tol, "optimizer");
  }
  cfg.optimizer.translation_invariant = cfg.ansatz.translation_invariant;
  cfg.ite.target_bond = cfg.ansatz.D;
  if (j.contains("ite")) {
    const Json& i = j.at("ite");
    allow_keys(i, "ite", {"beta_step", "sweeps", "p", "renormalize", "bond_weights", "p_values"});
    read(i, "beta_step", cfg.ite.beta_step, "ite");
    cfg.ite.sweeps = read_count(i, "sweeps", cfg.ite.sweeps, "ite");
    read(i, "p", cfg.ite.p, "ite");
    read(i, "renormalize", cfg.ite.renormalize, "ite");
    read(i, "bond_weights", cfg.ite.bond_weights, "ite");
    read(i, "p_values", cfg.p_values, "ite");
  }
  if (!j.contains("seeds")) throw ConfigError("'seeds' is required");
  cfg.seeds = read_seeds(j.at("seeds"));
  cfg.prefix = cfg.experiment;
  if (j.contains("output")) {
    const Json& o = j.at("output");
    allow_keys(o, "output", {"dir", "prefix"});
    read(o, "dir", cfg.out_dir, "output");
    read(o, "prefix", cfg.prefix, "output");
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

std::string git_blob_hash(const std::string& bytes) {
  const std::string header = "blob " + std::to_string(bytes.size()) + std::string(1, '\0');
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr) throw Error("cannot allocate a digest context");
  const bool ok = EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                  EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) == 1 && EVP_DigestFinal_ex(ctx, md, &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw Error("SHA-1 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int k = 0; k < len; ++k) {
    out.push_back(hex[md[k] >> 4]);
    out.push_back(hex[md[k] & 15]);
  }
  return out;
}

std::size_t resolve_threads(std::optional<std::size_t> cli) {
  if (cli) return std::max<std::size_t>(*cli, 1);
  if (const char* env = std::getenv("BTNSLAB_THREADS")) {
    char* end = nullptr;
    const unsigned long n = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return n;
  }
  return 1;
}

ExperimentSummary run_experiment(const ExperimentConfig& cfg, const std::string& config_text, const RunOptions& opts) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const fs::path dir = opts.out_dir ? *opts.out_dir : fs::path(cfg.out_dir);
  fs::create_directories(dir);
  const Problem pr = build_problem(cfg);
  const bool sweep_p = cfg.experiment == "p-sweep";
  const std::vector<double> ps = sweep_p ? cfg.p_values : std::vector<double>{cfg.ite.p};

  struct Job {
    std::uint64_t seed;
    double p;
    fs::path file;
  };
  std::vector<Job> jobs;
  for (double p : ps) {
    for (auto seed : cfg.seeds) {
      std::string name = cfg.prefix + ".seed" + std::to_string(seed);
      if (sweep_p) name += ".p" + p_tag(p);
      jobs.push_back({seed, p, dir / (name + ".csv")});
    }
  }
  std::sort(jobs.begin(), jobs.end(), [](const Job& x, const Job& y) {
    return x.seed != y.seed ? x.seed < y.seed : x.p < y.p;
  });

  std::unique_ptr<Objective> objective;
  if (pr.target) objective = overlap_objective(*pr.target);
  else if (!is_ite(cfg.experiment)) objective = energy_objective(*pr.H);

  std::vector<SeedResult> results(jobs.size());
  auto run_one = [&](std::size_t k) {
    const Job& job = jobs[k];
    SeedResult& res = results[k];
    res.seed = job.seed;
    res.p = job.p;
    std::ofstream out(job.file);
    out << csv_header(sweep_p);
    const std::optional<double> p_col = sweep_p ? std::optional<double>(job.p) : std::nullopt;
    auto sink = [&](const TraceRow& row) {
      res.trace.push_back(row);
      out << csv_row(row, job.seed, p_col) << std::flush;
    };
    try {
      const BTNSRep rep0 = initial_state(cfg, pr.shape, job.seed);
      if (is_ite(cfg.experiment)) {
        ItePlan plan = cfg.ite;
        plan.p = job.p;
        (void)imaginary_time(rep0, *pr.H, plan, sink);
      } else {
        OptimizerConfig oc = cfg.optimizer;
        oc.seed = job.seed;
        (void)gradient_descent(rep0, *objective, oc, sink);
      }
      res.final_objective = res.trace.back().objective;
    } catch (const Error& e) {
      res.error = e.what();
      res.final_objective = std::numeric_limits<double>::quiet_NaN();
    }
  };

  const std::size_t workers = std::min(std::max<std::size_t>(opts.threads, 1), jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < jobs.size(); k = next++) run_one(k);
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
  }

  ExperimentSummary sum;
  sum.trace_csv = dir / (cfg.prefix + ".csv");
  sum.summary_json = dir / (cfg.prefix + ".summary.json");
  {
    std::ofstream merged(sum.trace_csv);
    merged << csv_header(sweep_p);
    for (const auto& job : jobs) {
      std::ifstream in(job.file);
      std::string line;
      std::getline(in, line);
      while (std::getline(in, line)) merged << line << '\n';
    }
  }

  sum.best_objective = std::numeric_limits<double>::infinity();
  std::vector<std::string> errors;
  for (const auto& r : results) {
    if (!r.error.empty()) {
      errors.push_back("seed " + std::to_string(r.seed) + (sweep_p ? " p " + p_tag(r.p) : "") + ": " + r.error);
      continue;
    }
    if (r.final_objective < sum.best_objective) {
      sum.best_objective = r.final_objective;
      sum.best_seed = r.seed;
      sum.best_p = r.p;
    }
  }
  sum.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  sum.config_hash = git_blob_hash(config_text);
  sum.runs = std::move(results);

  Json js;
  js["experiment"] = cfg.experiment;
  js["best_objective"] = std::isfinite(sum.best_objective) ? Json(sum.best_objective) : Json(nullptr);
  js["best_seed"] = sum.best_seed;
  js["wall_ms"] = sum.wall_ms;
  js["config_hash"] = sum.config_hash;
  js["status"] = errors.empty() ? "ok" : "numeric_failure";
  if (!errors.empty()) js["errors"] = errors;
  if (sweep_p) {
    js["best_p"] = sum.best_p;
    Json per_p = Json::array();
    for (double p : ps) {
      double best = std::numeric_limits<double>::infinity();
      std::uint64_t seed = 0;
      for (const auto& r : sum.runs) {
        if (r.p == p && r.error.empty() && r.final_objective < best) {
          best = r.final_objective;
          seed = r.seed;
        }
      }
      per_p.push_back({{"p", p}, {"best_objective", std::isfinite(best) ? Json(best) : Json(nullptr)}, {"best_seed", seed}});
    }
    js["p_values"] = per_p;
  }
  std::ofstream(sum.summary_json) << js.dump(2) << '\n';

  if (!errors.empty()) throw ExperimentFailure(errors.front());
  return sum;
}

}  // namespace btns
