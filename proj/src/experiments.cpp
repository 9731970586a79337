#include "gzz/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "gzz/diagnostics.hpp"
#include "gzz/samplers.hpp"
#include "gzz/synthetic.hpp"

namespace gzz {

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return ec == std::errc() ? std::string(buf, end) : std::to_string(v);
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad numeric value for " + key + ": '" + value + "'");
  }
}

long long to_integer(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad integer value for " + key + ": '" + value + "'");
  }
}

std::uint64_t to_seed(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(value, &used);
    if (used != value.size() || value.front() == '-') throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad seed value for " + key + ": '" + value + "'");
  }
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("bad boolean value for " + key + ": '" + value + "'");
}

struct Entry {
  const char* key;
  std::function<void(ExperimentSpec&, const std::string&)> set;
  std::function<std::string(const ExperimentSpec&)> get;
};

template <typename Access>
Entry real(const char* key, Access access) {
  return {key, [=](ExperimentSpec& s, const std::string& v) { access(s) = to_double(key, v); },
          [=](const ExperimentSpec& s) { return format_double(access(const_cast<ExperimentSpec&>(s))); }};
}

template <typename Access>
Entry integer(const char* key, Access access) {
  return {key, [=](ExperimentSpec& s, const std::string& v) { access(s) = static_cast<Index>(to_integer(key, v)); },
          [=](const ExperimentSpec& s) { return std::to_string(access(const_cast<ExperimentSpec&>(s))); }};
}

template <typename Access>
Entry text(const char* key, Access access) {
  return {key, [=](ExperimentSpec& s, const std::string& v) { access(s) = v; },
          [=](const ExperimentSpec& s) { return access(const_cast<ExperimentSpec&>(s)); }};
}

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = {
      text("model", [](ExperimentSpec& s) -> std::string& { return s.model; }),
      integer("n", [](ExperimentSpec& s) -> Index& { return s.n; }),
      integer("p", [](ExperimentSpec& s) -> Index& { return s.p; }),
      integer("K", [](ExperimentSpec& s) -> Index& { return s.K; }),
      real("epsilon", [](ExperimentSpec& s) -> double& { return s.epsilon; }),
      real("nonzero_fraction", [](ExperimentSpec& s) -> double& { return s.nonzero_fraction; }),
      text("data_file", [](ExperimentSpec& s) -> std::string& { return s.data_file; }),
      text("sampler", [](ExperimentSpec& s) -> std::string& { return s.sampler; }),
      real("eta", [](ExperimentSpec& s) -> double& { return s.eta; }),
      integer("batch_size", [](ExperimentSpec& s) -> Index& { return s.batch_size; }),
      real("horizon", [](ExperimentSpec& s) -> double& { return s.horizon; }),
      real("dt", [](ExperimentSpec& s) -> double& { return s.dt; }),
      real("burnin_fraction", [](ExperimentSpec& s) -> double& { return s.burnin_fraction; }),
      text("hmc_step_sizes", [](ExperimentSpec& s) -> std::string& { return s.hmc_step_sizes; }),
      text("hmc_leapfrog", [](ExperimentSpec& s) -> std::string& { return s.hmc_leapfrog; }),
      integer("hmc_iterations", [](ExperimentSpec& s) -> Index& { return s.hmc_iterations; }),
      integer("pilot_iterations", [](ExperimentSpec& s) -> Index& { return s.pilot_iterations; }),
      integer("replicas", [](ExperimentSpec& s) -> Index& { return s.replicas; }),
      {"seed", [](ExperimentSpec& s, const std::string& v) { s.seed = to_seed("seed", v); },
       [](const ExperimentSpec& s) { return std::to_string(s.seed); }},
      text("output_dir", [](ExperimentSpec& s) -> std::string& { return s.output_dir; }),
      {"strict_paper_conditionals",
       [](ExperimentSpec& s, const std::string& v) {
         s.random_effects.strict_paper_conditionals = to_bool("strict_paper_conditionals", v);
       },
       [](const ExperimentSpec& s) {
         return std::string(s.random_effects.strict_paper_conditionals ? "true" : "false");
       }},
      real("a_phi", [](ExperimentSpec& s) -> double& { return s.random_effects.a_phi; }),
      real("b_phi", [](ExperimentSpec& s) -> double& { return s.random_effects.b_phi; }),
      real("a_sigma", [](ExperimentSpec& s) -> double& { return s.random_effects.a_sigma; }),
      real("b_sigma", [](ExperimentSpec& s) -> double& { return s.random_effects.b_sigma; }),
      real("a_tau", [](ExperimentSpec& s) -> double& { return s.spike_slab.a_tau; }),
      real("b_tau", [](ExperimentSpec& s) -> double& { return s.spike_slab.b_tau; }),
      real("a_nu", [](ExperimentSpec& s) -> double& { return s.spike_slab.a_nu; }),
      real("b_nu", [](ExperimentSpec& s) -> double& { return s.spike_slab.b_nu; }),
      real("a_pi", [](ExperimentSpec& s) -> double& { return s.spike_slab.a_pi; }),
      real("b_pi", [](ExperimentSpec& s) -> double& { return s.spike_slab.b_pi; }),
      real("sigma0_sq", [](ExperimentSpec& s) -> double& { return s.spike_slab.sigma0_sq; }),
      text("eta_values", [](ExperimentSpec& s) -> std::string& { return s.eta_values; }),
      text("batch_sizes", [](ExperimentSpec& s) -> std::string& { return s.batch_sizes; }),
      text("batch_etas", [](ExperimentSpec& s) -> std::string& { return s.batch_etas; }),
      text("axis", [](ExperimentSpec& s) -> std::string& { return s.axis; }),
      text("axis_values", [](ExperimentSpec& s) -> std::string& { return s.axis_values; }),
      real("epsilon_times_n", [](ExperimentSpec& s) -> double& { return s.epsilon_times_n; }),
  };
  return table;
}

template <typename T, typename Convert>
std::vector<T> parse_list(const std::string& text, Convert convert) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(convert(item));
  }
  return out;
}

}  // namespace

void set_key(ExperimentSpec& spec, const std::string& key, const std::string& value) {
  for (const auto& e : entries()) {
    if (key == e.key) {
      e.set(spec, trim(value));
      return;
    }
  }
  throw ConfigError("unknown config key '" + key + "'");
}

std::vector<std::pair<std::string, std::string>> resolved_entries(const ExperimentSpec& spec) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : entries()) out.emplace_back(e.key, e.get(spec));
  return out;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& e : entries()) out.emplace_back(e.key);
  return out;
}

void parse_config(std::istream& in, ExperimentSpec& spec) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    set_key(spec, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void parse_config_file(const std::string& path, ExperimentSpec& spec) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  parse_config(in, spec);
}

std::vector<double> parse_double_list(const std::string& text) {
  return parse_list<double>(text, [](const std::string& v) { return to_double("list", v); });
}

std::vector<Index> parse_index_list(const std::string& text) {
  return parse_list<Index>(text, [](const std::string& v) { return static_cast<Index>(to_integer("list", v)); });
}

void validate(const ExperimentSpec& s) {
  const auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  require(s.model == "random-effects" || s.model == "spike-slab", "model must be random-effects or spike-slab");
  require(s.sampler == "zz" || s.sampler == "gzz" || s.sampler == "hmc-gibbs", "sampler must be zz, gzz or hmc-gibbs");
  require(s.n > 0 && s.p > 0 && s.K > 0, "dimensions must be positive");
  require(s.epsilon > 0.0 && s.epsilon <= 1.0, "epsilon must lie in (0, 1]");
  require(s.nonzero_fraction >= 0.0 && s.nonzero_fraction <= 1.0, "nonzero_fraction must lie in [0, 1]");
  require(s.eta > 0.0, "eta must be positive");
  require(s.batch_size >= 1, "batch_size must be at least 1");
  const Index n_total = s.model == "random-effects" ? s.n * s.K : s.n;
  if (s.data_file.empty()) require(s.batch_size <= n_total, "batch_size exceeds the number of observations");
  require(s.horizon > 0.0, "horizon must be positive");
  require(s.dt >= 0.0, "dt must be nonnegative");
  require(s.burnin_fraction >= 0.0 && s.burnin_fraction < 1.0, "burnin_fraction must lie in [0, 1)");
  require(s.hmc_iterations > 0 && s.pilot_iterations > 1, "HMC iteration counts must be positive");
  require(s.replicas >= 1, "replicas must be at least 1");
  const auto& re = s.random_effects;
  require(re.a_phi > 0 && re.b_phi > 0 && re.a_sigma > 0 && re.b_sigma > 0, "random-effects hyperpriors must be positive");
  const auto& ss = s.spike_slab;
  require(ss.a_tau > 0 && ss.b_tau > 0 && ss.a_nu > 0 && ss.b_nu > 0 && ss.a_pi > 0 && ss.b_pi > 0 && ss.sigma0_sq > 0,
          "spike-and-slab hyperpriors must be positive");
  for (double h : parse_double_list(s.hmc_step_sizes)) require(h > 0.0, "HMC step sizes must be positive");
  for (Index l : parse_index_list(s.hmc_leapfrog)) require(l > 0, "HMC leapfrog counts must be positive");
}

std::string spec_hash(const ExperimentSpec& spec) {
  std::string text;
  for (const auto& [k, v] : resolved_entries(spec)) {
    if (k == "output_dir") continue;
    text += k + "=" + v + ";";
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << std::hash<std::string>{}(text);
  return os.str();
}

// ---------------------------------------------------------------------------

namespace {

struct LoadedData {
  GroupedData grouped;
  LogisticData logistic;
};

LoadedData load_or_generate(const ExperimentSpec& spec) {
  LoadedData out;
  if (!spec.data_file.empty()) {
    const Dataset ds = read_dataset_csv(spec.data_file);
    out.grouped = ds.grouped;
    out.logistic = ds.logistic();
    return out;
  }
  if (spec.model == "random-effects") {
    const auto truth = default_random_effects_truth(spec.p, spec.K, spec.nonzero_fraction, spec.seed);
    out.grouped = generate_random_effects_data(spec.n, spec.K, spec.epsilon, truth, spec.seed);
  } else {
    const auto truth = default_logistic_truth(spec.p, spec.nonzero_fraction, spec.seed);
    out.logistic = generate_logistic_data(spec.n, spec.epsilon, truth, spec.seed);
  }
  return out;
}

}  // namespace

Problem build_problem(const ExperimentSpec& spec) {
  validate(spec);
  const LoadedData data = load_or_generate(spec);
  Problem problem;
  if (spec.model == "random-effects") {
    auto model = std::make_unique<RandomEffectsModel>(data.grouped, spec.random_effects);
    problem.kernel = model->kernel();
    problem.alpha0 = model->default_alpha();
    problem.model = std::move(model);
  } else {
    auto model = std::make_unique<SpikeSlabModel>(data.logistic, spec.spike_slab);
    problem.kernel = model->kernel();
    problem.alpha0 = model->default_alpha();
    problem.model = std::move(model);
  }
  problem.n_total = problem.model->n_data();
  if (spec.batch_size > problem.n_total) throw ConfigError("batch_size exceeds the number of observations");
  return problem;
}

void write_problem_data(const ExperimentSpec& spec, const std::string& path) {
  validate(spec);
  const LoadedData data = load_or_generate(spec);
  if (spec.model == "random-effects") {
    write_dataset_csv(path, data.grouped);
  } else {
    write_dataset_csv(path, data.logistic);
  }
}

// ---------------------------------------------------------------------------

namespace {

RunRecord base_record(const ExperimentSpec& spec, Index replica) {
  RunRecord r;
  r.sampler = spec.sampler;
  r.eta = spec.sampler == "gzz" ? spec.eta : 0.0;
  r.batch_size = spec.sampler == "hmc-gibbs" ? 0 : spec.batch_size;
  r.replica = replica;
  r.replica_seed = derive_seed(spec.seed, static_cast<std::uint64_t>(replica));
  r.spec_hash = spec_hash(spec);
  return r;
}

void fill_efficiency(RunRecord& r, const EfficiencySummary& s) {
  r.dt = s.dt;
  r.epochs = s.epochs;
  r.slowest_coordinate = s.slowest_coordinate + 1;
  r.iact_slowest = s.slowest_iact();
  r.ess_min = s.ess.minCoeff();
  r.ess_per_epoch = s.ess_per_epoch.minCoeff();
}

RunRecord run_pdmp_replica(const ExperimentSpec& spec, const Problem& problem, Index replica,
                           const RunOptions& options) {
  RunRecord rec = base_record(spec, replica);
  const Index p = problem.model->dim();

  RandomStream start_rng(rec.replica_seed, StreamTag::kStart);
  StartState start{VectorXd::Zero(p), VectorXd(p), problem.alpha0};
  for (Index i = 0; i < p; ++i) start.theta[i] = start_rng.uniform() < 0.5 ? -1.0 : 1.0;

  GzzConfig cfg;
  cfg.zz.horizon = spec.horizon;
  cfg.zz.seed = rec.replica_seed;
  cfg.zz.batch_size = spec.batch_size;
  cfg.eta = spec.sampler == "gzz" ? spec.eta : 0.0;
  const GibbsKernel kernel = spec.sampler == "gzz" ? problem.kernel : GibbsKernel{};

  const double t0 = spec.burnin_fraction * spec.horizon;
  const double dt = spec.dt > 0.0 ? spec.dt : spec.horizon / 1e4;

  if (!options.dump_skeleton_dir.empty()) {
    const PdmpRun run = run_gzz(*problem.model, kernel, start, cfg);
    std::ostringstream name;
    name << "skeleton_" << rec.spec_hash << "_r" << replica << ".csv";
    write_skeleton_csv((std::filesystem::path(options.dump_skeleton_dir) / name.str()).string(), run.skeleton);
    fill_efficiency(rec, efficiency_summary(discretize(run.skeleton, dt, t0), run.epochs_after(t0)));
    rec.bounces = run.bounces;
    rec.hyper_events = run.hyper_events;
    return rec;
  }

  GridRecorder grid(dt, t0, spec.horizon, p);
  const PdmpStats stats = run_gzz(*problem.model, kernel, start, cfg, grid);
  const double epochs = static_cast<double>(stats.epochs.grad_point_evals - grid.evals_at_t0()) /
                        static_cast<double>(stats.epochs.n_data);
  fill_efficiency(rec, efficiency_summary(grid.chain(), epochs));
  rec.bounces = stats.bounces;
  rec.hyper_events = stats.hyper_events;
  return rec;
}

RunRecord run_hmc_replica(const ExperimentSpec& spec, const Problem& problem, Index replica, const HmcConfig& tuned) {
  RunRecord rec = base_record(spec, replica);
  HmcConfig cfg = tuned;
  cfg.n_iterations = spec.hmc_iterations;
  cfg.seed = rec.replica_seed;
  const HmcRun run =
      hmc_within_gibbs(*problem.model, problem.kernel, VectorXd::Zero(problem.model->dim()), problem.alpha0, cfg);
  const auto burn = static_cast<Index>(std::floor(spec.burnin_fraction * static_cast<double>(cfg.n_iterations)));
  const Index kept = cfg.n_iterations - burn;
  const double epochs =
      epoch_report(run.epochs) * static_cast<double>(kept) / static_cast<double>(cfg.n_iterations);
  fill_efficiency(rec, efficiency_summary(MatrixXd(run.xi_samples.bottomRows(kept)), epochs, 1.0));
  rec.acceptance = run.acceptance_rate;
  rec.step_size = cfg.step_size;
  rec.n_leapfrog = cfg.n_leapfrog;
  return rec;
}

}  // namespace

HmcTuning tune_for(const ExperimentSpec& spec, const Problem& problem) {
  std::vector<std::pair<double, Index>> grid;
  for (double h : parse_double_list(spec.hmc_step_sizes))
    for (Index l : parse_index_list(spec.hmc_leapfrog)) grid.emplace_back(h, l);
  HmcTuningOptions options;
  options.pilot_iterations = spec.pilot_iterations;
  options.seed = derive_seed(spec.seed, 0xC0FFEEu);
  return tune_hmc(*problem.model, problem.kernel, VectorXd::Zero(problem.model->dim()), problem.alpha0, grid, options);
}

RunRecord run_replica(const ExperimentSpec& spec, const Problem& problem, Index replica, const HmcConfig* hmc,
                      const RunOptions& options) {
  if (spec.sampler == "hmc-gibbs") {
    if (!hmc) throw std::invalid_argument("HMC replicas need a tuned configuration");
    return run_hmc_replica(spec, problem, replica, *hmc);
  }
  return run_pdmp_replica(spec, problem, replica, options);
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(count, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::vector<RunRecord> run_experiment(const ExperimentSpec& spec, const RunOptions& options) {
  const Problem problem = build_problem(spec);
  HmcTuning tuning;
  if (spec.sampler == "hmc-gibbs") tuning = tune_for(spec, problem);
  std::vector<RunRecord> rows(static_cast<std::size_t>(spec.replicas));
  parallel_for(rows.size(), [&](std::size_t r) {
    rows[r] = run_replica(spec, problem, static_cast<Index>(r), &tuning.config, options);
    rows[r].experiment = "run";
    rows[r].tuning_flagged = tuning.flagged;
  });
  return rows;
}

EtaSweepResult run_eta_sweep(const ExperimentSpec& spec, const std::vector<double>& etas) {
  if (etas.size() < 3) throw ConfigError("eta sweep needs at least 3 values");
  for (double e : etas)
    if (!(e > 0.0)) throw ConfigError("eta values must be positive");
  const auto [lo, hi] = std::minmax_element(etas.begin(), etas.end());
  if (*hi / *lo < 100.0 * (1.0 - 1e-12)) throw ConfigError("eta values must span at least two decades");

  ExperimentSpec base = spec;
  base.sampler = "gzz";
  const Problem problem = build_problem(base);
  const auto reps = static_cast<std::size_t>(spec.replicas);
  EtaSweepResult result;
  result.rows.resize(etas.size() * reps);
  parallel_for(result.rows.size(), [&](std::size_t k) {
    ExperimentSpec s = base;
    s.eta = etas[k / reps];
    auto& row = result.rows[k];
    row = run_replica(s, problem, static_cast<Index>(k % reps));
    row.experiment = "sweep-eta";
  });

  std::vector<double> x;
  std::vector<double> y;
  for (const auto& row : result.rows) {
    if (row.eta <= 0.1 * (1.0 + 1e-12)) {
      x.push_back(std::log(row.eta));
      y.push_back(std::log(row.iact_slowest));
    }
  }
  if (x.size() >= 2) {
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sxy += (x[i] - mx) * (y[i] - my);
      sxx += (x[i] - mx) * (x[i] - mx);
    }
    result.slope = sxx > 0.0 ? sxy / sxx : std::nan("");
  } else {
    result.slope = std::nan("");
  }
  return result;
}

BatchSweepResult run_batch_sweep(const ExperimentSpec& spec, const std::vector<Index>& batch_sizes,
                                 const std::vector<double>& etas) {
  if (batch_sizes.empty() || etas.empty()) throw ConfigError("batch sweep needs batch sizes and eta values");
  ExperimentSpec base = spec;
  base.sampler = "gzz";
  base.batch_size = 1;
  const Problem problem = build_problem(base);
  for (Index b : batch_sizes)
    if (b < 1 || b > problem.n_total) throw ConfigError("batch sizes must lie in [1, n]");
  for (double e : etas)
    if (!(e > 0.0)) throw ConfigError("eta values must be positive");

  const auto reps = static_cast<std::size_t>(spec.replicas);
  const std::size_t cells = batch_sizes.size() * etas.size();
  BatchSweepResult result;
  result.rows.resize(cells * reps);
  parallel_for(result.rows.size(), [&](std::size_t k) {
    const std::size_t cell = k / reps;
    ExperimentSpec s = base;
    s.eta = etas[cell / batch_sizes.size()];
    s.batch_size = batch_sizes[cell % batch_sizes.size()];
    auto& row = result.rows[k];
    row = run_replica(s, problem, static_cast<Index>(k % reps));
    row.experiment = "sweep-batch";
  });
  return result;
}

ComparisonResult run_comparison(const ExperimentSpec& spec, const std::string& axis,
                                 const std::vector<double>& values) {
  if (axis != "K" && axis != "n") throw ConfigError("comparison axis must be K or n");
  if (values.empty()) throw ConfigError("comparison needs axis values");
  ComparisonResult result;
  const auto reps = static_cast<std::size_t>(spec.replicas);

  for (double value : values) {
    ExperimentSpec s = spec;
    if (axis == "K") {
      s.K = static_cast<Index>(value);
    } else {
      s.n = static_cast<Index>(value);
      s.epsilon = std::min(1.0, spec.epsilon_times_n / value);
    }
    s.sampler = "gzz";
    const Problem problem = build_problem(s);
    ExperimentSpec h = s;
    h.sampler = "hmc-gibbs";
    const HmcTuning tuning = tune_for(h, problem);

    std::vector<RunRecord> gzz_rows(reps);
    std::vector<RunRecord> hmc_rows(reps);
    parallel_for(2 * reps, [&](std::size_t k) {
      const auto r = static_cast<Index>(k % reps);
      if (k < reps) {
        gzz_rows[k] = run_replica(s, problem, r);
      } else {
        hmc_rows[k - reps] = run_replica(h, problem, r, &tuning.config);
      }
    });

    ComparisonPoint point;
    point.axis_value = value;
    point.hmc = tuning.config;
    point.tuning_flagged = tuning.flagged;
    std::vector<double> g;
    std::vector<double> m;
    for (std::size_t r = 0; r < reps; ++r) {
      for (auto* row : {&gzz_rows[r], &hmc_rows[r]}) {
        row->experiment = "compare";
        row->axis_value = value;
        row->tuning_flagged = tuning.flagged;
        result.rows.push_back(*row);
      }
      g.push_back(gzz_rows[r].ess_per_epoch);
      m.push_back(hmc_rows[r].ess_per_epoch);
      point.ratios.push_back(gzz_rows[r].ess_per_epoch / hmc_rows[r].ess_per_epoch);
    }
    point.median_gzz = median(g);
    point.median_hmc = median(m);
    point.median_ratio = median(point.ratios);
    result.points.push_back(std::move(point));
  }

  std::vector<double> x;
  std::vector<double> y;
  for (const auto& pt : result.points) {
    x.push_back(pt.axis_value);
    y.push_back(pt.median_ratio);
  }
  result.spearman = spearman_correlation(x, y);
  return result;
}

double median(std::vector<double> values) {
  if (values.empty()) return std::nan("");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double spearman_correlation(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) return std::nan("");
  const auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < order.size();) {
      std::size_t j = i;
      while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
      const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
      for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const Eigen::Map<const VectorXd> a(rx.data(), static_cast<Index>(rx.size()));
  const Eigen::Map<const VectorXd> b(ry.data(), static_cast<Index>(ry.size()));
  const VectorXd ca = a.array() - a.mean();
  const VectorXd cb = b.array() - b.mean();
  const double denom = std::sqrt(ca.squaredNorm() * cb.squaredNorm());
  return denom > 0.0 ? ca.dot(cb) / denom : std::nan("");
}

// ---------------------------------------------------------------------------

nlohmann::json spec_json(const ExperimentSpec& spec) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : resolved_entries(spec)) j[k] = v;
  return j;
}

nlohmann::json to_json(const RunRecord& r) {
  return {{"experiment", r.experiment},
          {"sampler", r.sampler},
          {"axis_value", r.axis_value},
          {"eta", r.eta},
          {"batch_size", r.batch_size},
          {"replica", r.replica},
          {"replica_seed", r.replica_seed},
          {"dt", r.dt},
          {"epochs", r.epochs},
          {"slowest_coordinate", r.slowest_coordinate},
          {"iact_slowest", r.iact_slowest},
          {"ess_min", r.ess_min},
          {"ess_per_epoch", r.ess_per_epoch},
          {"acceptance", r.acceptance},
          {"step_size", r.step_size},
          {"n_leapfrog", r.n_leapfrog},
          {"tuning_flagged", r.tuning_flagged},
          {"bounces", r.bounces},
          {"hyper_events", r.hyper_events},
          {"spec_hash", r.spec_hash}};
}

void write_results_csv(std::ostream& out, const ExperimentSpec& spec, const std::vector<RunRecord>& rows) {
  for (const auto& [k, v] : resolved_entries(spec)) out << "# " << k << " = " << v << '\n';
  out << "experiment,sampler,axis_value,eta,batch_size,replica,replica_seed,dt,epochs,slowest_coordinate,"
         "iact_slowest,ess_min,ess_per_epoch,acceptance,step_size,n_leapfrog,tuning_flagged,bounces,hyper_events,"
         "spec_hash\n";
  for (const auto& r : rows) {
    out << r.experiment << ',' << r.sampler << ',' << format_double(r.axis_value) << ',' << format_double(r.eta)
        << ',' << r.batch_size << ',' << r.replica << ',' << r.replica_seed << ',' << format_double(r.dt) << ','
        << format_double(r.epochs) << ',' << r.slowest_coordinate << ',' << format_double(r.iact_slowest) << ','
        << format_double(r.ess_min) << ',' << format_double(r.ess_per_epoch) << ',' << format_double(r.acceptance)
        << ',' << format_double(r.step_size) << ',' << r.n_leapfrog << ',' << (r.tuning_flagged ? 1 : 0) << ','
        << r.bounces << ',' << r.hyper_events << ',' << r.spec_hash << '\n';
  }
}

void write_results_csv(const std::string& path, const ExperimentSpec& spec, const std::vector<RunRecord>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  write_results_csv(out, spec, rows);
}

}  // namespace gzz
