#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "gzz/hmc.hpp"
#include "gzz/model.hpp"
#include "gzz/random_effects.hpp"
#include "gzz/spike_slab.hpp"
#include "json.hpp"

namespace gzz {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Every knob of an experiment. All fields have defaults so a resolved spec
/// can always be written out in full.
struct ExperimentSpec {
  std::string model = "random-effects";  // random-effects | spike-slab
  Index n = 10;  // subjects per group (random effects) or observations (spike-slab)
  Index p = 2;
  Index K = 2;
  double epsilon = 0.5;
  double nonzero_fraction = 1.0;
  std::string data_file;

  std::string sampler = "gzz";  // zz | gzz | hmc-gibbs
  double eta = 1.0;
  Index batch_size = 10;
  double horizon = 1e4;
  double dt = 0.0;  // 0 selects horizon / 1e4
  double burnin_fraction = 0.1;

  std::string hmc_step_sizes = "0.01,0.02,0.05,0.1,0.2";
  std::string hmc_leapfrog = "5,10,20";
  Index hmc_iterations = 5000;
  Index pilot_iterations = 2000;

  Index replicas = 1;
  std::uint64_t seed = 1;
  std::string output_dir = ".";

  RandomEffectsHyperpriors random_effects;
  SpikeSlabHyperpriors spike_slab;

  std::string eta_values = "0.01,0.03,0.1,1";
  std::string batch_sizes = "1,10";
  std::string batch_etas = "0.001,6.47";
  std::string axis = "K";  // K | n
  std::string axis_values = "2,4,8";
  double epsilon_times_n = 50.0;
};

/// Sets one `key = value` pair; throws ConfigError on unknown keys or bad values.
void set_key(ExperimentSpec& spec, const std::string& key, const std::string& value);
/// All keys with their current values, in a fixed order.
std::vector<std::pair<std::string, std::string>> resolved_entries(const ExperimentSpec& spec);
std::vector<std::string> config_keys();

/// `key = value` per line, `#` starts a comment.
void parse_config(std::istream& in, ExperimentSpec& spec);
void parse_config_file(const std::string& path, ExperimentSpec& spec);
void validate(const ExperimentSpec& spec);
std::string spec_hash(const ExperimentSpec& spec);

std::vector<double> parse_double_list(const std::string& text);
std::vector<Index> parse_index_list(const std::string& text);

/// A model instance built from a spec, with its kernel and starting alpha.
struct Problem {
  std::unique_ptr<LogisticModel> model;
  GibbsKernel kernel;
  VectorXd alpha0;
  Index n_total = 0;
};

Problem build_problem(const ExperimentSpec& spec);
/// Writes the synthetic (or loaded) data set for `spec` to `path`.
void write_problem_data(const ExperimentSpec& spec, const std::string& path);

struct RunRecord {
  std::string experiment;
  std::string sampler;
  double axis_value = 0.0;
  double eta = 0.0;
  Index batch_size = 0;
  Index replica = 0;
  std::uint64_t replica_seed = 0;
  double dt = 0.0;
  double epochs = 0.0;
  Index slowest_coordinate = 0;  // 1-based
  double iact_slowest = 0.0;     // steps
  double ess_min = 0.0;
  double ess_per_epoch = 0.0;    // slowest coordinate
  double acceptance = 0.0;       // HMC only
  double step_size = 0.0;
  Index n_leapfrog = 0;
  bool tuning_flagged = false;
  std::int64_t bounces = 0;
  std::int64_t hyper_events = 0;
  std::string spec_hash;
};

struct RunOptions {
  /// Directory for skeleton CSVs; empty disables dumping.
  std::string dump_skeleton_dir;
};

/// Runs `spec.sampler` for replica `replica`. HMC runs use `hmc` (see tune_for).
RunRecord run_replica(const ExperimentSpec& spec, const Problem& problem, Index replica,
                      const HmcConfig* hmc = nullptr, const RunOptions& options = {});

HmcTuning tune_for(const ExperimentSpec& spec, const Problem& problem);

/// All replicas of one spec, executed on a worker pool.
std::vector<RunRecord> run_experiment(const ExperimentSpec& spec, const RunOptions& options = {});

struct EtaSweepResult {
  std::vector<RunRecord> rows;
  /// OLS slope of log IACT on log eta over rows with eta <= 0.1.
  double slope = 0.0;
};
EtaSweepResult run_eta_sweep(const ExperimentSpec& spec, const std::vector<double>& etas);

struct BatchSweepResult {
  std::vector<RunRecord> rows;
};
BatchSweepResult run_batch_sweep(const ExperimentSpec& spec, const std::vector<Index>& batch_sizes,
                                 const std::vector<double>& etas);

struct ComparisonPoint {
  double axis_value = 0.0;
  HmcConfig hmc;
  bool tuning_flagged = false;
  double median_gzz = 0.0;
  double median_hmc = 0.0;
  std::vector<double> ratios;  // per replica, GZZ over HMC ESS per epoch
  double median_ratio = 0.0;
};

struct ComparisonResult {
  std::vector<RunRecord> rows;
  std::vector<ComparisonPoint> points;
  /// Spearman correlation between axis values and median ratios.
  double spearman = 0.0;
};
ComparisonResult run_comparison(const ExperimentSpec& spec, const std::string& axis,
                                const std::vector<double>& values);

double spearman_correlation(const std::vector<double>& x, const std::vector<double>& y);
double median(std::vector<double> values);

/// Runs fn(0..count-1) on min(count, hardware threads) workers.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

/// results.csv: `# key = value` lines with the resolved spec, then one row per run.
void write_results_csv(std::ostream& out, const ExperimentSpec& spec, const std::vector<RunRecord>& rows);
void write_results_csv(const std::string& path, const ExperimentSpec& spec, const std::vector<RunRecord>& rows);
nlohmann::json spec_json(const ExperimentSpec& spec);
nlohmann::json to_json(const RunRecord& row);

}  // namespace gzz
