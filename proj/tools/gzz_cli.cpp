// gzz: experiment driver for the Gibbs zig-zag sampler.
//
//   gzz run --config exp.cfg --sampler gzz --eta 0.1 --replicas 5
//   gzz sweep-eta --eta_values 0.01,0.03,0.1,1
//   gzz diagnose --skeleton out/skeleton_x_r0.csv --epochs 120
//
// Settings resolve as: defaults, then --config file, then GZZ_SEED, then flags.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "gzz/diagnostics.hpp"
#include "gzz/experiments.hpp"
#include "gzz/samplers.hpp"
#include "gzz/skeleton.hpp"
#include "json.hpp"

namespace {

using nlohmann::json;

constexpr int kConfigExit = 2;
constexpr int kEnvelopeExit = 3;

gzz::ExperimentSpec resolve(const std::string& config_path, const std::map<std::string, std::string>& flags) {
  gzz::ExperimentSpec spec;
  if (!config_path.empty()) gzz::parse_config_file(config_path, spec);
  if (const char* env = std::getenv("GZZ_SEED"); env && *env) gzz::set_key(spec, "seed", env);
  for (const auto& [key, value] : flags) gzz::set_key(spec, key, value);
  gzz::validate(spec);
  return spec;
}

std::filesystem::path prepare_output(const gzz::ExperimentSpec& spec) {
  std::filesystem::path dir(spec.output_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

void write_outputs(const gzz::ExperimentSpec& spec, const std::string& command,
                   const std::vector<gzz::RunRecord>& rows, json extra) {
  const auto dir = prepare_output(spec);
  gzz::write_results_csv((dir / "results.csv").string(), spec, rows);
  json summary = {{"command", command}, {"spec", gzz::spec_json(spec)}, {"spec_hash", gzz::spec_hash(spec)}};
  json jr = json::array();
  for (const auto& r : rows) jr.push_back(gzz::to_json(r));
  summary["rows"] = jr;
  for (auto& [k, v] : extra.items()) summary[k] = v;
  std::ofstream(dir / "summary.json") << summary.dump(2) << '\n';
  std::cout << "wrote " << (dir / "results.csv").string() << " and " << (dir / "summary.json").string() << " ("
            << rows.size() << " rows)\n";
}

json hmc_json(const gzz::HmcConfig& c) { return {{"step_size", c.step_size}, {"n_leapfrog", c.n_leapfrog}}; }

// (also returns null for NaN, which json cannot represent)
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gibbs zig-zag sampler experiments"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  app.add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);
  std::map<std::string, std::string> flags;
  for (const auto& key : gzz::config_keys()) {
    app.add_option_function<std::string>(
        "--" + key, [&flags, key](const std::string& v) { flags[key] = v; }, "config key " + key);
  }

  auto* gen = app.add_subcommand("generate-data", "write the synthetic data set as CSV");
  std::string data_out;
  gen->add_option("--out", data_out, "output path (default <output_dir>/data.csv)");

  auto* run = app.add_subcommand("run", "run all replicas of one sampler");
  std::string dump_dir;
  run->add_option("--dump-skeleton", dump_dir, "directory for per-replica skeleton CSVs");

  auto* sweep_eta = app.add_subcommand("sweep-eta", "IACT and ESS/epoch across eta_values");
  auto* sweep_batch = app.add_subcommand("sweep-batch", "IACT across batch_sizes x batch_etas");
  auto* compare = app.add_subcommand("compare", "GZZ vs HMC-within-Gibbs along axis = K | n");

  auto* diagnose = app.add_subcommand("diagnose", "efficiency summary of a skeleton CSV");
  std::string skeleton_path;
  double epochs = 1.0;
  double dt = 0.0;
  double t0 = 0.0;
  double eta_check = 0.0;
  diagnose->add_option("--skeleton", skeleton_path, "skeleton CSV")->required()->check(CLI::ExistingFile);
  diagnose->add_option("--epochs", epochs, "data epochs spent after t0 (1 reports ESS per unit)");
  diagnose->add_option("--dt", dt, "grid spacing, 0 = (T - t0)/1e4");
  diagnose->add_option("--t0", t0, "burn-in time");
  diagnose->add_option("--check-eta", eta_check, "compare the hyper event rate with this eta");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigExit;
  }

  try {
    if (*diagnose) {
      const gzz::Skeleton sk = gzz::read_skeleton_csv(skeleton_path);
      const auto summary = gzz::efficiency_summary(sk, epochs, dt, t0);
      json out = gzz::to_json(summary);
      json means = json::array();
      json second = json::array();
      for (gzz::Index c = 0; c < sk.dim() + sk.hyper_dim(); ++c) {
        means.push_back(gzz::trajectory_moment(sk, c, 1, t0));
        second.push_back(gzz::trajectory_moment(sk, c, 2, t0));
      }
      out["mean"] = means;
      out["second_moment"] = second;
      const auto hyper = gzz::hyper_update_counterfactual_check(sk);
      out["hyper_events"] = hyper.hyper_events;
      out["bounce_events"] = hyper.bounce_events;
      out["hyper_rate"] = hyper.rate;
      if (eta_check > 0.0) out["hyper_rate_consistent"] = hyper.consistent_with(eta_check);
      std::cout << out.dump(2) << '\n';
      return 0;
    }

    const gzz::ExperimentSpec spec = resolve(config_path, flags);

    if (*gen) {
      const std::string path = data_out.empty() ? (prepare_output(spec) / "data.csv").string() : data_out;
      gzz::write_problem_data(spec, path);
      std::cout << "wrote " << path << '\n';
    } else if (*run) {
      gzz::RunOptions options;
      if (!dump_dir.empty()) {
        std::filesystem::create_directories(dump_dir);
        options.dump_skeleton_dir = dump_dir;
      }
      const auto rows = gzz::run_experiment(spec, options);
      write_outputs(spec, "run", rows, json::object());
    } else if (*sweep_eta) {
      const auto result = gzz::run_eta_sweep(spec, gzz::parse_double_list(spec.eta_values));
      write_outputs(spec, "sweep-eta", result.rows, {{"slope", number(result.slope)}});
      std::cout << "log-log slope over eta <= 0.1: " << result.slope << '\n';
    } else if (*sweep_batch) {
      const auto result = gzz::run_batch_sweep(spec, gzz::parse_index_list(spec.batch_sizes),
                                               gzz::parse_double_list(spec.batch_etas));
      write_outputs(spec, "sweep-batch", result.rows, json::object());
    } else if (*compare) {
      const auto result = gzz::run_comparison(spec, spec.axis, gzz::parse_double_list(spec.axis_values));
      json points = json::array();
      for (const auto& pt : result.points) {
        points.push_back({{"axis_value", pt.axis_value},
                          {"hmc", hmc_json(pt.hmc)},
                          {"tuning_flagged", pt.tuning_flagged},
                          {"median_gzz_ess_per_epoch", number(pt.median_gzz)},
                          {"median_hmc_ess_per_epoch", number(pt.median_hmc)},
                          {"median_ratio", number(pt.median_ratio)}});
        std::cout << spec.axis << " = " << pt.axis_value << ": median ratio " << pt.median_ratio << '\n';
      }
      write_outputs(spec, "compare", result.rows, {{"points", points}, {"spearman", number(result.spearman)}});
      std::cout << "spearman: " << result.spearman << '\n';
    }
  } catch (const gzz::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigExit;
  } catch (const gzz::EnvelopeViolation& e) {
    std::cerr << "envelope violation: " << e.what() << '\n';
    return kEnvelopeExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
