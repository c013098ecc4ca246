#include "t2vt/harness.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

using namespace t2vt;

namespace {

int cmd_run(const std::string& config_path, const std::string& out_dir, int workers, std::optional<std::uint64_t> seed)
{
  auto config = load_config(config_path);
  if (seed)
    config.master_seed = *seed;
  ExperimentOptions options;
  options.out_dir = out_dir;
  options.workers = workers;
  options.on_run_done = [&](int run, const RunOutput&) {
    std::cerr << "run " << run + 1 << "/" << config.n_runs << " done\n";
  };
  const auto result = run_experiment(config, options);
  if (out_dir.empty()) {
    write_csv(std::cout, result.curve);
  } else {
    std::ofstream cfg(std::filesystem::path(out_dir) / "config.txt");
    write_config(cfg, config);
    std::cerr << "wrote " << (std::filesystem::path(out_dir) / "curves.csv").string() << '\n';
  }
  return 0;
}

int cmd_solve_sources(const std::string& config_path, const std::string& out, std::optional<std::uint64_t> seed)
{
  auto config = load_config(config_path);
  if (seed)
    config.master_seed = *seed;
  const auto sources = solve_sources(config, 0);
  archive_weights(out, sources);
  std::cerr << "archived " << sources.size() << " source solutions of dimension " << sources.dim() << " to " << out
            << '\n';
  return 0;
}

int cmd_phi(const std::string& weights, const std::string& target, double lambda, double sigma2, double time)
{
  const auto sources = load_weights(weights);
  const auto star = load_weights(target, sources.dim());
  if (star.empty())
    throw std::runtime_error("target weight file holds no entries");
  const auto& theta_star = star.entries.front().theta;
  std::cout << "phi-T2VT," << phi_diagnostic(theta_star, build_prior(sources, time, lambda, sigma2)) << '\n';
  std::cout << "phi-MGVT," << phi_diagnostic(theta_star, uniform_prior(sources, sigma2)) << '\n';
  return 0;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{ "Time-variant variational transfer of value functions" };
  app.require_subcommand(1);

  std::string config_path, out_dir, archive_out, weights, target;
  int workers = 1;
  std::uint64_t seed_value = 0;
  double lambda = 0.3333, sigma2 = 1e-5, time = 1.0;

  auto* run = app.add_subcommand("run", "Run an experiment and write learning curves");
  run->add_option("--config", config_path, "Experiment config file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory (CSV is printed to stdout when omitted)");
  run->add_option("--workers", workers, "Concurrent runs")->check(CLI::PositiveNumber);
  auto* run_seed = run->add_option("--seed", seed_value, "Override master_seed");

  auto* solve = app.add_subcommand("solve-sources", "Solve the source tasks of one run and archive their weights");
  solve->add_option("--config", config_path, "Experiment config file")->required()->check(CLI::ExistingFile);
  solve->add_option("--out", archive_out, "Weight archive to write")->required();
  auto* solve_seed = solve->add_option("--seed", seed_value, "Override master_seed");

  auto* phi = app.add_subcommand("phi", "Source-quality diagnostic under time-variant and uniform priors");
  phi->add_option("--weights", weights, "Source weight archive")->required()->check(CLI::ExistingFile);
  phi->add_option("--target", target, "Archive whose first entry is the target-optimal weights")
    ->required()
    ->check(CLI::ExistingFile);
  phi->add_option("--lambda", lambda, "Temporal bandwidth");
  phi->add_option("--sigma2", sigma2, "Prior component variance");
  phi->add_option("--time", time, "Query time");

  CLI11_PARSE(app, argc, argv);

  try {
    auto seed = [&](CLI::Option* opt) { return opt->count() ? std::optional(seed_value) : std::nullopt; };
    if (*run)
      return cmd_run(config_path, out_dir, workers, seed(run_seed));
    if (*solve)
      return cmd_solve_sources(config_path, archive_out, seed(solve_seed));
    if (*phi)
      return cmd_phi(weights, target, lambda, sigma2, time);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
