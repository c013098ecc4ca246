#include "t2vt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

namespace t2vt {

namespace {

// rng stream tags within one run
constexpr std::uint64_t stream_tasks = 1;
constexpr std::uint64_t stream_sources = 2;
constexpr std::uint64_t stream_series = 3;
constexpr std::uint64_t stream_target = 4;

std::string format_value(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

} // namespace

std::string SeriesId::label() const
{
  return std::to_string(algorithm == Algorithm::SourceSolver ? 0 : K) + "-" + to_string(algorithm);
}

std::vector<SeriesId> series_of(const ExperimentConfig& config)
{
  std::vector<SeriesId> out;
  for (auto alg : config.algorithm) {
    if (alg == Algorithm::SourceSolver) {
      out.push_back({ 0, alg });
      continue;
    }
    for (int k : config.K)
      out.push_back({ k, alg });
  }
  return out;
}

Aggregate aggregate_runs(const std::vector<std::vector<double>>& runs)
{
  require(!runs.empty(), "aggregate_runs: no runs");
  const auto points = runs.front().size();
  for (const auto& r : runs)
    require(r.size() == points, "aggregate_runs: runs differ in length");
  const double n = static_cast<double>(runs.size());
  Aggregate out{ std::vector<double>(points, 0.0), std::vector<double>(points, 0.0) };
  for (std::size_t p = 0; p < points; ++p) {
    double sum = 0.0;
    for (const auto& r : runs)
      sum += r[p];
    const double mean = sum / n;
    double ss = 0.0;
    for (const auto& r : runs)
      ss += (r[p] - mean) * (r[p] - mean);
    out.mean[p] = mean;
    out.half_width[p] = runs.size() > 1 ? 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n) : 0.0;
  }
  return out;
}

void write_csv(std::ostream& out, const LearningCurve& curve)
{
  out << "i";
  for (const auto& label : curve.labels)
    out << ",mean-" << label << ",std-" << label;
  out << '\n';
  for (std::size_t row = 0; row < curve.grid.size(); ++row) {
    out << curve.grid[row];
    for (std::size_t s = 0; s < curve.labels.size(); ++s)
      out << ',' << format_value(curve.mean[s][row]) << ',' << format_value(curve.half_width[s][row]);
    out << '\n';
  }
}

SourceSolutions solve_sources(const ExperimentConfig& config, int run_index)
{
  const std::uint64_t seed = config.master_seed + static_cast<std::uint64_t>(run_index);
  const auto schedule = config.schedule();
  auto task_rng = make_rng(seed, stream_tasks);
  const auto solver = config.source_solver();

  SourceSolutions sources;
  int solved = 0;
  for (int i = 1; i <= schedule.source_instants; ++i) {
    const double t = schedule.instant_time(i);
    for (int j = 0; j < schedule.tasks_per_instant; ++j, ++solved) {
      const auto params = sample_task(config.dynamic, t, schedule, task_rng);
      const auto env = make_environment(config.environment, params, config.noise_std);
      const auto fmap = FeatureMap::for_environment(*env);
      auto rng = make_rng(seed, stream_sources, static_cast<std::uint64_t>(solved));
      auto result = solve_source(*env, fmap, solver, rng);
      sources.entries.push_back({ std::move(result.theta), t, static_cast<std::uint32_t>(i) });
    }
  }
  return sources;
}

RunOutput run_single(const ExperimentConfig& config, int run_index)
{
  config.validate();
  RunOutput out;
  out.seed = config.master_seed + static_cast<std::uint64_t>(run_index);

  const auto series = series_of(config);
  const bool needs_sources = std::any_of(series.begin(), series.end(), [](const SeriesId& s) {
    return s.algorithm != Algorithm::SourceSolver;
  });
  if (needs_sources)
    out.sources = solve_sources(config, run_index);

  const auto schedule = config.schedule();
  auto task_rng = make_rng(out.seed, stream_target);
  out.target_params = sample_task(config.dynamic, schedule.target_time, schedule, task_rng);
  const auto target = make_environment(config.environment, out.target_params, config.noise_std);
  const auto fmap = FeatureMap::for_environment(*target);

  for (std::size_t s = 0; s < series.size(); ++s) {
    // keyed by the series itself, so adding series to a config leaves the others unchanged
    const auto key = (static_cast<std::uint64_t>(series[s].algorithm) << 16) | static_cast<std::uint64_t>(series[s].K);
    auto rng = make_rng(out.seed, stream_series, key);
    RunRecord record;
    switch (series[s].algorithm) {
      case Algorithm::SourceSolver:
        record = solve_source(*target, fmap, config.target_solver(), rng).record;
        break;
      case Algorithm::T2VT:
        record = run_transfer(*target, fmap,
                              build_prior(out.sources, schedule.target_time, config.lambda, config.prior_sigma2),
                              config.transfer(series[s].K), rng);
        break;
      case Algorithm::MGVT:
        record = run_transfer(*target, fmap, uniform_prior(out.sources, config.prior_sigma2),
                              config.transfer(series[s].K), rng);
        break;
    }
    out.grid = record.grid;
    out.curves.push_back(std::move(record.curve));
  }
  return out;
}

RunFailure::RunFailure(int run, std::uint64_t seed, const std::string& what)
  : std::runtime_error("run " + std::to_string(run) + " (seed " + std::to_string(seed) + ") failed: " + what)
  , run_(run)
  , seed_(seed)
{
}

ExperimentResult run_experiment(const ExperimentConfig& config, const ExperimentOptions& options)
{
  config.validate();
  const int n_runs = config.n_runs;
  std::vector<RunOutput> runs(static_cast<std::size_t>(n_runs));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_runs));
  std::atomic<int> next{ 0 };
  std::mutex callback_mutex;

  auto worker = [&] {
    for (int r = next++; r < n_runs; r = next++) {
      try {
        runs[static_cast<std::size_t>(r)] = run_single(config, r);
        if (options.on_run_done) {
          std::lock_guard lock(callback_mutex);
          options.on_run_done(r, runs[static_cast<std::size_t>(r)]);
        }
      } catch (...) {
        errors[static_cast<std::size_t>(r)] = std::current_exception();
      }
    }
  };
  const int workers = std::clamp(options.workers, 1, n_runs);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back(worker);
    for (auto& t : pool)
      t.join();
  }
  for (int r = 0; r < n_runs; ++r) {
    if (!errors[static_cast<std::size_t>(r)])
      continue;
    const auto seed = config.master_seed + static_cast<std::uint64_t>(r);
    try {
      std::rethrow_exception(errors[static_cast<std::size_t>(r)]);
    } catch (const std::exception& e) {
      throw RunFailure(r, seed, e.what());
    } catch (...) {
      throw RunFailure(r, seed, "unknown error");
    }
  }

  ExperimentResult result;
  const auto series = series_of(config);
  result.curve.grid = runs.front().grid;
  for (std::size_t s = 0; s < series.size(); ++s) {
    std::vector<std::vector<double>> per_run;
    for (const auto& run : runs)
      per_run.push_back(run.curves[s]);
    auto agg = aggregate_runs(per_run);
    result.curve.labels.push_back(series[s].label());
    result.curve.mean.push_back(std::move(agg.mean));
    result.curve.half_width.push_back(std::move(agg.half_width));
  }

  if (!options.out_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(options.out_dir);
    std::ofstream csv(fs::path(options.out_dir) / "curves.csv", std::ios::binary | std::ios::trunc);
    write_csv(csv, result.curve);
    for (int r = 0; r < n_runs; ++r) {
      const auto& sources = runs[static_cast<std::size_t>(r)].sources;
      if (sources.empty())
        continue;
      char name[40];
      std::snprintf(name, sizeof(name), "sources-run%03d.t2vt", r);
      archive_weights((fs::path(options.out_dir) / name).string(), sources);
    }
  }
  result.runs = std::move(runs);
  return result;
}

double phi_diagnostic(const Vector& theta_star, const PriorMixture& prior)
{
  require(prior.size() > 0, "phi_diagnostic: empty prior");
  require(prior.weights.size() == static_cast<Eigen::Index>(prior.size()), "phi_diagnostic: weight count mismatch");
  require(prior.sigma2 > 0.0, "phi_diagnostic: sigma2 must be positive");
  const double beta = 1.0 / (2.0 * prior.sigma2);
  const auto J = prior.size();
  std::vector<double> dist(J), logit(J);
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < J; ++j) {
    require(prior.means[j].size() == theta_star.size(), "phi_diagnostic: dimension mismatch");
    dist[j] = (theta_star - prior.means[j]).norm();
    logit[j] = std::log(prior.weights(static_cast<Eigen::Index>(j))) - beta * dist[j];
    top = std::max(top, logit[j]);
  }
  double norm = 0.0, acc = 0.0;
  for (std::size_t j = 0; j < J; ++j) {
    const double w = std::exp(logit[j] - top);
    norm += w;
    acc += w * dist[j];
  }
  return acc / norm / prior.sigma2;
}

} // namespace t2vt
