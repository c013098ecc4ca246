#pragma once

#include "t2vt/archive.hpp"
#include "t2vt/config.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace t2vt {

//! One plotted line: K components of one algorithm.
struct SeriesId
{
  int K = 1;
  Algorithm algorithm = Algorithm::T2VT;

  std::string label() const; // e.g. "1-T2VT"
};

std::vector<SeriesId> series_of(const ExperimentConfig& config);

struct LearningCurve
{
  std::vector<long> grid;
  std::vector<std::string> labels;
  std::vector<std::vector<double>> mean;
  std::vector<std::vector<double>> half_width; // 95% CI half-width
};

struct Aggregate
{
  std::vector<double> mean;
  std::vector<double> half_width;
};

//! Pointwise mean and 1.96 * sample std / sqrt(runs); zero width for a single run.
Aggregate aggregate_runs(const std::vector<std::vector<double>>& runs);

//! Header `i,mean-<label>,std-<label>,...`; the std columns hold the half-widths.
void write_csv(std::ostream& out, const LearningCurve& curve);

//! Output of a single independent run.
struct RunOutput
{
  std::uint64_t seed = 0;
  SourceSolutions sources;
  std::vector<double> target_params;
  std::vector<std::vector<double>> curves; // one per series
  std::vector<long> grid;
};

//! Samples and solves the source tasks of run `run_index`.
SourceSolutions solve_sources(const ExperimentConfig& config, int run_index);

RunOutput run_single(const ExperimentConfig& config, int run_index);

struct ExperimentOptions
{
  std::string out_dir; // empty: nothing written
  int workers = 1;
  std::function<void(int run, const RunOutput&)> on_run_done;
};

struct ExperimentResult
{
  LearningCurve curve;
  std::vector<RunOutput> runs;
};

//! Raised when one run fails; carries the failing seed.
class RunFailure : public std::runtime_error
{
public:
  RunFailure(int run, std::uint64_t seed, const std::string& what);
  int run() const { return run_; }
  std::uint64_t seed() const { return seed_; }

private:
  int run_;
  std::uint64_t seed_;
};

/// Executes config.n_runs independent runs (seed master_seed + run), up to
/// `workers` at a time, and aggregates them in run order.
ExperimentResult run_experiment(const ExperimentConfig& config, const ExperimentOptions& options = {});

/// Source-quality term: (1/sigma2) sum_j w_j ||theta* - theta_j|| with
/// w_j proportional to c_j exp(-||theta* - theta_j|| / (2 sigma2)).
double phi_diagnostic(const Vector& theta_star, const PriorMixture& prior);

} // namespace t2vt
