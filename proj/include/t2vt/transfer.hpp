#pragma once

#include "t2vt/optimizer.hpp"

#include <deque>
#include <optional>
#include <span>
#include <vector>

namespace t2vt {

//! Fixed-capacity FIFO replay memory in contiguous storage.
class ReplayBuffer
{
public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(TdSample sample);
  std::size_t size() const { return data_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return data_.empty(); }
  //! Stored samples in storage order (not insertion order once wrapped).
  std::span<const TdSample> samples() const { return data_; }
  //! Sample the i-th oldest element.
  const TdSample& oldest(std::size_t i) const;

  std::vector<TdSample> sample_batch(std::size_t batch_size, Rng& rng) const;

private:
  std::size_t capacity_;
  std::size_t head_ = 0; // slot of the oldest element once full
  std::vector<TdSample> data_;
};

//! Discounted return of each finished episode and the moving window over them.
class EpisodeTracker
{
public:
  explicit EpisodeTracker(std::size_t window = 50)
    : window_(window)
  {
  }

  //! Reward observed at step `h` of the current episode.
  void add_reward(double reward, int h, double gamma);
  void end_episode();

  //! Mean over the last `window` finished episodes; the running partial
  //! return when no episode has finished yet.
  double moving_average() const;

  const std::vector<double>& returns() const { return returns_; }
  double current_return() const { return current_; }

private:
  std::size_t window_;
  std::vector<double> returns_;
  std::deque<double> recent_;
  double current_ = 0.0;
};

struct RunRecord
{
  std::vector<double> curve;       // moving-average return every record_stride iterations
  std::vector<long> grid;          // iteration count of each curve point
  long iterations = 0;
  std::vector<double> episode_returns;
  std::optional<MixturePosterior> posterior;
  long posterior_samples = 0;
  long posterior_updates = 0;
  std::size_t max_buffer_size = 0;
};

struct SolverConfig
{
  long iterations = 3000;
  int batch_size = 50;
  std::size_t buffer_size = 50000;
  double alpha = 1e-3;
  double epsilon_start = 1.0;
  double epsilon_final = 0.02;
  double decay_fraction = 0.5;
  TdParams td;
  long record_stride = 50;
  double theta_max = 1e4;
};

//! Linear decay from epsilon_start to epsilon_final over decay_fraction of the budget.
double epsilon_at(long iteration, const SolverConfig& config);

struct SolveResult
{
  Vector theta;
  RunRecord record;
};

/// Epsilon-greedy TD minimization on a single task: one ADAM step on the
/// mellow TD loss of a replay minibatch per environment step.
SolveResult solve_source(const Environment& env, const FeatureMap& fmap, const SolverConfig& config, Rng& rng);

struct InitResult
{
  MixturePosterior posterior;
  std::vector<double> bound_trace; // bound before refinement, then after each step
};

struct InitConfig
{
  std::size_t components = 1;
  int refine_steps = 500;
  double alpha_mu = 1e-3;
  double alpha_L = 1e-4;
  double sigma_min = 1e-2;
  int kl_iters = 10;
};

/// Seeds K components at the heaviest prior components (ties broken by
/// weighted sampling) plus N(0, sigma2 I) jitter, factors sqrt(sigma2) I
/// floored at sigma_min, then descends the KL bound alone.
InitResult init_posterior(const PriorMixture& prior, const InitConfig& config, Rng& rng);

struct TransferConfig
{
  long iterations = 3000;
  std::size_t buffer_size = 50000;
  ElboConfig elbo;
  InitConfig init;
  long record_stride = 50;
  bool resample_per_episode = false;
};

/// Online variational transfer: per step, draw weights from the posterior,
/// act greedily, store the transition and take one ADAM step on the ELBO.
RunRecord run_transfer(const Environment& env,
                       const FeatureMap& fmap,
                       const PriorMixture& prior,
                       const TransferConfig& config,
                       Rng& rng);

//! Same loop starting from a given posterior (no initialization phase).
RunRecord run_transfer_from(const Environment& env,
                            const FeatureMap& fmap,
                            const PriorMixture& prior,
                            MixturePosterior posterior,
                            const TransferConfig& config,
                            Rng& rng);

struct GreedyEvaluation
{
  double mean_return = 0.0;
  double success_rate = 0.0; // fraction of episodes ending in a terminal state
};

GreedyEvaluation evaluate_greedy(const Environment& env,
                                 const FeatureMap& fmap,
                                 const Vector& theta,
                                 int episodes,
                                 Rng& rng);

} // namespace t2vt
