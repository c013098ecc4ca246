#include "t2vt/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace t2vt {

ReplayBuffer::ReplayBuffer(std::size_t capacity)
  : capacity_(capacity)
{
  require(capacity > 0, "replay buffer: capacity must be positive");
}

void ReplayBuffer::push(TdSample sample)
{
  if (data_.size() < capacity_) {
    data_.push_back(std::move(sample));
    return;
  }
  data_[head_] = std::move(sample);
  head_ = (head_ + 1) % capacity_;
}

const TdSample& ReplayBuffer::oldest(std::size_t i) const
{
  require(i < data_.size(), "replay buffer: index out of range");
  return data_[(head_ + i) % data_.size()];
}

std::vector<TdSample> ReplayBuffer::sample_batch(std::size_t batch_size, Rng& rng) const
{
  require(!data_.empty(), "replay buffer: sampling from an empty buffer");
  std::uniform_int_distribution<std::size_t> pick(0, data_.size() - 1);
  std::vector<TdSample> batch;
  batch.reserve(batch_size);
  for (std::size_t b = 0; b < batch_size; ++b)
    batch.push_back(data_[pick(rng)]);
  return batch;
}

void EpisodeTracker::add_reward(double reward, int h, double gamma)
{
  current_ += std::pow(gamma, h) * reward;
}

void EpisodeTracker::end_episode()
{
  returns_.push_back(current_);
  recent_.push_back(current_);
  if (recent_.size() > window_)
    recent_.pop_front();
  current_ = 0.0;
}

double EpisodeTracker::moving_average() const
{
  if (recent_.empty())
    return current_;
  return std::accumulate(recent_.begin(), recent_.end(), 0.0) / static_cast<double>(recent_.size());
}

double epsilon_at(long iteration, const SolverConfig& config)
{
  const double horizon = config.decay_fraction * static_cast<double>(config.iterations);
  if (horizon <= 0.0 || static_cast<double>(iteration) >= horizon)
    return config.epsilon_final;
  const double frac = static_cast<double>(iteration) / horizon;
  return config.epsilon_start + frac * (config.epsilon_final - config.epsilon_start);
}

namespace {

int argmax_random_ties(const Vector& q, Rng& rng)
{
  const double top = q.maxCoeff();
  std::vector<int> ties;
  for (int a = 0; a < q.size(); ++a)
    if (q(a) == top)
      ties.push_back(a);
  if (ties.size() == 1)
    return ties.front();
  std::uniform_int_distribution<std::size_t> pick(0, ties.size() - 1);
  return ties[pick(rng)];
}

void record_point(RunRecord& record, const EpisodeTracker& tracker, long it, long stride)
{
  if (stride > 0 && (it + 1) % stride == 0) {
    record.curve.push_back(tracker.moving_average());
    record.grid.push_back(it + 1);
  }
}

} // namespace

SolveResult solve_source(const Environment& env, const FeatureMap& fmap, const SolverConfig& config, Rng& rng)
{
  require(fmap.num_actions() == env.num_actions(), "solve_source: feature map action count mismatch");
  const int n_actions = env.num_actions();
  SolveResult out;
  out.theta = Vector::Zero(fmap.num_weights());
  Adam adam(config.alpha);
  ReplayBuffer buffer(config.buffer_size);
  EpisodeTracker tracker;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> random_action(0, n_actions - 1);

  Vector state = env.reset(rng);
  Vector phi = fmap.features(state);
  int h = 0;
  for (long it = 0; it < config.iterations; ++it) {
    int action;
    if (unit(rng) < epsilon_at(it, config))
      action = random_action(rng);
    else
      action = argmax_random_ties(q_values(phi, out.theta, n_actions), rng);

    Transition tr = env.step(state, action, rng);
    tracker.add_reward(tr.reward, h, env.gamma());
    Vector next_phi = fmap.features(tr.next_state);
    buffer.push(TdSample{ phi, action, tr.reward, next_phi, tr.terminal });
    out.record.max_buffer_size = std::max(out.record.max_buffer_size, buffer.size());

    const auto batch = buffer.sample_batch(static_cast<std::size_t>(config.batch_size), rng);
    const auto lg = td_loss_and_grad(out.theta, batch, n_actions, config.td);
    adam.step(out.theta, lg.grad);

    ++h;
    if (tr.terminal || h >= env.max_episode_steps()) {
      tracker.end_episode();
      state = env.reset(rng);
      phi = fmap.features(state);
      h = 0;
    } else {
      state = std::move(tr.next_state);
      phi = std::move(next_phi);
    }
    record_point(out.record, tracker, it, config.record_stride);
  }
  out.record.iterations = config.iterations;
  out.record.episode_returns = tracker.returns();
  check_weight_norm(out.theta, config.theta_max);
  return out;
}

InitResult init_posterior(const PriorMixture& prior, const InitConfig& config, Rng& rng)
{
  if (prior.size() == 0)
    throw EmptyPriorError("cannot initialize a posterior from an empty prior");
  prior.validate();
  require(config.components >= 1, "init_posterior: need at least one component");
  const auto J = prior.size();
  const auto p = prior.dim();

  // heaviest first; equal weights ordered by a random key
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> key(J);
  for (auto& k : key)
    k = unit(rng);
  std::vector<std::size_t> order(J);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (prior.weights(a) != prior.weights(b))
      return prior.weights(a) > prior.weights(b);
    return key[a] < key[b];
  });
  std::vector<std::size_t> picked(order.begin(), order.begin() + std::min(J, config.components));
  std::discrete_distribution<std::size_t> by_weight(prior.weights.data(), prior.weights.data() + J);
  while (picked.size() < config.components)
    picked.push_back(by_weight(rng));

  const double sd = std::sqrt(prior.sigma2);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Vector> means;
  std::vector<Matrix> chol;
  for (auto j : picked) {
    Vector mu = prior.means[j];
    for (Eigen::Index d = 0; d < p; ++d)
      mu(d) += sd * normal(rng);
    means.push_back(std::move(mu));
    chol.push_back(sd * Matrix::Identity(p, p));
  }
  MixturePosterior posterior(std::move(means), std::move(chol), config.sigma_min);

  InitResult out{ posterior, {} };
  out.bound_trace.push_back(mog_kl_upper_bound(posterior, prior, config.kl_iters).value);
  double best = out.bound_trace.back();
  PosteriorAdam opt(config.components, config.alpha_mu, config.alpha_L);
  for (int step = 0; step < config.refine_steps; ++step) {
    const auto bound = mog_kl_upper_bound(posterior, prior, config.kl_iters);
    opt.step(posterior, mog_kl_upper_bound_grad(posterior, prior, bound.chi));
    const double value = mog_kl_upper_bound(posterior, prior, config.kl_iters).value;
    out.bound_trace.push_back(value);
    if (value < best) {
      best = value;
      out.posterior = posterior;
    }
  }
  return out;
}

RunRecord run_transfer_from(const Environment& env,
                            const FeatureMap& fmap,
                            const PriorMixture& prior,
                            MixturePosterior posterior,
                            const TransferConfig& config,
                            Rng& rng)
{
  require(fmap.num_actions() == env.num_actions(), "run_transfer: feature map action count mismatch");
  require(posterior.dim() == fmap.num_weights(), "run_transfer: posterior dimension mismatch");
  const int n_actions = env.num_actions();
  RunRecord record;
  PosteriorAdam opt(posterior.num_components(), config.init.alpha_mu, config.init.alpha_L);
  ReplayBuffer buffer(config.buffer_size);
  EpisodeTracker tracker;

  Vector state = env.reset(rng);
  Vector phi = fmap.features(state);
  Vector theta;
  int h = 0;
  for (long it = 0; it < config.iterations; ++it) {
    if (!config.resample_per_episode || h == 0 || theta.size() == 0) {
      theta = posterior.sample(rng).theta;
      ++record.posterior_samples;
    }
    const int action = greedy_action(q_values(phi, theta, n_actions));
    Transition tr = env.step(state, action, rng);
    tracker.add_reward(tr.reward, h, env.gamma());
    Vector next_phi = fmap.features(tr.next_state);
    buffer.push(TdSample{ phi, action, tr.reward, next_phi, tr.terminal });
    record.max_buffer_size = std::max(record.max_buffer_size, buffer.size());

    const auto res = elbo_value_and_grad(posterior, prior, buffer.samples(), n_actions, config.elbo, rng);
    opt.step(posterior, res.grad);
    ++record.posterior_updates;

    ++h;
    if (tr.terminal || h >= env.max_episode_steps()) {
      tracker.end_episode();
      state = env.reset(rng);
      phi = fmap.features(state);
      h = 0;
    } else {
      state = std::move(tr.next_state);
      phi = std::move(next_phi);
    }
    record_point(record, tracker, it, config.record_stride);
  }
  record.iterations = config.iterations;
  record.episode_returns = tracker.returns();
  record.posterior = std::move(posterior);
  return record;
}

RunRecord run_transfer(const Environment& env,
                       const FeatureMap& fmap,
                       const PriorMixture& prior,
                       const TransferConfig& config,
                       Rng& rng)
{
  auto init = init_posterior(prior, config.init, rng);
  return run_transfer_from(env, fmap, prior, std::move(init.posterior), config, rng);
}

GreedyEvaluation evaluate_greedy(const Environment& env,
                                 const FeatureMap& fmap,
                                 const Vector& theta,
                                 int episodes,
                                 Rng& rng)
{
  require(episodes > 0, "evaluate_greedy: need at least one episode");
  GreedyEvaluation out;
  for (int e = 0; e < episodes; ++e) {
    Vector state = env.reset(rng);
    EpisodeTracker tracker;
    bool reached = false;
    for (int h = 0; h < env.max_episode_steps(); ++h) {
      const int action = greedy_action(q_values(fmap.features(state), theta, env.num_actions()));
      Transition tr = env.step(state, action, rng);
      tracker.add_reward(tr.reward, h, env.gamma());
      if (tr.terminal) {
        reached = true;
        break;
      }
      state = std::move(tr.next_state);
    }
    out.mean_return += tracker.current_return();
    out.success_rate += reached ? 1.0 : 0.0;
  }
  out.mean_return /= episodes;
  out.success_rate /= episodes;
  return out;
}

} // namespace t2vt
