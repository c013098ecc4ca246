#pragma once

#include "t2vt/kl.hpp"
#include "t2vt/qfunc.hpp"

#include <optional>
#include <span>
#include <vector>

namespace t2vt {

//! Bias-corrected ADAM for one parameter group.
class Adam
{
public:
  explicit Adam(double rate, double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8);

  //! Updates `params` in place; first call fixes the group size.
  void step(Eigen::Ref<Vector> params, const Eigen::Ref<const Vector>& grad);
  void step(Matrix& params, const Matrix& grad);

  double rate() const { return rate_; }
  long steps() const { return t_; }
  const Vector& first_moment() const { return m_; }
  const Vector& second_moment() const { return v_; }

private:
  double rate_, beta1_, beta2_, epsilon_;
  Vector m_, v_;
  long t_ = 0;
};

/// ADAM over a mixture posterior: means at one rate, Cholesky factors at another.
/// Every step ends by restoring the diagonal floor of the factors.
class PosteriorAdam
{
public:
  PosteriorAdam(std::size_t components, double rate_mean, double rate_chol);

  void step(MixturePosterior& posterior, const PosteriorGradient& grad);

  long steps() const { return steps_; }

private:
  std::vector<Adam> mean_opt_;
  std::vector<Adam> chol_opt_;
  long steps_ = 0;
};

struct ElboConfig
{
  double psi = 1e-6;
  int batch_size = 50;
  int n_weight_samples = 10;
  TdParams td;
  int kl_iters = 10;
};

//! Randomness consumed by one ELBO estimate; fixing it gives common random numbers.
struct ElboDraw
{
  std::vector<TdSample> minibatch;
  std::vector<PosteriorSample> samples;
};

ElboDraw draw_elbo_randomness(const MixturePosterior& posterior,
                              std::span<const TdSample> buffer,
                              const ElboConfig& config,
                              Rng& rng);

struct ElboResult
{
  double value = 0.0;
  double td_term = 0.0;
  double kl_bound = 0.0;
  double n_data = 0.0; // N in psi / N
  PosteriorGradient grad;
  ChiMatrices chi;
};

/// ELBO estimate for a fixed draw. Weight samples are re-derived from their
/// noise so the posterior may differ from the one that produced the draw.
/// With `frozen_chi` the KL bound is evaluated at that chi instead of refined.
ElboResult elbo_value_and_grad(const MixturePosterior& posterior,
                               const PriorMixture& prior,
                               const ElboDraw& draw,
                               std::size_t n_data,
                               int num_actions,
                               const ElboConfig& config,
                               const ChiMatrices* frozen_chi = nullptr);

/// Minibatch drawn uniformly with replacement from `buffer`, N = buffer size.
ElboResult elbo_value_and_grad(const MixturePosterior& posterior,
                               const PriorMixture& prior,
                               std::span<const TdSample> buffer,
                               int num_actions,
                               const ElboConfig& config,
                               Rng& rng);

} // namespace t2vt
