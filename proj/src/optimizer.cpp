#include "t2vt/optimizer.hpp"

#include <cmath>

namespace t2vt {

Adam::Adam(double rate, double beta1, double beta2, double epsilon)
  : rate_(rate)
  , beta1_(beta1)
  , beta2_(beta2)
  , epsilon_(epsilon)
{
  require(rate > 0.0, "adam: rate must be positive");
}

void Adam::step(Eigen::Ref<Vector> params, const Eigen::Ref<const Vector>& grad)
{
  require(params.size() == grad.size(), "adam: parameter and gradient sizes differ");
  if (t_ == 0) {
    m_ = Vector::Zero(params.size());
    v_ = Vector::Zero(params.size());
  }
  require(m_.size() == params.size(), "adam: parameter group changed size");
  ++t_;
  m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
  v_ = beta2_ * v_ + (1.0 - beta2_) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  params.array() -= rate_ * (m_.array() / c1) / ((v_.array() / c2).sqrt() + epsilon_);
}

void Adam::step(Matrix& params, const Matrix& grad)
{
  require(params.rows() == grad.rows() && params.cols() == grad.cols(), "adam: shape mismatch");
  Eigen::Map<Vector> p(params.data(), params.size());
  Eigen::Map<const Vector> g(grad.data(), grad.size());
  step(p, g);
}

PosteriorAdam::PosteriorAdam(std::size_t components, double rate_mean, double rate_chol)
  : mean_opt_(components, Adam(rate_mean))
  , chol_opt_(components, Adam(rate_chol))
{
}

void PosteriorAdam::step(MixturePosterior& posterior, const PosteriorGradient& grad)
{
  require(posterior.num_components() == mean_opt_.size() && grad.means.size() == mean_opt_.size(),
          "posterior adam: component count mismatch");
  for (std::size_t k = 0; k < mean_opt_.size(); ++k) {
    mean_opt_[k].step(posterior.means()[k], grad.means[k]);
    chol_opt_[k].step(posterior.chol()[k], grad.chol[k]);
  }
  posterior.clamp_diagonal();
  ++steps_;
}

ElboDraw draw_elbo_randomness(const MixturePosterior& posterior,
                              std::span<const TdSample> buffer,
                              const ElboConfig& config,
                              Rng& rng)
{
  require(!buffer.empty(), "elbo: empty buffer");
  require(config.batch_size >= 1 && config.n_weight_samples >= 1, "elbo: batch and sample counts must be positive");
  ElboDraw draw;
  std::uniform_int_distribution<std::size_t> pick(0, buffer.size() - 1);
  draw.minibatch.reserve(static_cast<std::size_t>(config.batch_size));
  for (int b = 0; b < config.batch_size; ++b)
    draw.minibatch.push_back(buffer[pick(rng)]);
  for (int s = 0; s < config.n_weight_samples; ++s)
    draw.samples.push_back(posterior.sample(rng));
  return draw;
}

ElboResult elbo_value_and_grad(const MixturePosterior& posterior,
                               const PriorMixture& prior,
                               const ElboDraw& draw,
                               std::size_t n_data,
                               int num_actions,
                               const ElboConfig& config,
                               const ChiMatrices* frozen_chi)
{
  require(n_data > 0 && !draw.minibatch.empty(), "elbo: empty buffer");
  require(config.psi >= 0.0, "elbo: psi must be non-negative");
  require(!draw.samples.empty(), "elbo: no weight samples");

  ElboResult out;
  out.n_data = static_cast<double>(n_data);

  std::vector<PosteriorSample> samples = draw.samples;
  std::vector<Vector> grads;
  grads.reserve(samples.size());
  for (auto& s : samples) {
    s.theta = posterior.transform(s.component, s.noise);
    auto lg = td_loss_and_grad(s.theta, draw.minibatch, num_actions, config.td);
    out.td_term += lg.loss;
    grads.push_back(std::move(lg.grad));
  }
  out.td_term /= static_cast<double>(samples.size());
  out.grad = posterior.reparam_grad(samples, grads);

  if (frozen_chi) {
    out.chi = *frozen_chi;
    out.kl_bound = mog_kl_bound_value(posterior, prior, out.chi);
  } else {
    auto bound = mog_kl_upper_bound(posterior, prior, config.kl_iters);
    out.kl_bound = bound.value;
    out.chi = std::move(bound.chi);
  }
  const double scale = config.psi / out.n_data;
  out.value = out.td_term + scale * out.kl_bound;
  if (scale != 0.0) {
    auto kl_grad = mog_kl_upper_bound_grad(posterior, prior, out.chi);
    kl_grad *= scale;
    out.grad += kl_grad;
  }
  return out;
}

ElboResult elbo_value_and_grad(const MixturePosterior& posterior,
                               const PriorMixture& prior,
                               std::span<const TdSample> buffer,
                               int num_actions,
                               const ElboConfig& config,
                               Rng& rng)
{
  const auto draw = draw_elbo_randomness(posterior, buffer, config, rng);
  return elbo_value_and_grad(posterior, prior, draw, buffer.size(), num_actions, config);
}

} // namespace t2vt
