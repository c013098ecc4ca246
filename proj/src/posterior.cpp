#include "t2vt/posterior.hpp"

#include <algorithm>
#include <limits>

namespace t2vt {

PosteriorGradient PosteriorGradient::zeros(std::size_t components, Eigen::Index dim)
{
  PosteriorGradient g;
  g.means.assign(components, Vector::Zero(dim));
  g.chol.assign(components, Matrix::Zero(dim, dim));
  return g;
}

PosteriorGradient& PosteriorGradient::operator+=(const PosteriorGradient& other)
{
  require(other.means.size() == means.size() && other.chol.size() == chol.size(),
          "posterior gradient: component count mismatch");
  for (std::size_t k = 0; k < means.size(); ++k) {
    means[k] += other.means[k];
    chol[k] += other.chol[k];
  }
  return *this;
}

PosteriorGradient& PosteriorGradient::operator*=(double scale)
{
  for (auto& m : means)
    m *= scale;
  for (auto& l : chol)
    l *= scale;
  return *this;
}

double PosteriorGradient::squared_norm() const
{
  double acc = 0.0;
  for (const auto& m : means)
    acc += m.squaredNorm();
  for (const auto& l : chol)
    acc += l.squaredNorm();
  return acc;
}

MixturePosterior::MixturePosterior(std::vector<Vector> means, std::vector<Matrix> chol, double sigma_min)
  : means_(std::move(means))
  , chol_(std::move(chol))
  , sigma_min_(sigma_min)
{
  require(!means_.empty(), "posterior: no components");
  require(means_.size() == chol_.size(), "posterior: means and factors differ in count");
  require(sigma_min_ > 0.0, "posterior: sigma_min must be positive");
  const auto p = means_.front().size();
  for (std::size_t k = 0; k < means_.size(); ++k) {
    require(means_[k].size() == p, "posterior: mean dimension mismatch");
    require(chol_[k].rows() == p && chol_[k].cols() == p, "posterior: factor dimension mismatch");
  }
  clamp_diagonal();
}

Matrix MixturePosterior::covariance(std::size_t k) const
{
  const Matrix L = chol_.at(k).triangularView<Eigen::Lower>();
  return L * L.transpose();
}

Vector MixturePosterior::transform(std::size_t component, const Vector& noise) const
{
  return means_.at(component) + chol_[component].triangularView<Eigen::Lower>() * noise;
}

PosteriorSample MixturePosterior::sample(Rng& rng) const
{
  std::uniform_int_distribution<std::size_t> pick(0, means_.size() - 1);
  std::normal_distribution<double> normal(0.0, 1.0);
  PosteriorSample s;
  s.component = pick(rng);
  s.noise.resize(dim());
  for (Eigen::Index i = 0; i < s.noise.size(); ++i)
    s.noise(i) = normal(rng);
  s.theta = transform(s.component, s.noise);
  return s;
}

PosteriorGradient MixturePosterior::reparam_grad(std::span<const PosteriorSample> samples,
                                                 std::span<const Vector> per_theta_grads) const
{
  require(samples.size() == per_theta_grads.size(), "reparam_grad: sample and gradient counts differ");
  require(!samples.empty(), "reparam_grad: no samples");
  auto g = PosteriorGradient::zeros(num_components(), dim());
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto k = samples[s].component;
    require(k < num_components(), "reparam_grad: component index out of range");
    require(per_theta_grads[s].size() == dim() && samples[s].noise.size() == dim(),
            "reparam_grad: dimension mismatch");
    g.means[k] += per_theta_grads[s];
    g.chol[k].triangularView<Eigen::Lower>() += per_theta_grads[s] * samples[s].noise.transpose();
  }
  g *= 1.0 / static_cast<double>(samples.size());
  return g;
}

void MixturePosterior::clamp_diagonal()
{
  for (auto& L : chol_) {
    L.triangularView<Eigen::StrictlyUpper>().setZero();
    for (Eigen::Index i = 0; i < L.rows(); ++i)
      L(i, i) = std::max(L(i, i), sigma_min_);
  }
}

double MixturePosterior::min_diagonal() const
{
  double m = std::numeric_limits<double>::infinity();
  for (const auto& L : chol_)
    m = std::min(m, L.diagonal().minCoeff());
  return m;
}

} // namespace t2vt
