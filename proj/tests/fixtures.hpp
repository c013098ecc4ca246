#pragma once

// Random instances shared by the unit and acceptance tests.

#include "t2vt/envs.hpp"
#include "t2vt/posterior.hpp"
#include "t2vt/prior.hpp"
#include "t2vt/qfunc.hpp"

#include <random>
#include <vector>

namespace fixture {

using namespace t2vt;

inline Vector gaussian_vector(Eigen::Index n, Rng& rng, double scale = 1.0)
{
  std::normal_distribution<double> normal(0.0, scale);
  return Vector::NullaryExpr(n, [&] { return normal(rng); });
}

//! Lower-triangular factor with diagonal in [diag_lo, diag_hi] and small off-diagonal entries.
inline Matrix random_chol(Eigen::Index p, Rng& rng, double diag_lo = 0.3, double diag_hi = 1.2, double off = 0.3)
{
  std::uniform_real_distribution<double> diag(diag_lo, diag_hi), offd(-off, off);
  Matrix L = Matrix::Zero(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    L(i, i) = diag(rng);
    for (Eigen::Index j = 0; j < i; ++j)
      L(i, j) = offd(rng);
  }
  return L;
}

inline MixturePosterior random_posterior(std::size_t K, Eigen::Index p, Rng& rng, double spread = 1.0,
                                         double sigma_min = 0.01)
{
  std::vector<Vector> means;
  std::vector<Matrix> chol;
  for (std::size_t k = 0; k < K; ++k) {
    means.push_back(gaussian_vector(p, rng, spread));
    chol.push_back(random_chol(p, rng));
  }
  return MixturePosterior(std::move(means), std::move(chol), sigma_min);
}

inline PriorMixture random_prior(std::size_t J, Eigen::Index p, Rng& rng, double spread = 1.0)
{
  std::uniform_real_distribution<double> w(0.2, 1.0), s2(0.3, 1.5);
  PriorMixture prior;
  prior.weights.resize(static_cast<Eigen::Index>(J));
  for (std::size_t j = 0; j < J; ++j) {
    prior.means.push_back(gaussian_vector(p, rng, spread));
    prior.weights(static_cast<Eigen::Index>(j)) = w(rng);
  }
  prior.weights /= prior.weights.sum();
  prior.sigma2 = s2(rng);
  return prior;
}

//! Sources at t_i = i / n (i = 1..n), `per_instant` random weight vectors each.
inline SourceSolutions ladder_sources(int n, int per_instant, Eigen::Index p, Rng& rng)
{
  SourceSolutions s;
  for (int i = 1; i <= n; ++i)
    for (int m = 0; m < per_instant; ++m)
      s.entries.push_back({ gaussian_vector(p, rng), static_cast<double>(i) / n, static_cast<std::uint32_t>(i) });
  return s;
}

//! Featurized transitions from uniformly random states, rewards perturbed, every fourth terminal.
inline std::vector<TdSample> random_td_samples(const Environment& env, const FeatureMap& fmap, int n, Rng& rng)
{
  std::uniform_int_distribution<int> act(0, env.num_actions() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Vector lo = env.state_lower(), hi = env.state_upper();
  std::vector<TdSample> out;
  for (int i = 0; i < n; ++i) {
    const Vector s = lo + (hi - lo).cwiseProduct(Vector::NullaryExpr(lo.size(), [&] { return unit(rng); }));
    auto tr = env.step(s, act(rng), rng);
    tr.reward += unit(rng) - 0.5;
    if (i % 4 == 0)
      tr.terminal = true;
    out.push_back(featurize(fmap, tr));
  }
  return out;
}

} // namespace fixture
