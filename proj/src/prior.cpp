#include "t2vt/prior.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

namespace t2vt {

std::size_t SourceSolutions::num_instants() const
{
  std::set<std::uint32_t> seen;
  for (const auto& e : entries)
    seen.insert(e.instant);
  return seen.size();
}

void SourceSolutions::validate() const
{
  std::map<std::uint32_t, double> times;
  for (const auto& e : entries) {
    require(e.theta.size() == dim(), "sources: weight dimensions differ");
    auto [it, inserted] = times.emplace(e.instant, e.time);
    require(inserted || it->second == e.time, "sources: one instant carries two different times");
  }
  double last = -std::numeric_limits<double>::infinity();
  for (const auto& [instant, time] : times) {
    require(time > last, "sources: instant times must strictly increase");
    last = time;
  }
}

void PriorMixture::validate() const
{
  require(!means.empty(), "prior: no components");
  require(weights.size() == static_cast<Eigen::Index>(means.size()), "prior: weight count mismatch");
  require(sigma2 > 0.0, "prior: sigma2 must be positive");
  require((weights.array() > 0.0).all(), "prior: weights must be positive");
  require(std::abs(weights.sum() - 1.0) <= 1e-12, "prior: weights must sum to one");
}

double PriorMixture::log_density(const Vector& theta) const
{
  const double p = static_cast<double>(dim());
  const double log_norm = -0.5 * p * std::log(2.0 * std::numbers::pi * sigma2);
  std::vector<double> terms(means.size());
  for (std::size_t j = 0; j < means.size(); ++j)
    terms[j] = std::log(weights(j)) + log_norm - 0.5 * (theta - means[j]).squaredNorm() / sigma2;
  const double top = *std::max_element(terms.begin(), terms.end());
  double acc = 0.0;
  for (double t : terms)
    acc += std::exp(t - top);
  return top + std::log(acc);
}

double PriorMixture::density(const Vector& theta) const
{
  return std::exp(log_density(theta));
}

double epanechnikov(double u)
{
  return std::abs(u) <= 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
}

double boundary_factor(double rho)
{
  require(rho >= 0.0 && rho <= 1.0, "boundary_factor: rho outside [0, 1]");
  return 0.75 * ((1.0 + rho) - (1.0 + rho * rho * rho) / 3.0);
}

Vector tvkde_weights(const SourceSolutions& sources, double query_t, double lambda)
{
  require(lambda > 0.0, "tvkde_weights: lambda must be positive");
  require(query_t > 0.0 && query_t <= 1.0, "tvkde_weights: query time outside (0, 1]");
  Vector w(static_cast<Eigen::Index>(sources.size()));
  for (std::size_t e = 0; e < sources.size(); ++e) {
    const double t_i = sources.entries[e].time;
    w(static_cast<Eigen::Index>(e)) = t_i > query_t ? 0.0 : epanechnikov((query_t - t_i) / lambda);
  }
  const double total = w.sum();
  if (!(total > 0.0))
    throw EmptyPriorError("no source solution inside the temporal kernel window");
  return w / total;
}

PriorMixture build_prior(const SourceSolutions& sources, double query_t, double lambda, double sigma2)
{
  require(sigma2 > 0.0, "build_prior: sigma2 must be positive");
  if (sources.empty())
    throw EmptyPriorError("no source solutions");
  sources.validate();
  const Vector w = tvkde_weights(sources, query_t, lambda);
  PriorMixture prior;
  prior.sigma2 = sigma2;
  std::vector<double> kept;
  for (std::size_t e = 0; e < sources.size(); ++e)
    if (w(static_cast<Eigen::Index>(e)) > 0.0) {
      prior.means.push_back(sources.entries[e].theta);
      kept.push_back(w(static_cast<Eigen::Index>(e)));
    }
  prior.weights = Eigen::Map<const Vector>(kept.data(), static_cast<Eigen::Index>(kept.size()));
  prior.weights /= prior.weights.sum();
  return prior;
}

PriorMixture uniform_prior(const SourceSolutions& sources, double sigma2)
{
  require(sigma2 > 0.0, "uniform_prior: sigma2 must be positive");
  if (sources.empty())
    throw EmptyPriorError("no source solutions");
  sources.validate();
  PriorMixture prior;
  prior.sigma2 = sigma2;
  for (const auto& e : sources.entries)
    prior.means.push_back(e.theta);
  const auto n = static_cast<Eigen::Index>(prior.means.size());
  prior.weights = Vector::Constant(n, 1.0 / static_cast<double>(n));
  return prior;
}

double tvkde_density(const SourceSolutions& sources, const Vector& theta, double t, double lambda, double sigma2)
{
  require(lambda > 0.0 && sigma2 > 0.0, "tvkde_density: bandwidths must be positive");
  require(t > 0.0 && t <= 1.0, "tvkde_density: time outside (0, 1]");
  if (sources.empty())
    throw EmptyPriorError("no source solutions");
  const double p = static_cast<double>(theta.size());
  const double rho = std::min(1.0, (1.0 - t) / lambda);
  const double n_total = static_cast<double>(sources.size());
  // Gaussian spatial kernel; |H|^{1/2} folded into the normalization
  const double spatial_norm = std::pow(2.0 * std::numbers::pi * sigma2, -0.5 * p);
  double acc = 0.0;
  for (const auto& e : sources.entries) {
    if (e.time > t)
      continue;
    const double kt = epanechnikov((t - e.time) / lambda);
    if (kt == 0.0)
      continue;
    acc += kt * spatial_norm * std::exp(-0.5 * (theta - e.theta).squaredNorm() / sigma2);
  }
  return acc / (boundary_factor(rho) * n_total * lambda);
}

} // namespace t2vt
