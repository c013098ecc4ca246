#pragma once

#include "t2vt/types.hpp"

#include <vector>

namespace t2vt {

//! Raised when no source solution falls inside the temporal kernel window.
class EmptyPriorError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

//! Source solutions theta_ij observed at time instants t_i.
struct SourceSolutions
{
  struct Entry
  {
    Vector theta;
    double time = 0.0;
    std::uint32_t instant = 0;
  };

  std::vector<Entry> entries;

  bool empty() const { return entries.empty(); }
  std::size_t size() const { return entries.size(); }
  Eigen::Index dim() const { return entries.empty() ? 0 : entries.front().theta.size(); }
  std::size_t num_instants() const;

  //! Checks equal dimensions and that instant times strictly increase with the instant index.
  void validate() const;
};

/// Gaussian mixture with shared isotropic covariance sigma2 * I.
struct PriorMixture
{
  std::vector<Vector> means;
  Vector weights;
  double sigma2 = 1e-5;

  std::size_t size() const { return means.size(); }
  Eigen::Index dim() const { return means.empty() ? 0 : means.front().size(); }

  void validate() const;

  double log_density(const Vector& theta) const;
  double density(const Vector& theta) const;
};

//! (3/4)(1 - u^2) on [-1, 1].
double epanechnikov(double u);

//! Integral of the Epanechnikov kernel over [-rho, 1].
double boundary_factor(double rho);

//! Normalized temporal kernel weights, one per source entry.
Vector tvkde_weights(const SourceSolutions& sources, double query_t, double lambda);

PriorMixture build_prior(const SourceSolutions& sources, double query_t, double lambda, double sigma2);

PriorMixture uniform_prior(const SourceSolutions& sources, double sigma2);

/// Time-variant kernel density estimate with the boundary-corrected
/// normalization (a_0(-rho) N(t) lambda |H|^{1/2})^{-1}, Gaussian spatial kernel
/// with H = sigma2 * I. N(t) is the total number of source entries and
/// rho = min(1, (1 - t) / lambda).
double tvkde_density(const SourceSolutions& sources, const Vector& theta, double t, double lambda, double sigma2);

} // namespace t2vt
