#pragma once

#include "t2vt/types.hpp"

#include <span>
#include <vector>

namespace t2vt {

//! Gradient (or any other per-parameter quantity) shaped like a MixturePosterior.
struct PosteriorGradient
{
  std::vector<Vector> means;
  std::vector<Matrix> chol; // lower triangular

  static PosteriorGradient zeros(std::size_t components, Eigen::Index dim);

  PosteriorGradient& operator+=(const PosteriorGradient& other);
  PosteriorGradient& operator*=(double scale);
  double squared_norm() const;
};

//! Draw from the mixture, with enough information to re-derive the path.
struct PosteriorSample
{
  Vector theta;
  std::size_t component = 0;
  Vector noise; // standard normal draw
};

/// Uniform-weight mixture of Gaussians N(mu_k, L_k L_k^T).
///
/// Each Cholesky factor is lower triangular with diagonal entries kept at or
/// above `sigma_min`, so every implied covariance is positive definite with
/// smallest eigenvalue bounded below.
class MixturePosterior
{
public:
  MixturePosterior(std::vector<Vector> means, std::vector<Matrix> chol, double sigma_min);

  std::size_t num_components() const { return means_.size(); }
  Eigen::Index dim() const { return means_.front().size(); }
  double sigma_min() const { return sigma_min_; }

  const std::vector<Vector>& means() const { return means_; }
  const std::vector<Matrix>& chol() const { return chol_; }
  std::vector<Vector>& means() { return means_; }
  std::vector<Matrix>& chol() { return chol_; }

  Matrix covariance(std::size_t k) const;

  PosteriorSample sample(Rng& rng) const;
  //! theta = mu_k + L_k noise
  Vector transform(std::size_t component, const Vector& noise) const;

  /// Pathwise gradient of the Monte-Carlo mean (1/S) sum_s f(theta_s) given
  /// grad f at each sample; the component choice is held fixed.
  PosteriorGradient reparam_grad(std::span<const PosteriorSample> samples,
                                 std::span<const Vector> per_theta_grads) const;

  //! Restores the diagonal floor on every factor and zeroes the upper triangle.
  void clamp_diagonal();

  //! Smallest diagonal entry over all factors.
  double min_diagonal() const;

private:
  std::vector<Vector> means_;
  std::vector<Matrix> chol_;
  double sigma_min_;
};

} // namespace t2vt
