#pragma once

#include "t2vt/posterior.hpp"
#include "t2vt/prior.hpp"

#include <vector>

namespace t2vt {

/// KL( N(mu1, L L^T) || N(mu2, sigma2 I) ).
double gauss_kl(const Vector& mu1, const Matrix& chol1, const Vector& mu2, double sigma2);

//! All pairwise component divergences, rows index posterior components.
Matrix pairwise_kl(const MixturePosterior& posterior, const PriorMixture& prior);

/// Variational matching matrices, stored as logs to survive divergences in
/// the thousands. chi1 is (posterior x prior), chi2 is (prior x posterior).
struct ChiMatrices
{
  Matrix log_chi1;
  Matrix log_chi2;

  Matrix chi1() const { return log_chi1.array().exp(); }
  Matrix chi2() const { return log_chi2.array().exp(); }
};

struct KlBound
{
  double value = 0.0; // excludes the additive log(1/S) constant
  ChiMatrices chi;
  std::vector<double> trace; // bound value after each fixed-point iteration
};

/// Upper bound on KL(q || p) between the uniform posterior mixture and the
/// prior mixture, refined by alternating the two chi updates.
KlBound mog_kl_upper_bound(const MixturePosterior& posterior,
                           const PriorMixture& prior,
                           int iters = 10,
                           double tol = 1e-8);

//! Bound value for a given (frozen) chi.
double mog_kl_bound_value(const MixturePosterior& posterior, const PriorMixture& prior, const ChiMatrices& chi);

//! Gradient of sum_ij chi2[j,i] KL(f_i || g_j) with chi held fixed.
PosteriorGradient mog_kl_upper_bound_grad(const MixturePosterior& posterior,
                                          const PriorMixture& prior,
                                          const ChiMatrices& chi);

} // namespace t2vt
