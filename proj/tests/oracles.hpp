#pragma once

// Independent reference computations used only by the tests. Nothing here
// calls into the library code paths these values are checked against.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline double central_difference(const std::function<double(double)>& f, double x, double h = 1e-5)
{
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

//! Relative error with an absolute floor so near-zero entries compare sensibly.
inline double rel_err(double a, double b, double floor = 1e-8)
{
  return std::abs(a - b) / std::max({ std::abs(a), std::abs(b), floor });
}

inline double rel_err(const Vec& a, const Vec& b)
{
  return (a - b).norm() / std::max({ a.norm(), b.norm(), 1e-12 });
}

//! Plain log of the mean of exponentials, no stabilization.
inline double mellowmax_direct(const std::vector<double>& v, double omega)
{
  double acc = 0.0;
  for (double x : v)
    acc += std::exp(omega * x);
  return std::log(acc / static_cast<double>(v.size())) / omega;
}

inline double rbf(double x, double y, double cx, double cy, double bw)
{
  return std::exp(-((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (2.0 * bw * bw));
}

//! Full-covariance Gaussian log density.
inline double log_normal(const Vec& x, const Vec& mean, const Mat& cov)
{
  const Eigen::LLT<Mat> llt(cov);
  const Vec z = llt.matrixL().solve(x - mean);
  const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return -0.5 * (z.squaredNorm() + log_det + static_cast<double>(x.size()) * std::log(2.0 * std::numbers::pi));
}

inline double log_mixture(const Vec& x, const std::vector<double>& w, const std::vector<Vec>& means,
                          const std::vector<Mat>& covs)
{
  std::vector<double> t(w.size());
  double top = -1e300;
  for (std::size_t k = 0; k < w.size(); ++k) {
    t[k] = std::log(w[k]) + log_normal(x, means[k], covs[k]);
    top = std::max(top, t[k]);
  }
  double acc = 0.0;
  for (double v : t)
    acc += std::exp(v - top);
  return top + std::log(acc);
}

//! Full-covariance Gaussian KL via the textbook formula.
inline double gauss_kl_full(const Vec& m1, const Mat& c1, const Vec& m2, const Mat& c2)
{
  const Mat c2inv = c2.inverse();
  const double p = static_cast<double>(m1.size());
  return 0.5 * ((c2inv * c1).trace() + (m2 - m1).dot(c2inv * (m2 - m1)) - p + std::log(c2.determinant() / c1.determinant()));
}

/// Straight-line variational mixture-KL bound in the probability domain:
/// phi[i][j] (sums to a_i over j), psi[i][j] (sums to b_j over i).
inline double mixture_bound_direct(const std::vector<double>& a, const std::vector<double>& b, const Mat& D, int iters)
{
  const auto K = a.size();
  const auto J = b.size();
  Mat psi(K, J), phi(K, J);
  for (std::size_t i = 0; i < K; ++i)
    for (std::size_t j = 0; j < J; ++j)
      psi(i, j) = b[j];
  double value = 0.0;
  for (int it = 0; it < iters; ++it) {
    for (std::size_t i = 0; i < K; ++i) {
      double z = 0.0;
      for (std::size_t j = 0; j < J; ++j)
        z += psi(i, j) * std::exp(-D(i, j));
      for (std::size_t j = 0; j < J; ++j)
        phi(i, j) = a[i] * psi(i, j) * std::exp(-D(i, j)) / z;
    }
    for (std::size_t j = 0; j < J; ++j) {
      double z = 0.0;
      for (std::size_t i = 0; i < K; ++i)
        z += phi(i, j);
      for (std::size_t i = 0; i < K; ++i)
        psi(i, j) = b[j] * phi(i, j) / z;
    }
    value = 0.0;
    for (std::size_t i = 0; i < K; ++i)
      for (std::size_t j = 0; j < J; ++j)
        if (phi(i, j) > 0.0)
          value += phi(i, j) * (std::log(phi(i, j) / psi(i, j)) + D(i, j));
  }
  return value;
}

} // namespace oracle
