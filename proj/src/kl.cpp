#include "t2vt/kl.hpp"

#include <cmath>
#include <limits>

namespace t2vt {

namespace {

struct FactorStats
{
  double log_det = 0.0; // log det(L L^T)
  double trace = 0.0;   // tr(L L^T)
};

FactorStats factor_stats(const Matrix& chol)
{
  FactorStats s;
  s.log_det = 2.0 * chol.diagonal().array().log().sum();
  s.trace = chol.triangularView<Eigen::Lower>().toDenseMatrix().squaredNorm();
  return s;
}

double kl_from_stats(const FactorStats& s, double sq_dist, double p, double sigma2)
{
  return 0.5 * (p * std::log(sigma2) - s.log_det + s.trace / sigma2 + sq_dist / sigma2 - p);
}

double log_sum_exp(const Eigen::Ref<const Eigen::RowVectorXd>& v)
{
  const double top = v.maxCoeff();
  if (!std::isfinite(top))
    return top;
  return top + std::log((v.array() - top).exp().sum());
}

} // namespace

double gauss_kl(const Vector& mu1, const Matrix& chol1, const Vector& mu2, double sigma2)
{
  require(sigma2 > 0.0, "gauss_kl: sigma2 must be positive");
  require(mu1.size() == mu2.size() && chol1.rows() == mu1.size() && chol1.cols() == mu1.size(),
          "gauss_kl: dimension mismatch");
  require((chol1.diagonal().array() > 0.0).all(), "gauss_kl: factor diagonal must be positive");
  return kl_from_stats(factor_stats(chol1), (mu1 - mu2).squaredNorm(), static_cast<double>(mu1.size()), sigma2);
}

Matrix pairwise_kl(const MixturePosterior& posterior, const PriorMixture& prior)
{
  require(posterior.dim() == prior.dim(), "pairwise_kl: dimension mismatch");
  const auto K = static_cast<Eigen::Index>(posterior.num_components());
  const auto J = static_cast<Eigen::Index>(prior.size());
  const double p = static_cast<double>(posterior.dim());
  Matrix D(K, J);
  for (Eigen::Index i = 0; i < K; ++i) {
    const auto stats = factor_stats(posterior.chol()[i]);
    for (Eigen::Index j = 0; j < J; ++j)
      D(i, j) = kl_from_stats(stats, (posterior.means()[i] - prior.means[j]).squaredNorm(), p, prior.sigma2);
  }
  return D;
}

namespace {

double bound_from(const Matrix& D, const ChiMatrices& chi)
{
  double value = 0.0;
  for (Eigen::Index i = 0; i < D.rows(); ++i)
    for (Eigen::Index j = 0; j < D.cols(); ++j) {
      const double lc2 = chi.log_chi2(j, i);
      if (lc2 == -std::numeric_limits<double>::infinity())
        continue;
      value += std::exp(lc2) * (lc2 - chi.log_chi1(i, j) + D(i, j));
    }
  return value;
}

} // namespace

KlBound mog_kl_upper_bound(const MixturePosterior& posterior, const PriorMixture& prior, int iters, double tol)
{
  require(iters >= 1, "mog_kl_upper_bound: need at least one iteration");
  require(posterior.dim() == prior.dim(), "mog_kl_upper_bound: dimension mismatch");
  prior.validate();
  const Matrix D = pairwise_kl(posterior, prior);
  const auto K = D.rows();
  const auto J = D.cols();
  const double log_cq = -std::log(static_cast<double>(K));
  const Eigen::RowVectorXd log_cp = prior.weights.array().log().matrix().transpose();

  KlBound out;
  out.chi.log_chi1 = log_cp.replicate(K, 1);
  out.chi.log_chi2 = Matrix::Zero(J, K);

  Matrix prev1 = out.chi.log_chi1;
  for (int it = 0; it < iters; ++it) {
    // chi2[j,i] = c_i chi1[i,j] e^{-D_ij} / sum_j' chi1[i,j'] e^{-D_ij'}
    for (Eigen::Index i = 0; i < K; ++i) {
      const Eigen::RowVectorXd a = out.chi.log_chi1.row(i) - D.row(i);
      const double lse = log_sum_exp(a);
      out.chi.log_chi2.col(i) = (a.array() - lse + log_cq).matrix().transpose();
    }
    // chi1[i,j] = c_j chi2[j,i] / sum_i' chi2[j,i']
    for (Eigen::Index j = 0; j < J; ++j) {
      const double lse = log_sum_exp(out.chi.log_chi2.row(j));
      out.chi.log_chi1.col(j) = (out.chi.log_chi2.row(j).array() - lse + log_cp(j)).matrix().transpose();
    }
    out.trace.push_back(bound_from(D, out.chi));
    const double change = (out.chi.log_chi1.array().exp() - prev1.array().exp()).abs().maxCoeff();
    prev1 = out.chi.log_chi1;
    if (change < tol)
      break;
  }
  out.value = out.trace.back();
  return out;
}

double mog_kl_bound_value(const MixturePosterior& posterior, const PriorMixture& prior, const ChiMatrices& chi)
{
  const Matrix D = pairwise_kl(posterior, prior);
  require(chi.log_chi1.rows() == D.rows() && chi.log_chi1.cols() == D.cols() &&
            chi.log_chi2.rows() == D.cols() && chi.log_chi2.cols() == D.rows(),
          "mog_kl_bound_value: chi shape mismatch");
  return bound_from(D, chi);
}

PosteriorGradient mog_kl_upper_bound_grad(const MixturePosterior& posterior,
                                          const PriorMixture& prior,
                                          const ChiMatrices& chi)
{
  const auto K = static_cast<Eigen::Index>(posterior.num_components());
  const auto J = static_cast<Eigen::Index>(prior.size());
  require(posterior.dim() == prior.dim(), "mog_kl_upper_bound_grad: dimension mismatch");
  require(chi.log_chi1.rows() == K && chi.log_chi1.cols() == J && chi.log_chi2.rows() == J &&
            chi.log_chi2.cols() == K,
          "mog_kl_upper_bound_grad: chi shape mismatch");
  const double inv_s2 = 1.0 / prior.sigma2;
  auto g = PosteriorGradient::zeros(posterior.num_components(), posterior.dim());
  for (Eigen::Index i = 0; i < K; ++i) {
    const auto& mu = posterior.means()[i];
    const auto& L = posterior.chol()[i];
    double mass = 0.0;
    for (Eigen::Index j = 0; j < J; ++j) {
      const double w = std::exp(chi.log_chi2(j, i));
      if (w == 0.0)
        continue;
      mass += w;
      g.means[i] += (w * inv_s2) * (mu - prior.means[j]);
    }
    // d/dL KL = L / sigma2 - L^{-T}; the lower part of L^{-T} is diag(1/L_ii)
    g.chol[i].triangularView<Eigen::Lower>() = (mass * inv_s2) * L;
    g.chol[i].diagonal().array() -= mass * L.diagonal().array().inverse();
  }
  return g;
}

} // namespace t2vt
