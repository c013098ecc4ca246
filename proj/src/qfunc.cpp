#include "t2vt/qfunc.hpp"

#include <algorithm>
#include <cmath>

namespace t2vt {

FeatureMap::FeatureMap(Matrix centers, Vector bandwidth, int num_actions)
  : centers_(std::move(centers))
  , bandwidth_(std::move(bandwidth))
  , num_actions_(num_actions)
{
  require(centers_.rows() > 0, "feature map: no centers");
  require(bandwidth_.size() == centers_.cols(), "feature map: bandwidth dimension mismatch");
  require((bandwidth_.array() > 0.0).all(), "feature map: bandwidth must be positive");
  require(num_actions_ > 0, "feature map: no actions");
  inv_two_bw2_ = (2.0 * bandwidth_.array().square()).inverse();
}

namespace {

Matrix grid_centers(const Vector& lower, const Vector& upper, int per_axis)
{
  Matrix centers(per_axis * per_axis, 2);
  int row = 0;
  for (int i = 0; i < per_axis; ++i)
    for (int j = 0; j < per_axis; ++j, ++row) {
      centers(row, 0) = lower(0) + (upper(0) - lower(0)) * i / (per_axis - 1);
      centers(row, 1) = lower(1) + (upper(1) - lower(1)) * j / (per_axis - 1);
    }
  return centers;
}

} // namespace

FeatureMap FeatureMap::rooms(double side, int per_axis, int num_actions)
{
  const Vector lower = Vector::Zero(2);
  const Vector upper = Vector::Constant(2, side);
  const double spacing = side / (per_axis - 1);
  return { grid_centers(lower, upper, per_axis), Vector::Constant(2, spacing / std::sqrt(2.0)), num_actions };
}

FeatureMap FeatureMap::mountain_car(int per_axis)
{
  Vector lower(2), upper(2);
  lower << MountainCarEnv::min_position, -MountainCarEnv::max_speed;
  upper << MountainCarEnv::max_position, MountainCarEnv::max_speed;
  const Vector bw = (upper - lower) / (per_axis - 1) / std::sqrt(2.0);
  return { grid_centers(lower, upper, per_axis), bw, 3 };
}

FeatureMap FeatureMap::for_environment(const Environment& env)
{
  if (const auto* rooms_env = dynamic_cast<const RoomsEnv*>(&env))
    return rooms(rooms_env->task().grid_side, 11, env.num_actions());
  return mountain_car();
}

Vector FeatureMap::features(const Vector& state) const
{
  require(state.size() == centers_.cols(), "features: state dimension mismatch");
  Vector phi(centers_.rows());
  for (Eigen::Index i = 0; i < centers_.rows(); ++i) {
    double e = 0.0;
    for (Eigen::Index d = 0; d < centers_.cols(); ++d) {
      const double diff = state(d) - centers_(i, d);
      e += diff * diff * inv_two_bw2_(d);
    }
    phi(i) = std::exp(-e);
  }
  return phi;
}

double q_value(const FeatureMap& fmap, const Vector& theta, const Vector& state, int action)
{
  require(action >= 0 && action < fmap.num_actions(), "q_value: invalid action");
  require(theta.size() == fmap.num_weights(), "q_value: weight dimension mismatch");
  const int nf = fmap.num_features();
  return theta.segment(action * nf, nf).dot(fmap.features(state));
}

Vector q_values(const Vector& phi, const Vector& theta, int num_actions)
{
  const auto nf = phi.size();
  Vector q(num_actions);
  for (int a = 0; a < num_actions; ++a)
    q(a) = theta.segment(a * nf, nf).dot(phi);
  return q;
}

int greedy_action(const Vector& q)
{
  Eigen::Index best = 0;
  q.maxCoeff(&best);
  return static_cast<int>(best);
}

void check_weight_norm(const Vector& theta, double theta_max)
{
  require(theta.allFinite() && theta.norm() <= theta_max, "weight vector norm exceeds theta_max");
}

double mellowmax(std::span<const double> values, double omega)
{
  require(!values.empty(), "mellowmax: empty input");
  require(omega > 0.0, "mellowmax: omega must be positive");
  const double top = *std::max_element(values.begin(), values.end());
  double acc = 0.0;
  for (double v : values)
    acc += std::exp(omega * (v - top));
  return top + std::log(acc / static_cast<double>(values.size())) / omega;
}

double mellowmax(const Vector& values, double omega)
{
  return mellowmax(std::span<const double>(values.data(), static_cast<std::size_t>(values.size())), omega);
}

Vector mellowmax_softmax(const Vector& values, double omega)
{
  const double top = values.maxCoeff();
  Vector w = (omega * (values.array() - top)).exp();
  return w / w.sum();
}

TdSample featurize(const FeatureMap& fmap, const Transition& tr)
{
  return { fmap.features(tr.state), tr.action, tr.reward, fmap.features(tr.next_state), tr.terminal };
}

double mellow_td_error(const FeatureMap& fmap,
                       const Vector& theta,
                       const Transition& tr,
                       double gamma,
                       double omega)
{
  double target = tr.reward;
  if (!tr.terminal)
    target += gamma * mellowmax(q_values(fmap.features(tr.next_state), theta, fmap.num_actions()), omega);
  return target - q_value(fmap, theta, tr.state, tr.action);
}

LossAndGrad td_loss_and_grad(const Vector& theta,
                             std::span<const TdSample> batch,
                             int num_actions,
                             const TdParams& params)
{
  require(!batch.empty(), "td_loss_and_grad: empty batch");
  const auto nf = batch.front().phi.size();
  require(theta.size() == nf * num_actions, "td_loss_and_grad: weight dimension mismatch");

  LossAndGrad out{ 0.0, Vector::Zero(theta.size()) };
  for (const auto& s : batch) {
    double next_value = 0.0;
    Vector soft;
    if (!s.terminal) {
      const Vector q_next = q_values(s.next_phi, theta, num_actions);
      next_value = mellowmax(q_next, params.omega);
      soft = mellowmax_softmax(q_next, params.omega);
    }
    const double q = theta.segment(s.action * nf, nf).dot(s.phi);
    const double b = s.reward + params.gamma * next_value - q;
    out.loss += b * b;

    // d(b^2) = 2 b (gamma proj sum_a' soft(a') phi(s',a') - phi(s,a))
    if (!s.terminal) {
      const double c = 2.0 * b * params.gamma * params.proj;
      for (int a = 0; a < num_actions; ++a)
        out.grad.segment(a * nf, nf).noalias() += (c * soft(a)) * s.next_phi;
    }
    out.grad.segment(s.action * nf, nf).noalias() -= (2.0 * b) * s.phi;
  }
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  out.loss *= inv_n;
  out.grad *= inv_n;
  return out;
}

LossAndGrad td_loss_and_grad(const FeatureMap& fmap,
                             const Vector& theta,
                             std::span<const Transition> batch,
                             const TdParams& params)
{
  require(!batch.empty(), "td_loss_and_grad: empty batch");
  std::vector<TdSample> samples;
  samples.reserve(batch.size());
  for (const auto& tr : batch)
    samples.push_back(featurize(fmap, tr));
  return td_loss_and_grad(theta, samples, fmap.num_actions(), params);
}

double td_loss(const Vector& theta, std::span<const TdSample> batch, int num_actions, const TdParams& params)
{
  require(!batch.empty(), "td_loss: empty batch");
  const auto nf = batch.front().phi.size();
  double loss = 0.0;
  for (const auto& s : batch) {
    double target = s.reward;
    if (!s.terminal)
      target += params.gamma * mellowmax(q_values(s.next_phi, theta, num_actions), params.omega);
    const double b = target - theta.segment(s.action * nf, nf).dot(s.phi);
    loss += b * b;
  }
  return loss / static_cast<double>(batch.size());
}

} // namespace t2vt
