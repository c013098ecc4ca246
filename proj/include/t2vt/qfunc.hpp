#pragma once

#include "t2vt/envs.hpp"

#include <span>
#include <vector>

namespace t2vt {

//! Gaussian radial basis features, replicated once per action in the weight vector.
class FeatureMap
{
public:
  FeatureMap(Matrix centers, Vector bandwidth, int num_actions);

  //! 11x11 grid over the rooms square, bandwidth spacing/sqrt(2).
  static FeatureMap rooms(double side = 10.0, int per_axis = 11, int num_actions = 4);
  //! 8x8 grid over the position-velocity box.
  static FeatureMap mountain_car(int per_axis = 8);
  static FeatureMap for_environment(const Environment& env);

  Vector features(const Vector& state) const;

  int num_features() const { return static_cast<int>(centers_.rows()); }
  int num_actions() const { return num_actions_; }
  int state_dim() const { return static_cast<int>(centers_.cols()); }
  //! Length of a weight vector: one block of features per action.
  int num_weights() const { return num_features() * num_actions_; }

  const Matrix& centers() const { return centers_; }
  const Vector& bandwidth() const { return bandwidth_; }

private:
  Matrix centers_; // one center per row
  Vector bandwidth_;
  Vector inv_two_bw2_;
  int num_actions_;
};

double q_value(const FeatureMap& fmap, const Vector& theta, const Vector& state, int action);

//! Q-values of every action given precomputed features.
Vector q_values(const Vector& phi, const Vector& theta, int num_actions);

int greedy_action(const Vector& q);

//! Throws ContractViolation when ||theta||_2 exceeds theta_max.
void check_weight_norm(const Vector& theta, double theta_max);

//! (1/omega) log(mean(exp(omega v))), evaluated with a max shift.
double mellowmax(std::span<const double> values, double omega);
double mellowmax(const Vector& values, double omega);

//! Derivative of mellowmax with respect to its inputs.
Vector mellowmax_softmax(const Vector& values, double omega);

struct TdParams
{
  double gamma = 0.99;
  double omega = 5.0;
  double proj = 0.5; // weight on the next-state term of the TD gradient
};

//! Transition with features of both states cached.
struct TdSample
{
  Vector phi;
  int action = 0;
  double reward = 0.0;
  Vector next_phi;
  bool terminal = false;
};

TdSample featurize(const FeatureMap& fmap, const Transition& tr);

double mellow_td_error(const FeatureMap& fmap,
                       const Vector& theta,
                       const Transition& tr,
                       double gamma,
                       double omega);

struct LossAndGrad
{
  double loss = 0.0;
  Vector grad;
};

LossAndGrad td_loss_and_grad(const Vector& theta,
                             std::span<const TdSample> batch,
                             int num_actions,
                             const TdParams& params);

LossAndGrad td_loss_and_grad(const FeatureMap& fmap,
                             const Vector& theta,
                             std::span<const Transition> batch,
                             const TdParams& params);

//! Squared mellow TD loss only, no gradient.
double td_loss(const Vector& theta, std::span<const TdSample> batch, int num_actions, const TdParams& params);

} // namespace t2vt
