#include "t2vt/envs.hpp"

#include <algorithm>
#include <cmath>

namespace t2vt {

RoomsEnv::RoomsEnv(RoomsTask task)
  : task_(std::move(task))
{
  const auto n_doors = task_.door_positions.size();
  require(n_doors == 1 || n_doors == 2, "rooms: expected one or two doors");
  require(task_.grid_side > 0.0, "rooms: grid side must be positive");
  require(task_.noise_std >= 0.0, "rooms: negative noise std");
  const double pad = padding_for(n_doors);
  for (double door : task_.door_positions)
    require(door >= 0.7 + pad - 1e-12 && door <= 9.3 - pad + 1e-12,
            "rooms: door position outside admissible range");
  for (std::size_t w = 0; w < n_doors; ++w)
    walls_.push_back(task_.grid_side * static_cast<double>(w + 1) / static_cast<double>(n_doors + 1));
}

Vector RoomsEnv::reset(Rng&) const
{
  return Vector::Constant(2, 0.5);
}

Vector RoomsEnv::goal() const
{
  return Vector::Constant(2, task_.grid_side);
}

Vector RoomsEnv::state_lower() const { return Vector::Zero(2); }
Vector RoomsEnv::state_upper() const { return Vector::Constant(2, task_.grid_side); }

std::unique_ptr<Environment> RoomsEnv::clone() const
{
  return std::make_unique<RoomsEnv>(*this);
}

Vector RoomsEnv::resolve_move(const Vector& from, const Vector& candidate) const
{
  const double side = task_.grid_side;
  if (candidate(0) < 0.0 || candidate(0) > side || candidate(1) < 0.0 || candidate(1) > side)
    return from;
  for (std::size_t w = 0; w < walls_.size(); ++w) {
    const double wx = walls_[w];
    if ((from(0) < wx) == (candidate(0) < wx))
      continue;
    // y coordinate where the segment meets the wall
    const double frac = (wx - from(0)) / (candidate(0) - from(0));
    const double y = from(1) + frac * (candidate(1) - from(1));
    if (std::abs(y - task_.door_positions[w]) > 0.5 * door_width)
      return from;
  }
  return candidate;
}

Transition RoomsEnv::step(const Vector& state, int action, Rng& rng) const
{
  require(action >= 0 && action < num_actions(), "rooms: invalid action index");
  Vector candidate = state;
  switch (action) {
    case up: candidate(1) += 1.0; break;
    case down: candidate(1) -= 1.0; break;
    case left: candidate(0) -= 1.0; break;
    case right: candidate(0) += 1.0; break;
  }
  std::normal_distribution<double> noise(0.0, 1.0);
  const double nx = noise(rng);
  const double ny = noise(rng);
  candidate(0) += task_.noise_std * nx;
  candidate(1) += task_.noise_std * ny;

  Transition tr;
  tr.state = state;
  tr.action = action;
  tr.next_state = resolve_move(state, candidate);
  tr.terminal = (tr.next_state - goal()).norm() <= goal_radius;
  tr.reward = tr.terminal ? 1.0 : 0.0;
  return tr;
}

MountainCarEnv::MountainCarEnv(MountainCarTask task)
  : task_(task)
{
  require(task_.power >= 0.001 - 1e-15 && task_.power <= 0.0015 + 1e-15,
          "mountain car: power outside [0.001, 0.0015]");
}

Vector MountainCarEnv::reset(Rng&) const
{
  Vector s(2);
  s << -0.5, 0.0;
  return s;
}

Transition MountainCarEnv::step(const Vector& state, int action, Rng&) const
{
  require(action >= 0 && action < num_actions(), "mountain car: invalid action index");
  double position = state(0);
  double velocity = state(1);
  velocity += static_cast<double>(action - 1) * task_.power - gravity * std::cos(3.0 * position);
  velocity = std::clamp(velocity, -max_speed, max_speed);
  position = std::clamp(position + velocity, min_position, max_position);
  if (position <= min_position && velocity < 0.0)
    velocity = 0.0;

  Transition tr;
  tr.state = state;
  tr.action = action;
  tr.next_state.resize(2);
  tr.next_state << position, velocity;
  tr.terminal = position >= goal_position;
  tr.reward = -1.0;
  return tr;
}

Vector MountainCarEnv::state_lower() const
{
  Vector v(2);
  v << min_position, -max_speed;
  return v;
}

Vector MountainCarEnv::state_upper() const
{
  Vector v(2);
  v << max_position, max_speed;
  return v;
}

std::unique_ptr<Environment> MountainCarEnv::clone() const
{
  return std::make_unique<MountainCarEnv>(*this);
}

} // namespace t2vt
