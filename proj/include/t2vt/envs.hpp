#pragma once

#include "t2vt/types.hpp"

#include <memory>
#include <vector>

namespace t2vt {

//! One environment step, the unit of the replay dataset.
struct Transition
{
  Vector state;
  int action = 0;
  double reward = 0.0;
  Vector next_state;
  bool terminal = false;
};

class Environment
{
public:
  virtual ~Environment() = default;

  virtual Vector reset(Rng& rng) const = 0;
  virtual Transition step(const Vector& state, int action, Rng& rng) const = 0;

  virtual int num_actions() const = 0;
  virtual int max_episode_steps() const = 0;
  virtual double gamma() const = 0;
  virtual Vector state_lower() const = 0;
  virtual Vector state_upper() const = 0;
  virtual std::unique_ptr<Environment> clone() const = 0;
};

struct RoomsTask
{
  std::vector<double> door_positions; // one entry per inner wall
  double grid_side = 10.0;
  double noise_std = 0.2;
  double gamma = 0.99;
};

//! Continuous grid split by vertical inner walls, each with a unit-width door.
//! Two doors give the three-rooms layout.
class RoomsEnv : public Environment
{
public:
  enum Action : int { up = 0, down = 1, left = 2, right = 3 };

  static constexpr double door_width = 1.0;
  static constexpr double goal_radius = 1.0;
  static constexpr int horizon = 100;

  explicit RoomsEnv(RoomsTask task);

  Vector reset(Rng& rng) const override;
  Transition step(const Vector& state, int action, Rng& rng) const override;

  int num_actions() const override { return 4; }
  int max_episode_steps() const override { return horizon; }
  double gamma() const override { return task_.gamma; }
  Vector state_lower() const override;
  Vector state_upper() const override;
  std::unique_ptr<Environment> clone() const override;

  const RoomsTask& task() const { return task_; }
  const std::vector<double>& wall_positions() const { return walls_; }
  Vector goal() const;

  //! Position reached from `from` towards `candidate`, or `from` if a wall is hit.
  Vector resolve_move(const Vector& from, const Vector& candidate) const;

  static double padding_for(std::size_t num_doors) { return num_doors == 1 ? 0.0 : 2.0; }

private:
  RoomsTask task_;
  std::vector<double> walls_;
};

struct MountainCarTask
{
  double power = 0.001;
  double gamma = 0.99;
};

class MountainCarEnv : public Environment
{
public:
  enum Action : int { reverse = 0, idle = 1, forward = 2 };

  static constexpr double min_position = -1.2;
  static constexpr double max_position = 0.6;
  static constexpr double max_speed = 0.07;
  static constexpr double goal_position = 0.5;
  static constexpr double gravity = 0.0025;
  static constexpr int horizon = 250;

  explicit MountainCarEnv(MountainCarTask task);

  Vector reset(Rng& rng) const override;
  Transition step(const Vector& state, int action, Rng& rng) const override;

  int num_actions() const override { return 3; }
  int max_episode_steps() const override { return horizon; }
  double gamma() const override { return task_.gamma; }
  Vector state_lower() const override;
  Vector state_upper() const override;
  std::unique_ptr<Environment> clone() const override;

  const MountainCarTask& task() const { return task_; }

private:
  MountainCarTask task_;
};

} // namespace t2vt
