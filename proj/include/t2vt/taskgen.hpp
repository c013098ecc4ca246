#pragma once

#include "t2vt/envs.hpp"

#include <memory>
#include <string>
#include <vector>

namespace t2vt {

enum class DynamicKind { Linear, Polynomial, Sinusoidal };

DynamicKind parse_dynamic(const std::string& name);
std::string to_string(DynamicKind kind);

enum class EnvironmentId { TwoRooms, ThreeRooms, MountainCar };

EnvironmentId parse_environment(const std::string& name);
std::string to_string(EnvironmentId id);

//! Mean dynamic d(t), t in [0, 1].
double dynamic_value(DynamicKind kind, double t);

//! Affine map of d in [-1, 1] onto [k_min, k_max].
double scale_param(double d, double k_min, double k_max);

struct ParamRange
{
  double k_min = 0.0;
  double k_max = 1.0;
};

struct TaskSchedule
{
  EnvironmentId environment = EnvironmentId::TwoRooms;
  int source_instants = 10;     // sources at t_i = i / source_instants
  int tasks_per_instant = 5;
  double target_time = 1.0;
  ParamRange range;
  double std = 0.0;             // std of the task-generating Gaussian

  static TaskSchedule defaults(EnvironmentId env);

  double instant_time(int i) const { return static_cast<double>(i) / source_instants; }
  //! Number of task parameters (doors, or engine power).
  int num_params() const { return environment == EnvironmentId::ThreeRooms ? 2 : 1; }
};

ParamRange default_range(EnvironmentId env);

/// Samples task parameters at time t: a Gaussian around the scaled dynamic,
/// clipped to the parameter range. The second door of the three-rooms layout
/// follows -d(t).
std::vector<double> sample_task(DynamicKind kind, double t, const TaskSchedule& schedule, Rng& rng);

std::unique_ptr<Environment> make_environment(EnvironmentId env,
                                              const std::vector<double>& params,
                                              double noise_std = 0.2);

} // namespace t2vt
