#include "t2vt/taskgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace t2vt {

DynamicKind parse_dynamic(const std::string& name)
{
  if (name == "linear")
    return DynamicKind::Linear;
  if (name == "polynomial")
    return DynamicKind::Polynomial;
  if (name == "sinusoidal")
    return DynamicKind::Sinusoidal;
  throw std::invalid_argument("unknown dynamic '" + name + "'");
}

std::string to_string(DynamicKind kind)
{
  switch (kind) {
    case DynamicKind::Linear: return "linear";
    case DynamicKind::Polynomial: return "polynomial";
    case DynamicKind::Sinusoidal: return "sinusoidal";
  }
  return "?";
}

EnvironmentId parse_environment(const std::string& name)
{
  if (name == "two-rooms")
    return EnvironmentId::TwoRooms;
  if (name == "three-rooms")
    return EnvironmentId::ThreeRooms;
  if (name == "mountain-car")
    return EnvironmentId::MountainCar;
  throw std::invalid_argument("unknown environment '" + name + "'");
}

std::string to_string(EnvironmentId id)
{
  switch (id) {
    case EnvironmentId::TwoRooms: return "two-rooms";
    case EnvironmentId::ThreeRooms: return "three-rooms";
    case EnvironmentId::MountainCar: return "mountain-car";
  }
  return "?";
}

double dynamic_value(DynamicKind kind, double t)
{
  require(t >= 0.0 && t <= 1.0, "dynamic_value: t outside [0, 1]");
  switch (kind) {
    case DynamicKind::Linear:
      return 2.0 * t - 1.0;
    case DynamicKind::Polynomial: {
      constexpr double a = -15.625, b = 39.5833, c = -31.875, d = 9.91667, e = -1.0;
      return (((a * t + b) * t + c) * t + d) * t + e;
    }
    case DynamicKind::Sinusoidal:
      return std::sin(2.0 * std::numbers::pi * t);
  }
  return 0.0;
}

double scale_param(double d, double k_min, double k_max)
{
  require(k_min < k_max, "scale_param: empty range");
  return d * (k_max - k_min) / 2.0 + (k_max + k_min) / 2.0;
}

ParamRange default_range(EnvironmentId env)
{
  switch (env) {
    case EnvironmentId::TwoRooms: return { 0.7, 9.3 };
    case EnvironmentId::ThreeRooms: return { 0.7 + 2.0, 9.3 - 2.0 };
    case EnvironmentId::MountainCar: return { 0.001, 0.0015 };
  }
  return {};
}

TaskSchedule TaskSchedule::defaults(EnvironmentId env)
{
  TaskSchedule s;
  s.environment = env;
  s.range = default_range(env);
  s.std = (s.range.k_max - s.range.k_min) / 20.0;
  return s;
}

std::vector<double> sample_task(DynamicKind kind, double t, const TaskSchedule& schedule, Rng& rng)
{
  require(schedule.std >= 0.0, "sample_task: negative std");
  const double d = dynamic_value(kind, t);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto draw = [&](double dyn) {
    const double mean = scale_param(dyn, schedule.range.k_min, schedule.range.k_max);
    const double x = mean + schedule.std * normal(rng);
    return std::clamp(x, schedule.range.k_min, schedule.range.k_max);
  };
  std::vector<double> params{ draw(d) };
  if (schedule.num_params() == 2)
    params.push_back(draw(-d));
  return params;
}

std::unique_ptr<Environment> make_environment(EnvironmentId env, const std::vector<double>& params, double noise_std)
{
  switch (env) {
    case EnvironmentId::TwoRooms:
    case EnvironmentId::ThreeRooms: {
      RoomsTask task;
      task.door_positions = params;
      task.noise_std = noise_std;
      return std::make_unique<RoomsEnv>(task);
    }
    case EnvironmentId::MountainCar:
      require(params.size() == 1, "mountain car: expected one parameter");
      return std::make_unique<MountainCarEnv>(MountainCarTask{ params.front() });
  }
  throw ContractViolation("unknown environment");
}

} // namespace t2vt
