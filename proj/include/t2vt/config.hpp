#pragma once

#include "t2vt/taskgen.hpp"
#include "t2vt/transfer.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace t2vt {

enum class Algorithm { T2VT, MGVT, SourceSolver };

Algorithm parse_algorithm(const std::string& name);
std::string to_string(Algorithm alg);

//! Raised for malformed configuration files.
class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Everything needed to reproduce one experiment. Hyperparameters default
/// per environment; environment, dynamic and algorithm must be given.
struct ExperimentConfig
{
  EnvironmentId environment = EnvironmentId::TwoRooms;
  DynamicKind dynamic = DynamicKind::Linear;
  std::vector<Algorithm> algorithm;
  std::vector<int> K{ 1 };
  int n_runs = 50;
  long iterations = 3000;
  long record_stride = 50;

  // transfer
  double psi = 1e-6;
  int batch_size = 50;
  std::size_t buffer_size = 50000;
  double alpha_mu = 1e-3;
  double alpha_L = 1e-4;
  double sigma2_min = 1e-4;
  double prior_sigma2 = 1e-5;
  double lambda = 0.3333;
  int n_weight_samples = 10;
  int kl_iterations = 10;
  int refine_steps = 500;

  // shared TD settings
  double proj = 0.5;
  double omega = 5.0;
  double gamma = 0.99;

  // source solver
  long source_iterations = 20000;
  int source_batch_size = 50;
  std::size_t source_buffer_size = 50000;
  double source_alpha = 1e-3;
  double source_omega = 20.0;
  double theta_max = 1e4;
  double source_epsilon_final = 0.02;

  // task distribution
  int source_instants = 10;
  int sources_per_instant = 5;
  double task_std = 0.43;
  double noise_std = 0.2;

  std::uint64_t master_seed = 0;

  //! Default hyperparameters for `env`; algorithm list left empty.
  static ExperimentConfig defaults(EnvironmentId env);

  void validate() const;

  TaskSchedule schedule() const;
  SolverConfig source_solver() const;
  //! Solver settings used when the source solver runs as a baseline on the target.
  SolverConfig target_solver() const;
  TransferConfig transfer(int components) const;
};

//! Parses flat `key = value` text; '#' starts a comment line.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

//! Writes every field, in a form parse_config reads back.
void write_config(std::ostream& out, const ExperimentConfig& config);

} // namespace t2vt
