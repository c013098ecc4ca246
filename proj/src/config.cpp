#include "t2vt/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace t2vt {

Algorithm parse_algorithm(const std::string& name)
{
  if (name == "T2VT")
    return Algorithm::T2VT;
  if (name == "MGVT")
    return Algorithm::MGVT;
  if (name == "source-solver")
    return Algorithm::SourceSolver;
  throw ConfigError("unknown algorithm '" + name + "'");
}

std::string to_string(Algorithm alg)
{
  switch (alg) {
    case Algorithm::T2VT: return "T2VT";
    case Algorithm::MGVT: return "MGVT";
    case Algorithm::SourceSolver: return "source-solver";
  }
  return "?";
}

ExperimentConfig ExperimentConfig::defaults(EnvironmentId env)
{
  ExperimentConfig c;
  c.environment = env;
  const auto range = default_range(env);
  c.task_std = (range.k_max - range.k_min) / 20.0;
  c.alpha_L = 1e-4;
  switch (env) {
    case EnvironmentId::TwoRooms:
      c.iterations = 3000;
      c.source_iterations = 20000;
      break;
    case EnvironmentId::ThreeRooms:
      c.iterations = 15000;
      c.source_iterations = 40000;
      break;
    case EnvironmentId::MountainCar:
      c.iterations = 75000;
      c.record_stride = 200;
      c.psi = 1e-4;
      c.batch_size = 500;
      c.buffer_size = 10000;
      c.source_iterations = 20000;
      c.source_batch_size = 32;
      c.source_epsilon_final = 0.01;
      break;
  }
  return c;
}

void ExperimentConfig::validate() const
{
  auto check = [](bool ok, const std::string& msg) {
    if (!ok)
      throw ConfigError(msg);
  };
  check(!algorithm.empty(), "config: algorithm list is empty");
  check(!K.empty(), "config: K list is empty");
  for (int k : K)
    check(k >= 1 && k < 65536, "config: K must be in [1, 65535]");
  check(std::set<int>(K.begin(), K.end()).size() == K.size(), "config: repeated K value");
  check(std::set<Algorithm>(algorithm.begin(), algorithm.end()).size() == algorithm.size(),
        "config: repeated algorithm");
  check(n_runs >= 1, "config: n_runs must be positive");
  check(iterations > 0 && source_iterations > 0, "config: budgets must be positive");
  check(record_stride > 0, "config: record_stride must be positive");
  check(psi >= 0.0, "config: psi must be non-negative");
  check(batch_size >= 1 && source_batch_size >= 1, "config: batch sizes must be positive");
  check(buffer_size >= 1 && source_buffer_size >= 1, "config: buffer sizes must be positive");
  check(alpha_mu > 0.0 && alpha_L > 0.0 && source_alpha > 0.0, "config: learning rates must be positive");
  check(sigma2_min > 0.0 && prior_sigma2 > 0.0 && lambda > 0.0, "config: variances and bandwidth must be positive");
  check(n_weight_samples >= 1 && kl_iterations >= 1 && refine_steps >= 0, "config: invalid sample counts");
  check(omega > 0.0 && source_omega > 0.0 && gamma >= 0.0 && gamma < 1.0, "config: invalid omega or gamma");
  check(theta_max > 0.0, "config: theta_max must be positive");
  check(source_instants >= 1 && sources_per_instant >= 1, "config: invalid source schedule");
  check(task_std >= 0.0 && noise_std >= 0.0, "config: negative std");
  check(source_epsilon_final >= 0.0 && source_epsilon_final <= 1.0, "config: epsilon outside [0, 1]");
}

TaskSchedule ExperimentConfig::schedule() const
{
  auto s = TaskSchedule::defaults(environment);
  s.source_instants = source_instants;
  s.tasks_per_instant = sources_per_instant;
  s.std = task_std;
  return s;
}

SolverConfig ExperimentConfig::source_solver() const
{
  SolverConfig s;
  s.iterations = source_iterations;
  s.batch_size = source_batch_size;
  s.buffer_size = source_buffer_size;
  s.alpha = source_alpha;
  s.epsilon_final = source_epsilon_final;
  s.td = { gamma, source_omega, proj };
  s.record_stride = record_stride;
  s.theta_max = theta_max;
  return s;
}

SolverConfig ExperimentConfig::target_solver() const
{
  auto s = source_solver();
  s.iterations = iterations;
  return s;
}

TransferConfig ExperimentConfig::transfer(int components) const
{
  TransferConfig t;
  t.iterations = iterations;
  t.buffer_size = buffer_size;
  t.record_stride = record_stride;
  t.elbo.psi = psi;
  t.elbo.batch_size = batch_size;
  t.elbo.n_weight_samples = n_weight_samples;
  t.elbo.td = { gamma, omega, proj };
  t.elbo.kl_iters = kl_iterations;
  t.init.components = static_cast<std::size_t>(components);
  t.init.refine_steps = refine_steps;
  t.init.alpha_mu = alpha_mu;
  t.init.alpha_L = alpha_L;
  t.init.sigma_min = std::sqrt(sigma2_min);
  t.init.kl_iters = kl_iterations;
  return t;
}

namespace {

std::string trim(const std::string& s)
{
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos)
    return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& s)
{
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (auto t = trim(item); !t.empty())
      out.push_back(t);
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text)
{
  T value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end)
    throw ConfigError("config: invalid value '" + text + "' for key '" + key + "'");
  return value;
}

//! Shortest text that parses back to the same double.
std::string format_double(double v)
{
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

struct Field
{
  std::function<void(ExperimentConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <typename T>
Field numeric(T ExperimentConfig::*member)
{
  return { [member](ExperimentConfig& c, const std::string& key, const std::string& v) {
            c.*member = parse_number<T>(key, v);
          },
           [member](const ExperimentConfig& c) {
             if constexpr (std::is_floating_point_v<T>)
               return format_double(c.*member);
             else
               return std::to_string(c.*member);
           } };
}

const std::map<std::string, Field>& fields()
{
  static const std::map<std::string, Field> table = {
    { "environment",
      { [](ExperimentConfig& c, const std::string&, const std::string& v) { c.environment = parse_environment(v); },
        [](const ExperimentConfig& c) { return to_string(c.environment); } } },
    { "dynamic",
      { [](ExperimentConfig& c, const std::string&, const std::string& v) { c.dynamic = parse_dynamic(v); },
        [](const ExperimentConfig& c) { return to_string(c.dynamic); } } },
    { "algorithm",
      { [](ExperimentConfig& c, const std::string&, const std::string& v) {
         c.algorithm.clear();
         for (const auto& a : split_list(v))
           c.algorithm.push_back(parse_algorithm(a));
       },
        [](const ExperimentConfig& c) {
          std::string s;
          for (auto a : c.algorithm)
            s += (s.empty() ? "" : ",") + to_string(a);
          return s;
        } } },
    { "K",
      { [](ExperimentConfig& c, const std::string& key, const std::string& v) {
         c.K.clear();
         for (const auto& k : split_list(v))
           c.K.push_back(parse_number<int>(key, k));
       },
        [](const ExperimentConfig& c) {
          std::string s;
          for (int k : c.K)
            s += (s.empty() ? "" : ",") + std::to_string(k);
          return s;
        } } },
    { "n_runs", numeric(&ExperimentConfig::n_runs) },
    { "iterations", numeric(&ExperimentConfig::iterations) },
    { "record_stride", numeric(&ExperimentConfig::record_stride) },
    { "psi", numeric(&ExperimentConfig::psi) },
    { "batch_size", numeric(&ExperimentConfig::batch_size) },
    { "buffer_size", numeric(&ExperimentConfig::buffer_size) },
    { "alpha_mu", numeric(&ExperimentConfig::alpha_mu) },
    { "alpha_L", numeric(&ExperimentConfig::alpha_L) },
    { "sigma2_min", numeric(&ExperimentConfig::sigma2_min) },
    { "prior_sigma2", numeric(&ExperimentConfig::prior_sigma2) },
    { "lambda", numeric(&ExperimentConfig::lambda) },
    { "n_weight_samples", numeric(&ExperimentConfig::n_weight_samples) },
    { "kl_iterations", numeric(&ExperimentConfig::kl_iterations) },
    { "refine_steps", numeric(&ExperimentConfig::refine_steps) },
    { "proj", numeric(&ExperimentConfig::proj) },
    { "omega", numeric(&ExperimentConfig::omega) },
    { "theta_max", numeric(&ExperimentConfig::theta_max) },
    { "gamma", numeric(&ExperimentConfig::gamma) },
    { "source_iterations", numeric(&ExperimentConfig::source_iterations) },
    { "source_batch_size", numeric(&ExperimentConfig::source_batch_size) },
    { "source_buffer_size", numeric(&ExperimentConfig::source_buffer_size) },
    { "source_alpha", numeric(&ExperimentConfig::source_alpha) },
    { "source_omega", numeric(&ExperimentConfig::source_omega) },
    { "source_epsilon_final", numeric(&ExperimentConfig::source_epsilon_final) },
    { "source_instants", numeric(&ExperimentConfig::source_instants) },
    { "sources_per_instant", numeric(&ExperimentConfig::sources_per_instant) },
    { "task_std", numeric(&ExperimentConfig::task_std) },
    { "noise_std", numeric(&ExperimentConfig::noise_std) },
    { "master_seed", numeric(&ExperimentConfig::master_seed) },
  };
  return table;
}

} // namespace

ExperimentConfig parse_config(std::istream& in)
{
  std::vector<std::pair<std::string, std::string>> entries;
  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#')
      continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    auto key = trim(text.substr(0, eq));
    auto value = trim(text.substr(eq + 1));
    if (!fields().contains(key))
      throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    if (!seen.insert(key).second)
      throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    entries.emplace_back(std::move(key), std::move(value));
  }
  for (const char* required : { "environment", "dynamic", "algorithm" })
    if (!seen.contains(required))
      throw ConfigError(std::string("config: missing required key '") + required + "'");

  auto env_it = std::find_if(entries.begin(), entries.end(), [](const auto& e) { return e.first == "environment"; });
  ExperimentConfig config;
  try {
    config = ExperimentConfig::defaults(parse_environment(env_it->second));
    for (const auto& [key, value] : entries)
      fields().at(key).set(config, key, value);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

void write_config(std::ostream& out, const ExperimentConfig& config)
{
  for (const auto& [key, field] : fields())
    out << key << " = " << field.get(config) << '\n';
}

} // namespace t2vt
