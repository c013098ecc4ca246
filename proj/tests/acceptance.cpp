// Acceptance checks: one PASS/FAIL line per criterion.
//   acceptance            all criteria
//   acceptance 1 3 8      selected criteria

#include "t2vt/archive.hpp"
#include "t2vt/config.hpp"
#include "t2vt/harness.hpp"
#include "t2vt/kl.hpp"
#include "t2vt/optimizer.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

using namespace t2vt;
namespace fs = std::filesystem;

namespace {

struct Outcome
{
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args)
{
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

Vector to_vector(const std::vector<double>& v)
{
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// ---------------------------------------------------------------- 1

//! log density of a mixture with precomputed Cholesky factors.
struct MixtureDensity
{
  std::vector<double> log_w;
  std::vector<Vector> means;
  std::vector<Matrix> chol;
  std::vector<double> log_norm;

  double operator()(const Vector& x) const
  {
    std::vector<double> t(means.size());
    for (std::size_t k = 0; k < means.size(); ++k) {
      const Vector z = chol[k].triangularView<Eigen::Lower>().solve(x - means[k]);
      t[k] = log_w[k] + log_norm[k] - 0.5 * z.squaredNorm();
    }
    const double top = *std::max_element(t.begin(), t.end());
    double acc = 0.0;
    for (double v : t)
      acc += std::exp(v - top);
    return top + std::log(acc);
  }

  void add(double w, const Vector& mean, const Matrix& L)
  {
    const double p = static_cast<double>(mean.size());
    log_w.push_back(std::log(w));
    means.push_back(mean);
    chol.push_back(L);
    log_norm.push_back(-L.diagonal().array().log().sum() - 0.5 * p * std::log(2.0 * std::numbers::pi));
  }
};

Outcome kl_dominance()
{
  Rng rng(101);
  int dominated = 0;
  const int trials = 100, samples = 100000;
  double worst = 1e300;
  for (int trial = 0; trial < trials; ++trial) {
    const auto q = fixture::random_posterior(2, 3, rng);
    const auto prior = fixture::random_prior(3, 3, rng);
    MixtureDensity fq, fp;
    for (std::size_t k = 0; k < 2; ++k)
      fq.add(0.5, q.means()[k], q.chol()[k]);
    for (std::size_t j = 0; j < 3; ++j)
      fp.add(prior.weights(static_cast<Eigen::Index>(j)), prior.means[j],
             std::sqrt(prior.sigma2) * Matrix::Identity(3, 3));
    double acc = 0.0;
    for (int s = 0; s < samples; ++s) {
      const Vector x = q.sample(rng).theta;
      acc += fq(x) - fp(x);
    }
    const double mc = acc / samples;
    const double bound = mog_kl_upper_bound(q, prior).value;
    worst = std::min(worst, bound - mc);
    if (bound >= mc)
      ++dominated;
  }
  return { dominated >= 95, fmt("bound >= MC KL in %d/%d trials (min gap %.3g)", dominated, trials, worst) };
}

// ---------------------------------------------------------------- 2

double relative(const std::vector<double>& a, const std::vector<double>& b)
{
  return oracle::rel_err(to_vector(a), to_vector(b));
}

//! A 3x3 RBF grid over the Mountain Car box keeps p = 27.
FeatureMap tiny_mountain_car_features()
{
  MountainCarEnv env(MountainCarTask{ 0.001 });
  const Vector lo = env.state_lower(), hi = env.state_upper();
  Matrix centers(9, 2);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      centers(i * 3 + j, 0) = lo(0) + (hi(0) - lo(0)) * i / 2.0;
      centers(i * 3 + j, 1) = lo(1) + (hi(1) - lo(1)) * j / 2.0;
    }
  return FeatureMap(centers, (hi - lo) / 2.0 / std::sqrt(2.0), 3);
}

//! Central differences over every mean coordinate and lower-triangular factor entry.
std::vector<double> posterior_fd(const MixturePosterior& q, const std::function<double(const MixturePosterior&)>& f)
{
  std::vector<double> out;
  for (std::size_t k = 0; k < q.num_components(); ++k) {
    for (Eigen::Index d = 0; d < q.dim(); ++d)
      out.push_back(oracle::central_difference(
        [&](double x) {
          auto r = q;
          r.means()[k](d) = x;
          return f(r);
        },
        q.means()[k](d)));
    for (Eigen::Index i = 0; i < q.dim(); ++i)
      for (Eigen::Index j = 0; j <= i; ++j)
        out.push_back(oracle::central_difference(
          [&](double x) {
            auto r = q;
            r.chol()[k](i, j) = x;
            return f(r);
          },
          q.chol()[k](i, j)));
  }
  return out;
}

std::vector<double> flatten(const PosteriorGradient& g)
{
  std::vector<double> out;
  for (std::size_t k = 0; k < g.means.size(); ++k) {
    out.insert(out.end(), g.means[k].data(), g.means[k].data() + g.means[k].size());
    for (Eigen::Index i = 0; i < g.chol[k].rows(); ++i)
      for (Eigen::Index j = 0; j <= i; ++j)
        out.push_back(g.chol[k](i, j));
  }
  return out;
}

Outcome gradient_suite()
{
  Rng rng(202);
  const int instances = 20;
  double worst_td = 0.0, worst_elbo = 0.0, worst_kl = 0.0;
  const auto fmap = tiny_mountain_car_features();
  MountainCarEnv env(MountainCarTask{ 0.0012 });
  const auto p = fmap.num_weights();

  for (int n = 0; n < instances; ++n) {
    // TD loss, proj = 1
    const auto batch = fixture::random_td_samples(env, fmap, 10, rng);
    const Vector theta = fixture::gaussian_vector(p, rng, 0.5);
    const TdParams td{ 0.99, 5.0, 1.0 };
    const auto lg = td_loss_and_grad(theta, batch, 3, td);
    std::vector<double> fd(static_cast<std::size_t>(p));
    for (Eigen::Index i = 0; i < p; ++i)
      fd[static_cast<std::size_t>(i)] = oracle::central_difference(
        [&](double x) {
          Vector t = theta;
          t(i) = x;
          return td_loss(t, batch, 3, td);
        },
        theta(i));
    worst_td = std::max(worst_td, oracle::rel_err(lg.grad, to_vector(fd)));

    // ELBO with common random numbers and frozen chi
    std::vector<Vector> means;
    std::vector<Matrix> chol;
    for (int k = 0; k < 2; ++k) {
      means.push_back(fixture::gaussian_vector(p, rng, 0.5));
      chol.push_back(fixture::random_chol(p, rng, 0.05, 0.2, 0.02));
    }
    MixturePosterior q(std::move(means), std::move(chol), 0.01);
    const auto prior = fixture::random_prior(3, p, rng, 0.5);
    const auto buffer = fixture::random_td_samples(env, fmap, 40, rng);
    ElboConfig cfg;
    cfg.psi = 2.0;
    cfg.batch_size = 10;
    cfg.td = td;
    const auto draw = draw_elbo_randomness(q, buffer, cfg, rng);
    const auto base = elbo_value_and_grad(q, prior, draw, buffer.size(), 3, cfg);
    const auto efd = posterior_fd(q, [&](const MixturePosterior& r) {
      return elbo_value_and_grad(r, prior, draw, buffer.size(), 3, cfg, &base.chi).value;
    });
    worst_elbo = std::max(worst_elbo, relative(flatten(base.grad), efd));

    // KL bound, chi frozen, deterministic
    const auto kq = fixture::random_posterior(2, 3, rng);
    const auto kp = fixture::random_prior(3, 3, rng);
    const auto bound = mog_kl_upper_bound(kq, kp);
    const auto kfd = posterior_fd(kq, [&](const MixturePosterior& r) { return mog_kl_bound_value(r, kp, bound.chi); });
    worst_kl = std::max(worst_kl, relative(flatten(mog_kl_upper_bound_grad(kq, kp, bound.chi)), kfd));
  }
  const bool pass = worst_td < 1e-3 && worst_elbo < 1e-3 && worst_kl < 1e-4;
  return { pass, fmt("max rel. err over %d instances: td %.2e, elbo %.2e, kl %.2e", instances, worst_td, worst_elbo,
                     worst_kl) };
}

// ---------------------------------------------------------------- 3

Outcome tvkde_weights_check()
{
  SourceSolutions s;
  for (int i = 1; i <= 10; ++i)
    s.entries.push_back({ Vector::Constant(2, i), i / 10.0, static_cast<std::uint32_t>(i) });
  const Vector w = tvkde_weights(s, 1.0, 1.0 / 3.0);
  const double expected[4] = { 0.0693, 0.2336, 0.3321, 0.3650 };
  double err = 0.0;
  for (int i = 0; i < 6; ++i)
    err = std::max(err, std::abs(w(i)));
  for (int i = 0; i < 4; ++i)
    err = std::max(err, std::abs(w(6 + i) - expected[i]));
  bool monotone = true;
  for (int i = 1; i < 10; ++i)
    monotone = monotone && w(i) >= w(i - 1);
  const bool boundary = boundary_factor(0.0) == 0.5;
  return { err <= 1e-4 && monotone && boundary,
           fmt("weights (%.4f, %.4f, %.4f, %.4f), max err %.1e, monotone %s, a0(0) = %.17g", w(6), w(7), w(8), w(9),
               err, monotone ? "yes" : "no", boundary_factor(0.0)) };
}

// ---------------------------------------------------------------- 4

Outcome mellowmax_invariants()
{
  Rng rng(404);
  bool constant_ok = true;
  for (double c : { -3.5, 0.0, 0.1, 7.25, 1e3 })
    for (double omega : { 1e-3, 0.5, 5.0, 100.0, 1e4 })
      for (int n : { 1, 2, 4, 9 })
        constant_ok = constant_ok && mellowmax(Vector::Constant(n, c), omega) == c;

  std::uniform_int_distribution<int> len(1, 10);
  std::uniform_real_distribution<double> log_omega(-3.0, 3.0), shift(0.0, 2.0);
  int bound_violations = 0, monotone_violations = 0;
  const int fuzz = 10000;
  for (int trial = 0; trial < fuzz; ++trial) {
    const int n = len(rng);
    const double omega = std::pow(10.0, log_omega(rng));
    const Vector v = fixture::gaussian_vector(n, rng, 10.0);
    const double mm = mellowmax(v, omega);
    const double top = v.maxCoeff();
    const double slack = 1e-12 * std::max(1.0, std::abs(top));
    if (!(mm <= top + slack && mm >= top - std::log(static_cast<double>(n)) / omega - slack))
      ++bound_violations;
    Vector w = v;
    for (int i = 0; i < n; ++i)
      w(i) += shift(rng);
    if (mellowmax(w, omega) < mm - slack)
      ++monotone_violations;
  }
  return { constant_ok && bound_violations == 0 && monotone_violations == 0,
           fmt("constant identity %s; %d fuzz vectors: %d bound, %d monotonicity violations", constant_ok ? "exact" : "BROKEN",
               fuzz, bound_violations, monotone_violations) };
}

// ---------------------------------------------------------------- 5

//! Source weights drift with t: theta ~ N(m(t), s^2 I), m(t) = (cos(t), sin(t)).
Vector drift_mean(double t)
{
  Vector m(2);
  m << std::cos(t), std::sin(t);
  return m;
}

double sup_error(int n_instants, std::uint64_t seed)
{
  const int per_instant = 10;
  const double s = 0.5;
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, s);
  SourceSolutions sources;
  for (int i = 1; i <= n_instants; ++i) {
    const double t = static_cast<double>(i) / n_instants;
    for (int m = 0; m < per_instant; ++m) {
      Vector th = drift_mean(t);
      th(0) += normal(rng);
      th(1) += normal(rng);
      sources.entries.push_back({ th, t, static_cast<std::uint32_t>(i) });
    }
  }
  const double total = static_cast<double>(n_instants * per_instant);
  const double lambda = 1.2 * std::pow(static_cast<double>(n_instants), -1.0 / 3.0);
  const double h = 1.4 * s * std::pow(total, -1.0 / 6.0);
  const Vector centre = drift_mean(1.0);
  double worst = 0.0;
  for (int a = -10; a <= 10; ++a)
    for (int b = -10; b <= 10; ++b) {
      Vector x = centre;
      x(0) += 1.5 * s * a / 10.0;
      x(1) += 1.5 * s * b / 10.0;
      const double truth = std::exp(-0.5 * (x - centre).squaredNorm() / (s * s)) / (2.0 * std::numbers::pi * s * s);
      worst = std::max(worst, std::abs(tvkde_density(sources, x, 1.0, lambda, h * h) - truth));
    }
  return worst;
}

Outcome consistency_trend()
{
  std::vector<double> small, large;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    small.push_back(sup_error(25, seed));
    large.push_back(sup_error(200, 100 + seed));
  }
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
  };
  const double m25 = median(small), m200 = median(large);
  return { m200 < m25, fmt("median sup-grid error %.4f (n = 25) -> %.4f (n = 200)", m25, m200) };
}

// ---------------------------------------------------------------- 6, 7

ExperimentConfig scaled_two_rooms(DynamicKind dynamic)
{
  auto c = ExperimentConfig::defaults(EnvironmentId::TwoRooms);
  c.dynamic = dynamic;
  c.algorithm = { Algorithm::T2VT, Algorithm::MGVT };
  c.K = { 1 };
  c.n_runs = 10;
  c.iterations = 3000;
  c.record_stride = 50;
  return c;
}

ExperimentResult run_scaled(const ExperimentConfig& config, const std::string& name)
{
  ExperimentOptions options;
  options.out_dir = (fs::current_path() / name).string();
  options.workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  options.on_run_done = [&](int run, const RunOutput&) {
    std::fprintf(stderr, "  %s: run %d/%d done\n", name.c_str(), run + 1, config.n_runs);
  };
  return run_experiment(config, options);
}

double value_at(const LearningCurve& curve, const std::string& label, long iteration)
{
  const auto s = std::find(curve.labels.begin(), curve.labels.end(), label) - curve.labels.begin();
  const auto row = std::find(curve.grid.begin(), curve.grid.end(), iteration) - curve.grid.begin();
  return curve.mean.at(static_cast<std::size_t>(s)).at(static_cast<std::size_t>(row));
}

Outcome polynomial_experiment()
{
  const auto result = run_scaled(scaled_two_rooms(DynamicKind::Polynomial), "acceptance-polynomial");
  const auto& c = result.curve;
  const double t1000 = value_at(c, "1-T2VT", 1000), m1000 = value_at(c, "1-MGVT", 1000);
  const double t3000 = value_at(c, "1-T2VT", 3000), m3000 = value_at(c, "1-MGVT", 3000);
  return { t1000 > m1000 && t3000 > 0.2 && m3000 > 0.2,
           fmt("at 1000: T2VT %.3f vs MGVT %.3f; at 3000: T2VT %.3f, MGVT %.3f", t1000, m1000, t3000, m3000) };
}

Outcome sinusoidal_experiment()
{
  const auto result = run_scaled(scaled_two_rooms(DynamicKind::Sinusoidal), "acceptance-sinusoidal");
  const double t = value_at(result.curve, "1-T2VT", 3000), m = value_at(result.curve, "1-MGVT", 3000);
  return { m >= t - 0.1, fmt("final: MGVT %.3f vs T2VT %.3f", m, t) };
}

// ---------------------------------------------------------------- 8

Outcome phi_check()
{
  Rng rng(808);
  const Vector star = fixture::gaussian_vector(4, rng);
  const double zero = phi_diagnostic(star, PriorMixture{ { star }, Vector::Ones(1), 1e-5 });

  const double d = 1.3, s2 = 0.7;
  Vector off = Vector::Zero(4);
  off(1) = d;
  const double sym = phi_diagnostic(star, PriorMixture{ { star + off, star - off }, Vector::Constant(2, 0.5), s2 });

  const auto sources = fixture::ladder_sources(10, 1, 4, rng);
  const Vector latest = sources.entries.back().theta;
  const double t2vt = phi_diagnostic(latest, build_prior(sources, 1.0, 1.0 / 3.0, 1.0));
  const double uniform = phi_diagnostic(latest, uniform_prior(sources, 1.0));

  const bool pass = std::abs(zero) <= 1e-10 && std::abs(sym - d / s2) <= 1e-10 && t2vt <= uniform;
  return { pass, fmt("zero case %.1e, symmetric case err %.1e, recency instance T2VT %.4f <= uniform %.4f", zero,
                     std::abs(sym - d / s2), t2vt, uniform) };
}

// ---------------------------------------------------------------- 9

std::string csv_of(const ExperimentConfig& config)
{
  std::ostringstream out;
  write_csv(out, run_experiment(config).curve);
  return out.str();
}

Outcome determinism_check()
{
  auto c = ExperimentConfig::defaults(EnvironmentId::TwoRooms);
  c.algorithm = { Algorithm::T2VT, Algorithm::MGVT, Algorithm::SourceSolver };
  c.n_runs = 2;
  c.iterations = 100;
  c.record_stride = 20;
  c.source_iterations = 300;
  c.source_instants = 2;
  c.sources_per_instant = 2;
  c.refine_steps = 5;
  c.master_seed = 7;
  const auto first = csv_of(c);
  const bool same = first == csv_of(c);

  Rng rng(909);
  const auto sources = fixture::ladder_sources(10, 5, 484, rng);
  const auto path = fs::temp_directory_path() / "t2vt-acceptance.t2vt";
  archive_weights(path.string(), sources);
  const auto back = load_weights(path.string(), 484);
  fs::remove(path);
  bool exact = back.size() == sources.size();
  for (std::size_t e = 0; exact && e < back.size(); ++e)
    exact = back.entries[e].theta == sources.entries[e].theta && back.entries[e].time == sources.entries[e].time &&
            back.entries[e].instant == sources.entries[e].instant;
  return { same && exact, fmt("CSV reproduced byte-for-byte: %s (%zu bytes); archive round-trip exact: %s",
                              same ? "yes" : "no", first.size(), exact ? "yes" : "no") };
}

} // namespace

int main(int argc, char** argv)
{
  const std::map<int, std::pair<const char*, std::function<Outcome()>>> criteria{
    { 1, { "KL-bound dominance", kl_dominance } },
    { 2, { "gradient suite", gradient_suite } },
    { 3, { "TVKDE weights", tvkde_weights_check } },
    { 4, { "mellowmax invariants", mellowmax_invariants } },
    { 5, { "estimator consistency trend", consistency_trend } },
    { 6, { "scaled two-rooms polynomial experiment", polynomial_experiment } },
    { 7, { "sinusoidal sanity", sinusoidal_experiment } },
    { 8, { "phi diagnostic", phi_check } },
    { 9, { "determinism and format", determinism_check } },
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i)
    selected.push_back(std::atoi(argv[i]));
  if (selected.empty())
    for (const auto& [id, _] : criteria)
      selected.push_back(id);

  int failures = 0;
  for (int id : selected) {
    const auto it = criteria.find(id);
    if (it == criteria.end()) {
      std::printf("criterion %d: FAIL unknown criterion\n", id);
      ++failures;
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = it->second.second();
    } catch (const std::exception& e) {
      out = { false, std::string("exception: ") + e.what() };
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %d (%s): %s  %s [%.1f s]\n", id, it->second.first, out.pass ? "PASS" : "FAIL",
                out.detail.c_str(), secs);
    std::fflush(stdout);
    failures += out.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
