#include "gcsr/inference.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <string>
#include <thread>
#include <vector>

#include "gcsr/bivar.hpp"
#include "gcsr/errors.hpp"

namespace gcsr {

namespace {

void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ValidationError("significance level must lie in (0, 1)");
}

int resolve_order(const TimeSeries& data, const OrderPolicy& order) {
  if (order.kind == OrderPolicy::Kind::Fixed) {
    if (order.p < 1) throw DimensionMismatch("fixed order must be >= 1");
    return order.p;
  }
  return select_order(data, order.p_max, order.criterion).p_hat;
}

void require_stable_fit(const VarParams& model, const char* what) {
  if (spectral_radius_companion(model.A) >= 1.0 - kStabilityMargin)
    throw UnstableFit(std::string(what) +
                      " violates the stability requirement rho < 1");
}

double chi2_cdf(int dof, double x) {
  if (x <= 0.0) return 0.0;
  return boost::math::gamma_p(0.5 * dof, 0.5 * x);
}

double chi2_quantile(int dof, double q) {
  return 2.0 * boost::math::gamma_p_inv(0.5 * dof, q);
}

TestResult projection_from_fit(const VarParams& fit, const Partition& part,
                               double alpha, int p_hat, long n_samples,
                               const TestStat& stat) {
  require_stable_fit(fit, "fitted model");
  TestResult res;
  res.alpha = alpha;
  res.fitted_order = p_hat;
  res.n_samples = n_samples;
  res.statistic = stat.kind == TestStat::Kind::Time
                      ? gc_time_sr(fit, part)
                      : gc_band(fit, part, stat.band);
  res.scaled = static_cast<double>(n_samples) * res.statistic.value;

  const VarParams projected = project_to_null(fit, part);
  require_stable_fit(projected, "projected estimate");
  res.law = stat.kind == TestStat::Kind::Time
                ? null_weights_time(projected, part)
                : null_weights_band(projected, part, stat.band);
  res.p_value = 1.0 - genchi2_cdf(*res.law, res.scaled);
  res.critical = genchi2_quantile(*res.law, 1.0 - alpha);
  res.reject = res.p_value < alpha;
  return res;
}

TestResult lr_from_data(const TimeSeries& data, const VarParams& full_fit,
                        const Partition& part, double alpha, int p_hat) {
  TestResult res;
  res.alpha = alpha;
  res.fitted_order = p_hat;
  res.n_samples = data.length();
  const VarParams reduced = fit_var_ols(data.head_vars(part.nx), p_hat);
  const Matrix sxx = full_fit.Sigma.topLeftCorner(part.nx, part.nx);
  GcValue stat;
  stat.kind = GcKind::TimeLr;
  const double raw = logdet_spd(reduced.Sigma) - logdet_spd(sxx);
  stat.value = raw >= 0.0 ? raw : 0.0;
  res.statistic = stat;
  res.scaled = static_cast<double>(res.n_samples) * res.statistic.value;
  res.chi2_dof = p_hat * part.nx * part.ny;
  res.p_value = 1.0 - chi2_cdf(*res.chi2_dof, res.scaled);
  res.critical = chi2_quantile(*res.chi2_dof, 1.0 - alpha);
  res.reject = res.p_value < alpha;
  return res;
}

}  // namespace

TestResult projection_test(const TimeSeries& data, const Partition& part,
                           double alpha, const OrderPolicy& order,
                           const TestStat& stat) {
  validate(part, data.vars());
  require_alpha(alpha);
  if (stat.kind == TestStat::Kind::Band) validate(stat.band);
  const int p_hat = resolve_order(data, order);
  const VarParams fit = fit_var_ols(data, p_hat);
  return projection_from_fit(fit, part, alpha, p_hat, data.length(), stat);
}

TestResult lr_test(const TimeSeries& data, const Partition& part, double alpha,
                   const OrderPolicy& order) {
  validate(part, data.vars());
  require_alpha(alpha);
  const int p_hat = resolve_order(data, order);
  const VarParams full_fit = fit_var_ols(data, p_hat);
  return lr_from_data(data, full_fit, part, alpha, p_hat);
}

namespace {

struct TrialCounters {
  int rejections = 0;
  int failures = 0;
};

// Runs every configured test on one simulated series, sharing the full-model
// fit between them. Failed tests are excluded and counted.
void run_trial(const TimeSeries& data, const Partition& part, double alpha,
               const OrderPolicy& order, const std::optional<FrequencyBand>& band,
               const std::vector<TestMethod>& tests,
               std::vector<TrialCounters>& counters) {
  int p_hat = 0;
  VarParams fit;
  bool fit_ok = true;
  try {
    p_hat = resolve_order(data, order);
    fit = fit_var_ols(data, p_hat);
  } catch (const Error&) {
    fit_ok = false;
  }
  for (std::size_t t = 0; t < tests.size(); ++t) {
    if (!fit_ok) {
      ++counters[t].failures;
      continue;
    }
    try {
      TestResult res;
      if (tests[t] == TestMethod::Projection) {
        const TestStat stat =
            band ? TestStat::band_limited(*band) : TestStat::time();
        res = projection_from_fit(fit, part, alpha, p_hat, data.length(), stat);
      } else {
        res = lr_from_data(data, fit, part, alpha, p_hat);
      }
      if (res.reject) ++counters[t].rejections;
    } catch (const Error&) {
      ++counters[t].failures;
    }
  }
}

double interpolated_quantile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const std::size_t i = static_cast<std::size_t>(pos);
  if (i + 1 >= values.size()) return values.back();
  const double frac = pos - static_cast<double>(i);
  return values[i] * (1.0 - frac) + values[i + 1] * frac;
}

void summarize(ErrorRateReport& report) {
  // One summary per (N, test), preserving first-appearance order of N.
  std::vector<std::pair<long, TestMethod>> keys;
  for (const RateCell& c : report.cells) {
    const auto key = std::make_pair(c.n_samples, c.test);
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      keys.push_back(key);
  }
  for (const auto& [n, test] : keys) {
    RateSummary s;
    s.n_samples = n;
    s.test = test;
    std::vector<double> rates;
    for (const RateCell& c : report.cells) {
      if (c.n_samples != n || c.test != test) continue;
      rates.push_back(c.rate);
      s.total_trials += c.trials;
      s.total_rejections += c.rejections;
      s.total_failures += c.failures;
    }
    s.mean_rate = 0.0;
    for (double r : rates) s.mean_rate += r;
    if (!rates.empty()) s.mean_rate /= static_cast<double>(rates.size());
    s.q025 = interpolated_quantile(rates, 0.025);
    s.q975 = interpolated_quantile(rates, 0.975);
    s.high_exclusion =
        s.total_failures > 0.01 * static_cast<double>(s.total_trials);
    report.summaries.push_back(s);
  }
}

// Generic deterministic task pool: results land in task-index order, so the
// report does not depend on the worker count.
template <typename Task>
void run_tasks(int workers, std::size_t count, const Task& task) {
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const int k = std::min<int>(workers, static_cast<int>(count));
  pool.reserve(k);
  for (int w = 0; w < k; ++w)
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        task(i);
      }
    });
  for (auto& th : pool) th.join();
}

ErrorRateReport run_family(const FamilyExperimentConfig& cfg,
                           std::uint64_t master_seed, int workers) {
  if (cfg.models < 1 || cfg.trials_per_model < 1)
    throw ValidationError("experiment needs models >= 1 and trials >= 1");
  if (cfg.n_list.empty())
    throw ValidationError("experiment needs at least one sample length");
  require_alpha(cfg.alpha);
  const Partition part{cfg.nx, cfg.ny};
  const bool type2 = cfg.target_gc.has_value();

  struct TaskKey {
    std::size_t n_index;
    int model_index;
  };
  std::vector<TaskKey> tasks;
  for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni)
    for (int mi = 0; mi < cfg.models; ++mi) tasks.push_back({ni, mi});

  std::vector<std::vector<RateCell>> results(tasks.size());
  const SplitRng root(master_seed);

  run_tasks(workers, tasks.size(), [&](std::size_t idx) {
    const TaskKey key = tasks[idx];
    const long n = cfg.n_list[key.n_index];
    SplitRng base = root.split(key.n_index).split(
        static_cast<std::uint64_t>(key.model_index));
    SplitRng gen_rng = base.split(0);
    const VarParams model = random_var(cfg.nx + cfg.ny, cfg.p, part, cfg.rho,
                                       cfg.gamma, cfg.target_gc, gen_rng);
    const long burn = default_burn_in(model);

    std::vector<TrialCounters> counters(cfg.tests.size());
    for (int t = 0; t < cfg.trials_per_model; ++t) {
      SplitRng trial_rng = base.split(static_cast<std::uint64_t>(t) + 1);
      const TimeSeries data = simulate(model, n, burn, trial_rng);
      run_trial(data, part, cfg.alpha, cfg.order, cfg.band, cfg.tests,
                counters);
    }
    std::vector<RateCell> cells;
    for (std::size_t t = 0; t < cfg.tests.size(); ++t) {
      RateCell cell;
      cell.n_samples = n;
      cell.test = cfg.tests[t];
      cell.model_index = key.model_index;
      cell.model_seed = master_seed;
      cell.trials = cfg.trials_per_model;
      cell.rejections = counters[t].rejections;
      cell.failures = counters[t].failures;
      const int valid = cell.trials - cell.failures;
      const double reject_rate =
          valid > 0 ? static_cast<double>(cell.rejections) / valid : 0.0;
      cell.rate = type2 ? 1.0 - reject_rate : reject_rate;
      cells.push_back(cell);
    }
    results[idx] = std::move(cells);
  });

  ErrorRateReport report;
  report.master_seed = master_seed;
  report.mode = type2 ? "type2" : "type1";
  for (auto& cells : results)
    for (auto& c : cells) report.cells.push_back(c);
  summarize(report);
  return report;
}

// Smallest positive coupling coefficient whose population GC hits the target,
// found by bracketed bisection on the closed-form bivariate GC.
double solve_bivar_coupling(double a_xx, double a_yy, double a_yx,
                            double kappa, double target) {
  const auto gc_of = [&](double a_xy) {
    Bivar1Params p;
    p.a_xx = a_xx;
    p.a_xy = a_xy;
    p.a_yx = a_yx;
    p.a_yy = a_yy;
    p.sigma_xx = 1.0;
    p.sigma_yy = 1.0;
    p.sigma_xy = kappa;
    return bivar_gc_time(p);
  };
  const double tol = generator_tolerance();
  double hi = 1e-3;
  int guard = 0;
  while (gc_of(hi) < target) {
    hi *= 2.0;
    if (++guard > 60)
      throw Unachievable("could not bracket the bivariate coupling");
  }
  double lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f = gc_of(mid);
    if (std::abs(f - target) <= tol) return mid;
    (f < target ? lo : hi) = mid;
  }
  throw Unachievable("bivariate coupling bisection failed to converge");
}

ErrorRateReport run_bivar_grid(const BivarGridExperimentConfig& cfg,
                               std::uint64_t master_seed, int workers) {
  if (cfg.a_xx_grid.empty() || cfg.a_yy_grid.empty())
    throw ValidationError("grid experiment needs non-empty axes");
  if (cfg.trials_per_cell < 1)
    throw ValidationError("grid experiment needs trials >= 1");
  require_alpha(cfg.alpha);
  if (!(cfg.target_gc > 0.0))
    throw ValidationError("grid experiment needs a positive target GC");
  const Partition part{1, 1};

  struct Cell {
    std::size_t i, j;
  };
  std::vector<Cell> grid;
  for (std::size_t i = 0; i < cfg.a_xx_grid.size(); ++i)
    for (std::size_t j = 0; j < cfg.a_yy_grid.size(); ++j) grid.push_back({i, j});

  std::vector<std::vector<RateCell>> results(grid.size());
  const SplitRng root(master_seed);

  run_tasks(workers, grid.size(), [&](std::size_t idx) {
    const double a_xx = cfg.a_xx_grid[grid[idx].i];
    const double a_yy = cfg.a_yy_grid[grid[idx].j];
    Bivar1Params bp;
    bp.a_xx = a_xx;
    bp.a_yy = a_yy;
    bp.a_yx = cfg.a_yx;
    bp.a_xy =
        solve_bivar_coupling(a_xx, a_yy, cfg.a_yx, cfg.kappa, cfg.target_gc);
    bp.sigma_xx = 1.0;
    bp.sigma_yy = 1.0;
    bp.sigma_xy = cfg.kappa;
    const VarParams model = to_var(bp);
    const long burn = default_burn_in(model);
    SplitRng base = root.split(idx);

    std::vector<TrialCounters> counters(cfg.tests.size());
    const OrderPolicy order = OrderPolicy::fixed(1);
    for (int t = 0; t < cfg.trials_per_cell; ++t) {
      SplitRng trial_rng = base.split(static_cast<std::uint64_t>(t) + 1);
      const TimeSeries data = simulate(model, cfg.n_samples, burn, trial_rng);
      run_trial(data, part, cfg.alpha, order, std::nullopt, cfg.tests,
                counters);
    }
    std::vector<RateCell> cells;
    for (std::size_t t = 0; t < cfg.tests.size(); ++t) {
      RateCell cell;
      cell.n_samples = cfg.n_samples;
      cell.test = cfg.tests[t];
      cell.model_index = static_cast<int>(idx);
      cell.a_xx = a_xx;
      cell.a_yy = a_yy;
      cell.model_seed = master_seed;
      cell.trials = cfg.trials_per_cell;
      cell.rejections = counters[t].rejections;
      cell.failures = counters[t].failures;
      const int valid = cell.trials - cell.failures;
      // Grid cells report statistical power (rejection rate off the null).
      cell.rate = valid > 0 ? static_cast<double>(cell.rejections) / valid : 0.0;
      cells.push_back(cell);
    }
    results[idx] = std::move(cells);
  });

  ErrorRateReport report;
  report.master_seed = master_seed;
  report.mode = "bivar_grid";
  for (auto& cells : results)
    for (auto& c : cells) report.cells.push_back(c);
  summarize(report);
  return report;
}

}  // namespace

ErrorRateReport error_rate_experiment(const ExperimentConfig& config,
                                      std::uint64_t master_seed, int workers) {
  if (workers < 1) throw ValidationError("workers must be >= 1");
  if (const auto* family = std::get_if<FamilyExperimentConfig>(&config))
    return run_family(*family, master_seed, workers);
  return run_bivar_grid(std::get<BivarGridExperimentConfig>(config),
                        master_seed, workers);
}

}  // namespace gcsr
