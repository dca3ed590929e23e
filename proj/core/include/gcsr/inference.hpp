#ifndef GCSR_INFERENCE_HPP
#define GCSR_INFERENCE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gcsr/gc.hpp"
#include "gcsr/null_dist.hpp"
#include "gcsr/sampling.hpp"

namespace gcsr {

// How the regression order is chosen: fixed, or selected on the full process.
struct OrderPolicy {
  enum class Kind { Fixed, Select };

  Kind kind = Kind::Fixed;
  int p = 1;                                          // Fixed
  OrderCriterion criterion = OrderCriterion::Bic;     // Select
  int p_max = 1;                                      // Select

  static OrderPolicy fixed(int p) { return {Kind::Fixed, p, OrderCriterion::Bic, p}; }
  static OrderPolicy select(OrderCriterion c, int p_max) {
    return {Kind::Select, 1, c, p_max};
  }
};

// Statistic a projection test is built on: broadband or band-limited.
struct TestStat {
  enum class Kind { Time, Band };

  Kind kind = Kind::Time;
  FrequencyBand band{};

  static TestStat time() { return {}; }
  static TestStat band_limited(const FrequencyBand& b) {
    return {Kind::Band, b};
  }
};

struct TestResult {
  GcValue statistic;
  double scaled = 0.0;  // N * F_hat
  double p_value = 1.0;
  double critical = 0.0;  // critical value for the scaled statistic
  bool reject = false;
  double alpha = 0.0;
  int fitted_order = 0;
  long n_samples = 0;
  std::optional<GenChi2> law;   // projection test
  std::optional<int> chi2_dof;  // LR test
};

// The paper's Projection Test: fit VAR(p_hat), compute the SR statistic,
// project the fit onto the null space, and evaluate the scaled statistic
// against the generalised chi^2 law at the projected parameter.
TestResult projection_test(const TimeSeries& data, const Partition& part,
                           double alpha, const OrderPolicy& order,
                           const TestStat& stat = TestStat::time());

// Dual-regression likelihood-ratio test against chi^2(p_hat n_x n_y).
TestResult lr_test(const TimeSeries& data, const Partition& part, double alpha,
                   const OrderPolicy& order);

enum class TestMethod { Projection, Lr };

// Random-model family sweep (Type I for Null mode, Type II for TargetGC).
struct FamilyExperimentConfig {
  int nx = 1;
  int ny = 1;
  int p = 1;
  double rho = 0.9;
  double gamma = 1.0;
  std::optional<double> target_gc;  // empty = null models
  std::vector<long> n_list;
  int models = 50;
  int trials_per_model = 200;
  double alpha = 0.05;
  std::vector<TestMethod> tests = {TestMethod::Projection};
  OrderPolicy order = OrderPolicy::fixed(1);
  std::optional<FrequencyBand> band;  // band-limited projection statistic
};

// Bivariate VAR(1) grid: at each (a_xx, a_yy) cell, a_xy is tuned so the
// population GC equals target_gc, and the rejection rate is estimated.
struct BivarGridExperimentConfig {
  double target_gc = 1e-4;
  double kappa = 0.0;
  double a_yx = 0.0;
  std::vector<double> a_xx_grid;
  std::vector<double> a_yy_grid;
  long n_samples = 10000;
  int trials_per_cell = 1000;
  double alpha = 0.05;
  std::vector<TestMethod> tests = {TestMethod::Projection};
};

using ExperimentConfig =
    std::variant<FamilyExperimentConfig, BivarGridExperimentConfig>;

// One (N, test, model-or-cell) rejection-rate estimate.
struct RateCell {
  long n_samples = 0;
  TestMethod test = TestMethod::Projection;
  int model_index = 0;
  double a_xx = 0.0, a_yy = 0.0;  // grid runs only
  std::uint64_t model_seed = 0;
  int trials = 0;
  int rejections = 0;
  int failures = 0;  // excluded trials (unstable fits etc.)
  double rate = 0.0;
};

// Cross-model summary for one (N, test) pair.
struct RateSummary {
  long n_samples = 0;
  TestMethod test = TestMethod::Projection;
  double mean_rate = 0.0;
  double q025 = 0.0;  // 2.5% across models
  double q975 = 0.0;  // 97.5% across models
  long total_trials = 0;
  long total_rejections = 0;
  long total_failures = 0;
  bool high_exclusion = false;  // failures exceed 1% of trials
};

struct ErrorRateReport {
  std::uint64_t master_seed = 0;
  std::string mode;  // "type1", "type2", or "bivar_grid"
  std::vector<RateCell> cells;
  std::vector<RateSummary> summaries;
};

// Deterministic per master seed and independent of worker count.
ErrorRateReport error_rate_experiment(const ExperimentConfig& config,
                                      std::uint64_t master_seed,
                                      int workers = 1);

}  // namespace gcsr

#endif  // GCSR_INFERENCE_HPP
