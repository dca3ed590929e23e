// gcsr: command-line surface for VAR model generation, simulation, Granger
// causality estimation, null-law construction, hypothesis tests, and Monte
// Carlo error-rate experiments.

#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "gcsr/bivar.hpp"
#include "gcsr/errors.hpp"
#include "gcsr/gc.hpp"
#include "gcsr/inference.hpp"
#include "gcsr/io.hpp"
#include "gcsr/null_dist.hpp"
#include "gcsr/sampling.hpp"
#include "gcsr/var_model.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitNonConvergence = 2;

struct GlobalOpts {
  std::uint64_t seed = 0;
  std::string format = "json";
  std::string out;
  bool quiet = false;
  double fs = 0.0;  // sampling rate; > 0 means frequencies are given in Hz
};

void emit(const GlobalOpts& g, const std::string& content) {
  if (!g.out.empty())
    gcsr::write_file(g.out, content);
  else if (!g.quiet)
    std::cout << content;
}

double to_radians(const GlobalOpts& g, double freq) {
  if (g.fs <= 0.0) return freq;
  return gcsr::kTwoPi * freq / g.fs;
}

gcsr::FrequencyBand band_from(const GlobalOpts& g,
                              const std::vector<double>& lohi) {
  gcsr::FrequencyBand band{to_radians(g, lohi[0]), to_radians(g, lohi[1])};
  gcsr::validate(band);
  return band;
}

json law_summary(const gcsr::GenChi2& law) {
  json j = json::parse(gcsr::law_to_json(law));
  const gcsr::GammaApprox ga = gcsr::gamma_approx(law);
  j["mu"] = ga.mu;
  j["sigma2"] = ga.sigma2;
  j["gamma_approx"] = json{{"alpha", ga.alpha}, {"beta", ga.beta}};
  json quantiles;
  for (const auto& [label, q] : {std::pair<const char*, double>{"0.9", 0.9},
                                 {"0.95", 0.95},
                                 {"0.99", 0.99}})
    quantiles[label] = gcsr::genchi2_quantile(law, q);
  j["quantiles"] = quantiles;
  return j;
}

int run(int argc, char** argv) {
  CLI::App app{"Single-regression Granger causality: estimation, asymptotic "
               "null distributions, projection tests, and Monte Carlo "
               "error-rate experiments"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may appear after the subcommand

  GlobalOpts g;
  app.add_option("--seed", g.seed, "Master seed; all randomness derives from it");
  app.add_option("--format", g.format, "Output format where applicable")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--out", g.out, "Write output to this path instead of stdout");
  app.add_flag("--quiet", g.quiet, "Suppress stdout output");
  app.add_option("--fs", g.fs,
                 "Sampling rate in Hz; frequency options are then taken in Hz "
                 "and converted to radians");

  // ---- model ----------------------------------------------------------
  auto* model_cmd = app.add_subcommand("model", "Generate or inspect models");
  model_cmd->require_subcommand(1);

  auto* model_random = model_cmd->add_subcommand("random", "Draw a random VAR model");
  int nx = 1, ny = 1, p = 1;
  double rho = 0.9, gamma = 1.0;
  bool null_mode = false;
  double target_gc = 0.0;
  model_random->add_option("--nx", nx, "Target block size")->required();
  model_random->add_option("--ny", ny, "Source block size")->required();
  model_random->add_option("-p,--order", p, "Model order")->required();
  model_random->add_option("--rho", rho, "Spectral radius")->required();
  model_random->add_option("--gamma", gamma, "Residuals generalised correlation")
      ->required();
  auto* null_flag = model_random->add_flag("--null", null_mode,
                                           "Zero source-to-target coefficients");
  model_random->add_option("--gc", target_gc, "Target population GC")
      ->excludes(null_flag);
  model_random->callback([&]() {
    gcsr::SplitRng rng(g.seed);
    std::optional<double> target;
    if (!null_mode) {
      if (target_gc <= 0.0)
        throw CLI::ValidationError("model random",
                                   "pass either --null or --gc F with F > 0");
      target = target_gc;
    }
    const gcsr::Partition part{nx, ny};
    const gcsr::VarParams model =
        gcsr::random_var(nx + ny, p, part, rho, gamma, target, rng);
    emit(g, gcsr::model_to_json(model, part));
  });

  auto* model_info = model_cmd->add_subcommand("info", "Validate a model file and print derived quantities");
  std::string model_path;
  model_info->add_option("file", model_path, "Model JSON file")->required();
  model_info->callback([&]() {
    const gcsr::ModelFile mf = gcsr::load_model(model_path);
    json j;
    j["n"] = mf.model.n;
    j["p"] = mf.model.p;
    j["partition"] = json{{"nx", mf.partition.nx}, {"ny", mf.partition.ny}};
    j["spectral_radius"] = gcsr::spectral_radius(mf.model);
    j["generalised_correlation"] =
        gcsr::log_generalised_correlation(mf.model.Sigma);
    j["gc_time_sr"] = gcsr::gc_time_sr(mf.model, mf.partition).value;
    j["is_null"] = gcsr::is_null_model(mf.model, mf.partition);
    if (j["is_null"].get<bool>()) {
      const gcsr::GenChi2 law = gcsr::null_weights_time(mf.model, mf.partition);
      j["null_law"] = law_summary(law);
    }
    emit(g, j.dump(2) + "\n");
  });

  // ---- simulate -------------------------------------------------------
  auto* sim_cmd = app.add_subcommand("simulate", "Simulate a time series from a model");
  std::string sim_model;
  long sim_n = 0;
  long sim_burn = -1;
  sim_cmd->add_option("model", sim_model, "Model JSON file")->required();
  sim_cmd->add_option("-N,--samples", sim_n, "Number of samples")->required();
  sim_cmd->add_option("--burn-in", sim_burn,
                      "Burn-in length (default: 10 p / (1 - rho), min 100)");
  sim_cmd->callback([&]() {
    const gcsr::ModelFile mf = gcsr::load_model(sim_model);
    gcsr::SplitRng rng(g.seed);
    const long burn = sim_burn >= 0 ? sim_burn : gcsr::default_burn_in(mf.model);
    const gcsr::TimeSeries data = gcsr::simulate(mf.model, sim_n, burn, rng);
    emit(g, gcsr::timeseries_to_csv(data));
  });

  // ---- gc -------------------------------------------------------------
  auto* gc_cmd = app.add_subcommand("gc", "Compute Granger causality values");
  std::string gc_input;
  int gc_p = 0;
  int gc_nx = 0;
  std::vector<double> gc_band_opt;
  int gc_spectrum = 0;
  gc_cmd->add_option("input", gc_input, "Model JSON or time-series CSV")->required();
  gc_cmd->add_option("-p,--order", gc_p, "Fit order (time-series input)");
  gc_cmd->add_option("--partition", gc_nx, "Size of the target block x");
  auto* gc_band_o = gc_cmd->add_option("--band", gc_band_opt,
                                       "Band-limited GC over [lo, hi] radians")
                        ->expected(2);
  gc_cmd->add_option("--spectrum", gc_spectrum,
                     "Emit n equally spaced (omega, f(omega)) rows")
      ->excludes(gc_band_o);
  gc_cmd->callback([&]() {
    const bool is_json = gc_input.size() > 5 &&
                         gc_input.substr(gc_input.size() - 5) == ".json";
    gcsr::VarParams model;
    gcsr::Partition part;
    if (is_json) {
      const gcsr::ModelFile mf = gcsr::load_model(gc_input);
      model = mf.model;
      part = mf.partition;
      if (gc_nx > 0) {
        part.nx = gc_nx;
        part.ny = model.n - gc_nx;
      }
    } else {
      if (gc_p < 1)
        throw CLI::ValidationError("gc", "time-series input requires -p");
      if (gc_nx < 1)
        throw CLI::ValidationError("gc", "time-series input requires --partition");
      const gcsr::TimeSeries data = gcsr::load_timeseries(gc_input);
      model = gcsr::fit_var_ols(data, gc_p);
      part = gcsr::Partition{gc_nx, model.n - gc_nx};
    }
    if (gc_spectrum > 0) {
      std::string out;
      json rows = json::array();
      for (int i = 0; i < gc_spectrum; ++i) {
        const double w = gcsr::kTwoPi * i / gc_spectrum;
        const double v = gcsr::gc_spectral(model, part, w).value;
        if (g.format == "csv")
          out += gcsr::format_double(w) + "," + gcsr::format_double(v) + "\n";
        else
          rows.push_back(json::array({w, v}));
      }
      emit(g, g.format == "csv" ? out : rows.dump(2) + "\n");
      return;
    }
    double value;
    if (!gc_band_opt.empty()) {
      const gcsr::GcValue v = gcsr::gc_band(model, part, band_from(g, gc_band_opt));
      if (v.quadrature_warning && !g.quiet)
        std::cerr << "warning: doubled-node quadrature check exceeded 1e-8\n";
      value = v.value;
    } else {
      value = gcsr::gc_time_sr(model, part).value;
    }
    emit(g, gcsr::format_double(value) + "\n");
  });

  // ---- nulldist -------------------------------------------------------
  auto* null_cmd = app.add_subcommand(
      "nulldist", "Asymptotic null law of the scaled SR estimator");
  std::string null_model_path;
  int null_nx = 0;
  std::vector<double> null_band;
  null_cmd->add_option("model", null_model_path, "Null model JSON file")->required();
  null_cmd->add_option("--partition", null_nx, "Size of the target block x");
  null_cmd->add_option("--band", null_band, "Band-limited law over [lo, hi]")
      ->expected(2);
  null_cmd->callback([&]() {
    const gcsr::ModelFile mf = gcsr::load_model(null_model_path);
    gcsr::Partition part = mf.partition;
    if (null_nx > 0) part = gcsr::Partition{null_nx, mf.model.n - null_nx};
    const gcsr::GenChi2 law =
        null_band.empty()
            ? gcsr::null_weights_time(mf.model, part)
            : gcsr::null_weights_band(mf.model, part, band_from(g, null_band));
    emit(g, law_summary(law).dump(2) + "\n");
  });

  // ---- test -----------------------------------------------------------
  auto* test_cmd = app.add_subcommand("test", "Hypothesis test on a data file");
  std::string test_data;
  int test_nx = 0;
  double alpha = 0.05;
  int test_order = 0;
  std::string select_crit;
  int test_pmax = 0;
  std::string method = "projection";
  std::vector<double> test_band;
  test_cmd->add_option("data", test_data, "Time-series CSV")->required();
  test_cmd->add_option("--partition", test_nx, "Size of the target block x")
      ->required();
  test_cmd->add_option("--alpha", alpha, "Significance level");
  auto* order_o = test_cmd->add_option("--order", test_order, "Fixed VAR order");
  auto* select_o =
      test_cmd->add_option("--select", select_crit, "Order selection criterion")
          ->check(CLI::IsMember({"bic", "hqic", "aic"}))
          ->excludes(order_o);
  test_cmd->add_option("--pmax", test_pmax, "Maximum order for --select")
      ->needs(select_o);
  test_cmd->add_option("--method", method, "Test method")
      ->check(CLI::IsMember({"projection", "lr"}));
  test_cmd->add_option("--band", test_band, "Band-limited statistic [lo, hi]")
      ->expected(2);
  test_cmd->callback([&]() {
    const gcsr::TimeSeries data = gcsr::load_timeseries(test_data);
    const gcsr::Partition part{test_nx, data.vars() - test_nx};
    gcsr::OrderPolicy policy = gcsr::OrderPolicy::fixed(test_order);
    if (!select_crit.empty()) {
      if (test_pmax < 1)
        throw CLI::ValidationError("test", "--select requires --pmax");
      gcsr::OrderCriterion c = select_crit == "bic" ? gcsr::OrderCriterion::Bic
                               : select_crit == "hqic"
                                   ? gcsr::OrderCriterion::Hqic
                                   : gcsr::OrderCriterion::Aic;
      policy = gcsr::OrderPolicy::select(c, test_pmax);
    } else if (test_order < 1) {
      throw CLI::ValidationError("test", "pass --order p or --select ... --pmax");
    }
    gcsr::TestResult res;
    if (method == "projection") {
      const gcsr::TestStat stat =
          test_band.empty()
              ? gcsr::TestStat::time()
              : gcsr::TestStat::band_limited(band_from(g, test_band));
      res = gcsr::projection_test(data, part, alpha, policy, stat);
    } else {
      res = gcsr::lr_test(data, part, alpha, policy);
    }
    emit(g, gcsr::test_result_to_json(res));
  });

  // ---- experiment -----------------------------------------------------
  auto* exp_cmd = app.add_subcommand(
      "experiment", "Monte Carlo error-rate sweep from a config file");
  std::string config_path;
  int workers = 1;
  exp_cmd->add_option("config", config_path, "Experiment config JSON")->required();
  exp_cmd->add_option("--workers", workers, "Parallel workers");
  exp_cmd->callback([&]() {
    const gcsr::ExperimentConfig cfg = gcsr::load_experiment_config(config_path);
    const gcsr::ErrorRateReport report =
        gcsr::error_rate_experiment(cfg, g.seed, workers);
    if (!g.out.empty()) {
      gcsr::write_file(g.out + ".json", gcsr::report_to_json(report));
      gcsr::write_file(g.out + "_cells.csv", gcsr::report_cells_to_csv(report));
      gcsr::write_file(g.out + "_summary.csv",
                       gcsr::report_summary_to_csv(report));
    } else if (!g.quiet) {
      std::cout << gcsr::report_to_json(report);
    }
  });

  // ---- oracle ---------------------------------------------------------
  auto* oracle_cmd = app.add_subcommand(
      "oracle", "Closed-form bivariate VAR(1) values vs the numerical pipeline");
  gcsr::Bivar1Params bp;
  std::optional<double> oracle_omega;
  std::vector<double> oracle_band;
  double omega_in = 0.0;
  oracle_cmd->add_option("--axx", bp.a_xx, "a_xx")->required();
  oracle_cmd->add_option("--axy", bp.a_xy, "a_xy")->required();
  oracle_cmd->add_option("--ayx", bp.a_yx, "a_yx")->required();
  oracle_cmd->add_option("--ayy", bp.a_yy, "a_yy")->required();
  oracle_cmd->add_option("--sxx", bp.sigma_xx, "sigma_xx");
  oracle_cmd->add_option("--sxy", bp.sigma_xy, "sigma_xy");
  oracle_cmd->add_option("--syy", bp.sigma_yy, "sigma_yy");
  auto* omega_o = oracle_cmd->add_option("--omega", omega_in, "Evaluate spectral GC here");
  oracle_cmd->add_option("--band", oracle_band, "Band for the null weight average")
      ->expected(2);
  oracle_cmd->callback([&]() {
    if (omega_o->count()) oracle_omega = to_radians(g, omega_in);
    const gcsr::VarParams model = gcsr::to_var(bp);
    const gcsr::Partition part{1, 1};
    json j;
    const gcsr::BivarDerived d = gcsr::bivar_derived(bp);
    j["P"] = d.P;
    j["Q"] = d.Q;
    j["v"] = d.v;
    j["kappa"] = d.kappa;
    j["gc_time"] = json{{"closed_form", gcsr::bivar_gc_time(bp)},
                        {"pipeline", gcsr::gc_time_sr(model, part).value}};
    if (oracle_omega)
      j["gc_spectral"] =
          json{{"omega", *oracle_omega},
               {"closed_form", gcsr::bivar_gc_spectral(bp, *oracle_omega)},
               {"pipeline", gcsr::gc_spectral(model, part, *oracle_omega).value}};
    if (bp.a_xy == 0.0) {
      j["omega_yy"] = d.omega_yy;
      j["null_lambda"] =
          json{{"closed_form", gcsr::bivar_null_lambda(bp)},
               {"pipeline", gcsr::null_weights_time(model, part).weights[0]}};
      if (!oracle_band.empty()) {
        const gcsr::FrequencyBand band = band_from(g, oracle_band);
        j["null_lambda_band"] =
            json{{"closed_form", gcsr::bivar_null_lambda_band(bp, band)},
                 {"pipeline",
                  gcsr::null_weights_band(model, part, band).weights[0]}};
      }
    }
    emit(g, j.dump(2) + "\n");
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints usage or error text
    return code == 0 ? kExitOk : kExitInputError;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const gcsr::NonConvergent& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const gcsr::Unachievable& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const gcsr::AccuracyNotMet& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const gcsr::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}
