#ifndef GCSR_IO_HPP
#define GCSR_IO_HPP

#include <iosfwd>
#include <string>

#include "gcsr/inference.hpp"
#include "gcsr/null_dist.hpp"
#include "gcsr/sampling.hpp"
#include "gcsr/var_model.hpp"

namespace gcsr {

// Model JSON: {"n":, "p":, "A":[[n rows x pn cols]], "Sigma":[[n x n]],
// "partition":{"nx":,"ny":}}. Readers throw ValidationError naming the first
// violated invariant.
struct ModelFile {
  VarParams model;
  Partition partition;
};

std::string model_to_json(const VarParams& model, const Partition& part);
ModelFile model_from_json(const std::string& text);
ModelFile load_model(const std::string& path);
void save_model(const std::string& path, const VarParams& model,
                const Partition& part);

// Law JSON: {"weights":[...], "multiplicity":, "kind":"time"|"band",
// "band":[lo,hi]?}.
std::string law_to_json(const GenChi2& law);
GenChi2 law_from_json(const std::string& text);

// Time-series CSV: one row per time step, n numeric columns, optional header.
// Values are written with 17 significant digits so round-trips are exact.
std::string timeseries_to_csv(const TimeSeries& data);
TimeSeries timeseries_from_csv(std::istream& in);
TimeSeries load_timeseries(const std::string& path);
void save_timeseries(const std::string& path, const TimeSeries& data);

// Experiment configuration and report serialization.
ExperimentConfig experiment_config_from_json(const std::string& text);
ExperimentConfig load_experiment_config(const std::string& path);
std::string experiment_config_to_json(const ExperimentConfig& config);
std::string report_to_json(const ErrorRateReport& report);
std::string report_cells_to_csv(const ErrorRateReport& report);
std::string report_summary_to_csv(const ErrorRateReport& report);

std::string test_result_to_json(const TestResult& result);

// 17-significant-digit formatting used by every CSV writer.
std::string format_double(double v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace gcsr

#endif  // GCSR_IO_HPP
