#include "gcsr/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "gcsr/errors.hpp"

namespace gcsr {

using nlohmann::json;

namespace {

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& rows, const char* what) {
  if (!rows.is_array() || rows.empty())
    throw ValidationError(std::string(what) + " must be a non-empty array of rows");
  const std::size_t ncols = rows[0].is_array() ? rows[0].size() : 0;
  if (ncols == 0)
    throw ValidationError(std::string(what) + " rows must be non-empty arrays");
  Matrix m(rows.size(), ncols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].is_array() || rows[i].size() != ncols)
      throw ValidationError(std::string(what) + " rows must have equal length");
    for (std::size_t j = 0; j < ncols; ++j) {
      if (!rows[i][j].is_number())
        throw ValidationError(std::string(what) + " entries must be numbers");
      m(i, j) = rows[i][j].get<double>();
    }
  }
  return m;
}

json parse(const std::string& text, const char* what) {
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded())
    throw ValidationError(std::string(what) + ": malformed JSON");
  return j;
}

TestMethod test_method_from_string(const std::string& s) {
  if (s == "projection") return TestMethod::Projection;
  if (s == "lr") return TestMethod::Lr;
  throw ValidationError("unknown test method '" + s + "'");
}

std::string test_method_to_string(TestMethod m) {
  return m == TestMethod::Projection ? "projection" : "lr";
}

OrderCriterion criterion_from_string(const std::string& s) {
  if (s == "bic") return OrderCriterion::Bic;
  if (s == "hqic") return OrderCriterion::Hqic;
  if (s == "aic") return OrderCriterion::Aic;
  throw ValidationError("unknown order criterion '" + s + "'");
}

std::string criterion_to_string(OrderCriterion c) {
  switch (c) {
    case OrderCriterion::Bic: return "bic";
    case OrderCriterion::Hqic: return "hqic";
    default: return "aic";
  }
}

OrderPolicy order_policy_from_json(const json& j) {
  if (!j.is_object() || !j.contains("policy"))
    throw ValidationError("order policy must be an object with a 'policy' key");
  const std::string policy = j.at("policy").get<std::string>();
  if (policy == "fixed") return OrderPolicy::fixed(j.at("p").get<int>());
  if (policy == "select")
    return OrderPolicy::select(
        criterion_from_string(j.at("criterion").get<std::string>()),
        j.at("p_max").get<int>());
  throw ValidationError("order policy must be 'fixed' or 'select'");
}

json order_policy_to_json(const OrderPolicy& p) {
  if (p.kind == OrderPolicy::Kind::Fixed)
    return json{{"policy", "fixed"}, {"p", p.p}};
  return json{{"policy", "select"},
              {"criterion", criterion_to_string(p.criterion)},
              {"p_max", p.p_max}};
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string model_to_json(const VarParams& model, const Partition& part) {
  json j;
  j["n"] = model.n;
  j["p"] = model.p;
  j["A"] = matrix_to_json(model.A);
  j["Sigma"] = matrix_to_json(model.Sigma);
  j["partition"] = json{{"nx", part.nx}, {"ny", part.ny}};
  return j.dump(2) + "\n";
}

ModelFile model_from_json(const std::string& text) {
  const json j = parse(text, "model file");
  for (const char* key : {"n", "p", "A", "Sigma", "partition"})
    if (!j.contains(key))
      throw ValidationError(std::string("model file is missing '") + key + "'");
  ModelFile out;
  out.model.n = j.at("n").get<int>();
  out.model.p = j.at("p").get<int>();
  out.model.A = matrix_from_json(j.at("A"), "A");
  out.model.Sigma = matrix_from_json(j.at("Sigma"), "Sigma");
  out.partition.nx = j.at("partition").at("nx").get<int>();
  out.partition.ny = j.at("partition").at("ny").get<int>();
  validate(out.model);
  validate(out.partition, out.model.n);
  return out;
}

ModelFile load_model(const std::string& path) {
  return model_from_json(read_file(path));
}

void save_model(const std::string& path, const VarParams& model,
                const Partition& part) {
  write_file(path, model_to_json(model, part));
}

std::string law_to_json(const GenChi2& law) {
  json j;
  j["weights"] = std::vector<double>(law.weights.data(),
                                     law.weights.data() + law.weights.size());
  j["multiplicity"] = law.multiplicity;
  j["kind"] = law.kind == GenChi2::Kind::Time ? "time" : "band";
  if (law.kind == GenChi2::Kind::Band)
    j["band"] = json::array({law.band.lo, law.band.hi});
  return j.dump(2) + "\n";
}

GenChi2 law_from_json(const std::string& text) {
  const json j = parse(text, "law file");
  GenChi2 law;
  if (!j.contains("weights") || !j.at("weights").is_array())
    throw ValidationError("law file needs a 'weights' array");
  const auto& w = j.at("weights");
  law.weights.resize(w.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    law.weights[i] = w[i].get<double>();
  law.multiplicity = j.at("multiplicity").get<int>();
  const std::string kind = j.value("kind", "time");
  if (kind == "band") {
    law.kind = GenChi2::Kind::Band;
    law.band.lo = j.at("band")[0].get<double>();
    law.band.hi = j.at("band")[1].get<double>();
  }
  return law;
}

std::string timeseries_to_csv(const TimeSeries& data) {
  std::string out;
  out.reserve(static_cast<std::size_t>(data.values.rows()) * 20 *
              std::max<Eigen::Index>(1, data.values.cols()));
  for (Eigen::Index i = 0; i < data.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.values.cols(); ++j) {
      if (j) out += ',';
      out += format_double(data.values(i, j));
    }
    out += '\n';
  }
  return out;
}

TimeSeries timeseries_from_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    bool numeric = true;
    while (pos <= line.size()) {
      std::size_t comma = line.find(',', pos);
      if (comma == std::string::npos) comma = line.size();
      const std::string cell = line.substr(pos, comma - pos);
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      while (end && *end == ' ') ++end;
      if (end == cell.c_str() || (end && *end != '\0')) {
        numeric = false;
        break;
      }
      row.push_back(v);
      pos = comma + 1;
    }
    if (!numeric) {
      if (first) {
        first = false;  // header row
        continue;
      }
      throw ValidationError("time-series CSV contains a non-numeric row");
    }
    first = false;
    if (!rows.empty() && row.size() != rows.front().size())
      throw ValidationError("time-series CSV rows have inconsistent length");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ValidationError("time-series CSV is empty");
  TimeSeries data;
  data.values.resize(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      data.values(i, j) = rows[i][j];
  if (!data.values.allFinite())
    throw ValidationError("time-series CSV contains non-finite values");
  return data;
}

TimeSeries load_timeseries(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open time-series file '" + path + "'");
  return timeseries_from_csv(in);
}

void save_timeseries(const std::string& path, const TimeSeries& data) {
  write_file(path, timeseries_to_csv(data));
}

ExperimentConfig experiment_config_from_json(const std::string& text) {
  const json j = parse(text, "experiment config");
  const std::string type = j.value("type", "family");
  if (type == "family") {
    FamilyExperimentConfig cfg;
    cfg.nx = j.at("nx").get<int>();
    cfg.ny = j.at("ny").get<int>();
    cfg.p = j.at("p").get<int>();
    cfg.rho = j.at("rho").get<double>();
    cfg.gamma = j.at("gamma").get<double>();
    if (j.contains("target_gc") && !j.at("target_gc").is_null())
      cfg.target_gc = j.at("target_gc").get<double>();
    cfg.n_list.clear();
    for (const auto& n : j.at("N_list")) cfg.n_list.push_back(n.get<long>());
    cfg.models = j.at("models").get<int>();
    cfg.trials_per_model = j.at("trials_per_model").get<int>();
    cfg.alpha = j.value("alpha", 0.05);
    if (j.contains("tests")) {
      cfg.tests.clear();
      for (const auto& t : j.at("tests"))
        cfg.tests.push_back(test_method_from_string(t.get<std::string>()));
    }
    if (j.contains("order")) cfg.order = order_policy_from_json(j.at("order"));
    else cfg.order = OrderPolicy::fixed(cfg.p);
    if (j.contains("band") && !j.at("band").is_null()) {
      FrequencyBand band;
      band.lo = j.at("band")[0].get<double>();
      band.hi = j.at("band")[1].get<double>();
      cfg.band = band;
    }
    return cfg;
  }
  if (type == "bivar_grid") {
    BivarGridExperimentConfig cfg;
    cfg.target_gc = j.at("target_gc").get<double>();
    cfg.kappa = j.at("kappa").get<double>();
    cfg.a_yx = j.value("a_yx", 0.0);
    for (const auto& v : j.at("a_xx_grid")) cfg.a_xx_grid.push_back(v.get<double>());
    for (const auto& v : j.at("a_yy_grid")) cfg.a_yy_grid.push_back(v.get<double>());
    cfg.n_samples = j.at("N").get<long>();
    cfg.trials_per_cell = j.at("trials_per_cell").get<int>();
    cfg.alpha = j.value("alpha", 0.05);
    if (j.contains("tests")) {
      cfg.tests.clear();
      for (const auto& t : j.at("tests"))
        cfg.tests.push_back(test_method_from_string(t.get<std::string>()));
    }
    return cfg;
  }
  throw ValidationError("experiment config 'type' must be 'family' or 'bivar_grid'");
}

ExperimentConfig load_experiment_config(const std::string& path) {
  return experiment_config_from_json(read_file(path));
}

std::string experiment_config_to_json(const ExperimentConfig& config) {
  json j;
  if (const auto* family = std::get_if<FamilyExperimentConfig>(&config)) {
    j["type"] = "family";
    j["nx"] = family->nx;
    j["ny"] = family->ny;
    j["p"] = family->p;
    j["rho"] = family->rho;
    j["gamma"] = family->gamma;
    if (family->target_gc) j["target_gc"] = *family->target_gc;
    j["N_list"] = family->n_list;
    j["models"] = family->models;
    j["trials_per_model"] = family->trials_per_model;
    j["alpha"] = family->alpha;
    json tests = json::array();
    for (TestMethod t : family->tests) tests.push_back(test_method_to_string(t));
    j["tests"] = tests;
    j["order"] = order_policy_to_json(family->order);
    if (family->band)
      j["band"] = json::array({family->band->lo, family->band->hi});
  } else {
    const auto& grid = std::get<BivarGridExperimentConfig>(config);
    j["type"] = "bivar_grid";
    j["target_gc"] = grid.target_gc;
    j["kappa"] = grid.kappa;
    j["a_yx"] = grid.a_yx;
    j["a_xx_grid"] = grid.a_xx_grid;
    j["a_yy_grid"] = grid.a_yy_grid;
    j["N"] = grid.n_samples;
    j["trials_per_cell"] = grid.trials_per_cell;
    j["alpha"] = grid.alpha;
    json tests = json::array();
    for (TestMethod t : grid.tests) tests.push_back(test_method_to_string(t));
    j["tests"] = tests;
  }
  return j.dump(2) + "\n";
}

namespace {

json cell_to_json(const RateCell& c, const std::string& mode) {
  json j;
  j["N"] = c.n_samples;
  j["test"] = test_method_to_string(c.test);
  j["model_index"] = c.model_index;
  if (mode == "bivar_grid") {
    j["a_xx"] = c.a_xx;
    j["a_yy"] = c.a_yy;
  }
  j["trials"] = c.trials;
  j["rejections"] = c.rejections;
  j["failures"] = c.failures;
  j["rate"] = c.rate;
  return j;
}

}  // namespace

std::string report_to_json(const ErrorRateReport& report) {
  json j;
  j["master_seed"] = report.master_seed;
  j["mode"] = report.mode;
  json cells = json::array();
  for (const RateCell& c : report.cells) cells.push_back(cell_to_json(c, report.mode));
  j["cells"] = cells;
  json summaries = json::array();
  for (const RateSummary& s : report.summaries) {
    json js;
    js["N"] = s.n_samples;
    js["test"] = test_method_to_string(s.test);
    js["mean_rate"] = s.mean_rate;
    js["q025"] = s.q025;
    js["q975"] = s.q975;
    js["total_trials"] = s.total_trials;
    js["total_rejections"] = s.total_rejections;
    js["total_failures"] = s.total_failures;
    js["high_exclusion"] = s.high_exclusion;
    summaries.push_back(js);
  }
  j["summaries"] = summaries;
  return j.dump(2) + "\n";
}

std::string report_cells_to_csv(const ErrorRateReport& report) {
  std::string out = "N,test,model_index,a_xx,a_yy,trials,rejections,failures,rate\n";
  for (const RateCell& c : report.cells) {
    out += std::to_string(c.n_samples) + ',' + test_method_to_string(c.test) +
           ',' + std::to_string(c.model_index) + ',' + format_double(c.a_xx) +
           ',' + format_double(c.a_yy) + ',' + std::to_string(c.trials) + ',' +
           std::to_string(c.rejections) + ',' + std::to_string(c.failures) +
           ',' + format_double(c.rate) + '\n';
  }
  return out;
}

std::string report_summary_to_csv(const ErrorRateReport& report) {
  std::string out =
      "N,test,mean_rate,q025,q975,total_trials,total_rejections,total_failures,"
      "high_exclusion\n";
  for (const RateSummary& s : report.summaries) {
    out += std::to_string(s.n_samples) + ',' + test_method_to_string(s.test) +
           ',' + format_double(s.mean_rate) + ',' + format_double(s.q025) +
           ',' + format_double(s.q975) + ',' + std::to_string(s.total_trials) +
           ',' + std::to_string(s.total_rejections) + ',' +
           std::to_string(s.total_failures) + ',' +
           (s.high_exclusion ? "1" : "0") + '\n';
  }
  return out;
}

std::string test_result_to_json(const TestResult& result) {
  json j;
  switch (result.statistic.kind) {
    case GcKind::TimeSr: j["statistic_kind"] = "time_sr"; break;
    case GcKind::TimeLr: j["statistic_kind"] = "time_lr"; break;
    case GcKind::Spectral: j["statistic_kind"] = "spectral"; break;
    case GcKind::Band: j["statistic_kind"] = "band"; break;
  }
  j["statistic"] = result.statistic.value;
  if (result.statistic.kind == GcKind::Band) {
    j["band"] = json::array({result.statistic.band.lo, result.statistic.band.hi});
    if (result.statistic.quadrature_warning) j["quadrature_warning"] = true;
  }
  j["scaled"] = result.scaled;
  j["p_value"] = result.p_value;
  j["critical"] = result.critical;
  j["reject"] = result.reject;
  j["alpha"] = result.alpha;
  j["fitted_order"] = result.fitted_order;
  j["N"] = result.n_samples;
  if (result.law) {
    j["law"] = json::parse(law_to_json(*result.law));
  }
  if (result.chi2_dof) j["chi2_dof"] = *result.chi2_dof;
  return j.dump(2) + "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write file '" + path + "'");
  out << content;
}

}  // namespace gcsr
