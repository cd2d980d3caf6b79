#pragma once

// Named checks over sampled points of a catalog model, and their reports.

#include "harmonia/models.hpp"

#include <map>
#include <string>
#include <vector>

namespace harmonia {

struct CheckInfo {
  std::string name;
  std::string description;
  bool oracle = false;  // gates the other checks
};
const std::vector<CheckInfo>& check_catalog();
bool is_check(const std::string& name);
bool is_oracle_check(const std::string& name);

struct CheckResult {
  std::string name;
  bool applicable = true;
  int points = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  std::map<std::string, double> fitted;
  bool pass = false;  // max_residual < tolerance
  std::string note;
  std::vector<double> residuals;  // per point
};

struct FieldReport {
  std::string model;
  std::string field;
  std::vector<CheckResult> checks;
};

/// Sample points and fitted constants shared by every field of a model.
struct ModelRun {
  const Model* model = nullptr;
  std::vector<ChartPoint> points;
  Constants constants;
  std::map<std::string, double> constant_residuals;
};

ModelRun prepare_model(const Model& model, const CheckConfig& cfg);
FieldReport run_field(const ModelRun& run, const std::string& field, const std::vector<std::string>& checks,
                      const CheckConfig& cfg);

/// Runs fn(i) for i in [0, count) on `jobs` threads.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn);

struct RunMeta {
  std::string mode;  // survey or regression
  double wall_seconds = 0.0;
  std::string started;  // ISO-8601
};
struct RegressionRow {
  std::string model, field, check;
  bool expect_pass = true;
  bool pass = false;
};

/// JSON report, schema "harmonia/1". Wall-clock data lives only under "timestamp".
std::string report_json(const std::vector<FieldReport>& reports, const CheckConfig& cfg, const RunMeta& meta,
                        const std::vector<RegressionRow>* regression = nullptr);
/// model,field,check,point,residual
std::string residual_csv(const std::vector<FieldReport>& reports);

}  // namespace harmonia
