#include "harmonia/checks.hpp"

#include <json.hpp>

#include <cmath>
#include <sstream>

namespace harmonia {
namespace {

using nlohmann::ordered_json;

// JSON has no inf or nan
ordered_json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

}  // namespace

std::string report_json(const std::vector<FieldReport>& reports, const CheckConfig& cfg, const RunMeta& meta,
                        const std::vector<RegressionRow>* regression) {
  ordered_json root;
  root["schema"] = "harmonia/1";
  root["mode"] = meta.mode;
  root["config"] = {{"points", cfg.points},   {"seed", cfg.seed},     {"tol_alg", cfg.tol_alg},
                    {"tol_d1", cfg.tol_d1}, {"tol_d2", cfg.tol_d2}};
  ordered_json arr = ordered_json::array();
  for (const auto& rep : reports) {
    ordered_json r;
    r["model"] = rep.model;
    r["field"] = rep.field;
    ordered_json checks = ordered_json::array();
    for (const auto& c : rep.checks) {
      ordered_json j;
      j["name"] = c.name;
      j["points"] = c.points;
      j["max_residual"] = number(c.max_residual);
      j["tolerance"] = number(c.tolerance);
      ordered_json fitted = ordered_json::object();
      for (const auto& [k, v] : c.fitted) fitted[k] = number(v);
      j["fitted"] = fitted;
      j["verdict"] = !c.applicable ? "n/a" : c.pass ? "pass" : "fail";
      if (!c.note.empty()) j["note"] = c.note;
      checks.push_back(j);
    }
    r["checks"] = checks;
    arr.push_back(r);
  }
  root["reports"] = arr;
  if (regression) {
    ordered_json rows = ordered_json::array();
    int mismatches = 0;
    for (const auto& row : *regression) {
      const bool ok = row.pass == row.expect_pass;
      mismatches += ok ? 0 : 1;
      rows.push_back({{"model", row.model},
                      {"field", row.field},
                      {"check", row.check},
                      {"expected", row.expect_pass ? "pass" : "fail"},
                      {"observed", row.pass ? "pass" : "fail"},
                      {"ok", ok}});
    }
    root["regression"] = {{"items", rows}, {"mismatches", mismatches}};
  }
  root["timestamp"] = {{"started", meta.started}, {"wall_seconds", meta.wall_seconds}};
  return root.dump(2) + "\n";
}

std::string residual_csv(const std::vector<FieldReport>& reports) {
  std::ostringstream os;
  os.precision(17);
  os << "model,field,check,point,residual\n";
  for (const auto& rep : reports)
    for (const auto& c : rep.checks)
      for (std::size_t i = 0; i < c.residuals.size(); ++i)
        os << rep.model << ',' << rep.field << ',' << c.name << ',' << i << ',' << c.residuals[i] << '\n';
  return os.str();
}

}  // namespace harmonia
