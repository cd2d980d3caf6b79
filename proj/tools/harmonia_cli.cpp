#include "harmonia/checks.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace {

using namespace harmonia;

enum Exit { kOk = 0, kMismatch = 1, kUsage = 2, kGate = 3 };

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) out.push_back(tok);
  return out;
}

bool glob_match(const char* p, const char* s) {
  if (*p == '\0') return *s == '\0';
  if (*p == '*') return glob_match(p + 1, s) || (*s && glob_match(p, s + 1));
  if (*p == '?' || *p == *s) return *s && glob_match(p + 1, s + 1);
  return false;
}

std::vector<std::string> resolve_models(const std::vector<std::string>& patterns, bool all) {
  if (all) return catalog_ids();
  std::vector<std::string> out;
  for (const auto& p : patterns) {
    if (p.find_first_of("*?") == std::string::npos) {
      build(p);  // throws on unknown ids
      out.push_back(p);
      continue;
    }
    bool any = false;
    for (const auto& id : catalog_ids())
      if (glob_match(p.c_str(), id.c_str())) {
        out.push_back(id);
        any = true;
      }
    if (!any) throw UnknownName("no catalog model matches '" + p + "'");
  }
  return out;
}

std::string now_iso() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

void print_text(std::ostream& os, const std::vector<FieldReport>& reports) {
  for (const auto& rep : reports)
    for (const auto& c : rep.checks) {
      const char* verdict = !c.applicable ? "n/a " : c.pass ? "PASS" : "FAIL";
      os << std::left << std::setw(22) << rep.model << ' ' << std::setw(16) << rep.field << ' ' << std::setw(26)
         << c.name << ' ' << verdict;
      if (c.applicable)
        os << "  max " << std::scientific << std::setprecision(3) << c.max_residual << " tol " << c.tolerance
           << std::defaultfloat;
      if (!c.note.empty()) os << "  (" << c.note << ')';
      os << '\n';
    }
}

void write_out(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

struct Options {
  std::vector<std::string> models;
  std::string fields, checks;
  CheckConfig cfg;
  std::string out, format = "text", csv;
  bool regression = false, all = false;
};

int run(Options o) {
  if (const char* env = std::getenv("HARMONIA_JOBS")) {
    try {
      o.cfg.jobs = std::max(1, std::stoi(env));
    } catch (const std::exception&) {
      std::cerr << "HARMONIA_JOBS must be an integer\n";
      return kUsage;
    }
  }
  if (o.cfg.points < 1) {
    std::cerr << "--points must be at least 1\n";
    return kUsage;
  }
  const auto started = std::chrono::steady_clock::now();
  RunMeta meta;
  meta.mode = o.regression ? "regression" : "survey";
  meta.started = now_iso();

  // validate every name before running anything
  std::vector<Model> models;
  std::vector<std::string> checks = split(o.checks);
  try {
    for (const auto& id : resolve_models(o.models, o.all)) models.push_back(build(id));
    for (const auto& c : checks)
      if (!is_check(c)) throw UnknownName("unknown check '" + c + "'");
    if (models.empty()) throw UnknownName("no model selected (use --model or --all)");
    for (const auto& f : split(o.fields))
      for (const auto& m : models)
        if (!m.has_field(f)) throw UnknownName("model " + m.id + " has no field '" + f + "'");
  } catch (const UnknownName& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }

  std::vector<FieldReport> reports;
  std::vector<RegressionRow> rows;
  bool gate_failed = false;

  // plan: (model, field, checks, expectations); oracle checks go first
  struct Task {
    std::size_t model;
    std::string field;
    std::vector<std::string> checks;
    std::vector<bool> expect;
  };
  std::vector<Task> oracle_tasks, main_tasks;
  for (std::size_t mi = 0; mi < models.size(); ++mi) {
    const Model& m = models[mi];
    std::vector<std::string> fields = split(o.fields);
    if (fields.empty()) fields = m.field_names();
    for (const auto& f : fields) {
      Task ot{mi, f, {}, {}}, mt{mi, f, {}, {}};
      auto place = [&](const std::string& c, bool expect) {
        Task& t = is_oracle_check(c) ? ot : mt;
        t.checks.push_back(c);
        t.expect.push_back(expect);
      };
      if (o.regression && checks.empty()) {
        for (const auto& item : expected_suite(m))
          if (item.field == f) place(item.check, item.expect_pass);
      } else {
        const auto& list = checks.empty() ? m.spec(f).checks : checks;
        for (const auto& c : list) place(c, true);
      }
      if (!ot.checks.empty()) oracle_tasks.push_back(ot);
      if (!mt.checks.empty()) main_tasks.push_back(mt);
    }
  }

  std::vector<std::optional<ModelRun>> runs(models.size());
  auto exec = [&](const Task& t) {
    auto& run = runs[t.model];
    if (!run) run = prepare_model(models[t.model], o.cfg);
    FieldReport rep = run_field(*run, t.field, t.checks, o.cfg);
    for (std::size_t i = 0; i < rep.checks.size(); ++i) {
      const CheckResult& c = rep.checks[i];
      if (!c.applicable) continue;
      rows.push_back({rep.model, rep.field, c.name, t.expect[i], c.pass});
      if (is_oracle_check(c.name) && !c.pass) gate_failed = true;
    }
    reports.push_back(std::move(rep));
  };
  try {
    for (const auto& t : oracle_tasks) exec(t);
    if (!gate_failed)
      for (const auto& t : main_tasks) exec(t);
  } catch (const UnknownName& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  meta.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  if (o.format == "json") {
    write_out(o.out, report_json(reports, o.cfg, meta, o.regression ? &rows : nullptr));
  } else {
    std::ostringstream os;
    print_text(os, reports);
    if (o.regression) {
      int bad = 0;
      for (const auto& r : rows) bad += r.pass == r.expect_pass ? 0 : 1;
      os << "\nregression: " << rows.size() << " items, " << bad << " mismatches\n";
      for (const auto& r : rows)
        if (r.pass != r.expect_pass)
          os << "  mismatch " << r.model << ' ' << r.field << ' ' << r.check << " expected "
             << (r.expect_pass ? "pass" : "fail") << '\n';
    }
    os << "wall time " << std::fixed << std::setprecision(1) << meta.wall_seconds << " s\n";
    write_out(o.out, os.str());
  }
  if (!o.csv.empty()) write_out(o.csv, residual_csv(reports));

  if (gate_failed) {
    std::cerr << "oracle gate failed; remaining checks skipped\n";
    return kGate;
  }
  if (o.regression)
    for (const auto& r : rows)
      if (r.pass != r.expect_pass) return kMismatch;
  return kOk;
}

int list_models(const std::string& format) {
  if (format == "json") {
    nlohmann::ordered_json j;
    j["schema"] = "harmonia/1";
    j["models"] = nlohmann::ordered_json::array();
    for (const auto& id : catalog_ids()) {
      const Model m = build(id);
      j["models"].push_back({{"id", id},
                             {"family", m.family},
                             {"manifold", nlohmann::ordered_json::parse(describe_json(m.m()))},
                             {"params", m.params},
                             {"fields", m.field_names()}});
    }
    j["families"] = nlohmann::ordered_json::array();
    for (const auto& [syntax, what] : catalog_families()) j["families"].push_back({{"id", syntax}, {"description", what}});
    std::cout << j.dump(2) << '\n';
    return kOk;
  }
  for (const auto& id : catalog_ids()) {
    const Model m = build(id);
    std::cout << std::left << std::setw(22) << id << ' ';
    const auto f = m.field_names();
    for (std::size_t i = 0; i < f.size(); ++i) std::cout << (i ? "," : "") << f[i];
    std::cout << '\n';
  }
  std::cout << "\nfamilies:\n";
  for (const auto& [syntax, what] : catalog_families()) std::cout << "  " << std::setw(22) << syntax << ' ' << what << '\n';
  return kOk;
}

int list_checks(const std::string& format) {
  if (format == "json") {
    nlohmann::ordered_json j;
    j["schema"] = "harmonia/1";
    j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : check_catalog())
      j["checks"].push_back({{"name", c.name}, {"oracle", c.oracle}, {"description", c.description}});
    std::cout << j.dump(2) << '\n';
    return kOk;
  }
  for (const auto& c : check_catalog())
    std::cout << std::left << std::setw(26) << c.name << (c.oracle ? " [oracle] " : "          ") << c.description
              << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"harmonia: harmonic sections and harmonic maps of G-structure forms on model manifolds"};
  app.require_subcommand(1);
  Options o;

  auto* cmd = app.add_subcommand("run", "run checks on catalog models");
  cmd->add_option("--model", o.models, "model id or glob (repeatable)");
  cmd->add_option("--field", o.fields, "field names, comma separated (default: all)");
  cmd->add_option("--checks", o.checks, "check names, comma separated (default: each field's suite)");
  cmd->add_option("--points", o.cfg.points, "sample points per (model, field)")->capture_default_str();
  cmd->add_option("--seed", o.cfg.seed, "sampling seed")->capture_default_str();
  cmd->add_option("--tol-d1", o.cfg.tol_d1, "tolerance for first-derivative quantities")->capture_default_str();
  cmd->add_option("--tol-d2", o.cfg.tol_d2, "tolerance for second-derivative quantities")->capture_default_str();
  cmd->add_option("--out", o.out, "report file (default: stdout)");
  cmd->add_option("--format", o.format, "text or json")->check(CLI::IsMember({"text", "json"}))->capture_default_str();
  cmd->add_flag("--regression", o.regression, "compare verdicts with the expected suite");
  cmd->add_flag("--all", o.all, "every catalog model");
  cmd->add_option("--jobs", o.cfg.jobs, "worker threads (HARMONIA_JOBS overrides)")->capture_default_str();
  cmd->add_option("--emit-csv", o.csv, "per-point residual dump");

  std::string list_format = "text";
  auto* lm = app.add_subcommand("list-models", "catalog ids and parametrised families");
  lm->add_option("--format", list_format)->check(CLI::IsMember({"text", "json"}));
  auto* lc = app.add_subcommand("list-checks", "available checks");
  lc->add_option("--format", list_format)->check(CLI::IsMember({"text", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return e.get_exit_code() == 0 ? code : kUsage;
  }
  try {
    if (*lm) return list_models(list_format);
    if (*lc) return list_checks(list_format);
    return run(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kGate;
  }
}
