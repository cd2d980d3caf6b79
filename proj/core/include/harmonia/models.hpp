#pragma once

// Catalog of model manifolds with their G-structure form fields and the
// checks each (model, field) pair is expected to pass or fail.

#include "harmonia/harmonic.hpp"

#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace harmonia {

using Constants = std::map<std::string, double>;

/// Data handed to per-point expectation formulas.
struct EvalContext {
  const Jet& jet;
  std::size_t field;
  const std::map<std::string, std::size_t>& index;  // field name -> jet slot
  const Constants& constants;

  std::size_t at(const std::string& name) const;
};

/// Constant fitted once per run over first-order data at the sample points.
struct ConstantSpec {
  std::string name;
  std::vector<std::string> fields;  // slots of FirstOrder::value in this order
  std::function<std::pair<double, double>(const std::vector<FirstOrder>&)> fit;  // value, residual
};

/// Relation between fitted constants and the Einstein constant rho.
struct Relation {
  std::string name;
  std::function<std::pair<double, double>(const Constants&, double rho)> sides;  // lhs, rhs
};

struct FieldSpec {
  std::string name;
  std::vector<std::string> checks;  // default suite
  std::vector<std::string> aux;     // extra fields the expectations read
  std::function<double(const EvalContext&)> eigenvalue;
  std::string eigen_formula;
  std::optional<bool> harmonic_section;  // expected verdicts, empty = not claimed
  std::optional<bool> harmonic_map;
  std::string partner;    // Phi of a (Psi, Phi) pair
  std::string variation;  // orthogonal variation field
  std::function<Vector(const EvalContext&)> expected_pairing;
  std::function<std::vector<double>(const EvalContext&)> expected_spectrum;
  std::function<double(const EvalContext&)> expected_bending;
  std::function<double(const EvalContext&)> pairing_condition;  // relative miss of e.g. db(zeta) = r b^2
  bool theta_parallel = false;
  double lee_scale = 0.0;  // spin7 Lee form relative to the fitted one
  double lck_N = 0.0;      // dimension parameter of the lcK defect
  double lck_prefactor = 0.0;
};

class Model {
 public:
  std::string id;
  std::string family;
  std::map<std::string, double> params;
  std::shared_ptr<const ModelManifold> manifold;
  std::vector<ConstantSpec> constants;
  std::vector<Relation> relations;
  std::optional<double> einstein;  // expected rho, when known in closed form

  const ModelManifold& m() const { return *manifold; }
  void add_field(FormField f, FieldSpec spec);
  bool has_field(const std::string& name) const;
  const FormField& field(const std::string& name) const;
  const FieldSpec& spec(const std::string& name) const;
  std::vector<std::string> field_names() const;

 private:
  std::deque<FormField> fields_;
  std::vector<FieldSpec> specs_;
};

struct SuiteItem {
  std::string field;
  std::string check;
  bool expect_pass = true;
};

class UnknownName : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Builds a catalog entry, e.g. "round-sphere:2", "nk-s6", "kenmotsu:1,1,0".
Model build(const std::string& id);
/// Ids in stable order, as run by the regression.
const std::vector<std::string>& catalog_ids();
/// Parametrised families with their parameter syntax.
const std::vector<std::pair<std::string, std::string>>& catalog_families();
std::vector<SuiteItem> expected_suite(const Model& model);

/// b from nabla eta = b(-X^flat + eta(X) eta) at one point.
double kenmotsu_b(const FirstOrder& fo, std::size_t eta);

}  // namespace harmonia
