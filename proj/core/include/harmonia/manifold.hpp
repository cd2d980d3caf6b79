#pragma once

// Chart-based model manifolds with finite-difference Levi-Civita geometry.
//
// Index conventions, all in the coordinate frame of one chart:
//   gamma[a](k, i)  = Gamma^k_{a i}, so nabla_a e_i = sum_k Gamma^k_{ai} e_k
//   rend[i*n + j]   = R_{d_i, d_j} as an endomorphism (column = input),
//                     R_{X,Y} = nabla_{[X,Y]} - nabla_X nabla_Y + nabla_Y nabla_X
//   nabla[a]        = nabla_{d_a} sigma
//   hess[a*n + b]   = (nabla^2 sigma)_{d_a, d_b}

#include "harmonia/multilinear.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace harmonia {

struct FdSteps {
  double h1 = 1e-3;  // first derivatives (metric, fields)
  double h2 = 1e-2;  // derivatives of first-order data
};

struct ChartPoint {
  int chart = 0;
  Vector u;
};

struct Chart {
  std::string name;
  Vector lo, hi;  // coordinate box; samples keep a 10% margin from its faces
  std::function<bool(const Vector&)> valid;   // evaluation domain, empty = whole box
  std::function<bool(const Vector&)> accept;  // extra sampling filter, empty = always
  std::function<Vector(const Vector&)> embed;   // embedded flavor
  std::function<Matrix(const Vector&)> metric;  // direct flavor
  std::function<double(const Vector&)> log_conformal;  // f with g = e^{2f} delta, when known
  /// Orientation of the coordinate frame; empty = +1.
  std::function<int(const Vector& u, const Vector& x, const Matrix& jac)> orientation;
  /// Ambient point -> coordinates, if the chart covers it.
  std::function<std::optional<Vector>(const Vector&)> locate;
  double scale = 1.0;
};

enum class Flavor { embedded, direct };

struct LocalData {
  ChartPoint at;
  Vector x;    // ambient point (embedded) or chart coordinates (direct)
  Matrix jac;  // ambient x intrinsic, identity for direct charts
  PointMetric metric = PointMetric::euclidean(1);
};

class ModelManifold {
 public:
  ModelManifold(std::string name, int dim, int ambient_dim, Flavor flavor, std::vector<Chart> charts,
                FdSteps steps = {});

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  int ambient_dim() const { return ambient_dim_; }
  Flavor flavor() const { return flavor_; }
  const std::vector<Chart>& charts() const { return charts_; }
  const Chart& chart(int i) const { return charts_.at(static_cast<std::size_t>(i)); }
  const FdSteps& steps() const { return steps_; }
  double scale(const ChartPoint& p) const { return chart(p.chart).scale; }

  bool contains(const ChartPoint& p) const;
  LocalData local(const ChartPoint& p) const;
  /// Jacobian of the embedding by Richardson central differences.
  Matrix jacobian(const ChartPoint& p) const;
  std::optional<ChartPoint> locate(const Vector& x) const;

  ChartPoint sample(std::mt19937_64& rng) const;
  std::vector<ChartPoint> sample_points(int count, std::uint64_t seed) const;

 private:
  std::string name_;
  int dim_;
  int ambient_dim_;
  Flavor flavor_;
  std::vector<Chart> charts_;
  FdSteps steps_;
};

/// Point shifted by t along coordinate a; throws if it leaves the chart domain.
ChartPoint shifted(const ModelManifold& m, const ChartPoint& p, int a, double t);

class FormField {
 public:
  using Eval = std::function<AlternatingForm(const LocalData&)>;
  using Ambient = std::function<AlternatingForm(const Vector&)>;

  FormField(std::string name, int degree, Eval eval, bool constant_length = false);
  /// Field given by an ambient formula, pulled back through the chart Jacobian.
  static FormField from_ambient(std::string name, int degree, Ambient ambient, bool constant_length = false);

  const std::string& name() const { return name_; }
  int degree() const { return degree_; }
  bool constant_length() const { return constant_length_; }
  AlternatingForm operator()(const LocalData& l) const { return eval_(l); }
  const Ambient& ambient() const { return ambient_; }

 private:
  std::string name_;
  int degree_;
  Eval eval_;
  bool constant_length_;
  Ambient ambient_;
};

/// Richardson-extrapolated central difference from samples at +h, -h, +h/2, -h/2.
template <class T>
T richardson(const T& fp, const T& fm, const T& fp2, const T& fm2, double h) {
  const T d1 = (fp - fm) * (1.0 / (2.0 * h));
  const T d2 = (fp2 - fm2) * (1.0 / h);
  return (d2 * 4.0 - d1) * (1.0 / 3.0);
}

struct Curvature {
  int n = 0;
  std::vector<Matrix> rend;

  const Matrix& endo(int i, int j) const { return rend[static_cast<std::size_t>(i * n + j)]; }
  /// R_{ijkl} = <R_{d_i,d_j} d_k, d_l>
  double component(int i, int j, int k, int l, const PointMetric& g) const;
  Matrix ricci() const;
  /// R_{d_i,d_j} acting on a form as a derivation.
  AlternatingForm act(int i, int j, const AlternatingForm& sigma) const;
};

/// Values and first covariant derivatives of a set of fields at one point.
struct FirstOrder {
  LocalData local;
  std::vector<Matrix> gamma;
  std::vector<AlternatingForm> value;               // [field]
  std::vector<std::vector<AlternatingForm>> nabla;  // [field][a]
};

FirstOrder first_order(const ModelManifold& m, const std::vector<const FormField*>& fields, const ChartPoint& p,
                       double h);

/// Second-order data at a point; shared by every check evaluated there.
class Jet {
 public:
  Jet(const ModelManifold& m, std::vector<const FormField*> fields, const ChartPoint& p, bool second_order = true);

  const ModelManifold& model() const { return *model_; }
  int dim() const { return model_->dim(); }
  const ChartPoint& point() const { return center_.local.at; }
  const LocalData& local() const { return center_.local; }
  const PointMetric& metric() const { return center_.local.metric; }
  const std::vector<Matrix>& gamma() const { return center_.gamma; }
  std::size_t field_count() const { return fields_.size(); }
  const FormField& field(std::size_t f) const { return *fields_[f]; }

  const AlternatingForm& value(std::size_t f) const { return center_.value[f]; }
  const std::vector<AlternatingForm>& nabla(std::size_t f) const { return center_.nabla[f]; }
  bool has_second_order() const { return !neighbours_.empty(); }
  const Curvature& curvature() const;
  const AlternatingForm& hess(std::size_t f, int a, int b) const;

  /// Partial derivative along coordinate a of a scalar built from first-order data.
  double derivative(int a, const std::function<double(const FirstOrder&)>& q) const;
  /// Same for a form-valued quantity.
  AlternatingForm derivative_form(int a, const std::function<AlternatingForm(const FirstOrder&)>& q) const;
  const FirstOrder& center() const { return center_; }
  /// First-order data at +h2, -h2, +h2/2, -h2/2 along coordinate a.
  const std::array<FirstOrder, 4>& neighbours(int a) const;
  double step2() const { return h2_; }

 private:
  void require_second() const;

  const ModelManifold* model_;
  std::vector<const FormField*> fields_;
  FirstOrder center_;
  double h2_ = 0.0;
  std::vector<std::array<FirstOrder, 4>> neighbours_;  // [a][+h, -h, +h/2, -h/2]
  Curvature curvature_;
  std::vector<std::vector<AlternatingForm>> hess_;
};

PointMetric metric_at(const ModelManifold& m, const ChartPoint& p);
std::vector<Matrix> christoffel_at(const ModelManifold& m, const ChartPoint& p);
Curvature curvature_at(const ModelManifold& m, const ChartPoint& p);
std::vector<AlternatingForm> covariant_derivative(const ModelManifold& m, const FormField& s, const ChartPoint& p);
std::vector<AlternatingForm> second_covariant_derivative(const ModelManifold& m, const FormField& s,
                                                         const ChartPoint& p);
AlternatingForm exterior_derivative(const ModelManifold& m, const FormField& s, const ChartPoint& p);
AlternatingForm coderivative(const ModelManifold& m, const FormField& s, const ChartPoint& p);

/// d sigma = sum_a e^a ^ nabla_a sigma
AlternatingForm exterior_from_nabla(const std::vector<AlternatingForm>& nabla);
/// d* sigma = -g^{ab} d_a -| nabla_b sigma
AlternatingForm coderivative_from_nabla(const std::vector<AlternatingForm>& nabla, const PointMetric& g);

/// Metric-compatibility residual max |d_k g_ij - Gamma^l_ki g_lj - Gamma^l_kj g_il|.
double metric_compatibility_residual(const ModelManifold& m, const ChartPoint& p);

/// Descriptor: name, dims, flavor, charts.
std::string describe_json(const ModelManifold& m);

}  // namespace harmonia
