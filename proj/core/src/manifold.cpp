#include "harmonia/manifold.hpp"

#include <json.hpp>

#include <array>
#include <cmath>

namespace harmonia {
namespace {

constexpr double kMargin = 0.1;
constexpr std::array<double, 4> kOffsets = {1.0, -1.0, 0.5, -0.5};

std::vector<Matrix> christoffel_from(const std::vector<Matrix>& dg, const PointMetric& g) {
  const int n = g.dim();
  std::vector<Matrix> gamma(static_cast<std::size_t>(n), Matrix::Zero(n, n));
  // lowered: G_{l,ai} = 1/2 (d_a g_li + d_i g_la - d_l g_ai)
  for (int a = 0; a < n; ++a) {
    Matrix low(n, n);
    for (int l = 0; l < n; ++l)
      for (int i = 0; i < n; ++i) low(l, i) = 0.5 * (dg[a](l, i) + dg[i](l, a) - dg[l](a, i));
    gamma[a] = g.g_inv() * low;
  }
  return gamma;
}

std::vector<Matrix> metric_derivatives(const ModelManifold& m, const ChartPoint& p, double h) {
  const int n = m.dim();
  std::vector<Matrix> dg(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    std::array<Matrix, 4> g;
    for (int k = 0; k < 4; ++k) g[k] = m.local(shifted(m, p, a, kOffsets[k] * h)).metric.g();
    dg[a] = richardson(g[0], g[1], g[2], g[3], h);
  }
  return dg;
}

}  // namespace

ModelManifold::ModelManifold(std::string name, int dim, int ambient_dim, Flavor flavor, std::vector<Chart> charts,
                             FdSteps steps)
    : name_(std::move(name)),
      dim_(dim),
      ambient_dim_(ambient_dim),
      flavor_(flavor),
      charts_(std::move(charts)),
      steps_(steps) {
  if (dim_ < 1 || dim_ > kMaxDim) throw GeometryError("ModelManifold: bad dimension");
  if (charts_.empty()) throw GeometryError("ModelManifold: no charts");
  for (const auto& c : charts_) {
    if (c.lo.size() != dim_ || c.hi.size() != dim_) throw GeometryError("ModelManifold: chart box has wrong size");
    if (flavor_ == Flavor::embedded && !c.embed) throw GeometryError("ModelManifold: embedded chart without map");
    if (flavor_ == Flavor::direct && !c.metric) throw GeometryError("ModelManifold: direct chart without metric");
  }
}

bool ModelManifold::contains(const ChartPoint& p) const {
  if (p.chart < 0 || p.chart >= static_cast<int>(charts_.size())) return false;
  const Chart& c = chart(p.chart);
  if (p.u.size() != dim_) return false;
  for (int a = 0; a < dim_; ++a)
    if (!(p.u[a] >= c.lo[a] && p.u[a] <= c.hi[a])) return false;
  return !c.valid || c.valid(p.u);
}

Matrix ModelManifold::jacobian(const ChartPoint& p) const {
  const Chart& c = chart(p.chart);
  const double h = steps_.h1 * c.scale;
  Matrix J(ambient_dim_, dim_);
  for (int a = 0; a < dim_; ++a) {
    std::array<Vector, 4> f;
    for (int k = 0; k < 4; ++k) {
      Vector u = p.u;
      u[a] += kOffsets[k] * h;
      f[k] = c.embed(u);
    }
    J.col(a) = richardson(f[0], f[1], f[2], f[3], h);
  }
  return J;
}

LocalData ModelManifold::local(const ChartPoint& p) const {
  if (!contains(p)) throw GeometryError(name_ + ": point outside chart domain");
  const Chart& c = chart(p.chart);
  if (flavor_ == Flavor::direct) {
    const Matrix I = Matrix::Identity(dim_, dim_);
    const int o = c.orientation ? c.orientation(p.u, p.u, I) : 1;
    return LocalData{p, p.u, I, PointMetric(c.metric(p.u), o)};
  }
  const Vector x = c.embed(p.u);
  const Matrix J = jacobian(p);
  const int o = c.orientation ? c.orientation(p.u, x, J) : 1;
  return LocalData{p, x, J, PointMetric(J.transpose() * J, o)};
}

std::optional<ChartPoint> ModelManifold::locate(const Vector& x) const {
  for (int i = 0; i < static_cast<int>(charts_.size()); ++i) {
    const Chart& c = charts_[static_cast<std::size_t>(i)];
    if (!c.locate) continue;
    if (auto u = c.locate(x)) {
      ChartPoint p{i, *u};
      if (contains(p)) return p;
    }
  }
  return std::nullopt;
}

ChartPoint ModelManifold::sample(std::mt19937_64& rng) const {
  std::uniform_int_distribution<int> pick(0, static_cast<int>(charts_.size()) - 1);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const int ci = pick(rng);
    const Chart& c = charts_[static_cast<std::size_t>(ci)];
    Vector u(dim_);
    for (int a = 0; a < dim_; ++a) {
      const double w = c.hi[a] - c.lo[a];
      u[a] = c.lo[a] + w * (kMargin + (1.0 - 2.0 * kMargin) * unif(rng));
    }
    if (c.valid && !c.valid(u)) continue;
    if (c.accept && !c.accept(u)) continue;
    return ChartPoint{ci, u};
  }
  throw GeometryError(name_ + ": sampling rejected every candidate");
}

std::vector<ChartPoint> ModelManifold::sample_points(int count, std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::vector<ChartPoint> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out.push_back(sample(rng));
  return out;
}

ChartPoint shifted(const ModelManifold& m, const ChartPoint& p, int a, double t) {
  ChartPoint q = p;
  q.u[a] += t;
  if (!m.contains(q)) throw GeometryError(m.name() + ": stencil leaves chart domain");
  return q;
}

FormField::FormField(std::string name, int degree, Eval eval, bool constant_length)
    : name_(std::move(name)), degree_(degree), eval_(std::move(eval)), constant_length_(constant_length) {}

FormField FormField::from_ambient(std::string name, int degree, Ambient ambient, bool constant_length) {
  FormField f(
      std::move(name), degree, [ambient](const LocalData& l) { return pullback(ambient(l.x), l.jac); },
      constant_length);
  f.ambient_ = std::move(ambient);
  return f;
}

double Curvature::component(int i, int j, int k, int l, const PointMetric& g) const {
  return g.g().row(l).dot(endo(i, j).col(k));
}

Matrix Curvature::ricci() const {
  Matrix ric = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) ric(j, k) -= endo(i, j)(i, k);
  return 0.5 * (ric + ric.transpose());
}

AlternatingForm Curvature::act(int i, int j, const AlternatingForm& sigma) const {
  return -derivation(endo(i, j), sigma);
}

FirstOrder first_order(const ModelManifold& m, const std::vector<const FormField*>& fields, const ChartPoint& p,
                       double h) {
  const int n = m.dim();
  const std::size_t F = fields.size();
  FirstOrder fo;
  fo.local = m.local(p);
  std::vector<Matrix> dg(static_cast<std::size_t>(n));
  std::vector<std::vector<AlternatingForm>> dsig(F, std::vector<AlternatingForm>(static_cast<std::size_t>(n)));
  for (int a = 0; a < n; ++a) {
    std::array<LocalData, 4> L;
    for (int k = 0; k < 4; ++k) L[k] = m.local(shifted(m, p, a, kOffsets[k] * h));
    dg[a] = richardson(L[0].metric.g(), L[1].metric.g(), L[2].metric.g(), L[3].metric.g(), h);
    for (std::size_t f = 0; f < F; ++f) {
      const FormField& s = *fields[f];
      dsig[f][a] = richardson(s(L[0]), s(L[1]), s(L[2]), s(L[3]), h);
    }
  }
  fo.gamma = christoffel_from(dg, fo.local.metric);
  fo.value.resize(F);
  fo.nabla.resize(F);
  for (std::size_t f = 0; f < F; ++f) {
    fo.value[f] = (*fields[f])(fo.local);
    for (int a = 0; a < n; ++a) fo.nabla[f].push_back(dsig[f][a] - derivation(fo.gamma[a], fo.value[f]));
  }
  return fo;
}

Jet::Jet(const ModelManifold& m, std::vector<const FormField*> fields, const ChartPoint& p, bool second_order)
    : model_(&m), fields_(std::move(fields)) {
  const double scale = m.scale(p);
  const double h1 = m.steps().h1 * scale;
  center_ = first_order(m, fields_, p, h1);
  if (!second_order) return;
  const int n = m.dim();
  h2_ = m.steps().h2 * scale;
  neighbours_.resize(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a)
    for (int k = 0; k < 4; ++k) neighbours_[a][k] = first_order(m, fields_, shifted(m, p, a, kOffsets[k] * h2_), h1);

  // d_a Gamma_b
  std::vector<std::vector<Matrix>> dgam(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const auto& N = neighbours_[a];
      dgam[a].push_back(richardson(N[0].gamma[b], N[1].gamma[b], N[2].gamma[b], N[3].gamma[b], h2_));
    }
  const auto& G = center_.gamma;
  curvature_.n = n;
  curvature_.rend.resize(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      curvature_.rend[i * n + j] = -(dgam[i][j] - dgam[j][i] + G[i] * G[j] - G[j] * G[i]);

  hess_.resize(fields_.size());
  for (std::size_t f = 0; f < fields_.size(); ++f) {
    const auto& nab = center_.nabla[f];
    for (int a = 0; a < n; ++a) {
      const auto& N = neighbours_[a];
      for (int b = 0; b < n; ++b) {
        AlternatingForm t = richardson(N[0].nabla[f][b], N[1].nabla[f][b], N[2].nabla[f][b], N[3].nabla[f][b], h2_);
        t -= derivation(G[a], nab[b]);
        for (int k = 0; k < n; ++k) {
          const double c = G[a](k, b);
          if (c != 0.0) t -= c * nab[k];
        }
        hess_[f].push_back(std::move(t));
      }
    }
  }
}

void Jet::require_second() const {
  if (neighbours_.empty()) throw GeometryError("Jet: second-order data not computed");
}

const Curvature& Jet::curvature() const {
  require_second();
  return curvature_;
}

const AlternatingForm& Jet::hess(std::size_t f, int a, int b) const {
  require_second();
  return hess_[f][static_cast<std::size_t>(a * dim() + b)];
}

double Jet::derivative(int a, const std::function<double(const FirstOrder&)>& q) const {
  require_second();
  const auto& N = neighbours_[a];
  return richardson(q(N[0]), q(N[1]), q(N[2]), q(N[3]), h2_);
}

AlternatingForm Jet::derivative_form(int a, const std::function<AlternatingForm(const FirstOrder&)>& q) const {
  require_second();
  const auto& N = neighbours_[a];
  return richardson(q(N[0]), q(N[1]), q(N[2]), q(N[3]), h2_);
}

const std::array<FirstOrder, 4>& Jet::neighbours(int a) const {
  require_second();
  return neighbours_[static_cast<std::size_t>(a)];
}

PointMetric metric_at(const ModelManifold& m, const ChartPoint& p) { return m.local(p).metric; }

std::vector<Matrix> christoffel_at(const ModelManifold& m, const ChartPoint& p) {
  return first_order(m, {}, p, m.steps().h1 * m.scale(p)).gamma;
}

Curvature curvature_at(const ModelManifold& m, const ChartPoint& p) { return Jet(m, {}, p).curvature(); }

std::vector<AlternatingForm> covariant_derivative(const ModelManifold& m, const FormField& s, const ChartPoint& p) {
  return first_order(m, {&s}, p, m.steps().h1 * m.scale(p)).nabla[0];
}

std::vector<AlternatingForm> second_covariant_derivative(const ModelManifold& m, const FormField& s,
                                                         const ChartPoint& p) {
  const Jet jet(m, {&s}, p);
  std::vector<AlternatingForm> out;
  for (int a = 0; a < m.dim(); ++a)
    for (int b = 0; b < m.dim(); ++b) out.push_back(jet.hess(0, a, b));
  return out;
}

AlternatingForm exterior_from_nabla(const std::vector<AlternatingForm>& nabla) {
  const int n = static_cast<int>(nabla.size());
  if (nabla.empty() || nabla[0].degree() >= n) throw GeometryError("exterior_derivative: degree must be < n");
  AlternatingForm out(n, nabla[0].degree() + 1);
  for (int a = 0; a < n; ++a) out += wedge(AlternatingForm::basis(n, MultiIndex{a}), nabla[a]);
  return out;
}

AlternatingForm coderivative_from_nabla(const std::vector<AlternatingForm>& nabla, const PointMetric& g) {
  const int n = g.dim();
  if (nabla.empty() || nabla[0].degree() < 1) throw GeometryError("coderivative: degree must be >= 1");
  AlternatingForm out(n, nabla[0].degree() - 1);
  for (int a = 0; a < n; ++a) out -= contract(g.g_inv().col(a), nabla[a]);
  return out;
}

AlternatingForm exterior_derivative(const ModelManifold& m, const FormField& s, const ChartPoint& p) {
  return exterior_from_nabla(covariant_derivative(m, s, p));
}

AlternatingForm coderivative(const ModelManifold& m, const FormField& s, const ChartPoint& p) {
  return coderivative_from_nabla(covariant_derivative(m, s, p), metric_at(m, p));
}

double metric_compatibility_residual(const ModelManifold& m, const ChartPoint& p) {
  const double h = m.steps().h1 * m.scale(p);
  const auto dg = metric_derivatives(m, p, h);
  const PointMetric g = metric_at(m, p);
  const auto gamma = christoffel_from(dg, g);
  double worst = 0.0;
  for (int k = 0; k < m.dim(); ++k) {
    // d_k g_ij - Gamma^l_ki g_lj - Gamma^l_kj g_il
    const Matrix r = dg[k] - gamma[k].transpose() * g.g() - g.g() * gamma[k];
    worst = std::max(worst, r.cwiseAbs().maxCoeff());
  }
  return worst;
}

std::string describe_json(const ModelManifold& m) {
  nlohmann::json j;
  j["name"] = m.name();
  j["dim"] = m.dim();
  j["ambient_dim"] = m.ambient_dim();
  j["flavor"] = m.flavor() == Flavor::embedded ? "embedded" : "direct";
  j["charts"] = nlohmann::json::array();
  for (const auto& c : m.charts()) {
    nlohmann::json cj;
    cj["name"] = c.name;
    cj["lo"] = std::vector<double>(c.lo.data(), c.lo.data() + c.lo.size());
    cj["hi"] = std::vector<double>(c.hi.data(), c.hi.data() + c.hi.size());
    cj["scale"] = c.scale;
    j["charts"].push_back(cj);
  }
  return j.dump();
}

}  // namespace harmonia
