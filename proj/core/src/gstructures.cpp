#include "harmonia/gstructures.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace harmonia {
namespace {

using Table = std::array<std::array<int, 8>, 8>;

// cyclic G2 triples (i, i+1, i+3) over Z_7
double phi_coeff(int a, int b, int c) {
  static const AlternatingForm phi = g2_forms().phi;
  if (a == b || b == c || a == c) return 0.0;
  const int idx[3] = {a, b, c};
  return phi.at(idx);
}

Vector quat_mul(const Vector& x, const Vector& y) {
  Vector z(4);
  z[0] = x[0] * y[0] - x[1] * y[1] - x[2] * y[2] - x[3] * y[3];
  z[1] = x[0] * y[1] + x[1] * y[0] + x[2] * y[3] - x[3] * y[2];
  z[2] = x[0] * y[2] - x[1] * y[3] + x[2] * y[0] + x[3] * y[1];
  z[3] = x[0] * y[3] + x[1] * y[2] - x[2] * y[1] + x[3] * y[0];
  return z;
}

AlgebraTable table_from_products(int dim, const std::function<Vector(int, int)>& mul) {
  Table idx{}, sgn{};
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      const Vector p = mul(i, j);
      Eigen::Index k = 0;
      p.cwiseAbs().maxCoeff(&k);
      idx[i][j] = static_cast<int>(k);
      sgn[i][j] = p[k] > 0 ? 1 : -1;
    }
  return AlgebraTable(dim, idx, sgn);
}

Vector unit(int dim, int i) {
  Vector v = Vector::Zero(dim);
  v[i] = 1.0;
  return v;
}

}  // namespace

AlgebraTable::AlgebraTable(int dim, const Table& idx, const Table& sgn) : dim_(dim), idx_(idx), sgn_(sgn) {}

const AlgebraTable& AlgebraTable::quaternions() {
  static const AlgebraTable t = table_from_products(4, [](int i, int j) { return quat_mul(unit(4, i), unit(4, j)); });
  return t;
}

const AlgebraTable& AlgebraTable::cayley_dickson_octonions() {
  static const AlgebraTable t = table_from_products(8, [](int i, int j) {
    const Vector x = unit(8, i), y = unit(8, j);
    const Vector a = x.head(4), b = x.tail(4), c = y.head(4), d = y.tail(4);
    Vector out(8);
    out.head(4) = quat_mul(a, c) - quat_mul(algebra_conj(d), b);
    out.tail(4) = quat_mul(d, a) + quat_mul(b, algebra_conj(c));
    return out;
  });
  return t;
}

const AlgebraTable& AlgebraTable::octonions() {
  static const AlgebraTable t = table_from_products(8, [](int i, int j) {
    Vector out = Vector::Zero(8);
    if (i == 0) return unit(8, j);
    if (j == 0) return unit(8, i);
    if (i == j) {
      out[0] = -1.0;
      return out;
    }
    for (int c = 0; c < 7; ++c) out[c + 1] = phi_coeff(i - 1, j - 1, c);
    return out;
  });
  return t;
}

Vector algebra_mul(const AlgebraTable& t, const Vector& x, const Vector& y) {
  if (x.size() != t.dim() || y.size() != t.dim()) throw GeometryError("algebra_mul: length mismatch");
  Vector z = Vector::Zero(t.dim());
  for (int i = 0; i < t.dim(); ++i) {
    if (x[i] == 0.0) continue;
    for (int j = 0; j < t.dim(); ++j) z[t.index(i, j)] += t.sign(i, j) * x[i] * y[j];
  }
  return z;
}

Vector algebra_conj(const Vector& x) {
  Vector c = -x;
  c[0] = x[0];
  return c;
}

AlternatingForm kaehler_form(int n) {
  if (n < 1) throw GeometryError("kaehler_form: n must be >= 1");
  AlternatingForm w(2 * n, 2);
  for (int k = 0; k < n; ++k) w.add(MultiIndex{2 * k, 2 * k + 1}, 1.0);
  return w;
}

Matrix standard_complex_structure(int n) {
  Matrix J = Matrix::Zero(2 * n, 2 * n);
  for (int k = 0; k < n; ++k) {
    J(2 * k + 1, 2 * k) = -1.0;
    J(2 * k, 2 * k + 1) = 1.0;
  }
  return J;
}

AlternatingForm twist_first_slot(const AlternatingForm& psi, const Matrix& J) {
  if (psi.degree() != 3) throw GeometryError("twist_first_slot: expected a three-form");
  return AlternatingForm::from_evaluator(psi.dim(), 3, [&](const MultiIndex& I) {
    double v = 0.0;
    for (int m = 0; m < psi.dim(); ++m) {
      if (J(m, I[0]) == 0.0) continue;
      const int idx[3] = {m, I[1], I[2]};
      v += J(m, I[0]) * psi.at(idx);
    }
    return -v;
  });
}

Su3Forms su3_forms() {
  // (1,0)-forms theta_k = e^{2k} - i e^{2k+1}; Psi_+ = Re(theta_0 ^ theta_1 ^ theta_2)
  Su3Forms s;
  s.omega = kaehler_form(3);
  s.psi_plus = AlternatingForm(6, 3);
  for (int mask = 0; mask < 8; ++mask) {
    // choose real (bit 0) or imaginary (bit 1) part from each factor
    int imag = 0;
    int idx[3];
    for (int k = 0; k < 3; ++k) {
      const bool im = (mask >> k) & 1;
      imag += im;
      idx[k] = 2 * k + (im ? 1 : 0);
    }
    // product of (-i)^imag; keep the real part
    if (imag % 2 == 1) continue;
    const double c = (imag % 4 == 0) ? 1.0 : -1.0;
    s.psi_plus.add(MultiIndex{idx[0], idx[1], idx[2]}, c);
  }
  s.psi_minus = twist_first_slot(s.psi_plus, standard_complex_structure(3));
  return s;
}

G2Forms g2_forms() {
  G2Forms g{AlternatingForm(7, 3), AlternatingForm(7, 4)};
  for (int i = 0; i < 7; ++i) {
    g.phi += monomial(7, {i, (i + 1) % 7, (i + 3) % 7});
    g.star_phi += monomial(7, {(i + 2) % 7, (i + 4) % 7, (i + 5) % 7, (i + 6) % 7}, -1.0);
  }
  return g;
}

AlternatingForm spin7_form(int sigma) {
  if (sigma != 1 && sigma != -1) throw GeometryError("spin7_form: sigma must be +-1");
  AlternatingForm Phi(8, 4);
  for (int i = 0; i < 7; ++i) {
    Phi += monomial(8, {0, i + 1, (i + 1) % 7 + 1, (i + 3) % 7 + 1});
    Phi += monomial(8, {(i + 2) % 7 + 1, (i + 4) % 7 + 1, (i + 5) % 7 + 1, (i + 6) % 7 + 1}, -sigma);
  }
  return Phi;
}

AlternatingForm spin7_beta(int i, int sigma) {
  auto e = [](int k) { return k % 7 + 1; };
  return monomial(8, {e(i), 0}, sigma) + monomial(8, {e(i + 1), e(i + 3)}) + monomial(8, {e(i + 4), e(i + 5)}) +
         monomial(8, {e(i + 2), e(i + 6)});
}

Matrix spin7_operator(const AlternatingForm& Phi, const PointMetric& m) {
  if (Phi.dim() != 8 || Phi.degree() != 4) throw GeometryError("spin7_operator: expected a four-form on R^8");
  const int N = static_cast<int>(binomial(8, 2));
  Matrix L(N, N);
  for (int c = 0; c < N; ++c) {
    const AlternatingForm b = AlternatingForm::basis(8, MultiIndex::from_mask(colex_mask(2, c)));
    const AlternatingForm img = hodge_star(wedge(b, Phi), m);
    for (int r = 0; r < N; ++r) L(r, c) = img.coefficients()[static_cast<std::size_t>(r)];
  }
  return L;
}

Spin7Split spin7_split(const AlternatingForm& psi, const AlternatingForm& Phi) {
  if (psi.dim() != 8 || psi.degree() != 2) throw GeometryError("spin7_split: expected a two-form on R^8");
  const Matrix L = spin7_operator(Phi, PointMetric::euclidean(8));
  if ((L - L.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw GeometryError("spin7_split: operator not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(L);
  Spin7Split out;
  int plus = 0, minus = 0;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    const double ev = es.eigenvalues()[k];
    out.eigenvalues.push_back(ev);
    if (std::abs(ev - 1.0) < 1e-10) ++plus;
    else if (std::abs(ev + 3.0) < 1e-10) ++minus;
  }
  if (plus != 21 || minus != 7) throw GeometryError("spin7_split: operator does not have eigenvalues {1, -3} with multiplicities (21, 7)");
  const int N = static_cast<int>(L.rows());
  Vector x(N);
  for (int i = 0; i < N; ++i) x[i] = psi.coefficients()[static_cast<std::size_t>(i)];
  const Matrix I = Matrix::Identity(N, N);
  const Vector x21 = 0.25 * (L + 3.0 * I) * x;
  const Vector x7 = 0.25 * (I - L) * x;
  out.part21 = AlternatingForm(8, 2);
  out.part7 = AlternatingForm(8, 2);
  for (int i = 0; i < N; ++i) {
    out.part21.coefficients()[static_cast<std::size_t>(i)] = x21[i];
    out.part7.coefficients()[static_cast<std::size_t>(i)] = x7[i];
  }
  return out;
}

PointMetric induced_metric_spin7(const AlternatingForm& Phi) {
  const PointMetric e = PointMetric::euclidean(8);
  Matrix G(8, 8);
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b) {
      const AlternatingForm xa = contract(unit(8, a), Phi);
      const AlternatingForm xb = contract(unit(8, b), Phi);
      G(a, b) = -hodge_star(wedge(xa, hodge_star(xb, e)), e).coefficients()[0] / 7.0;
    }
  return PointMetric(G);
}

ContactModel contact_model(int n) {
  if (n < 1) throw GeometryError("contact_model: n must be >= 1");
  ContactModel c;
  c.n = n;
  const int d = 2 * n + 1;
  c.metric = PointMetric::euclidean(d);
  c.phi = Matrix::Zero(d, d);
  c.phi.topLeftCorner(2 * n, 2 * n) = standard_complex_structure(n);
  c.zeta = unit(d, 2 * n);
  c.eta = AlternatingForm::basis(d, MultiIndex{2 * n});
  c.F = two_form(c.phi);
  return c;
}

ThreeContactModel three_contact_model(int n) {
  if (n < 1) throw GeometryError("three_contact_model: n must be >= 1");
  ThreeContactModel t;
  t.n = n;
  const int d = 4 * n + 3;
  t.metric = PointMetric::euclidean(d);
  // model vector -> H^{n+1}: last quaternion carries the zeta directions in its imaginary part
  auto lift = [&](const Vector& v) {
    Vector h = Vector::Zero(4 * n + 4);
    h.head(4 * n) = v.head(4 * n);
    h.segment(4 * n + 1, 3) = v.tail(3);
    return h;
  };
  auto drop = [&](const Vector& h) {
    Vector v(d);
    v.head(4 * n) = h.head(4 * n);
    v.tail(3) = h.segment(4 * n + 1, 3);
    return v;
  };
  for (int i = 0; i < 3; ++i) {
    const Vector u = unit(4, i + 1);
    t.phi[i] = Matrix::Zero(d, d);
    for (int c = 0; c < d; ++c) {
      const Vector h = lift(unit(d, c));
      Vector hu(4 * n + 4);
      for (int q = 0; q <= n; ++q) hu.segment(4 * q, 4) = quat_mul(h.segment(4 * q, 4), u);
      t.phi[i].col(c) = -drop(hu);
    }
    t.zeta[i] = unit(d, 4 * n + i);
    t.eta[i] = AlternatingForm::basis(d, MultiIndex{4 * n + i});
    t.F[i] = two_form(t.phi[i]);
  }
  return t;
}

std::array<Matrix, 3> hyperkaehler_structures(int n) {
  std::array<Matrix, 3> A;
  for (int s = 0; s < 3; ++s) {
    A[s] = Matrix::Zero(4 * n, 4 * n);
    const Vector u = unit(4, s + 1);
    for (int q = 0; q < n; ++q)
      for (int c = 0; c < 4; ++c) A[s].block(4 * q, 4 * q + c, 4, 1) = quat_mul(u, unit(4, c));
  }
  return A;
}

std::array<AlternatingForm, 3> hyperkaehler_forms(int n) {
  const auto A = hyperkaehler_structures(n);
  return {two_form(A[0]), two_form(A[1]), two_form(A[2])};
}

AlternatingForm quaternionic_four_form(int n) {
  const auto w = hyperkaehler_forms(n);
  AlternatingForm out(4 * n, 4);
  for (const auto& a : w) out += wedge(a, a);
  return out;
}

namespace {
const std::vector<std::pair<CompositeKind, std::string>>& composite_labels() {
  static const std::vector<std::pair<CompositeKind, std::string>> labels = {
      {CompositeKind::eta_wedge_F_r, "eta^F^r"},
      {CompositeKind::F_r1, "F^(r+1)"},
      {CompositeKind::Psi_r, "Psi^r"},
      {CompositeKind::Omega_r, "Omega^r"},
      {CompositeKind::vartheta, "vartheta"},
      {CompositeKind::cyc_eta_F_F, "cyc-eta-F-F"},
      {CompositeKind::F1F2F3, "F1F2F3"},
      {CompositeKind::etaF_plus_etaF, "etaF+etaF"},
      {CompositeKind::FiFj, "FiFj"},
      {CompositeKind::Fk_eta_eta, "Fk+eta-eta"},
      {CompositeKind::cyc_eta_eta_F, "cyc-eta-eta-F"},
      {CompositeKind::psi_mixed, "psi-mixed"},
      {CompositeKind::eta_eta_eta, "eta-eta-eta"},
      {CompositeKind::Omega_quaternionic, "Omega-quaternionic"},
  };
  return labels;
}
}  // namespace

CompositeKind parse_composite_kind(const std::string& label) {
  for (const auto& [k, s] : composite_labels())
    if (s == label) return k;
  throw GeometryError("unknown composite kind: " + label);
}

std::string composite_label(CompositeKind kind) {
  for (const auto& [k, s] : composite_labels())
    if (k == kind) return s;
  return "?";
}

AlternatingForm compose_contact(CompositeKind kind, int r, const AlternatingForm& eta, const AlternatingForm& F) {
  switch (kind) {
    case CompositeKind::eta_wedge_F_r:
      return wedge(eta, wedge_power(F, r));
    case CompositeKind::F_r1:
      return wedge_power(F, r + 1);
    default:
      throw GeometryError("compose_contact: kind needs a 3-structure: " + composite_label(kind));
  }
}

AlternatingForm compose_three_contact(CompositeKind kind, int n, int r, const std::array<AlternatingForm, 3>& eta,
                                      const std::array<AlternatingForm, 3>& F, int i, int j) {
  const int d = eta[0].dim();
  auto cyc = [](int k, int s) { return (k + s) % 3; };
  switch (kind) {
    case CompositeKind::Psi_r: {
      AlternatingForm out(d, 2 * r + 1);
      for (int a = 0; a < 3; ++a) out += wedge(eta[a], wedge_power(F[a], r));
      return out;
    }
    case CompositeKind::Omega_r: {
      AlternatingForm out(d, 2 * r + 2);
      for (int a = 0; a < 3; ++a) out += wedge_power(F[a], r + 1);
      return out;
    }
    case CompositeKind::eta_eta_eta:
      return wedge(wedge(eta[0], eta[1]), eta[2]);
    case CompositeKind::vartheta: {
      AlternatingForm out = (2.0 * n + 3.0) * wedge(wedge(eta[0], eta[1]), eta[2]);
      for (int a = 0; a < 3; ++a) out += wedge(eta[a], F[a]);
      return out;
    }
    case CompositeKind::cyc_eta_F_F: {
      AlternatingForm out(d, 5);
      for (int a = 0; a < 3; ++a) out += wedge(eta[a], wedge(F[cyc(a, 1)], F[cyc(a, 2)]));
      return out;
    }
    case CompositeKind::F1F2F3:
      return wedge(wedge(F[0], F[1]), F[2]);
    case CompositeKind::etaF_plus_etaF:
      if (i == j) throw GeometryError("etaF+etaF needs i != j");
      return wedge(eta[i], F[j]) + wedge(eta[j], F[i]);
    case CompositeKind::FiFj:
      if (i == j) throw GeometryError("FiFj needs i != j");
      return wedge(F[i], F[j]);
    case CompositeKind::Fk_eta_eta: {
      const int k = i;
      return F[k] + (2.0 * n + 1.0) * wedge(eta[cyc(k, 1)], eta[cyc(k, 2)]);
    }
    case CompositeKind::cyc_eta_eta_F: {
      AlternatingForm out(d, 4);
      for (int a = 0; a < 3; ++a) out += wedge(wedge(eta[a], eta[cyc(a, 1)]), F[cyc(a, 2)]);
      return out;
    }
    case CompositeKind::psi_mixed:
      return compose_three_contact(CompositeKind::Omega_r, n, 1, eta, F) +
             (2.0 * n + 3.0) * compose_three_contact(CompositeKind::cyc_eta_eta_F, n, 0, eta, F);
    default:
      throw GeometryError("compose_three_contact: unsupported kind " + composite_label(kind));
  }
}

AlternatingForm contact_composites(int n, CompositeKind kind, int r, int i, int j) {
  if (r < 0) throw GeometryError("contact_composites: r must be >= 0");
  switch (kind) {
    case CompositeKind::eta_wedge_F_r:
    case CompositeKind::F_r1: {
      const ContactModel c = contact_model(n);
      return compose_contact(kind, r, c.eta, c.F);
    }
    case CompositeKind::Omega_quaternionic:
      // n counts blocks of R^8, so the form lives on H^{2n}
      return wedge_power(quaternionic_four_form(2 * n), std::max(r, 1));
    default: {
      const ThreeContactModel t = three_contact_model(n);
      return compose_three_contact(kind, n, r, t.eta, t.F, i, j);
    }
  }
}

}  // namespace harmonia
