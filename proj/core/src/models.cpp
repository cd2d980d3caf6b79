#include "harmonia/models.hpp"

#include "harmonia/gstructures.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace harmonia {

std::size_t EvalContext::at(const std::string& name) const {
  auto it = index.find(name);
  if (it == index.end()) throw GeometryError("field '" + name + "' is not part of this jet");
  return it->second;
}

void Model::add_field(FormField f, FieldSpec spec) {
  spec.name = f.name();
  fields_.push_back(std::move(f));
  specs_.push_back(std::move(spec));
}

bool Model::has_field(const std::string& name) const {
  return std::any_of(fields_.begin(), fields_.end(), [&](const FormField& f) { return f.name() == name; });
}

const FormField& Model::field(const std::string& name) const {
  for (const auto& f : fields_)
    if (f.name() == name) return f;
  throw UnknownName("model " + id + " has no field '" + name + "'");
}

const FieldSpec& Model::spec(const std::string& name) const {
  for (const auto& s : specs_)
    if (s.name == name) return s;
  throw UnknownName("model " + id + " has no field '" + name + "'");
}

std::vector<std::string> Model::field_names() const {
  std::vector<std::string> out;
  for (const auto& f : fields_) out.push_back(f.name());
  return out;
}

namespace {

using Checks = std::vector<std::string>;

const Checks kBasic = {"constant-length", "transpose", "laplacian-pairing", "metric-compat", "nanalap", "ricci-identity"};

Checks with(Checks base, std::initializer_list<const char*> more) {
  for (const char* m : more) base.emplace_back(m);
  return base;
}

double sq(double x) { return x * x; }

Vector insert_coordinate(const Vector& u, int k, double v) {
  Vector x(u.size() + 1);
  for (int i = 0, j = 0; i < x.size(); ++i) x[i] = i == k ? v : u[j++];
  return x;
}

// Graph charts x_k = s sqrt(1 - |u|^2) on the unit sphere in R^{n+1}.
std::shared_ptr<ModelManifold> unit_sphere(const std::string& name, int n) {
  std::vector<Chart> charts;
  for (int k = 0; k <= n; ++k)
    for (int s : {1, -1}) {
      Chart c;
      c.name = "x" + std::to_string(k) + (s > 0 ? "+" : "-");
      c.lo = Vector::Constant(n, -0.8);
      c.hi = Vector::Constant(n, 0.8);
      c.valid = [](const Vector& u) { return u.squaredNorm() < 0.95; };
      c.accept = [](const Vector& u) { return u.squaredNorm() <= 0.75; };
      c.embed = [k, s](const Vector& u) { return insert_coordinate(u, k, s * std::sqrt(1.0 - u.squaredNorm())); };
      c.orientation = [](const Vector&, const Vector& x, const Matrix& J) {
        Matrix M(x.size(), x.size());
        M.col(0) = x;
        M.rightCols(J.cols()) = J;
        return M.determinant() > 0.0 ? 1 : -1;
      };
      c.locate = [k, s, n](const Vector& x) -> std::optional<Vector> {
        if (s * x[k] <= 0.0) return std::nullopt;
        Vector u(n);
        for (int i = 0, j = 0; i <= n; ++i)
          if (i != k) u[j++] = x[i];
        return u;
      };
      charts.push_back(std::move(c));
    }
  return std::make_shared<ModelManifold>(name, n, n + 1, Flavor::embedded, std::move(charts));
}

Chart box_chart(const std::string& name, int n, double lo, double hi) {
  Chart c;
  c.name = name;
  c.lo = Vector::Constant(n, lo);
  c.hi = Vector::Constant(n, hi);
  return c;
}

// r_{ij} = <nabla_a form_i, basis_a> fitted jointly over points and directions
std::pair<double, double> fit_over(const std::vector<FirstOrder>& fos,
                                   const std::function<void(const FirstOrder&, ScalarFit&)>& add) {
  ScalarFit fit;
  for (const auto& fo : fos) add(fo, fit);
  return {fit.value(), fit.residual()};
}

std::vector<double> parse_params(const std::string& s, std::size_t count, const std::string& id) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw UnknownName("bad parameter '" + tok + "' in " + id);
    }
  }
  if (out.size() != count) throw UnknownName(id + ": expected " + std::to_string(count) + " parameters");
  return out;
}

int parse_int(const std::string& s, const std::string& id) {
  const auto v = parse_params(s, 1, id);
  if (v[0] != std::floor(v[0])) throw UnknownName(id + ": expected an integer parameter");
  return static_cast<int>(v[0]);
}

FieldSpec eigen_spec(Checks checks, std::function<double(const EvalContext&)> eig, std::string formula) {
  FieldSpec s;
  s.checks = std::move(checks);
  s.eigenvalue = std::move(eig);
  s.eigen_formula = std::move(formula);
  return s;
}

std::function<double(const EvalContext&)> constant_times(const std::string& name, double c, int power) {
  return [name, c, power](const EvalContext& ctx) { return c * std::pow(ctx.constants.at(name), power); };
}

// ---------------------------------------------------------------- round sphere, flat

Model round_sphere(int n) {
  if (n < 2 || n > 8) throw UnknownName("round-sphere:n needs 2 <= n <= 8");
  Model m;
  m.family = "round-sphere";
  m.params["n"] = n;
  m.manifold = unit_sphere("round-sphere:" + std::to_string(n), n);
  m.einstein = n - 1;
  // volume form from the ambient: x -| vol
  AlternatingForm vol(n + 1, n + 1);
  vol.coefficients()[0] = 1.0;
  m.add_field(FormField::from_ambient("vol", n, [vol](const Vector& x) { return contract(x, vol); }, true),
              eigen_spec(with(kBasic, {"eigen", "harmonic-section", "harmonic-map", "two-route", "tension",
                                        "covariant-oracle", "curvature-oracle", "einstein", "mc-area"}),
                         [](const EvalContext&) { return 0.0; }, "0"));
  // dual of the rotation field in the (x0, x1) plane
  FieldSpec killing;
  killing.checks = {"metric-compat", "nanalap", "ricci-identity", "covariant-oracle"};
  m.add_field(FormField::from_ambient("killing", 1,
                                      [n](const Vector& x) {
                                        Vector v = Vector::Zero(n + 1);
                                        v[0] = -x[1];
                                        v[1] = x[0];
                                        return one_form(v);
                                      }),
              killing);
  FieldSpec height;
  height.checks = {"metric-compat", "nanalap", "ricci-identity", "covariant-oracle"};
  m.add_field(FormField::from_ambient("height", 1,
                                      [n](const Vector&) {
                                        Vector v = Vector::Zero(n + 1);
                                        v[0] = 1.0;
                                        return one_form(v);
                                      }),
              height);
  return m;
}

Model flat_space(int n) {
  if (n < 1 || n > 8) throw UnknownName("flat:n needs 1 <= n <= 8");
  Model m;
  m.family = "flat";
  m.params["n"] = n;
  Chart c = box_chart("box", n, -1.0, 1.0);
  c.metric = [n](const Vector&) { return Matrix(Matrix::Identity(n, n)); };
  c.embed = [](const Vector& u) { return u; };
  c.log_conformal = [](const Vector&) { return 0.0; };
  std::vector<Chart> charts{c};
  m.manifold = std::make_shared<ModelManifold>("flat:" + std::to_string(n), n, n, Flavor::embedded, charts);
  m.einstein = 0.0;
  AlternatingForm vol(n, n);
  vol.coefficients()[0] = 1.0;
  m.add_field(FormField::from_ambient("vol", n, [vol](const Vector&) { return vol; }, true),
              eigen_spec(with(kBasic, {"eigen", "harmonic-section", "harmonic-map", "two-route", "tension", "bending",
                                        "spectrum", "covariant-oracle", "curvature-oracle", "einstein"}),
                         [](const EvalContext&) { return 0.0; }, "0"));
  if (n >= 2) {
    FieldSpec wave;
    wave.checks = {"metric-compat", "nanalap", "ricci-identity", "covariant-oracle"};
    m.add_field(FormField::from_ambient("wave", 2,
                                        [n](const Vector& x) {
                                          AlternatingForm w(n, 2);
                                          w.set(MultiIndex{0, 1}, std::sin(x[0]) + x[n - 1] * x[n - 1]);
                                          return w;
                                        }),
                wave);
  }
  return m;
}

// ---------------------------------------------------------------- nearly Kaehler S^6

Model nk_s6() {
  Model m;
  m.family = "nk-s6";
  m.manifold = unit_sphere("nk-s6", 6);
  m.einstein = 5.0;
  const AlternatingForm phi = g2_forms().phi;
  // J_x y = x * y (octonionic cross product), so omega = <., J.> = -x -| phi
  auto cross = [phi](const Vector& x) {
    Matrix J = Matrix::Zero(7, 7);
    for (int a = 0; a < 7; ++a)
      for (int b = 0; b < 7; ++b)
        for (int c = 0; c < 7; ++c) {
          const std::array<int, 3> idx{a, b, c};
          J(c, b) += phi.at(idx) * x[a];
        }
    return J;
  };
  auto omega = [phi](const Vector& x) { return -contract(x, phi); };
  auto psi_plus = [phi](const Vector&) { return -phi; };
  auto psi_minus = [phi, cross](const Vector& x) { return twist_first_slot(-phi, cross(x)); };

  auto w2 = constant_times("w", 1.0, 2);
  m.constants.push_back({"w", {"omega", "psi-plus"}, [](const std::vector<FirstOrder>& fos) {
                           return fit_over(fos, [](const FirstOrder& fo, ScalarFit& f) {
                             for (int a = 0; a < 6; ++a)
                               f.add(fo.nabla[0][a], coord_contract(a, fo.value[1]), fo.local.metric);
                           });
                         }});
  m.relations.push_back({"5 w^2 = rho", [](const Constants& c, double rho) {
                           return std::pair{5.0 * sq(c.at("w")), rho};
                         }});
  auto iso = [](double c) {
    return [c](const EvalContext& ctx) { return std::vector<double>(6, c * sq(ctx.constants.at("w"))); };
  };
  const Checks full = with(kBasic, {"structure", "eigen", "harmonic-section", "harmonic-map", "two-route", "spectrum",
                                    "tension", "bending", "covariant-oracle"});
  FieldSpec s_omega = eigen_spec(with(full, {"pair-thm", "curvature-oracle", "einstein", "relations", "mc-area"}),
                                 [w2](const EvalContext& c) { return 4.0 * w2(c); }, "4 w^2");
  s_omega.harmonic_section = s_omega.harmonic_map = true;
  s_omega.partner = "psi-plus";
  s_omega.expected_spectrum = iso(4.0);
  m.add_field(FormField::from_ambient("omega", 2, omega, true), s_omega);

  FieldSpec s_pp = eigen_spec(full, [w2](const EvalContext& c) { return 3.0 * w2(c); }, "3 w^2");
  s_pp.harmonic_section = s_pp.harmonic_map = true;
  s_pp.expected_spectrum = iso(12.0);
  m.add_field(FormField::from_ambient("psi-plus", 3, psi_plus, true), s_pp);
  FieldSpec s_pm = s_pp;
  m.add_field(FormField::from_ambient("psi-minus", 3, psi_minus, true), s_pm);

  // omega ^ omega = 2 *omega, so it shares the eigenvalue of omega
  FieldSpec s_ww = eigen_spec(with(kBasic, {"eigen", "harmonic-section", "harmonic-map", "two-route"}),
                              [w2](const EvalContext& c) { return 4.0 * w2(c); }, "4 w^2");
  s_ww.harmonic_section = s_ww.harmonic_map = true;
  m.add_field(FormField::from_ambient(
                  "omega-wedge-omega", 4, [omega](const Vector& x) { return wedge(omega(x), omega(x)); }, true),
              s_ww);
  return m;
}

// ---------------------------------------------------------------- nearly parallel G2 S^7

Model g2_s7() {
  Model m;
  m.family = "g2-s7";
  m.manifold = unit_sphere("g2-s7", 7);
  m.einstein = 6.0;
  const AlternatingForm Phi = spin7_form(1);
  auto phi = [Phi](const Vector& x) { return contract(x, Phi); };
  m.constants.push_back({"k", {"phi", "star-phi"}, [](const std::vector<FirstOrder>& fos) {
                           auto r = fit_over(fos, [](const FirstOrder& fo, ScalarFit& f) {
                             for (int a = 0; a < 7; ++a)
                               f.add(fo.nabla[0][a], coord_contract(a, fo.value[1]), fo.local.metric);
                           });
                           return std::pair{4.0 * r.first, r.second};
                         }});
  m.relations.push_back({"rho = k^2/16", [](const Constants& c, double rho) {
                           return std::pair{rho, sq(c.at("k")) / 16.0};
                         }});
  auto k2 = constant_times("k", 1.0, 2);
  auto iso = [](double c) {
    return [c](const EvalContext& ctx) { return std::vector<double>(7, c * sq(ctx.constants.at("k"))); };
  };
  const Checks full = with(kBasic, {"structure", "eigen", "harmonic-section", "harmonic-map", "two-route", "spectrum",
                                    "tension", "bending", "covariant-oracle"});
  FieldSpec s_phi = eigen_spec(with(full, {"pair-thm", "curvature-oracle", "einstein", "relations"}),
                               [k2](const EvalContext& c) { return k2(c) / 4.0; }, "k^2/4");
  s_phi.harmonic_section = s_phi.harmonic_map = true;
  s_phi.partner = "star-phi";
  s_phi.expected_spectrum = iso(1.5);
  m.add_field(FormField::from_ambient("phi", 3, phi, true), s_phi);

  FieldSpec s_star = eigen_spec(full, [k2](const EvalContext& c) { return k2(c) / 4.0; }, "k^2/4");
  s_star.harmonic_section = s_star.harmonic_map = true;
  s_star.expected_spectrum = iso(6.0);
  m.add_field(FormField(
                  "star-phi", 4,
                  [phi](const LocalData& l) { return hodge_star(pullback(phi(l.x), l.jac), l.metric); }, true),
              s_star);
  return m;
}

// ---------------------------------------------------------------- a-Sasakian S^{2n+1}

Model sasakian(int n) {
  if (n < 1 || n > 3) throw UnknownName("sasakian-s{2n+1} is built for n = 1, 2, 3");
  Model m;
  m.family = "sasakian";
  m.params["n"] = n;
  const std::string name = "sasakian-s" + std::to_string(2 * n + 1);
  m.manifold = unit_sphere(name, 2 * n + 1);
  m.einstein = 2.0 * n;
  const Matrix J0 = standard_complex_structure(n + 1);
  const AlternatingForm F0 = -kaehler_form(n + 1);
  auto eta = [J0](const Vector& x) { return one_form(J0 * x); };
  auto F = [F0](const Vector&) { return F0; };
  m.constants.push_back({"a", {"F", "eta"}, [n](const std::vector<FirstOrder>& fos) {
                           // nabla_X F = -a X^flat ^ eta
                           return fit_over(fos, [n](const FirstOrder& fo, ScalarFit& f) {
                             for (int a = 0; a <= 2 * n; ++a)
                               f.add(fo.nabla[0][a], -coord_flat_wedge(a, fo.value[1], fo.local.metric),
                                     fo.local.metric);
                           });
                         }});
  m.relations.push_back({"rho = 2n a^2", [n](const Constants& c, double rho) {
                           return std::pair{rho, 2.0 * n * sq(c.at("a"))};
                         }});
  auto a2 = constant_times("a", 1.0, 2);
  const Checks full =
      with(kBasic, {"eigen", "harmonic-section", "harmonic-map", "two-route", "tension", "covariant-oracle"});
  auto name_ef = [](int r) {
    return r == 0 ? std::string("eta") : r == 1 ? std::string("eta-wedge-F") : "eta-wedge-F^" + std::to_string(r);
  };
  auto name_f = [](int r) { return r == 1 ? std::string("F") : "F^" + std::to_string(r); };
  for (int r = 0; r <= n; ++r) {
    FieldSpec s = eigen_spec(r == 0 ? with(full, {"structure", "curvature-oracle", "einstein", "relations"}) : full,
                             [a2, n, r](const EvalContext& c) { return 2.0 * (n - r) * a2(c); },
                             "2(n-r) a^2, r=" + std::to_string(r));
    s.harmonic_section = s.harmonic_map = true;
    if (r + 1 <= n) {
      s.partner = name_f(r + 1);
      s.checks.push_back("pair-thm");
    }
    m.add_field(FormField::from_ambient(
                    name_ef(r), 2 * r + 1,
                    [eta, F0, r](const Vector& x) { return wedge(eta(x), wedge_power(F0, r)); }, true),
                s);
  }
  for (int r = 0; r + 1 <= n; ++r) {
    FieldSpec s = eigen_spec(full, [a2, r](const EvalContext& c) { return 2.0 * (r + 1) * a2(c); },
                             "2(r+1) a^2, r=" + std::to_string(r));
    s.harmonic_section = s.harmonic_map = true;
    if (r == 0) {
      s.variation = "phivar";
      s.checks.push_back("variation");
    }
    m.add_field(FormField::from_ambient(name_f(r + 1), 2 * r + 2,
                                        [F0, r](const Vector&) { return wedge_power(F0, r + 1); }, true),
                s);
  }
  // eta ^ dx0 made orthogonal to F
  FieldSpec var;
  var.checks = {"metric-compat", "nanalap"};
  m.add_field(FormField("phivar", 2,
                        [eta, F, n](const LocalData& l) {
                          Vector e0 = Vector::Zero(2 * n + 2);
                          e0[0] = 1.0;
                          const AlternatingForm v = pullback(wedge(eta(l.x), one_form(e0)), l.jac);
                          const AlternatingForm f = pullback(F(l.x), l.jac);
                          return v - (form_inner(v, f, l.metric) / form_norm2(f, l.metric)) * f;
                        }),
              var);
  return m;
}

// ---------------------------------------------------------------- 3-Sasakian S^7

Model three_sasakian_s7() {
  static constexpr int n = 1;
  Model m;
  m.family = "3sasakian";
  m.manifold = unit_sphere("3sasakian-s7", 7);
  m.einstein = 2.0 * (2 * n + 1);
  // right multiplication by the quaternion units on each H factor of H^2
  std::array<Matrix, 3> R;
  const AlgebraTable& H = AlgebraTable::quaternions();
  for (int i = 0; i < 3; ++i) {
    R[i] = Matrix::Zero(8, 8);
    Vector unit = Vector::Zero(4);
    unit[i + 1] = 1.0;
    for (int blk = 0; blk < 2; ++blk)
      for (int b = 0; b < 4; ++b) {
        Vector e = Vector::Zero(4);
        e[b] = 1.0;
        R[i].block(4 * blk, 4 * blk + b, 4, 1) = algebra_mul(H, e, unit);
      }
  }
  struct Prims {
    std::array<AlternatingForm, 3> eta, F;
  };
  auto prims = [R](const LocalData& l) {
    Prims p;
    for (int i = 0; i < 3; ++i) {
      p.eta[i] = pullback(one_form(R[i] * l.x), l.jac);
      p.F[i] = pullback(-two_form(R[i]), l.jac);
    }
    return p;
  };
  auto composite = [prims](CompositeKind kind, int r, int i, int j) {
    return [prims, kind, r, i, j](const LocalData& l) {
      const Prims p = prims(l);
      return compose_three_contact(kind, n, r, p.eta, p.F, i, j);
    };
  };
  m.constants.push_back({"a", {"F1", "F2", "F3", "eta1", "eta2", "eta3"}, [](const std::vector<FirstOrder>& fos) {
                           // nabla_X F_i = a X^flat ^ eta_i
                           return fit_over(fos, [](const FirstOrder& fo, ScalarFit& f) {
                             for (int i = 0; i < 3; ++i)
                               for (int a = 0; a < 7; ++a)
                                 f.add(fo.nabla[i][a], coord_flat_wedge(a, fo.value[i + 3], fo.local.metric),
                                       fo.local.metric);
                           });
                         }});
  m.relations.push_back({"rho = 2(2n+1) a^2", [](const Constants& c, double rho) {
                           return std::pair{rho, 2.0 * (2 * n + 1) * sq(c.at("a"))};
                         }});
  auto a2 = constant_times("a", 1.0, 2);
  const Checks full = with(kBasic, {"eigen", "harmonic-section", "harmonic-map", "two-route", "tension"});
  auto add = [&](const std::string& name, int degree, FormField::Eval eval, double eig, const std::string& formula,
                 const std::string& partner = "", Checks extra = {}, std::vector<std::string> aux = {}) {
    FieldSpec s = eigen_spec(full, [a2, eig](const EvalContext& c) { return eig * a2(c); }, formula);
    s.harmonic_section = s.harmonic_map = true;
    s.aux = std::move(aux);
    for (auto& e : extra) s.checks.push_back(e);
    if (!partner.empty()) {
      s.partner = partner;
      s.checks.push_back("pair-thm");
    }
    m.add_field(FormField(name, degree, std::move(eval), true), s);
  };
  for (int i = 0; i < 3; ++i) {
    add("eta" + std::to_string(i + 1), 1, [prims, i](const LocalData& l) { return prims(l).eta[i]; }, 6.0,
        "2(2n+1) a^2", "F" + std::to_string(i + 1));
  }
  for (int i = 0; i < 3; ++i) {
    add("F" + std::to_string(i + 1), 2, [prims, i](const LocalData& l) { return prims(l).F[i]; }, 2.0, "2 a^2");
  }
  for (int r = 0; r <= 2 * n + 1; ++r) {
    const std::string rs = std::to_string(r);
    add("Psi-" + rs, 2 * r + 1, composite(CompositeKind::Psi_r, r, 0, 1), 2.0 * (2 * n + 1 - r),
        "2(2n+1-r) a^2, r=" + rs, r <= 2 * n ? "Omega-" + rs : "");
  }
  for (int r = 0; r <= 2 * n; ++r) {
    const std::string rs = std::to_string(r);
    add("Omega-" + rs, 2 * r + 2, composite(CompositeKind::Omega_r, r, 0, 1), 2.0 * (r + 1), "2(r+1) a^2, r=" + rs);
  }
  // cyc-eta-F-F and F1F2F3 vanish identically when n = 1
  add("etaF+etaF", 3, composite(CompositeKind::etaF_plus_etaF, 0, 0, 1), 4.0 * n, "4n a^2", "FiFj");
  add("FiFj", 4, composite(CompositeKind::FiFj, 0, 0, 1), 4.0, "4 a^2");
  add("vartheta", 3, composite(CompositeKind::vartheta, 0, 0, 1), 12.0 * (n + 1), "12(n+1) a^2", "",
      {"structure", "three-sasakian-identities", "einstein", "relations", "covariant-oracle", "curvature-oracle"},
      {"eta1", "eta2", "eta3", "F1", "F2", "F3"});
  add("psi-mixed", 4, composite(CompositeKind::psi_mixed, 0, 0, 1), 8.0 * (n + 2), "8(n+2) a^2");
  add("Fk-eta-eta", 2, composite(CompositeKind::Fk_eta_eta, 0, 0, 1), 2.0 * (4 * n + 3), "2(4n+3) a^2");
  return m;
}

// ---------------------------------------------------------------- b-Kenmotsu warped products

// sigma(t) with its derivative, metric dt^2 + sigma <.,.> on R x C^2
struct Warp {
  std::function<double(double)> sigma;
  double q = 0.0;          // power, when sigma = C (t+K)^q
  bool power_law = false;
};

Model kenmotsu(const std::string& id, const Warp& w) {
  static constexpr int n = 2;
  static constexpr int dim = 2 * n + 1;
  Model m;
  m.family = "kenmotsu";
  Chart c;
  c.name = "product";
  c.lo = Vector::Constant(dim, -1.0);
  c.hi = Vector::Constant(dim, 1.0);
  c.lo[dim - 1] = 0.5;
  c.hi[dim - 1] = 1.5;
  auto sigma = w.sigma;
  c.metric = [sigma](const Vector& u) {
    Matrix g = Matrix::Identity(dim, dim) * sigma(u[dim - 1]);
    g(dim - 1, dim - 1) = 1.0;
    return g;
  };
  for (double t : {0.5, 1.0, 1.5})
    if (!(sigma(t) > 0.0) || !std::isfinite(sigma(t))) throw UnknownName(id + ": warping must be positive on t in [0.5,1.5]");
  m.manifold = std::make_shared<ModelManifold>(id, dim, dim, Flavor::direct, std::vector<Chart>{c});
  AlternatingForm w0(dim, 2);
  for (int k = 0; k < n; ++k) w0.set(MultiIndex{2 * k, 2 * k + 1}, 1.0);
  const AlternatingForm eta = AlternatingForm::basis(dim, MultiIndex{dim - 1});

  m.constants.push_back({"b-fit", {"eta", "F"}, [](const std::vector<FirstOrder>& fos) {
                           // pointwise b; value is the mean, residual the worst of both structure equations
                           double sum = 0.0, worst = 0.0;
                           for (const auto& fo : fos) {
                             const PointMetric& g = fo.local.metric;
                             const double b = kenmotsu_b(fo, 0);
                             sum += b;
                             const Vector eta_c = components(fo.value[0]);
                             double big = 0.0, miss = 0.0;
                             for (int a = 0; a < dim; ++a) {
                               const AlternatingForm pe =
                                   b * (one_form(eta_c[a] * eta_c) - one_form(g.g().col(a)));
                               // nabla_X F = b eta ^ (X -| F)
                               const AlternatingForm pf = b * wedge(fo.value[0], coord_contract(a, fo.value[1]));
                               miss = std::max({miss, std::sqrt(form_norm2(fo.nabla[0][a] - pe, g)),
                                                std::sqrt(form_norm2(fo.nabla[1][a] - pf, g))});
                               big = std::max({big, std::sqrt(form_norm2(fo.nabla[0][a], g)),
                                               std::sqrt(form_norm2(fo.nabla[1][a], g))});
                             }
                             worst = std::max(worst, big > 0.0 ? miss / big : miss);
                           }
                           return std::pair{sum / static_cast<double>(fos.size()), worst};
                         }});

  // b and db(zeta) at the jet centre
  auto b_of = [](const EvalContext& ctx) { return kenmotsu_b(ctx.jet.center(), ctx.at("eta")); };
  auto f_of = [](const EvalContext& ctx) {
    const std::size_t e = ctx.at("eta");
    const Vector zeta = ctx.jet.metric().g_inv() * components(ctx.jet.value(e));
    double f = 0.0;
    for (int a = 0; a < dim; ++a)
      if (zeta[a] != 0.0) f += zeta[a] * ctx.jet.derivative(a, [e](const FirstOrder& fo) { return kenmotsu_b(fo, e); });
    return f;
  };
  auto near = [](double x, double y) { return std::abs(x - y) <= 1e-9 * std::max(1.0, std::abs(y)); };
  const Checks full = with(kBasic, {"eigen", "harmonic-section", "harmonic-map", "two-route", "spectrum", "tension",
                                    "bending", "kenmotsu-prop"});
  auto add = [&](const std::string& name, int r, bool with_eta) {
    FieldSpec s;
    s.checks = full;
    s.aux = {"eta"};
    s.harmonic_section = true;
    // ||F^r||^2 from the field value itself
    const double deg_factor = with_eta ? 2.0 * r + 1.0 : 1.0;
    auto fr2 = [deg_factor](const EvalContext& ctx) {
      return form_norm2(ctx.jet.value(ctx.field), ctx.jet.metric()) / deg_factor;
    };
    if (with_eta) {
      s.eigenvalue = [b_of, r](const EvalContext& ctx) { return 2.0 * (n - r) * sq(b_of(ctx)); };
      s.eigen_formula = "2(n-r) b^2, r=" + std::to_string(r);
      s.expected_pairing = [=](const EvalContext& ctx) {
        const double b = b_of(ctx), f = f_of(ctx);
        return Vector(2.0 * (2 * r + 1) * (n - r) * fr2(ctx) * b * (b * b - f) *
                      components(ctx.jet.value(ctx.at("eta"))));
      };
      s.pairing_condition = [=](const EvalContext& ctx) {
        const double b = b_of(ctx);
        return (n - r) * (f_of(ctx) - b * b) / std::max(b * b, 1e-300);
      };
      s.expected_spectrum = [=](const EvalContext& ctx) {
        std::vector<double> k(dim, (2.0 * r + 1) * (n - r) / n * sq(b_of(ctx)) * fr2(ctx));
        k[0] = 0.0;
        return k;
      };
      s.harmonic_map = r == n || (w.power_law && near(w.q, 2.0));
    } else {
      s.eigenvalue = [b_of, r](const EvalContext& ctx) { return 2.0 * r * sq(b_of(ctx)); };
      s.eigen_formula = "2r b^2, r=" + std::to_string(r);
      s.expected_pairing = [=](const EvalContext& ctx) {
        const double b = b_of(ctx), f = f_of(ctx);
        return Vector(2.0 * r * b * fr2(ctx) * (r * b * b - f) * components(ctx.jet.value(ctx.at("eta"))));
      };
      s.pairing_condition = [=](const EvalContext& ctx) {
        const double b = b_of(ctx);
        return (f_of(ctx) - r * b * b) / std::max(b * b, 1e-300);
      };
      s.expected_spectrum = [=](const EvalContext& ctx) {
        std::vector<double> k(dim, static_cast<double>(r * r) / n * sq(b_of(ctx)) * fr2(ctx));
        k[0] = 0.0;
        return k;
      };
      s.harmonic_map = w.power_law && near(w.q * r, 2.0);
    }
    if (name == "eta") s.checks.push_back("structure");
    m.add_field(FormField(name, with_eta ? 2 * r + 1 : 2 * r,
                          [sigma, w0, eta, r, with_eta](const LocalData& l) {
                            const AlternatingForm Fr = wedge_power(sigma(l.x[dim - 1]) * w0, r);
                            return with_eta ? wedge(eta, Fr) : Fr;
                          },
                          true),
                s);
  };
  add("eta", 0, true);
  add("F", 1, false);
  add("F^2", 2, false);
  add("eta-wedge-F", 1, true);
  add("eta-wedge-F^2", 2, true);
  return m;
}

// ---------------------------------------------------------------- locally conformal parallel cones

// R^N minus the origin with g = e^{2f} delta, f = -ln|x| unless given
struct Cone {
  std::function<double(const Vector&)> f;
  double lo = -2.0, hi = 2.0;
  double rmin = 0.6, rmax = 1.8;
  bool punctured = true;
};

std::shared_ptr<ModelManifold> conformal_flat(const std::string& name, int N, const Cone& cone) {
  Chart c = box_chart("cartesian", N, cone.lo, cone.hi);
  auto f = cone.f;
  c.metric = [f, N](const Vector& x) { return Matrix(Matrix::Identity(N, N) * std::exp(2.0 * f(x))); };
  c.log_conformal = f;
  if (cone.punctured) c.valid = [](const Vector& x) { return x.norm() > 0.3; };
  const double rmin = cone.rmin, rmax = cone.rmax;
  c.accept = [rmin, rmax](const Vector& x) { return x.norm() >= rmin && x.norm() <= rmax; };
  return std::make_shared<ModelManifold>(name, N, N, Flavor::direct, std::vector<Chart>{c});
}

double theta2_of(const EvalContext& ctx) {
  const Vector th = components(fit_lee_form(ctx.jet.center(), ctx.field).theta);
  return th.dot(ctx.jet.metric().g_inv() * th);
}

Model lck(const std::string& id, const std::string& family, int n, const Cone& cone, bool parallel) {
  if (n < 1 || n > 4) throw UnknownName(id + ": complex dimension must be 1..4");
  Model m;
  m.family = family;
  m.params["n"] = n;
  m.manifold = conformal_flat(id, 2 * n, cone);
  const AlternatingForm w0 = kaehler_form(n);
  auto f = cone.f;
  for (int r = 1; r <= n; ++r) {
    FieldSpec s;
    // the top power is a multiple of the volume form
    s.checks = with(kBasic, {r == n ? "harmonic-map" : "lcp", "harmonic-section", "two-route", "tension"});
    s.aux = {"omega"};
    s.theta_parallel = parallel;
    s.harmonic_section = (2 * r == n) || r == n;
    s.harmonic_map = r == n || (2 * r == n && parallel);
    if (2 * r == n) {
      s.eigenvalue = [n, r](const EvalContext& ctx) { return 2.0 * (n - r) * theta2_of(ctx); };
      s.eigen_formula = "2(n-r) |theta|^2";
      s.checks.push_back("eigen");
      s.checks.push_back("harmonic-map");
      s.checks.push_back("lck-defect");
      s.lck_N = n / 2.0;
      s.lck_prefactor = 0.5 * (n - 1) * sq(factorial(n));
    }
    if (r == n) {
      s.eigenvalue = [](const EvalContext&) { return 0.0; };
      s.eigen_formula = "0";
      if (std::find(s.checks.begin(), s.checks.end(), "eigen") == s.checks.end()) s.checks.push_back("eigen");
    }
    m.add_field(FormField(r == 1 ? std::string("omega") : "omega^" + std::to_string(r), 2 * r,
                          [f, w0, r](const LocalData& l) { return std::exp(2.0 * r * f(l.x)) * wedge_power(w0, r); },
                          true),
                s);
  }
  return m;
}

Model lcp_spin7() {
  Model m;
  m.family = "lcp-spin7";
  Cone cone;
  cone.f = [](const Vector& x) { return -std::log(x.norm()); };
  m.manifold = conformal_flat("lcp-spin7", 8, cone);
  const AlternatingForm Phi0 = spin7_form(1);
  FieldSpec s = eigen_spec(with(kBasic, {"lcp", "eigen", "harmonic-section", "harmonic-map", "two-route", "tension",
                                         "spin7-lee"}),
                           [](const EvalContext& ctx) { return 0.25 * 16.0 * theta2_of(ctx); }, "|theta_spin|^2 / 4");
  s.harmonic_section = s.harmonic_map = true;
  s.theta_parallel = true;
  s.lee_scale = 4.0;
  m.add_field(FormField("Phi", 4, [Phi0](const LocalData& l) { return std::pow(l.x.norm(), -4.0) * Phi0; }, true), s);
  return m;
}

Model lc_hk(int n) {
  if (n != 1) throw UnknownName("lc-hk:n is built for n = 1 (R^8)");
  Model m;
  m.family = "lc-hk";
  m.params["n"] = n;
  Cone cone;
  cone.f = [](const Vector& x) { return -std::log(x.norm()); };
  m.manifold = conformal_flat("lc-hk:1", 8, cone);
  const AlternatingForm Om = quaternionic_four_form(2);
  FieldSpec s = eigen_spec(with(kBasic, {"lcp", "eigen", "harmonic-section", "two-route"}),
                           [](const EvalContext& ctx) { return 4.0 * theta2_of(ctx); }, "4 |theta|^2");
  s.harmonic_section = true;
  s.theta_parallel = true;
  m.add_field(FormField("Omega", 4, [Om](const LocalData& l) { return std::pow(l.x.norm(), -4.0) * Om; }, true), s);
  return m;
}

}  // namespace

double kenmotsu_b(const FirstOrder& fo, std::size_t eta) {
  const PointMetric& g = fo.local.metric;
  const Vector e = components(fo.value[eta]);
  ScalarFit fit;
  for (int a = 0; a < g.dim(); ++a) fit.add(fo.nabla[eta][a], one_form(e[a] * e) - one_form(g.g().col(a)), g);
  return fit.value();
}

const std::vector<std::string>& catalog_ids() {
  static const std::vector<std::string> ids = {
      "flat:3",        "round-sphere:2", "round-sphere:3",  "nk-s6",        "g2-s7",       "sasakian-s3",
      "sasakian-s5",   "3sasakian-s7",   "kenmotsu:1,1,0",  "kenmotsu:2,1,0", "kenmotsu-pow:2,1,0",
      "kenmotsu-pow:1.5,1,0", "kenmotsu-exp:1", "hopf-lck:2", "lck-cone:3", "lck-conformal:2", "lcp-spin7",
      "lc-hk:1"};
  return ids;
}

const std::vector<std::pair<std::string, std::string>>& catalog_families() {
  static const std::vector<std::pair<std::string, std::string>> fam = {
      {"flat:n", "Euclidean R^n"},
      {"round-sphere:n", "unit S^n, graph charts"},
      {"nk-s6", "nearly Kaehler S^6 in Im O"},
      {"g2-s7", "nearly parallel G2 S^7 in O"},
      {"sasakian-s{2n+1}", "Sasakian S^{2n+1} in C^{n+1}, n = 1..3"},
      {"3sasakian-s7", "3-Sasakian S^7 in H^2"},
      {"kenmotsu:r,C,K", "R x C^2 warped by sigma = C (t+K)^{2/r}"},
      {"kenmotsu-pow:q,C,K", "R x C^2 warped by sigma = C (t+K)^q"},
      {"kenmotsu-exp:c", "R x C^2 warped by sigma = e^{ct} (constant b)"},
      {"hopf-lck:n", "C^n minus 0 with g = delta/|x|^2"},
      {"lck-cone:n", "same cone, used as the 2r != n control"},
      {"lck-conformal:n", "C^n with g = e^{2f} delta, non-radial f"},
      {"lcp-spin7", "R^8 minus 0 with g = delta/|x|^2, Phi = |x|^-4 Phi_0"},
      {"lc-hk:n", "R^8n minus 0 with Omega = |x|^-4 Omega_0, n = 1"},
  };
  return fam;
}

Model build(const std::string& id) {
  const auto colon = id.find(':');
  const std::string head = id.substr(0, colon);
  const std::string tail = colon == std::string::npos ? "" : id.substr(colon + 1);
  auto need_tail = [&] {
    if (tail.empty()) throw UnknownName(id + ": missing parameters");
  };
  Model m;
  if (head == "round-sphere") {
    need_tail();
    m = round_sphere(parse_int(tail, id));
  } else if (head == "flat") {
    need_tail();
    m = flat_space(parse_int(tail, id));
  } else if (id == "nk-s6") {
    m = nk_s6();
  } else if (id == "g2-s7") {
    m = g2_s7();
  } else if (head.rfind("sasakian-s", 0) == 0 && tail.empty()) {
    const int d = parse_int(head.substr(10), id);
    if (d % 2 == 0) throw UnknownName(id + ": sphere dimension must be odd");
    m = sasakian((d - 1) / 2);
  } else if (id == "3sasakian-s7") {
    m = three_sasakian_s7();
  } else if (head == "kenmotsu") {
    need_tail();
    const auto p = parse_params(tail, 3, id);
    if (p[0] <= 0.0) throw UnknownName(id + ": r must be positive");
    const double q = 2.0 / p[0], C = p[1], K = p[2];
    m = kenmotsu(id, Warp{[q, C, K](double t) { return C * std::pow(t + K, q); }, q, true});
    m.params = {{"r", p[0]}, {"C", C}, {"K", K}};
  } else if (head == "kenmotsu-pow") {
    need_tail();
    const auto p = parse_params(tail, 3, id);
    const double q = p[0], C = p[1], K = p[2];
    m = kenmotsu(id, Warp{[q, C, K](double t) { return C * std::pow(t + K, q); }, q, true});
    m.params = {{"q", q}, {"C", C}, {"K", K}};
  } else if (head == "kenmotsu-exp") {
    need_tail();
    const double c = parse_params(tail, 1, id)[0];
    if (c == 0.0) throw UnknownName(id + ": c = 0 is the flat product, not Kenmotsu");
    m = kenmotsu(id, Warp{[c](double t) { return std::exp(c * t); }, 0.0, false});
    m.params = {{"c", c}};
  } else if (head == "hopf-lck" || head == "lck-cone") {
    need_tail();
    Cone cone;
    cone.f = [](const Vector& x) { return -std::log(x.norm()); };
    m = lck(id, head, parse_int(tail, id), cone, true);
  } else if (head == "lck-conformal") {
    need_tail();
    Cone cone;
    cone.f = [](const Vector& x) { return 0.3 * x[0] + 0.2 * x[1] * x[1] - 0.15 * x[0] * x[x.size() - 1]; };
    cone.lo = -1.0;
    cone.hi = 1.0;
    cone.rmin = 0.0;
    cone.rmax = 10.0;
    cone.punctured = false;
    m = lck(id, head, parse_int(tail, id), cone, false);
  } else if (id == "lcp-spin7") {
    m = lcp_spin7();
  } else if (head == "lc-hk") {
    need_tail();
    m = lc_hk(parse_int(tail, id));
  } else {
    throw UnknownName("unknown model '" + id + "'");
  }
  m.id = id;
  return m;
}

std::vector<SuiteItem> expected_suite(const Model& model) {
  std::vector<SuiteItem> out;
  for (const auto& name : model.field_names()) {
    const FieldSpec& s = model.spec(name);
    for (const auto& c : s.checks) {
      SuiteItem item{name, c, true};
      if (c == "harmonic-section" && s.harmonic_section) item.expect_pass = *s.harmonic_section;
      if ((c == "harmonic-map" || c == "tension") && s.harmonic_map) item.expect_pass = *s.harmonic_map;
      out.push_back(item);
    }
  }
  return out;
}

}  // namespace harmonia
