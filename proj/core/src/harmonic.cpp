#include "harmonia/harmonic.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace harmonia {
namespace {

// p! sum a_I b^I with b already raised
double paired(const AlternatingForm& a, const AlternatingForm& up) {
  auto ca = a.coefficients();
  auto cb = up.coefficients();
  double s = 0.0;
  for (std::size_t i = 0; i < ca.size(); ++i) s += ca[i] * cb[i];
  return factorial(a.degree()) * s;
}

double norm(const AlternatingForm& a, const PointMetric& g) { return std::sqrt(std::max(0.0, form_norm2(a, g))); }

Matrix gram_from(const std::vector<AlternatingForm>& nab, const PointMetric& g) {
  const int n = g.dim();
  std::vector<AlternatingForm> up;
  up.reserve(nab.size());
  for (const auto& x : nab) up.push_back(raise(x, g));
  Matrix B(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) B(a, b) = B(b, a) = paired(nab[a], up[b]);
  return B;
}

// g^{ab} nabla_b sigma, raised in the fibre
std::vector<AlternatingForm> raised_gradient(const std::vector<AlternatingForm>& nab, const PointMetric& g) {
  const int n = g.dim();
  std::vector<AlternatingForm> out;
  for (int a = 0; a < n; ++a) {
    AlternatingForm w(nab[0].dim(), nab[0].degree());
    for (int b = 0; b < n; ++b)
      if (g.g_inv()(a, b) != 0.0) w += g.g_inv()(a, b) * nab[b];
    out.push_back(raise(w, g));
  }
  return out;
}

template <class F>
auto along(const Jet& jet, int a, F&& q) {
  const auto& N = jet.neighbours(a);
  return richardson(q(N[0]), q(N[1]), q(N[2]), q(N[3]), jet.step2());
}

// covariant derivative of a one-form known at the neighbours; row a = nabla_a
Matrix covariant_of_one_form(const Jet& jet, const std::function<Vector(const FirstOrder&)>& w) {
  const int n = jet.dim();
  const Vector w0 = w(jet.center());
  Matrix D(n, n);
  for (int a = 0; a < n; ++a) {
    const Vector da = along(jet, a, w);
    D.row(a) = (da - jet.gamma()[a].transpose() * w0).transpose();
  }
  return D;
}

double one_form_codiff(const Matrix& D, const PointMetric& g) { return -(g.g_inv().cwiseProduct(D)).sum(); }

Vector lee_components(const FirstOrder& fo, std::size_t f) { return components(fit_lee_form(fo, f).theta); }

}  // namespace

Matrix gradient_gram(const FirstOrder& fo, std::size_t f) { return gram_from(fo.nabla[f], fo.local.metric); }

double gradient_norm2(const FirstOrder& fo, std::size_t f) {
  return fo.local.metric.g_inv().cwiseProduct(gradient_gram(fo, f)).sum();
}

double bending_density(const Jet& jet, std::size_t f) { return 0.5 * gradient_norm2(jet.center(), f); }

AlternatingForm rough_laplacian(const Jet& jet, std::size_t f) {
  const int n = jet.dim();
  const Matrix& gi = jet.metric().g_inv();
  AlternatingForm out(n, jet.value(f).degree());
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (gi(a, b) != 0.0) out -= gi(a, b) * jet.hess(f, a, b);
  return out;
}

Vector curvature_pairing(const Jet& jet, std::size_t f) {
  const int n = jet.dim();
  const auto up = raised_gradient(jet.nabla(f), jet.metric());
  const Curvature& R = jet.curvature();
  Vector out = Vector::Zero(n);
  for (int c = 0; c < n; ++c)
    for (int a = 0; a < n; ++a) {
      if (a == c) continue;
      out[c] += paired(R.act(c, a, jet.value(f)), up[a]);
    }
  return out;
}

Vector curvature_pairing_div_form(const Jet& jet, std::size_t f) {
  const int n = jet.dim();
  struct Local {
    Matrix M;      // sqrt(g) g^{-1} B
    Matrix E;      // orthonormal frame
    double norm2;  // ||nabla sigma||^2
  };
  auto local = [f](const FirstOrder& fo) {
    const PointMetric& g = fo.local.metric;
    const Matrix B = gram_from(fo.nabla[f], g);
    return Local{g.sqrt_det() * g.g_inv() * B, g.frame(), g.g_inv().cwiseProduct(B).sum()};
  };
  const Local c0 = local(jet.center());
  const Matrix B0 = gradient_gram(jet.center(), f);
  const double h = jet.step2();
  Vector div = Vector::Zero(n), bracket = Vector::Zero(n), dnorm = Vector::Zero(n);
  for (int a = 0; a < n; ++a) {
    const auto& N = jet.neighbours(a);
    std::array<Local, 4> L{local(N[0]), local(N[1]), local(N[2]), local(N[3])};
    const Matrix dM = richardson(L[0].M, L[1].M, L[2].M, L[3].M, h);
    div += dM.row(a).transpose();
    const Matrix dE = richardson(L[0].E, L[1].E, L[2].E, L[3].E, h);
    // [d_a, e_i] = (d_a E_i)^k d_k
    bracket[a] = (dE.transpose() * B0 * c0.E).trace();
    dnorm[a] = richardson(L[0].norm2, L[1].norm2, L[2].norm2, L[3].norm2, h);
  }
  return div / jet.metric().sqrt_det() + bracket - 0.5 * dnorm;
}

double one_form_norm(const Vector& w, const PointMetric& g) { return std::sqrt(std::max(0.0, w.dot(g.g_inv() * w))); }

Spectrum ki_spectrum(const FirstOrder& fo, std::size_t f) {
  const Matrix B = gradient_gram(fo, f);
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(B, fo.local.metric.g());
  Spectrum s;
  const Vector ev = es.eigenvalues();
  s.k.assign(ev.data(), ev.data() + ev.size());
  std::sort(s.k.begin(), s.k.end());
  s.spread = s.k.back() - s.k.front();
  return s;
}

double harmonic_section_residual(const Jet& jet, std::size_t f) {
  const PointMetric& g = jet.metric();
  const AlternatingForm& s = jet.value(f);
  const double r2 = form_norm2(s, g);
  if (r2 <= 0.0) throw GeometryError("harmonic_section_residual: zero-length section");
  const double lam = gradient_norm2(jet.center(), f) / r2;
  return norm(rough_laplacian(jet, f) - lam * s, g) / std::sqrt(r2);
}

double harmonic_map_residual(const Jet& jet, std::size_t f) {
  const double r2 = form_norm2(jet.value(f), jet.metric());
  if (r2 <= 0.0) throw GeometryError("harmonic_map_residual: zero-length section");
  return one_form_norm(curvature_pairing(jet, f), jet.metric()) / r2;
}

Tension tension_components(const Jet& jet, std::size_t f) {
  const PointMetric& g = jet.metric();
  const AlternatingForm& s = jet.value(f);
  const AlternatingForm lap = rough_laplacian(jet, f);
  const double r2 = form_norm2(s, g);
  if (r2 <= 0.0) throw GeometryError("tension_components: zero-length section");
  Tension t;
  t.horizontal = g.g_inv() * curvature_pairing(jet, f);
  t.vertical = -lap;
  t.sphere_tangential = (form_inner(lap, s, g) / r2) * s - lap;
  return t;
}

VariationIntegrands variation_integrands(const Jet& jet, std::size_t sigma, std::size_t phi) {
  const PointMetric& g = jet.metric();
  const AlternatingForm& s = jet.value(sigma);
  const AlternatingForm& v = jet.value(phi);
  VariationIntegrands out;
  out.first = form_inner(rough_laplacian(jet, sigma), v, g);
  out.hess = gradient_norm2(jet.center(), phi) - form_norm2(v, g) * gradient_norm2(jet.center(), sigma);
  const double nn = norm(s, g) * norm(v, g);
  out.overlap = nn > 0.0 ? form_inner(s, v, g) / nn : 0.0;
  return out;
}

void ScalarFit::add(const AlternatingForm& lhs, const AlternatingForm& basis, const PointMetric& g) {
  num_ += form_inner(lhs, basis, g);
  den_ += form_norm2(basis, g);
  samples_.push_back({lhs, basis, g});
}

double ScalarFit::value() const { return den_ > 0.0 ? num_ / den_ : 0.0; }

double ScalarFit::residual() const { return residual(value()); }

double ScalarFit::residual(double c) const {
  double worst = 0.0, big = 0.0;
  for (const auto& s : samples_) {
    worst = std::max(worst, norm(s.lhs - c * s.basis, s.metric));
    big = std::max(big, norm(s.lhs, s.metric));
  }
  return big > 0.0 ? worst / big : worst;
}

AlternatingForm coord_contract(int a, const AlternatingForm& s) {
  Vector e = Vector::Zero(s.dim());
  e[a] = 1.0;
  return contract(e, s);
}

AlternatingForm coord_flat_wedge(int a, const AlternatingForm& s, const PointMetric& g) {
  return wedge(one_form(g.g().col(a)), s);
}

PairHypothesis pair_fit(const std::vector<Jet>& jets, std::size_t psi, std::size_t phi) {
  if (jets.empty()) throw GeometryError("pair_fit: no points");
  const int n = jets.front().dim();
  const int p = jets.front().value(psi).degree();
  if (jets.front().value(phi).degree() != p + 1) throw GeometryError("pair_fit: degree of Phi must be deg Psi + 1");
  ScalarFit fl, fm;
  for (const auto& jet : jets)
    for (int a = 0; a < n; ++a) {
      fl.add(jet.nabla(psi)[a], coord_contract(a, jet.value(phi)), jet.metric());
      fm.add(jet.nabla(phi)[a], coord_flat_wedge(a, jet.value(psi), jet.metric()), jet.metric());
    }
  PairHypothesis h;
  h.lambda = fl.value();
  h.mu = fm.value();
  h.residual_psi = fl.residual();
  h.residual_phi = fm.residual();
  h.eig_psi = -(n - p) * h.lambda * h.mu;
  h.eig_phi = -(p + 1) * h.lambda * h.mu;
  for (const auto& jet : jets) {
    const PointMetric& g = jet.metric();
    auto lap_res = [&](std::size_t f, double eig) {
      const AlternatingForm& s = jet.value(f);
      return norm(rough_laplacian(jet, f) - eig * s, g) / (norm(s, g) * std::max(1.0, std::abs(eig)));
    };
    h.lap_residual_psi = std::max(h.lap_residual_psi, lap_res(psi, h.eig_psi));
    h.lap_residual_phi = std::max(h.lap_residual_phi, lap_res(phi, h.eig_phi));
    auto norm_res = [&](std::size_t f, double eig) {
      const double lhs = gradient_norm2(jet.center(), f);
      const double rhs = eig * form_norm2(jet.value(f), g);
      return std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-300});
    };
    h.norm_identity_residual = std::max({h.norm_identity_residual, norm_res(psi, h.eig_psi), norm_res(phi, h.eig_phi)});
  }
  return h;
}

LeeFit fit_lee_form(const FirstOrder& fo, std::size_t f) {
  const PointMetric& g = fo.local.metric;
  const int n = g.dim();
  const AlternatingForm& s = fo.value[f];
  const auto& nab = fo.nabla[f];
  LeeFit out;
  out.theta = AlternatingForm(n, 1);
  if (s.degree() == 0) return out;
  // T_ak = (d_a)^flat ^ ((g^{-1} e_k) -| Psi) - e^k ^ (d_a -| Psi)
  std::vector<AlternatingForm> up;
  for (int a = 0; a < n; ++a) up.push_back(raise(nab[a], g));
  std::vector<AlternatingForm> cs;
  for (int k = 0; k < n; ++k) cs.push_back(contract(g.g_inv().col(k), s));
  Matrix A = Matrix::Zero(n, n);
  Vector rhs = Vector::Zero(n);
  double total = 0.0;
  std::vector<std::vector<AlternatingForm>> basis(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    const AlternatingForm xa = one_form(g.g().col(a));
    const AlternatingForm ca = coord_contract(a, s);
    std::vector<AlternatingForm> Tu;
    for (int k = 0; k < n; ++k) {
      basis[a].push_back(wedge(xa, cs[k]) - wedge(AlternatingForm::basis(n, MultiIndex{k}), ca));
      Tu.push_back(raise(basis[a][k], g));
    }
    for (int k = 0; k < n; ++k) {
      rhs[k] += paired(basis[a][k], up[a]);
      for (int l = k; l < n; ++l) A(k, l) += paired(basis[a][k], Tu[l]);
    }
    total += paired(nab[a], up[a]);
  }
  if (total <= 0.0) return out;
  A = A.selfadjointView<Eigen::Upper>();
  const Vector th = A.ldlt().solve(rhs);
  out.theta = one_form(th);
  double miss = 0.0;
  for (int a = 0; a < n; ++a) {
    AlternatingForm r = nab[a];
    for (int k = 0; k < n; ++k) r -= th[k] * basis[a][k];
    miss += form_norm2(r, g);
  }
  out.residual = std::sqrt(std::max(0.0, miss) / total);
  return out;
}

LcpRecord lcp_check(const Jet& jet, std::size_t f) {
  const PointMetric& g = jet.metric();
  const int n = jet.dim();
  const AlternatingForm& s = jet.value(f);
  const int p = s.degree();
  const LeeFit fit = fit_lee_form(jet.center(), f);
  LcpRecord rec;
  rec.theta = fit.theta;
  rec.residual_lcp = fit.residual;
  const Vector th = components(fit.theta);
  const double t2 = one_form_norm(th, g) * one_form_norm(th, g);
  const double sn = norm(s, g);
  const AlternatingForm tc = contract(g.g_inv() * th, s);

  const AlternatingForm dstar = coderivative_from_nabla(jet.nabla(f), g);
  rec.residual_dstar = norm(dstar - static_cast<double>(p - n) * tc, g) / (sn * std::max(1.0, std::sqrt(t2)));

  const AlternatingForm lap = rough_laplacian(jet, f);
  const AlternatingForm pred = (p * t2) * s + static_cast<double>(n - 2 * p) * wedge(fit.theta, tc);
  rec.residual_lap = norm(lap - pred, g) / (sn * std::max(1.0, t2));

  const Matrix D = lee_form_derivative(jet, f);
  const double scale = std::max(1.0, t2);
  rec.theta_closed = (D - D.transpose()).cwiseAbs().maxCoeff() / scale;
  // |nabla theta|_g
  const Matrix& gi = g.g_inv();
  rec.theta_parallel = std::sqrt(std::max(0.0, (gi * D * gi * D.transpose()).trace())) / scale;
  return rec;
}

Matrix lee_form_derivative(const Jet& jet, std::size_t f) {
  return covariant_of_one_form(jet, [f](const FirstOrder& fo) { return lee_components(fo, f); });
}

Vector lck_harmonic_map_defect(const Jet& jet, std::size_t omega, double N) {
  const int n = jet.dim();
  const PointMetric& g = jet.metric();
  if (jet.value(omega).degree() != 2) throw GeometryError("lck_harmonic_map_defect: expected the Kaehler form");
  // J theta := (J theta#)^flat with J = g^{-1} W, W_ab = omega(d_a, d_b)
  auto jtheta = [omega](const FirstOrder& fo) -> Vector {
    const PointMetric& gq = fo.local.metric;
    const Vector th = lee_components(fo, omega);
    const Matrix J = gq.g_inv() * two_form_matrix(fo.value[omega]);
    return gq.g() * (J * (gq.g_inv() * th));
  };
  auto theta2 = [omega](const FirstOrder& fo) {
    const Vector th = lee_components(fo, omega);
    return th.dot(fo.local.metric.g_inv() * th);
  };
  const Vector th = lee_components(jet.center(), omega);
  const Vector jt = jtheta(jet.center());
  const Matrix Dth = lee_form_derivative(jet, omega);
  const Matrix Djt = covariant_of_one_form(jet, jtheta);
  Vector dnorm(n);
  for (int a = 0; a < n; ++a) dnorm[a] = along(jet, a, theta2);
  const Vector jsharp = g.g_inv() * jt;
  return (N - 2.0) * dnorm - one_form_codiff(Dth, g) * th - one_form_codiff(Djt, g) * jt -
         Djt.transpose() * jsharp;
}

Vector spin7_lee_defect(const Jet& jet, std::size_t f, double scale) {
  const int n = jet.dim();
  const Vector th = scale * lee_components(jet.center(), f);
  const Matrix D = scale * lee_form_derivative(jet, f);
  Vector dnorm(n);
  for (int a = 0; a < n; ++a)
    dnorm[a] = along(jet, a, [&](const FirstOrder& fo) {
      const Vector t = scale * lee_components(fo, f);
      return t.dot(fo.local.metric.g_inv() * t);
    });
  return one_form_codiff(D, jet.metric()) * th - 3.0 * dnorm;
}

AlternatingForm spin7_lee_from_dphi(const Jet& jet, std::size_t f) {
  const PointMetric& g = jet.metric();
  const AlternatingForm dphi = exterior_from_nabla(jet.nabla(f));
  return (-1.0 / 7.0) * hodge_star(wedge(hodge_star(dphi, g), jet.value(f)), g);
}

double metric_compatibility_identity(const Jet& jet, std::size_t f1, std::size_t f2) {
  const int n = jet.dim();
  const PointMetric& g = jet.metric();
  double worst = 0.0;
  for (int a = 0; a < n; ++a) {
    const double lhs = along(jet, a, [&](const FirstOrder& fo) {
      return form_inner(fo.value[f1], fo.value[f2], fo.local.metric);
    });
    const double rhs = form_inner(jet.nabla(f1)[a], jet.value(f2), g) + form_inner(jet.value(f1), jet.nabla(f2)[a], g);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  const double ref = norm(jet.value(f1), g) * norm(jet.value(f2), g);
  return ref > 0.0 ? worst / ref : worst;
}

double ricci_identity_residual(const Jet& jet, std::size_t f) {
  const int n = jet.dim();
  const PointMetric& g = jet.metric();
  const Curvature& R = jet.curvature();
  double worst = 0.0, ref = norm(jet.value(f), g);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      // (nabla^2)_{a,b} - (nabla^2)_{b,a} = R_{b,a}
      const AlternatingForm act = R.act(b, a, jet.value(f));
      worst = std::max(worst, norm(jet.hess(f, a, b) - jet.hess(f, b, a) - act, g));
      ref = std::max(ref, norm(act, g));
    }
  return ref > 0.0 ? worst / ref : worst;
}

double laplacian_adjoint_residual(const Jet& jet, std::size_t sigma, std::size_t phi) {
  const int n = jet.dim();
  const PointMetric& g = jet.metric();
  const double lhs = form_inner(rough_laplacian(jet, sigma), jet.value(phi), g);
  double grad = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (g.g_inv()(a, b) != 0.0) grad += g.g_inv()(a, b) * form_inner(jet.nabla(sigma)[a], jet.nabla(phi)[b], g);
  // sqrt(g) g^{ab} <nabla_b sigma, phi>
  auto flux = [&](const FirstOrder& fo) {
    const PointMetric& gq = fo.local.metric;
    Vector v(n);
    for (int b = 0; b < n; ++b) v[b] = form_inner(fo.nabla[sigma][b], fo.value[phi], gq);
    return Vector(gq.sqrt_det() * (gq.g_inv() * v));
  };
  double div = 0.0;
  for (int a = 0; a < n; ++a) div += along(jet, a, flux)[a];
  div /= g.sqrt_det();
  const double size = std::sqrt(form_inner(jet.value(sigma), jet.value(sigma), g) * form_inner(jet.value(phi), jet.value(phi), g));
  const double ref = std::max({std::abs(lhs), std::abs(grad), std::abs(div), size});
  const double r = std::abs(lhs - grad + div);
  return ref > 0.0 ? r / ref : r;
}

}  // namespace harmonia
