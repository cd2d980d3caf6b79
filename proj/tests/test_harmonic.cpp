#include "harmonia/harmonic.hpp"
#include "harmonia/models.hpp"

#include <doctest.h>

#include <cmath>

using namespace harmonia;

namespace {

double rel(const AlternatingForm& a, const AlternatingForm& b, const PointMetric& g) {
  return std::sqrt(form_norm2(a - b, g)) / std::max(std::sqrt(form_norm2(b, g)), 1e-300);
}

// R^n with g = e^{2f} delta, f = 0.3 x0 - 0.2 x1^2 + 0.1 x0 x2
double conf(const Vector& x) { return 0.3 * x[0] - 0.2 * x[1] * x[1] + 0.1 * x[0] * x[2]; }
Vector dconf(const Vector& x) {
  Vector d = Vector::Zero(x.size());
  d[0] = 0.3 + 0.1 * x[2];
  d[1] = -0.4 * x[1];
  d[2] = 0.1 * x[0];
  return d;
}

ModelManifold conformal_space(int n) {
  Chart c;
  c.name = "box";
  c.lo = Vector::Constant(n, -1.0);
  c.hi = Vector::Constant(n, 1.0);
  c.metric = [n](const Vector& x) { return Matrix(Matrix::Identity(n, n) * std::exp(2.0 * conf(x))); };
  return ModelManifold("conformal", n, n, Flavor::direct, {c});
}

}  // namespace

TEST_CASE("sphere height one-form") {
  const Model model = build("round-sphere:3");
  const ModelManifold& m = model.m();
  const FormField& h = model.field("height");
  const FormField& k = model.field("killing");
  for (const auto& p : m.sample_points(3, 5)) {
    const Jet jet(m, {&h, &k}, p);
    const double x0 = jet.local().x[0];
    const PointMetric& g = jet.metric();
    // nabla dx0 = -x0 g, so lap dx0 = dx0 and B = x0^2 g
    CHECK(rel(rough_laplacian(jet, 0), jet.value(0), g) < 1e-4);
    CHECK(gradient_norm2(jet.center(), 0) == doctest::Approx(3.0 * x0 * x0).epsilon(1e-8));
    CHECK((gradient_gram(jet.center(), 0) - x0 * x0 * g.g()).cwiseAbs().maxCoeff() < 1e-8);
    const Spectrum s = ki_spectrum(jet.center(), 0);
    REQUIRE(s.k.size() == 3);
    for (double v : s.k) CHECK(v == doctest::Approx(x0 * x0).epsilon(1e-8));
    CHECK(laplacian_adjoint_residual(jet, 0, 1) < 1e-4);
    CHECK(metric_compatibility_identity(jet, 0, 1) < 1e-4);
    CHECK(ricci_identity_residual(jet, 0) < 1e-4);
    CHECK(ricci_identity_residual(jet, 1) < 1e-4);
    // dx0 is not a harmonic section: lap dx0 = dx0 while |nabla dx0|^2 / |dx0|^2 = 3 x0^2 / (1 - x0^2)
    const double expect = std::abs(1.0 - 3.0 * x0 * x0 / (1.0 - x0 * x0));
    CHECK(harmonic_section_residual(jet, 0) == doctest::Approx(expect).epsilon(1e-4));
    // bending density is half the squared gradient
    CHECK(bending_density(jet, 0) == doctest::Approx(0.5 * 3.0 * x0 * x0).epsilon(1e-8));
  }
}

TEST_CASE("parallel volume form") {
  const Model model = build("round-sphere:2");
  const ModelManifold& m = model.m();
  for (const auto& p : m.sample_points(3, 6)) {
    const Jet jet(m, {&model.field("vol")}, p);
    CHECK(rough_laplacian(jet, 0).max_abs() < 1e-6);
    CHECK(gradient_norm2(jet.center(), 0) < 1e-14);
    CHECK(harmonic_section_residual(jet, 0) < 1e-6);
    CHECK(harmonic_map_residual(jet, 0) < 1e-6);
    const Tension t = tension_components(jet, 0);
    CHECK(t.horizontal.norm() < 1e-6);
    CHECK(t.vertical.max_abs() < 1e-6);
  }
}

TEST_CASE("nearly Kaehler S^6") {
  const Model model = build("nk-s6");
  const ModelManifold& m = model.m();
  const FormField& omega = model.field("omega");
  const FormField& pp = model.field("psi-plus");
  std::vector<Jet> jets;
  for (const auto& p : m.sample_points(3, 7)) jets.emplace_back(m, std::vector<const FormField*>{&omega, &pp}, p);
  for (const Jet& jet : jets) {
    const PointMetric& g = jet.metric();
    CHECK(form_norm2(jet.value(0), g) == doctest::Approx(6.0).epsilon(1e-10));
    CHECK(form_norm2(jet.value(1), g) == doctest::Approx(24.0).epsilon(1e-10));
    // lap omega = 4 omega, lap psi = 3 psi
    CHECK(rel(rough_laplacian(jet, 0), 4.0 * jet.value(0), g) < 1e-4);
    CHECK(rel(rough_laplacian(jet, 1), 3.0 * jet.value(1), g) < 1e-4);
    CHECK(gradient_norm2(jet.center(), 0) == doctest::Approx(24.0).epsilon(1e-6));
    CHECK(gradient_norm2(jet.center(), 1) == doctest::Approx(72.0).epsilon(1e-6));
    CHECK(harmonic_section_residual(jet, 0) < 1e-4);
    CHECK(harmonic_map_residual(jet, 0) < 1e-4);
    // both routes to the pairing agree on harmonic sections
    const Vector a = curvature_pairing(jet, 0), b = curvature_pairing_div_form(jet, 0);
    CHECK(one_form_norm(a - b, g) < 1e-4);
    const Spectrum s = ki_spectrum(jet.center(), 0);
    for (double v : s.k) CHECK(v == doctest::Approx(4.0).epsilon(1e-6));
    CHECK(s.spread < 1e-6);
  }
  const PairHypothesis h = pair_fit(jets, 0, 1);
  CHECK(h.lambda == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(h.mu == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK(h.residual_psi < 1e-8);
  CHECK(h.residual_phi < 1e-8);
  // -(n-p) lambda mu and -(p+1) lambda mu with n = 6, p = 2
  CHECK(h.eig_psi == doctest::Approx(4.0).epsilon(1e-8));
  CHECK(h.eig_phi == doctest::Approx(3.0).epsilon(1e-8));
  CHECK(h.lap_residual_psi < 1e-4);
  CHECK(h.lap_residual_phi < 1e-4);
  CHECK(h.norm_identity_residual < 1e-6);
}

TEST_CASE("scalar fit") {
  const PointMetric g = PointMetric::euclidean(3);
  const AlternatingForm t1 = monomial(3, {0, 1}), t2 = monomial(3, {1, 2}, 2.0);
  ScalarFit exact;
  exact.add(2.5 * t1, t1, g);
  exact.add(2.5 * t2, t2, g);
  CHECK(exact.value() == doctest::Approx(2.5));
  CHECK(exact.residual() < 1e-15);
  CHECK(exact.residual(3.5) > 0.1);
  ScalarFit noisy;
  noisy.add(2.0 * t1 + monomial(3, {0, 2}, 0.1), t1, g);
  CHECK(noisy.value() == doctest::Approx(2.0));
  CHECK(noisy.residual() == doctest::Approx(0.1 / std::sqrt(4.0 + 0.01)));
  CHECK(ScalarFit().empty());
}

TEST_CASE("coordinate helpers") {
  const PointMetric g(Matrix(Vector::LinSpaced(4, 1.0, 2.5).asDiagonal()));
  const AlternatingForm s = monomial(4, {0, 1, 3}) + monomial(4, {1, 2, 3}, -0.5);
  for (int a = 0; a < 4; ++a) {
    CHECK((coord_contract(a, s) - contract(Vector::Unit(4, a), s)).max_abs() < 1e-15);
    CHECK((coord_flat_wedge(a, s, g) - wedge(flat(Vector::Unit(4, a), g), s)).max_abs() < 1e-15);
  }
  Vector w(4);
  w << 1.0, 0.0, -2.0, 0.5;
  CHECK(one_form_norm(w, g) == doctest::Approx(std::sqrt(w.dot(g.g_inv() * w))));
}

TEST_CASE("Lee form of a conformally rescaled parallel form") {
  // Psi = e^{p f} e^{012} on (R^4, e^{2f} delta) has unit length and Lee form df
  const ModelManifold m = conformal_space(4);
  const FormField psi("psi", 3, [](const LocalData& l) { return monomial(4, {0, 1, 2}, std::exp(3.0 * conf(l.x))); }, true);
  for (const auto& p : m.sample_points(3, 8)) {
    const Jet jet(m, {&psi}, p);
    const LeeFit fit = fit_lee_form(jet.center(), 0);
    CHECK(fit.residual < 1e-8);
    CHECK((components(fit.theta) - dconf(jet.local().x)).norm() < 1e-8);
    const LcpRecord r = lcp_check(jet, 0);
    CHECK(r.residual_lcp < 1e-8);
    CHECK(r.residual_dstar < 1e-6);
    CHECK(r.residual_lap < 1e-4);
    CHECK(r.theta_closed < 1e-4);
    // theta is closed, so its covariant derivative is symmetric
    const Matrix D = lee_form_derivative(jet, 0);
    CHECK((D - D.transpose()).cwiseAbs().maxCoeff() < 1e-4);
  }
}
