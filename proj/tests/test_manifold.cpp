#include "harmonia/manifold.hpp"
#include "harmonia/models.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <set>

using namespace harmonia;

namespace {

// upper half space, g = delta / y^2 with y the last coordinate
ModelManifold hyperbolic(int n) {
  Chart c;
  c.name = "half-space";
  c.lo = Vector::Constant(n, -1.0);
  c.hi = Vector::Constant(n, 1.0);
  c.lo[n - 1] = 0.5;
  c.hi[n - 1] = 2.0;
  c.metric = [n](const Vector& u) { return Matrix(Matrix::Identity(n, n) / (u[n - 1] * u[n - 1])); };
  return ModelManifold("hyperbolic", n, n, Flavor::direct, {c});
}

ModelManifold flat_plane() {
  Chart c;
  c.name = "box";
  c.lo = Vector::Constant(2, -1.0);
  c.hi = Vector::Constant(2, 1.0);
  c.metric = [](const Vector&) { return Matrix(Matrix::Identity(2, 2)); };
  return ModelManifold("plane", 2, 2, Flavor::direct, {c});
}

ChartPoint at(int chart, std::initializer_list<double> u) {
  Vector v(static_cast<Eigen::Index>(u.size()));
  int i = 0;
  for (double x : u) v[i++] = x;
  return {chart, v};
}

}  // namespace

TEST_CASE("richardson is fourth order") {
  auto f = [](double x) { return std::sin(x); };
  const double x = 0.3;
  double prev = 0.0;
  for (double h : {1e-1, 5e-2}) {
    const double d = richardson(f(x + h), f(x - h), f(x + h / 2), f(x - h / 2), h);
    const double err = std::abs(d - std::cos(x));
    if (prev > 0.0) CHECK(prev / err == doctest::Approx(16.0).epsilon(0.05));
    prev = err;
  }
}

TEST_CASE("unit sphere curvature") {
  for (int n : {2, 3, 4}) {
    const Model model = build("round-sphere:" + std::to_string(n));
    const ModelManifold& m = model.m();
    for (const auto& p : m.sample_points(4, 3)) {
      const PointMetric g = metric_at(m, p);
      const Curvature R = curvature_at(m, p);
      const Matrix& G = g.g();
      // second differences: relative accuracy about 1e-5
      const double scale = G.squaredNorm();
      CHECK((R.ricci() - (n - 1) * G).cwiseAbs().maxCoeff() < 1e-4 * scale);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l)
              CHECK(std::abs(R.component(i, j, k, l, g) - (G(i, k) * G(j, l) - G(j, k) * G(i, l))) < 1e-4 * scale);
      CHECK(metric_compatibility_residual(m, p) < 1e-8);
    }
  }
}

TEST_CASE("sphere fields: Hessian of a height function and a Killing dual") {
  const Model model = build("round-sphere:3");
  const ModelManifold& m = model.m();
  for (const auto& p : m.sample_points(5, 9)) {
    const LocalData l = m.local(p);
    CHECK(l.x.norm() == doctest::Approx(1.0));
    // nabla d x0 = -x0 g
    const auto nh = covariant_derivative(m, model.field("height"), p);
    const auto nk = covariant_derivative(m, model.field("killing"), p);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        CHECK(components(nh[static_cast<std::size_t>(a)])[b] ==
              doctest::Approx(-l.x[0] * l.metric.g()(a, b)).epsilon(1e-8));
        CHECK(components(nk[static_cast<std::size_t>(a)])[b] ==
              doctest::Approx(-components(nk[static_cast<std::size_t>(b)])[a]).epsilon(1e-8));
      }
    // the volume form is parallel
    for (const auto& d : covariant_derivative(m, model.field("vol"), p)) CHECK(d.max_abs() < 1e-8);
  }
}

TEST_CASE("hyperbolic space") {
  const ModelManifold m = hyperbolic(3);
  const ChartPoint p = at(0, {0.1, -0.2, 1.3});
  const double y = 1.3;
  const auto gamma = christoffel_at(m, p);
  // Gamma^k_{ai} = -(delta_ak delta_in + delta_ik delta_an - delta_ai delta_kn) / y, n the last index
  for (int a = 0; a < 3; ++a)
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i) {
        const double expect = -((a == k) * (i == 2) + (i == k) * (a == 2) - (a == i) * (k == 2)) / y;
        CHECK(gamma[static_cast<std::size_t>(a)](k, i) == doctest::Approx(expect).epsilon(1e-9));
      }
  const PointMetric g = metric_at(m, p);
  CHECK((curvature_at(m, p).ricci() + 2.0 * g.g()).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(metric_compatibility_residual(m, p) < 1e-8);

  // d*(y dy) = -div(y^3 d_y) = -y^2 in two dimensions
  const ModelManifold h2 = hyperbolic(2);
  const FormField s("y-dy", 1, [](const LocalData& l) {
    Vector v = Vector::Zero(2);
    v[1] = l.x[1];
    return one_form(v);
  });
  const ChartPoint q = at(0, {0.2, 0.9});
  CHECK(coderivative(h2, s, q).coefficients()[0] == doctest::Approx(-0.81).epsilon(1e-8));
}

TEST_CASE("exterior derivative and coderivative on the plane") {
  const ModelManifold m = flat_plane();
  const FormField s("x-dy", 1, [](const LocalData& l) {
    Vector v(2);
    v << l.x[1] * l.x[1], l.x[0];
    return one_form(v);
  });
  const ChartPoint p = at(0, {0.3, -0.4});
  // d(y^2 dx + x dy) = (1 - 2y) dx ^ dy
  CHECK(exterior_derivative(m, s, p)[MultiIndex{0, 1}] == doctest::Approx(1.0 + 0.8).epsilon(1e-9));
  CHECK(exterior_derivative(m, s, p).max_abs() == doctest::Approx(1.8).epsilon(1e-9));
  // d*(y^2 dx + x dy) = -(d_x y^2 + d_y x) = 0
  CHECK(std::abs(coderivative(m, s, p).coefficients()[0]) < 1e-9);
  const auto nabla = covariant_derivative(m, s, p);
  CHECK((exterior_from_nabla(nabla) - exterior_derivative(m, s, p)).max_abs() < 1e-12);
  CHECK((coderivative_from_nabla(nabla, PointMetric::euclidean(2)) - coderivative(m, s, p)).max_abs() < 1e-12);
  const Curvature R = curvature_at(m, p);
  for (const auto& e : R.rend) CHECK(e.cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("jet data") {
  const Model model = build("round-sphere:2");
  const ModelManifold& m = model.m();
  const ChartPoint p = m.sample_points(1, 4).front();
  const Jet jet(m, {&model.field("height"), &model.field("vol")}, p);
  REQUIRE(jet.has_second_order());
  CHECK(jet.field_count() == 2);
  // second covariant derivative of d x0: nabla^2 (dx0) = -(dx0) (x) g, as in nabla_a (-x0 g) = -(d_a x0) g
  const Vector dx0 = components(jet.value(0));
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        CHECK(components(jet.hess(0, a, b))[c] == doctest::Approx(-dx0[a] * jet.metric().g()(b, c)).epsilon(1e-5));
  // Jet agrees with the standalone routines
  const auto n0 = covariant_derivative(m, model.field("height"), p);
  for (int a = 0; a < 2; ++a) CHECK((jet.nabla(0)[static_cast<std::size_t>(a)] - n0[static_cast<std::size_t>(a)]).max_abs() < 1e-12);
  CHECK((jet.curvature().ricci() - jet.metric().g()).cwiseAbs().maxCoeff() < 1e-6);
  // scalar derivative of |dx0|^2 = 1 - x0^2 along each coordinate
  const Vector x = jet.local().x;
  for (int a = 0; a < 2; ++a) {
    const double d = jet.derivative(a, [](const FirstOrder& fo) { return form_norm2(fo.value[0], fo.local.metric); });
    CHECK(d == doctest::Approx(-2.0 * x[0] * jet.local().jac(0, a)).epsilon(1e-6));
  }
  const Jet shallow(m, {&model.field("height")}, p, false);
  CHECK_FALSE(shallow.has_second_order());
  CHECK_THROWS(shallow.curvature());
}

TEST_CASE("sampling and charts") {
  const Model model = build("round-sphere:3");
  const ModelManifold& m = model.m();
  const auto a = m.sample_points(30, 17), b = m.sample_points(30, 17), c = m.sample_points(30, 18);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].chart == b[i].chart);
    CHECK((a[i].u - b[i].u).norm() == 0.0);
    differs = differs || a[i].chart != c[i].chart || (a[i].u - c[i].u).norm() > 0.0;
    CHECK(m.contains(a[i]));
    const auto back = m.locate(m.local(a[i]).x);
    REQUIRE(back);
    CHECK((m.local(*back).x - m.local(a[i]).x).norm() < 1e-12);
  }
  CHECK(differs);
  // charts cover the sphere
  std::set<int> used;
  for (const auto& p : m.sample_points(200, 1)) used.insert(p.chart);
  CHECK(used.size() == m.charts().size());
  CHECK_THROWS_AS(shifted(m, a[0], 0, 10.0), GeometryError);
  CHECK((m.jacobian(a[0]) - m.local(a[0]).jac).norm() < 1e-12);

  const auto j = nlohmann::json::parse(describe_json(m));
  CHECK(j["dim"] == 3);
  CHECK(j["ambient_dim"] == 4);
  CHECK(j["flavor"] == "embedded");
  CHECK(j["charts"].size() == 8);
}
