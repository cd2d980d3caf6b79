#include "harmonia/multilinear.hpp"
#include "support.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <numeric>
#include <random>

using namespace harmonia;
using namespace harmonia::test;

TEST_CASE("binomial and colex ranks") {
  CHECK(binomial(16, 8) == 12870);
  CHECK(binomial(7, 0) == 1);
  for (int p = 0; p <= 6; ++p)
    for (std::size_t r = 0; r < binomial(10, p); ++r) CHECK(colex_rank(colex_mask(p, r)) == r);
  CHECK(colex_rank(MultiIndex{0, 1}.mask()) == 0);
  CHECK(colex_rank(MultiIndex{0, 2}.mask()) == 1);
  CHECK(colex_rank(MultiIndex{1, 2}.mask()) == 2);
}

TEST_CASE("invalid inputs are rejected") {
  AlternatingForm a(4, 2);
  CHECK_THROWS_AS((void)MultiIndex({1, 1}), GeometryError);
  CHECK_THROWS_AS(a.set(MultiIndex{0, 5}, 1.0), GeometryError);
  CHECK_THROWS_AS(a.set(MultiIndex{0}, 1.0), GeometryError);
  CHECK_THROWS_AS((void)AlternatingForm(17, 1), GeometryError);
  CHECK_THROWS_AS(wedge(a, AlternatingForm(4, 3)), GeometryError);
  CHECK_THROWS_AS(wedge(a, AlternatingForm(5, 1)), GeometryError);
  CHECK_THROWS_AS(contract(Vector::Zero(3), a), GeometryError);
  CHECK_THROWS_AS(wedge_power(a, 3), GeometryError);
  Matrix bad = Matrix::Identity(3, 3);
  bad(0, 1) = 0.5;
  CHECK_THROWS_AS((void)PointMetric{bad}, GeometryError);
  CHECK_THROWS_AS((void)PointMetric{-Matrix::Identity(2, 2)}, GeometryError);
}

TEST_CASE("at() applies the permutation sign") {
  AlternatingForm a = AlternatingForm::basis(5, MultiIndex{1, 2, 4}, 2.0);
  const int even[] = {2, 4, 1}, odd[] = {2, 1, 4}, rep[] = {1, 1, 4};
  CHECK(a.at(even) == doctest::Approx(2.0));
  CHECK(a.at(odd) == doctest::Approx(-2.0));
  CHECK(a.at(rep) == 0.0);
  CHECK(monomial(5, {4, 1, 2}, 3.0)[MultiIndex{1, 2, 4}] == doctest::Approx(3.0));
}

TEST_CASE("wedge: associative, graded commutative, matches the shuffle formula") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 4 + trial % 4;
    const int p = 1 + trial % 2, q = 1 + (trial / 2) % 2, r = 1;
    const auto a = random_form(n, p, rng), b = random_form(n, q, rng), c = random_form(n, r, rng);
    CHECK(max_diff(wedge(wedge(a, b), c), wedge(a, wedge(b, c))) < 1e-12);
    const double sgn = (p * q) % 2 ? -1.0 : 1.0;
    CHECK(max_diff(wedge(a, b), sgn * wedge(b, a)) < 1e-12);

    // (a ^ b)(v_1..v_{p+q}) = 1/(p! q!) sum_sigma sgn(sigma) a(v_sigma..) b(v_sigma..)
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix V(n, p + q);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < p + q; ++j) V(i, j) = u(rng);
    std::vector<int> perm(static_cast<std::size_t>(p + q));
    std::iota(perm.begin(), perm.end(), 0);
    double sum = 0.0;
    do {
      int inv = 0;
      for (std::size_t i = 0; i < perm.size(); ++i)
        for (std::size_t j = i + 1; j < perm.size(); ++j) inv += perm[i] > perm[j];
      Matrix A(n, p), B(n, q);
      for (int k = 0; k < p; ++k) A.col(k) = V.col(perm[static_cast<std::size_t>(k)]);
      for (int k = 0; k < q; ++k) B.col(k) = V.col(perm[static_cast<std::size_t>(p + k)]);
      sum += (inv % 2 ? -1.0 : 1.0) * evaluate(a, A) * evaluate(b, B);
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(evaluate(wedge(a, b), V) == doctest::Approx(sum / (factorial(p) * factorial(q))).epsilon(1e-12));
  }
}

TEST_CASE("contraction is an antiderivation and squares to zero") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 5, p = 1 + trial % 3, q = 1 + trial % 2;
    const auto a = random_form(n, p, rng), b = random_form(n, q, rng);
    Vector v(n), w(n);
    for (int i = 0; i < n; ++i) v[i] = u(rng), w[i] = u(rng);
    const double sgn = p % 2 ? -1.0 : 1.0;
    CHECK(max_diff(contract(v, wedge(a, b)), wedge(contract(v, a), b) + sgn * wedge(a, contract(v, b))) < 1e-12);
    if (p >= 2) {
      CHECK(contract(v, contract(v, a)).max_abs() < 1e-12);
      CHECK(max_diff(contract(v, contract(w, a)), -contract(w, contract(v, a))) < 1e-12);
    }
    // v -| a evaluated = a(v, ...)
    Matrix V(n, p);
    V.col(0) = v;
    for (int k = 1; k < p; ++k)
      for (int i = 0; i < n; ++i) V(i, k) = u(rng);
    if (p >= 2) CHECK(evaluate(contract(v, a), V.rightCols(p - 1)) == doctest::Approx(evaluate(a, V)));
  }
}

TEST_CASE("fibre metric is the full ordered-tuple sum") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 3 + trial % 3, p = 1 + trial % 3;
    const PointMetric g(random_spd(n, rng));
    const auto a = random_form(n, p, rng), b = random_form(n, p, rng);
    const double brute = brute_full_sum(a, b, inverse_sqrt(g.g()));
    CHECK(form_inner(a, b, g) == doctest::Approx(brute).epsilon(1e-11));
  }
  // p! times the determinant pairing
  const auto e = AlternatingForm::basis(6, MultiIndex{0, 2, 5});
  CHECK(form_norm2(e, PointMetric::euclidean(6)) == doctest::Approx(6.0));
  CHECK(form_norm2(AlternatingForm::constant(3, 2.0), PointMetric::euclidean(3)) == doctest::Approx(4.0));
}

TEST_CASE("Hodge star") {
  const PointMetric e3 = PointMetric::euclidean(3);
  CHECK(max_diff(hodge_star(monomial(3, {0, 1}), e3), monomial(3, {2})) < 1e-15);
  CHECK(max_diff(hodge_star(monomial(3, {0}), e3), monomial(3, {1, 2})) < 1e-15);
  CHECK(max_diff(hodge_star(AlternatingForm::constant(3, 1.0), e3), monomial(3, {0, 1, 2})) < 1e-15);

  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 15; ++trial) {
    const int n = 3 + trial % 4, p = trial % (n + 1);
    const int orient = trial % 2 ? -1 : 1;
    const PointMetric g(random_spd(n, rng), orient);
    const auto a = random_form(n, p, rng), b = random_form(n, p, rng);
    // ** = (-1)^{p(n-p)}
    const double s = (p * (n - p)) % 2 ? -1.0 : 1.0;
    CHECK(max_diff(hodge_star(hodge_star(a, g), g), s * a) < 1e-10);
    // *a ^ b = <a,b>_det vol_g
    AlternatingForm vol(n, n);
    vol.coefficients()[0] = orient * std::sqrt(g.g().determinant());
    const double det_pair = form_inner(a, b, g) / factorial(p);
    CHECK(max_diff(wedge(hodge_star(a, g), b), det_pair * vol) < 1e-10);
    // isometry
    CHECK(form_norm2(hodge_star(a, g), g) / factorial(n - p) ==
          doctest::Approx(form_norm2(a, g) / factorial(p)).epsilon(1e-10));
  }
}

TEST_CASE("musical isomorphisms and one-forms") {
  std::mt19937_64 rng(15);
  const PointMetric g(random_spd(4, rng));
  Vector v(4);
  v << 0.3, -1.0, 0.5, 2.0;
  CHECK((sharp(flat(v, g), g) - v).norm() < 1e-12);
  CHECK((components(flat(v, g)) - g.g() * v).norm() < 1e-12);
  CHECK((musical(musical(v, g, Musical::flat), g, Musical::sharp) - v).norm() < 1e-12);
  CHECK(form_norm2(flat(v, g), g) == doctest::Approx(v.dot(g.g() * v)));
  CHECK((components(one_form(v)) - v).norm() == 0.0);
  // theta -| a through the metric
  const auto a = random_form(4, 2, rng);
  CHECK(max_diff(contract_form(flat(v, g), a, g), contract(v, a)) < 1e-12);
}

TEST_CASE("pullback") {
  std::mt19937_64 rng(16);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto a = random_form(5, 3, rng);
  Matrix M(5, 4), N(4, 3);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 4; ++j) M(i, j) = u(rng);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 3; ++j) N(i, j) = u(rng);
  CHECK(max_diff(pullback(pullback(a, M), N), pullback(a, M * N)) < 1e-12);
  CHECK(evaluate(pullback(a, M), N) == doctest::Approx(evaluate(a, M * N)));
  const auto b = random_form(5, 1, rng);
  CHECK(max_diff(pullback(wedge(a, b), M), wedge(pullback(a, M), pullback(b, M))) < 1e-12);
  // the top form picks up the determinant
  Matrix S(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) S(i, j) = u(rng);
  CHECK(pullback(monomial(3, {0, 1, 2}), S).coefficients()[0] == doctest::Approx(S.determinant()));
}

TEST_CASE("raise lowers back") {
  std::mt19937_64 rng(17);
  const PointMetric g(random_spd(5, rng));
  const auto a = random_form(5, 2, rng);
  const auto up = raise(a, g);
  // <a, a> = sum a_I a^I * p!
  double s = 0.0;
  for (std::size_t r = 0; r < a.size(); ++r) s += a.coefficients()[r] * up.coefficients()[r];
  CHECK(s * 2.0 == doctest::Approx(form_norm2(a, g)));
}

TEST_CASE("derivation action") {
  std::mt19937_64 rng(18);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int n = 5;
  Matrix A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = u(rng);
  const auto a = random_form(n, 2, rng), b = random_form(n, 1, rng);
  // Leibniz rule
  CHECK(max_diff(derivation(A, wedge(a, b)), wedge(derivation(A, a), b) + wedge(a, derivation(A, b))) < 1e-12);
  // first-order part of the pullback by exp(tA)
  const double t = 1e-6;
  const Matrix E = Matrix::Identity(n, n) + t * A;
  const AlternatingForm fd = (1.0 / t) * (pullback(a, E) - a);
  CHECK(max_diff(fd, derivation(A, a)) < 1e-5);
  // skew A acts isometrically to first order
  const Matrix K = A - A.transpose();
  CHECK(std::abs(form_inner(derivation(K, a), a, PointMetric::euclidean(n))) < 1e-12);
}

TEST_CASE("two-form matrices and wedge powers") {
  std::mt19937_64 rng(19);
  const auto w = random_form(6, 2, rng);
  CHECK(max_diff(two_form(two_form_matrix(w)), w) < 1e-15);
  const Matrix M = two_form_matrix(w);
  CHECK((M + M.transpose()).norm() < 1e-15);
  // Pfaffian: w^3 = 3! Pf(M) vol
  const double pf = M(0, 1) * (M(2, 3) * M(4, 5) - M(2, 4) * M(3, 5) + M(2, 5) * M(3, 4)) -
                    M(0, 2) * (M(1, 3) * M(4, 5) - M(1, 4) * M(3, 5) + M(1, 5) * M(3, 4)) +
                    M(0, 3) * (M(1, 2) * M(4, 5) - M(1, 4) * M(2, 5) + M(1, 5) * M(2, 4)) -
                    M(0, 4) * (M(1, 2) * M(3, 5) - M(1, 3) * M(2, 5) + M(1, 5) * M(2, 3)) +
                    M(0, 5) * (M(1, 2) * M(3, 4) - M(1, 3) * M(2, 4) + M(1, 4) * M(2, 3));
  CHECK(wedge_power(w, 3).coefficients()[0] == doctest::Approx(6.0 * pf));
  CHECK(max_diff(wedge_power(w, 0), AlternatingForm::constant(6, 1.0)) == 0.0);
  CHECK(max_diff(wedge_power(w, 2), wedge(w, w)) < 1e-15);
}
