#pragma once

// Exterior algebra over a finite-dimensional real inner-product space.
//
// Forms are stored densely over strictly increasing multi-indices in colex
// order; colex ranks do not depend on the ambient dimension, which lets the
// same index tables serve every n <= kMaxDim. All operations are pure.

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace harmonia {

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kMaxDim = 16;

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Binomial coefficient C(n, k) for 0 <= k <= n <= kMaxDim.
std::size_t binomial(int n, int k);

class MultiIndex {
 public:
  MultiIndex() = default;
  MultiIndex(std::initializer_list<int> indices);
  explicit MultiIndex(std::span<const int> indices);

  static MultiIndex from_mask(std::uint32_t mask);

  int size() const { return len_; }
  int operator[](int k) const { return idx_[static_cast<std::size_t>(k)]; }
  std::uint32_t mask() const;
  std::string to_string() const;

  const std::uint8_t* begin() const { return idx_.data(); }
  const std::uint8_t* end() const { return idx_.data() + len_; }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::array<std::uint8_t, kMaxDim> idx_{};
  std::uint8_t len_ = 0;
};

/// Colex rank of a bitmask among subsets of the same cardinality.
std::size_t colex_rank(std::uint32_t mask);
/// Bitmask of the subset with the given colex rank and cardinality.
std::uint32_t colex_mask(int degree, std::size_t rank);

class AlternatingForm {
 public:
  AlternatingForm() = default;
  AlternatingForm(int dim, int degree);

  /// Single decomposable term c * e^{I}.
  static AlternatingForm basis(int dim, const MultiIndex& index, double c = 1.0);
  static AlternatingForm constant(int dim, double c);
  /// Builds a form from its values on increasing basis tuples.
  template <class F>
  static AlternatingForm from_evaluator(int dim, int degree, F&& f) {
    AlternatingForm out(dim, degree);
    for (std::size_t r = 0; r < out.coeffs_.size(); ++r) {
      out.coeffs_[r] = f(MultiIndex::from_mask(colex_mask(degree, r)));
    }
    return out;
  }

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  std::size_t size() const { return coeffs_.size(); }

  double operator[](const MultiIndex& index) const;
  double coeff_by_mask(std::uint32_t mask) const { return coeffs_[colex_rank(mask)]; }
  /// Value on basis vectors (e_{i_1}, ..., e_{i_p}) in arbitrary order; zero on repeats.
  double at(std::span<const int> indices) const;

  void add(const MultiIndex& index, double value);
  void set(const MultiIndex& index, double value);

  std::span<const double> coefficients() const { return coeffs_; }
  std::span<double> coefficients() { return coeffs_; }
  std::uint32_t mask_at(std::size_t rank) const { return colex_mask(degree_, rank); }

  double max_abs() const;
  bool is_zero(double tol = 0.0) const { return max_abs() <= tol; }

  AlternatingForm& operator+=(const AlternatingForm& other);
  AlternatingForm& operator-=(const AlternatingForm& other);
  AlternatingForm& operator*=(double s);

  friend AlternatingForm operator+(AlternatingForm a, const AlternatingForm& b) { return a += b; }
  friend AlternatingForm operator-(AlternatingForm a, const AlternatingForm& b) { return a -= b; }
  friend AlternatingForm operator*(double s, AlternatingForm a) { return a *= s; }
  friend AlternatingForm operator*(AlternatingForm a, double s) { return a *= s; }
  friend AlternatingForm operator-(AlternatingForm a) { return a *= -1.0; }

 private:
  void check_index(const MultiIndex& index) const;

  int dim_ = 0;
  int degree_ = 0;
  std::vector<double> coeffs_;
};

/// Metric at a point, in a declared basis with an explicit orientation sign.
class PointMetric {
 public:
  explicit PointMetric(const Matrix& g, int orientation = 1);
  static PointMetric euclidean(int n, int orientation = 1);

  int dim() const { return static_cast<int>(g_.rows()); }
  const Matrix& g() const { return g_; }
  const Matrix& g_inv() const { return g_inv_; }
  int orientation() const { return orientation_; }
  double sqrt_det() const { return sqrt_det_; }
  bool is_identity() const { return identity_; }
  /// Orthonormal frame (columns) from Gram-Schmidt of the basis vectors in order.
  const Matrix& frame() const { return frame_; }

 private:
  Matrix g_;
  Matrix g_inv_;
  Matrix frame_;
  double sqrt_det_ = 1.0;
  int orientation_ = 1;
  bool identity_ = false;
};

AlternatingForm wedge(const AlternatingForm& a, const AlternatingForm& b);
/// Interior product v ⌟ a.
AlternatingForm contract(const Vector& v, const AlternatingForm& a);
/// Interior product with a one-form, sharpened through the metric first.
AlternatingForm contract_form(const AlternatingForm& theta, const AlternatingForm& a,
                              const PointMetric& m);
AlternatingForm hodge_star(const AlternatingForm& a, const PointMetric& m);
/// Full-sum fibre metric: sum over all ordered orthonormal p-tuples.
double form_inner(const AlternatingForm& a, const AlternatingForm& b, const PointMetric& m);
double form_norm2(const AlternatingForm& a, const PointMetric& m);

enum class Musical { flat, sharp };
Vector musical(const Vector& x, const PointMetric& m, Musical direction);
AlternatingForm flat(const Vector& v, const PointMetric& m);
Vector sharp(const AlternatingForm& theta, const PointMetric& m);

AlternatingForm one_form(const Vector& components);
Vector components(const AlternatingForm& one_form);

/// a(v_1, ..., v_p) for the columns of `vectors`.
double evaluate(const AlternatingForm& a, const Matrix& vectors);
/// (M^* a)(x_1..x_p) = a(M x_1, ..., M x_p); M maps the new space (cols) into a's space (rows).
AlternatingForm pullback(const AlternatingForm& a, const Matrix& M);
/// Raises all indices with g^{-1}; the result holds a^{I} on increasing I.
AlternatingForm raise(const AlternatingForm& a, const PointMetric& m);
/// Derivation action of an endomorphism A (A e_k = sum_m A(m,k) e_m):
/// (A.a)(X_1..X_p) = sum_s a(X_1, .., A X_s, .., X_p).
AlternatingForm derivation(const Matrix& A, const AlternatingForm& a);
/// Two-form with coefficients B(a,b), a < b; B is expected antisymmetric.
AlternatingForm two_form(const Matrix& B);
/// Antisymmetric matrix of a two-form: M(a,b) = w(e_a, e_b).
Matrix two_form_matrix(const AlternatingForm& w);
/// Coefficient c on e^{i_1} ^ ... ^ e^{i_p} for indices in any order (sign applied, zero on repeats).
AlternatingForm monomial(int dim, std::initializer_list<int> indices, double c = 1.0);
/// p-fold wedge power; degree overflow is an error.
AlternatingForm wedge_power(const AlternatingForm& a, int k);

double factorial(int k);

}  // namespace harmonia
