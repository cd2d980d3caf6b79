#include "harmonia/multilinear.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

namespace harmonia {
namespace {

struct Tables {
  std::array<std::array<std::size_t, kMaxDim + 1>, kMaxDim + 1> binom{};
  // masks[p] lists all p-subsets of {0..kMaxDim-1} in colex order
  std::array<std::vector<std::uint32_t>, kMaxDim + 1> masks;

  Tables() {
    for (int n = 0; n <= kMaxDim; ++n) {
      binom[n][0] = 1;
      for (int k = 1; k <= n; ++k) binom[n][k] = binom[n - 1][k - 1] + (k <= n - 1 ? binom[n - 1][k] : 0);
    }
    // for a fixed cardinality, colex order is numeric order of the bitmask
    for (std::uint32_t m = 0; m < (1u << kMaxDim); ++m) masks[std::popcount(m)].push_back(m);
  }
};

const Tables& tables() {
  static const Tables t;
  return t;
}

// sign of the shuffle that sorts I followed by J (disjoint)
inline int shuffle_sign(std::uint32_t I, std::uint32_t J) {
  int inv = 0;
  for (std::uint32_t m = J; m; m &= m - 1) inv += std::popcount(I >> (std::countr_zero(m) + 1));
  return (inv & 1) ? -1 : 1;
}

double small_det(double* a, int p) {
  double det = 1.0;
  for (int c = 0; c < p; ++c) {
    int piv = c;
    for (int r = c + 1; r < p; ++r)
      if (std::abs(a[r * p + c]) > std::abs(a[piv * p + c])) piv = r;
    if (a[piv * p + c] == 0.0) return 0.0;
    if (piv != c) {
      for (int k = 0; k < p; ++k) std::swap(a[c * p + k], a[piv * p + k]);
      det = -det;
    }
    det *= a[c * p + c];
    for (int r = c + 1; r < p; ++r) {
      const double f = a[r * p + c] / a[c * p + c];
      for (int k = c; k < p; ++k) a[r * p + k] -= f * a[c * p + k];
    }
  }
  return det;
}

// det M[rows I, cols J]
double minor_det(const Matrix& M, const MultiIndex& I, const MultiIndex& J) {
  const int p = I.size();
  if (p == 0) return 1.0;
  if (p == 1) return M(I[0], J[0]);
  if (p == 2) return M(I[0], J[0]) * M(I[1], J[1]) - M(I[0], J[1]) * M(I[1], J[0]);
  std::array<double, kMaxDim * kMaxDim> buf{};
  for (int r = 0; r < p; ++r)
    for (int c = 0; c < p; ++c) buf[static_cast<std::size_t>(r * p + c)] = M(I[r], J[c]);
  return small_det(buf.data(), p);
}

void require_same_shape(const AlternatingForm& a, const AlternatingForm& b, const char* what) {
  if (a.dim() != b.dim() || a.degree() != b.degree())
    throw GeometryError(std::string(what) + ": dimension/degree mismatch");
}

}  // namespace

std::size_t binomial(int n, int k) {
  if (n < 0 || n > kMaxDim || k < 0 || k > n) return 0;
  return tables().binom[n][k];
}

std::size_t colex_rank(std::uint32_t mask) {
  std::size_t r = 0;
  int k = 1;
  for (std::uint32_t m = mask; m; m &= m - 1, ++k) r += binomial(std::countr_zero(m), k);
  return r;
}

std::uint32_t colex_mask(int degree, std::size_t rank) { return tables().masks[degree][rank]; }

MultiIndex::MultiIndex(std::initializer_list<int> indices)
    : MultiIndex(std::span<const int>(indices.begin(), indices.size())) {}

MultiIndex::MultiIndex(std::span<const int> indices) {
  if (indices.size() > static_cast<std::size_t>(kMaxDim)) throw GeometryError("MultiIndex: too long");
  int prev = -1;
  for (int i : indices) {
    if (i <= prev || i >= kMaxDim) throw GeometryError("MultiIndex: indices must be strictly increasing");
    idx_[len_++] = static_cast<std::uint8_t>(i);
    prev = i;
  }
}

MultiIndex MultiIndex::from_mask(std::uint32_t mask) {
  MultiIndex out;
  for (std::uint32_t m = mask; m; m &= m - 1) out.idx_[out.len_++] = static_cast<std::uint8_t>(std::countr_zero(m));
  return out;
}

std::uint32_t MultiIndex::mask() const {
  std::uint32_t m = 0;
  for (int k = 0; k < len_; ++k) m |= 1u << idx_[k];
  return m;
}

std::string MultiIndex::to_string() const {
  std::ostringstream os;
  os << '(';
  for (int k = 0; k < len_; ++k) os << (k ? "," : "") << int(idx_[k]);
  os << ')';
  return os.str();
}

AlternatingForm::AlternatingForm(int dim, int degree) : dim_(dim), degree_(degree) {
  if (dim < 1 || dim > kMaxDim) throw GeometryError("AlternatingForm: dimension out of range");
  if (degree < 0 || degree > dim) throw GeometryError("AlternatingForm: degree out of range");
  coeffs_.assign(binomial(dim, degree), 0.0);
}

AlternatingForm AlternatingForm::basis(int dim, const MultiIndex& index, double c) {
  AlternatingForm out(dim, index.size());
  out.set(index, c);
  return out;
}

AlternatingForm AlternatingForm::constant(int dim, double c) {
  AlternatingForm out(dim, 0);
  out.coeffs_[0] = c;
  return out;
}

void AlternatingForm::check_index(const MultiIndex& index) const {
  if (index.size() != degree_) throw GeometryError("AlternatingForm: index length != degree");
  if (degree_ > 0 && index[degree_ - 1] >= dim_) throw GeometryError("AlternatingForm: index out of range");
}

double AlternatingForm::operator[](const MultiIndex& index) const {
  check_index(index);
  return coeffs_[colex_rank(index.mask())];
}

double AlternatingForm::at(std::span<const int> indices) const {
  if (static_cast<int>(indices.size()) != degree_) throw GeometryError("AlternatingForm::at: wrong arity");
  std::array<int, kMaxDim> v{};
  std::copy(indices.begin(), indices.end(), v.begin());
  int sign = 1;
  for (int i = 1; i < degree_; ++i)
    for (int j = i; j > 0 && v[j - 1] >= v[j]; --j) {
      if (v[j - 1] == v[j]) return 0.0;
      std::swap(v[j - 1], v[j]);
      sign = -sign;
    }
  std::uint32_t m = 0;
  for (int i = 0; i < degree_; ++i) {
    if (v[i] < 0 || v[i] >= dim_) throw GeometryError("AlternatingForm::at: index out of range");
    m |= 1u << v[i];
  }
  return sign * coeffs_[colex_rank(m)];
}

void AlternatingForm::add(const MultiIndex& index, double value) {
  check_index(index);
  coeffs_[colex_rank(index.mask())] += value;
}

void AlternatingForm::set(const MultiIndex& index, double value) {
  check_index(index);
  coeffs_[colex_rank(index.mask())] = value;
}

double AlternatingForm::max_abs() const {
  double m = 0.0;
  for (double c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

AlternatingForm& AlternatingForm::operator+=(const AlternatingForm& other) {
  require_same_shape(*this, other, "operator+");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

AlternatingForm& AlternatingForm::operator-=(const AlternatingForm& other) {
  require_same_shape(*this, other, "operator-");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

AlternatingForm& AlternatingForm::operator*=(double s) {
  for (double& c : coeffs_) c *= s;
  return *this;
}

PointMetric::PointMetric(const Matrix& g, int orientation) : g_(g), orientation_(orientation) {
  const auto n = g.rows();
  if (n < 1 || g.cols() != n) throw GeometryError("PointMetric: matrix must be square");
  if (orientation != 1 && orientation != -1) throw GeometryError("PointMetric: orientation must be +-1");
  const double scale = g.cwiseAbs().maxCoeff();
  if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, scale))
    throw GeometryError("PointMetric: matrix not symmetric");
  g_ = 0.5 * (g + g.transpose());
  Eigen::LLT<Matrix> llt(g_);
  if (llt.info() != Eigen::Success) throw GeometryError("PointMetric: matrix not positive definite");
  const Matrix L = llt.matrixL();
  if (L.diagonal().minCoeff() <= 1e-300) throw GeometryError("PointMetric: singular metric");
  g_inv_ = llt.solve(Matrix::Identity(n, n));
  g_inv_ = 0.5 * (g_inv_ + g_inv_.transpose());
  sqrt_det_ = L.diagonal().prod();
  // g = L L^T, so the columns of L^{-T} are g-orthonormal; L^{-T} is upper triangular, i.e. Gram-Schmidt
  frame_ = L.transpose().triangularView<Eigen::Upper>().solve(Matrix::Identity(n, n));
  identity_ = (g_ - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() == 0.0;
}

PointMetric PointMetric::euclidean(int n, int orientation) {
  return PointMetric(Matrix::Identity(n, n), orientation);
}

AlternatingForm wedge(const AlternatingForm& a, const AlternatingForm& b) {
  if (a.dim() != b.dim()) throw GeometryError("wedge: dimension mismatch");
  if (a.degree() + b.degree() > a.dim()) throw GeometryError("wedge: degree overflow");
  AlternatingForm out(a.dim(), a.degree() + b.degree());
  auto ca = a.coefficients();
  auto cb = b.coefficients();
  auto co = out.coefficients();
  for (std::size_t i = 0; i < ca.size(); ++i) {
    if (ca[i] == 0.0) continue;
    const std::uint32_t I = a.mask_at(i);
    for (std::size_t j = 0; j < cb.size(); ++j) {
      if (cb[j] == 0.0) continue;
      const std::uint32_t J = b.mask_at(j);
      if (I & J) continue;
      co[colex_rank(I | J)] += shuffle_sign(I, J) * ca[i] * cb[j];
    }
  }
  return out;
}

AlternatingForm contract(const Vector& v, const AlternatingForm& a) {
  if (a.degree() < 1) throw GeometryError("contract: degree-0 input");
  if (v.size() != a.dim()) throw GeometryError("contract: vector length mismatch");
  AlternatingForm out(a.dim(), a.degree() - 1);
  auto ca = a.coefficients();
  auto co = out.coefficients();
  for (std::size_t i = 0; i < ca.size(); ++i) {
    if (ca[i] == 0.0) continue;
    const std::uint32_t I = a.mask_at(i);
    int s = 0;
    for (std::uint32_t m = I; m; m &= m - 1, ++s) {
      const int k = std::countr_zero(m);
      if (v[k] == 0.0) continue;
      co[colex_rank(I & ~(1u << k))] += ((s & 1) ? -1.0 : 1.0) * v[k] * ca[i];
    }
  }
  return out;
}

AlternatingForm contract_form(const AlternatingForm& theta, const AlternatingForm& a, const PointMetric& m) {
  return contract(sharp(theta, m), a);
}

AlternatingForm pullback(const AlternatingForm& a, const Matrix& M) {
  if (M.rows() != a.dim()) throw GeometryError("pullback: matrix rows must match form dimension");
  const int n = static_cast<int>(M.cols());
  const int p = a.degree();
  if (p > n) throw GeometryError("pullback: degree exceeds target dimension");
  AlternatingForm out(n, p);
  auto ca = a.coefficients();
  auto co = out.coefficients();
  for (std::size_t i = 0; i < ca.size(); ++i) {
    if (ca[i] == 0.0) continue;
    const MultiIndex I = MultiIndex::from_mask(a.mask_at(i));
    for (std::size_t j = 0; j < co.size(); ++j) {
      co[j] += ca[i] * minor_det(M, I, MultiIndex::from_mask(out.mask_at(j)));
    }
  }
  return out;
}

AlternatingForm raise(const AlternatingForm& a, const PointMetric& m) {
  if (m.dim() != a.dim()) throw GeometryError("raise: dimension mismatch");
  if (m.is_identity() || a.degree() == 0) return a;
  const Matrix& gi = m.g_inv();
  if (gi.isDiagonal(0.0)) {
    AlternatingForm out = a;
    auto co = out.coefficients();
    for (std::size_t i = 0; i < co.size(); ++i) {
      if (co[i] == 0.0) continue;
      for (std::uint32_t mk = out.mask_at(i); mk; mk &= mk - 1) co[i] *= gi(std::countr_zero(mk), std::countr_zero(mk));
    }
    return out;
  }
  return pullback(a, gi);
}

AlternatingForm hodge_star(const AlternatingForm& a, const PointMetric& m) {
  const int n = a.dim();
  if (m.dim() != n) throw GeometryError("hodge_star: dimension mismatch");
  const AlternatingForm up = raise(a, m);
  AlternatingForm out(n, n - a.degree());
  const std::uint32_t full = (1u << n) - 1u;
  const double s = m.orientation() * m.sqrt_det();
  auto cu = up.coefficients();
  auto co = out.coefficients();
  for (std::size_t i = 0; i < cu.size(); ++i) {
    if (cu[i] == 0.0) continue;
    const std::uint32_t I = up.mask_at(i);
    const std::uint32_t J = full & ~I;
    // alpha ^ beta = <alpha, beta>_det vol  pairs with  *e^I = sign(J, I) e^J
    co[colex_rank(J)] += s * shuffle_sign(J, I) * cu[i];
  }
  return out;
}

double form_inner(const AlternatingForm& a, const AlternatingForm& b, const PointMetric& m) {
  require_same_shape(a, b, "form_inner");
  if (m.dim() != a.dim()) throw GeometryError("form_inner: metric dimension mismatch");
  const AlternatingForm ub = raise(b, m);
  auto ca = a.coefficients();
  auto cb = ub.coefficients();
  double sum = 0.0;
  for (std::size_t i = 0; i < ca.size(); ++i) sum += ca[i] * cb[i];
  return factorial(a.degree()) * sum;
}

double form_norm2(const AlternatingForm& a, const PointMetric& m) { return form_inner(a, a, m); }

Vector musical(const Vector& x, const PointMetric& m, Musical direction) {
  if (x.size() != m.dim()) throw GeometryError("musical: length mismatch");
  return direction == Musical::flat ? Vector(m.g() * x) : Vector(m.g_inv() * x);
}

AlternatingForm flat(const Vector& v, const PointMetric& m) { return one_form(musical(v, m, Musical::flat)); }

Vector sharp(const AlternatingForm& theta, const PointMetric& m) {
  return musical(components(theta), m, Musical::sharp);
}

AlternatingForm one_form(const Vector& c) {
  AlternatingForm out(static_cast<int>(c.size()), 1);
  // colex rank of {i} is i
  for (Eigen::Index i = 0; i < c.size(); ++i) out.coefficients()[static_cast<std::size_t>(i)] = c[i];
  return out;
}

Vector components(const AlternatingForm& a) {
  if (a.degree() != 1) throw GeometryError("components: expected a one-form");
  Vector v(a.dim());
  for (int i = 0; i < a.dim(); ++i) v[i] = a.coefficients()[static_cast<std::size_t>(i)];
  return v;
}

double evaluate(const AlternatingForm& a, const Matrix& vectors) {
  if (vectors.rows() != a.dim() || vectors.cols() != a.degree())
    throw GeometryError("evaluate: expected dim x degree matrix");
  const MultiIndex cols = MultiIndex::from_mask((1u << a.degree()) - 1u);
  double sum = 0.0;
  auto ca = a.coefficients();
  for (std::size_t i = 0; i < ca.size(); ++i) {
    if (ca[i] == 0.0) continue;
    sum += ca[i] * minor_det(vectors, MultiIndex::from_mask(a.mask_at(i)), cols);
  }
  return sum;
}

AlternatingForm derivation(const Matrix& A, const AlternatingForm& a) {
  const int n = a.dim();
  if (A.rows() != n || A.cols() != n) throw GeometryError("derivation: endomorphism size mismatch");
  AlternatingForm out(n, a.degree());
  auto ca = a.coefficients();
  auto co = out.coefficients();
  for (std::size_t r = 0; r < ca.size(); ++r) {
    if (ca[r] == 0.0) continue;
    const std::uint32_t K = a.mask_at(r);
    for (std::uint32_t m = K; m; m &= m - 1) {
      const int k = std::countr_zero(m);
      const std::uint32_t rest = K & ~(1u << k);
      for (int i = 0; i < n; ++i) {
        if (rest & (1u << i)) continue;
        const double Aki = A(k, i);
        if (Aki == 0.0) continue;
        // move e_k from its sorted slot to the slot of e_i
        const int lo = std::min(i, k), hi = std::max(i, k);
        const std::uint32_t between = hi - lo > 1 ? (rest & (((1u << hi) - 1u) & ~((1u << (lo + 1)) - 1u))) : 0u;
        const double sign = (std::popcount(between) & 1) ? -1.0 : 1.0;
        co[colex_rank(rest | (1u << i))] += sign * Aki * ca[r];
      }
    }
  }
  return out;
}

AlternatingForm two_form(const Matrix& B) {
  const int n = static_cast<int>(B.rows());
  AlternatingForm out(n, 2);
  for (int b = 1; b < n; ++b)
    for (int a = 0; a < b; ++a) out.set(MultiIndex{a, b}, B(a, b));
  return out;
}

Matrix two_form_matrix(const AlternatingForm& w) {
  if (w.degree() != 2) throw GeometryError("two_form_matrix: expected a two-form");
  const int n = w.dim();
  Matrix M = Matrix::Zero(n, n);
  for (int b = 1; b < n; ++b)
    for (int a = 0; a < b; ++a) {
      M(a, b) = w[MultiIndex{a, b}];
      M(b, a) = -M(a, b);
    }
  return M;
}

AlternatingForm monomial(int dim, std::initializer_list<int> indices, double c) {
  AlternatingForm out(dim, static_cast<int>(indices.size()));
  std::array<int, kMaxDim> v{};
  std::copy(indices.begin(), indices.end(), v.begin());
  const int p = static_cast<int>(indices.size());
  for (int i = 1; i < p; ++i)
    for (int j = i; j > 0 && v[j - 1] >= v[j]; --j) {
      if (v[j - 1] == v[j]) return out;
      std::swap(v[j - 1], v[j]);
      c = -c;
    }
  out.add(MultiIndex(std::span<const int>(v.data(), static_cast<std::size_t>(p))), c);
  return out;
}

AlternatingForm wedge_power(const AlternatingForm& a, int k) {
  if (k < 0) throw GeometryError("wedge_power: negative exponent");
  AlternatingForm out = AlternatingForm::constant(a.dim(), 1.0);
  for (int i = 0; i < k; ++i) out = wedge(out, a);
  return out;
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace harmonia
