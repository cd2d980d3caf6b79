#pragma once

// Constant-coefficient tensors of the G-structures on the model fibre.

#include "harmonia/multilinear.hpp"

#include <array>
#include <map>
#include <string>
#include <vector>

namespace harmonia {

/// Basis products of a composition algebra; basis vector 0 is the unit.
class AlgebraTable {
 public:
  static const AlgebraTable& quaternions();
  /// Cayley-Dickson double of the quaternions, (a,b)(c,d) = (ac - d*b, da + bc*).
  static const AlgebraTable& cayley_dickson_octonions();
  /// Octonions relabelled so that e_a e_b = -delta_ab + sum_c phi(a,b,c) e_c for the cyclic G2 form.
  static const AlgebraTable& octonions();

  int dim() const { return dim_; }
  /// e_i e_j = sign(i,j) e_{index(i,j)}
  int index(int i, int j) const { return idx_[i][j]; }
  int sign(int i, int j) const { return sgn_[i][j]; }

  AlgebraTable(int dim, const std::array<std::array<int, 8>, 8>& idx,
               const std::array<std::array<int, 8>, 8>& sgn);

 private:
  int dim_;
  std::array<std::array<int, 8>, 8> idx_{};
  std::array<std::array<int, 8>, 8> sgn_{};
};

Vector algebra_mul(const AlgebraTable& t, const Vector& x, const Vector& y);
Vector algebra_conj(const Vector& x);

/// Sum over k < n of e^{2k} ^ e^{2k+1} on R^{2n}.
AlternatingForm kaehler_form(int n);
/// Standard complex structure on R^{2n}: J e_{2k} = -e_{2k+1}, J e_{2k+1} = e_{2k}, so omega = <., J.>.
Matrix standard_complex_structure(int n);

struct Su3Forms {
  AlternatingForm omega, psi_plus, psi_minus;
};
Su3Forms su3_forms();
/// -psi(J., ., .) for a three-form psi and endomorphism J.
AlternatingForm twist_first_slot(const AlternatingForm& psi, const Matrix& J);

struct G2Forms {
  AlternatingForm phi, star_phi;
};
G2Forms g2_forms();

/// Spin(7) four-form on R^8 with basis index 0 = e and index i+1 = e_i.
AlternatingForm spin7_form(int sigma = 1);
/// Generators of the seven-dimensional complement of spin(7) in Lambda^2.
AlternatingForm spin7_beta(int i, int sigma = 1);
/// Matrix of psi -> *(psi ^ Phi) on Lambda^2 R^8 in the colex basis.
Matrix spin7_operator(const AlternatingForm& Phi, const PointMetric& m);

struct Spin7Split {
  AlternatingForm part21, part7;
  std::vector<double> eigenvalues;  // sorted ascending
};
/// Splits a two-form into the +1 and -3 eigenspaces of psi -> *(psi ^ Phi).
Spin7Split spin7_split(const AlternatingForm& psi, const AlternatingForm& Phi);
PointMetric induced_metric_spin7(const AlternatingForm& Phi);

/// Almost contact metric structure on a fibre: F = <., phi .>.
struct ContactModel {
  int n = 0;
  PointMetric metric = PointMetric::euclidean(1);
  Matrix phi;
  Vector zeta;
  AlternatingForm eta, F;
};
ContactModel contact_model(int n);

struct ThreeContactModel {
  int n = 0;
  PointMetric metric = PointMetric::euclidean(1);
  std::array<Matrix, 3> phi;
  std::array<Vector, 3> zeta;
  std::array<AlternatingForm, 3> eta, F;
};
/// Tangent space of S^{4n+3} at (0,..,0,1) in H^{n+1}: coordinates 0..4n-1 span H^n, the last three are zeta_1..3.
ThreeContactModel three_contact_model(int n);

/// Hyperkaehler forms omega_A = <., A .> for A = left multiplication by i, j, k on H^n.
std::array<AlternatingForm, 3> hyperkaehler_forms(int n);
std::array<Matrix, 3> hyperkaehler_structures(int n);
/// Sum over A of omega_A ^ omega_A.
AlternatingForm quaternionic_four_form(int n);

enum class CompositeKind {
  eta_wedge_F_r,   // eta ^ F^r
  F_r1,            // F^{r+1}
  Psi_r,           // sum_i eta_i ^ F_i^r
  Omega_r,         // sum_i F_i^{r+1}
  vartheta,        // (2n+3) eta_1 ^ eta_2 ^ eta_3 + sum_i eta_i ^ F_i
  cyc_eta_F_F,     // cyclic eta_i ^ F_j ^ F_k
  F1F2F3,
  etaF_plus_etaF,  // eta_i ^ F_j + eta_j ^ F_i
  FiFj,
  Fk_eta_eta,      // F_k + (2n+1) eta_i ^ eta_j
  cyc_eta_eta_F,   // cyclic eta_i ^ eta_j ^ F_k
  psi_mixed,       // Omega^(1) + (2n+3) cyclic eta_i ^ eta_j ^ F_k
  eta_eta_eta,
  Omega_quaternionic,
};

CompositeKind parse_composite_kind(const std::string& label);
std::string composite_label(CompositeKind kind);

/// Composite built from given structure forms. `i`,`j` select indices (0-based) where relevant.
AlternatingForm compose_contact(CompositeKind kind, int r, const AlternatingForm& eta, const AlternatingForm& F);
AlternatingForm compose_three_contact(CompositeKind kind, int n, int r, const std::array<AlternatingForm, 3>& eta,
                                      const std::array<AlternatingForm, 3>& F, int i = 0, int j = 1);

/// Flat-fibre composite on R^{2n+1}, R^{4n+3} or, for the quaternionic four-form, R^{8n}
/// (there r is the wedge power, at least 1).
AlternatingForm contact_composites(int n, CompositeKind kind, int r, int i = 0, int j = 1);

}  // namespace harmonia
