#pragma once

// Analysis operators on form fields: bending, rough Laplacian, the
// curvature-pairing one-form (two routes), harmonic-section and harmonic-map
// residuals, constant fitting and the locally-conformal-parallel machinery.
// Everything works on a Jet, so checks evaluated at one point share the stencil.

#include "harmonia/manifold.hpp"

#include <map>
#include <string>
#include <vector>

namespace harmonia {

struct CheckConfig {
  double tol_alg = 1e-12;
  double tol_d1 = 1e-6;
  double tol_d2 = 1e-4;
  int points = 50;
  std::uint64_t seed = 42;
  int jobs = 1;
};

/// B_ab = <nabla_a sigma, nabla_b sigma>
Matrix gradient_gram(const FirstOrder& fo, std::size_t f);
/// ||nabla sigma||^2 = g^{ab} B_ab
double gradient_norm2(const FirstOrder& fo, std::size_t f);

double bending_density(const Jet& jet, std::size_t f);
AlternatingForm rough_laplacian(const Jet& jet, std::size_t f);

/// Components R_(sigma)(d_c) = g^{ab} <R_{d_c, d_a} sigma, nabla_b sigma>.
Vector curvature_pairing(const Jet& jet, std::size_t f);
/// div((nabla sigma)^t nabla_X sigma) + <nabla_[X,e_i] sigma, nabla_{e_i} sigma> - X(||nabla sigma||^2)/2.
/// Equals curvature_pairing only for harmonic sections.
Vector curvature_pairing_div_form(const Jet& jet, std::size_t f);
/// g-norm of a one-form given by components.
double one_form_norm(const Vector& w, const PointMetric& g);

struct Spectrum {
  std::vector<double> k;  // ascending
  double spread = 0.0;
};
/// Generalized eigenvalues of B against g.
Spectrum ki_spectrum(const FirstOrder& fo, std::size_t f);

/// ||lap sigma - (||nabla sigma||^2 / r^2) sigma|| / ||sigma||
double harmonic_section_residual(const Jet& jet, std::size_t f);
/// ||R_(sigma)||_g
double harmonic_map_residual(const Jet& jet, std::size_t f);

struct Tension {
  Vector horizontal;                 // sharp of the pairing, coordinate components
  AlternatingForm vertical;          // -lap sigma
  AlternatingForm sphere_tangential; // (<lap sigma, sigma>/r^2) sigma - lap sigma
};
Tension tension_components(const Jet& jet, std::size_t f);

struct VariationIntegrands {
  double first = 0.0;  // <lap sigma, phi>
  double hess = 0.0;   // ||nabla phi||^2 - ||phi||^2 ||nabla sigma||^2
  double overlap = 0.0;  // <phi, sigma> / (|phi| |sigma|), must vanish
};
VariationIntegrands variation_integrands(const Jet& jet, std::size_t sigma, std::size_t phi);

/// Least-squares constant c in lhs_i = c T_i, fibre metric at each sample.
class ScalarFit {
 public:
  void add(const AlternatingForm& lhs, const AlternatingForm& basis, const PointMetric& g);
  double value() const;
  /// max ||lhs - c T|| / max ||lhs|| over the added samples, for the fitted c.
  double residual() const;
  double residual(double c) const;
  bool empty() const { return samples_.empty(); }

 private:
  struct Sample {
    AlternatingForm lhs, basis;
    PointMetric metric;
  };
  double num_ = 0.0, den_ = 0.0;
  std::vector<Sample> samples_;
};

/// d_a -| sigma and (d_a)^flat ^ sigma
AlternatingForm coord_contract(int a, const AlternatingForm& s);
AlternatingForm coord_flat_wedge(int a, const AlternatingForm& s, const PointMetric& g);

struct PairHypothesis {
  double lambda = 0.0, mu = 0.0;
  double residual_psi = 0.0, residual_phi = 0.0;
  double eig_psi = 0.0, eig_phi = 0.0;  // -(n-p) lambda mu, -(p+1) lambda mu
  double lap_residual_psi = 0.0, lap_residual_phi = 0.0;  // relative, against rough_laplacian
  double norm_identity_residual = 0.0;  // ||nabla Psi||^2 and ||nabla Phi||^2 identities, relative
};
/// Fits nabla_X Psi = lambda X -| Phi, nabla_X Phi = mu X^flat ^ Psi over the jets (fields psi, phi).
PairHypothesis pair_fit(const std::vector<Jet>& jets, std::size_t psi, std::size_t phi);

/// Lee form from nabla Psi = X^ ^ (theta# -| Psi) - theta ^ (X -| Psi), solved by least squares.
struct LeeFit {
  AlternatingForm theta;
  double residual = 0.0;  // relative
};
LeeFit fit_lee_form(const FirstOrder& fo, std::size_t f);

struct LcpRecord {
  AlternatingForm theta;
  double residual_lcp = 0.0;    // defining equation
  double residual_dstar = 0.0;  // d* Psi = (p-n) theta# -| Psi
  double residual_lap = 0.0;    // lap Psi = p|theta|^2 Psi + (n-2p) theta ^ (theta# -| Psi)
  double theta_closed = 0.0;    // |d theta|
  double theta_parallel = 0.0;  // |nabla theta|
};
LcpRecord lcp_check(const Jet& jet, std::size_t f);

/// Covariant derivative of the fitted Lee form at the jet centre: rows a, columns components.
Matrix lee_form_derivative(const Jet& jet, std::size_t f);

/// (N-2) d|theta|^2 - (d*theta) theta - d*(J theta) J theta - nabla_{J theta#} J theta
/// for an lcK Kaehler-form field omega; J is read off omega itself.
Vector lck_harmonic_map_defect(const Jet& jet, std::size_t omega, double N);

/// (d*theta) theta - 3 d|theta|^2 with theta = scale * fitted Lee form.
Vector spin7_lee_defect(const Jet& jet, std::size_t f, double scale);

/// Lee form -(1/7) *(*d Phi ^ Phi).
AlternatingForm spin7_lee_from_dphi(const Jet& jet, std::size_t f);

/// Relative residuals of the metric compatibility and Ricci identities for fields f1, f2.
double metric_compatibility_identity(const Jet& jet, std::size_t f1, std::size_t f2);
double ricci_identity_residual(const Jet& jet, std::size_t f);
/// <lap sigma, phi> - <nabla sigma, nabla phi> + div((nabla sigma)^t phi), relative.
double laplacian_adjoint_residual(const Jet& jet, std::size_t sigma, std::size_t phi);

}  // namespace harmonia
