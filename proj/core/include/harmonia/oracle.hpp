#pragma once

// Independent cross-checks of the finite-difference geometry: a projection
// route for covariant derivatives, Gauss-equation and conformal closed-form
// curvature, and Monte-Carlo integrals over round spheres.
// Plain second-order central differences with their own step size.

#include "harmonia/manifold.hpp"

#include <functional>
#include <string>

namespace harmonia {

inline constexpr double kOracleStep = 5e-4;

struct OracleReport {
  std::string quantity;
  double route_a = 0.0;  // size of the main-path quantity
  double route_b = 0.0;  // size of the oracle quantity
  double discrepancy = 0.0;  // relative
  double tolerance = 0.0;
  bool pass = false;
};

/// Embedded models: tangential projection of the ambient derivative of the field
/// extended by zero on the normal bundle. Conformally flat direct models: the
/// closed-form conformal Christoffel symbols.
OracleReport covariant_oracle(const ModelManifold& m, const FormField& s, const ChartPoint& p, double tol = 1e-4);

/// Standard-sign Riemann tensor Rm(i,j,k,l) = <R(d_i,d_j) d_k, d_l>, R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y],
/// from the Gauss equation (embedded) or the conformal-change formula (direct, log_conformal known).
std::vector<double> oracle_riemann(const ModelManifold& m, const ChartPoint& p);
/// Conformal Christoffel symbols gamma[a](k,i) for g = e^{2f} delta.
std::vector<Matrix> conformal_christoffel(const Chart& c, const Vector& u, double h);
bool has_curvature_oracle(const ModelManifold& m);
OracleReport curvature_oracle(const ModelManifold& m, const ChartPoint& p, double tol = 1e-3);

struct McEstimate {
  double value = 0.0;
  double error = 0.0;  // standard error
  long samples = 0;
};
double sphere_volume(int n);
/// Integral of f over the unit sphere S^n (ambient argument), counter-seeded blocks.
McEstimate mc_sphere_integral(int n, const std::function<double(const Vector&)>& f, long samples, std::uint64_t seed);
/// Same, with the model's integrand evaluated at the located chart point; the model must be a unit sphere.
McEstimate mc_integral(const ModelManifold& m, const std::function<double(const ChartPoint&)>& f, long samples,
                       std::uint64_t seed);

}  // namespace harmonia
