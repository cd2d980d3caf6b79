#pragma once

#include "harmonia/multilinear.hpp"

#include <Eigen/Eigenvalues>
#include <random>
#include <vector>

namespace harmonia::test {

inline AlternatingForm random_form(int n, int p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  AlternatingForm a(n, p);
  for (auto& c : a.coefficients()) c = u(rng);
  return a;
}

inline Matrix random_spd(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.4, 0.4);
  Matrix A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = u(rng);
  return A * A.transpose() + Matrix::Identity(n, n);
}

inline double max_diff(const AlternatingForm& a, const AlternatingForm& b) { return (a - b).max_abs(); }

// sum over every ordered p-tuple of frame vectors, by brute force
inline double brute_full_sum(const AlternatingForm& a, const AlternatingForm& b, const Matrix& frame) {
  const int n = static_cast<int>(frame.cols());
  const int p = a.degree();
  std::vector<int> idx(static_cast<std::size_t>(p), 0);
  double total = 0.0;
  while (true) {
    Matrix V(frame.rows(), p);
    for (int k = 0; k < p; ++k) V.col(k) = frame.col(idx[static_cast<std::size_t>(k)]);
    total += evaluate(a, V) * evaluate(b, V);
    int k = p - 1;
    while (k >= 0 && ++idx[static_cast<std::size_t>(k)] == n) idx[static_cast<std::size_t>(k--)] = 0;
    if (k < 0) break;
  }
  return total;
}

// g-orthonormal frame from the symmetric inverse square root
inline Matrix inverse_sqrt(const Matrix& g) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(g);
  return es.eigenvectors() * es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}


// full-sum norm in an orthonormal basis
inline double brute_norm2(const AlternatingForm& a) {
  return brute_full_sum(a, a, Matrix::Identity(a.dim(), a.dim()));
}

}  // namespace harmonia::test
