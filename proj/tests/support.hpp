#pragma once

// Independent oracles and generators for the tests. Nothing here calls the
// library's linear algebra or random streams.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace testing_support {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Cyclic Jacobi rotations until the off-diagonal mass vanishes; returns the
/// eigenvalues in ascending order.
inline std::vector<double> jacobi_eigenvalues(Matrix a, double tol = 1e-14, int max_sweeps = 100) {
  const Eigen::Index n = a.rows();
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q)
        off += a(p, q) * a(p, q);
    if (std::sqrt(off) <= tol * std::max(1.0, a.norm()))
      break;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0)
          continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
  }
  std::vector<double> values(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i)
    values[static_cast<std::size_t>(i)] = a(i, i);
  std::sort(values.begin(), values.end());
  return values;
}

/// Singular values of a symmetric matrix via Jacobi: sorted |eigenvalues|.
inline std::vector<double> jacobi_singular_values(const Matrix &a) {
  auto v = jacobi_eigenvalues(a);
  for (auto &x : v)
    x = std::abs(x);
  std::sort(v.begin(), v.end(), std::greater<>());
  return v;
}

inline Matrix random_symmetric(std::mt19937_64 &gen, Eigen::Index n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j)
      a(i, j) = a(j, i) = u(gen);
  return a;
}

inline Matrix random_matrix(std::mt19937_64 &gen, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> g;
  Matrix a(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      a(i, j) = g(gen);
  return a;
}

/// Symmetric 0/1 matrix with zero diagonal, each edge present with probability p.
inline Matrix random_adjacency(std::mt19937_64 &gen, Eigen::Index n, double p) {
  std::bernoulli_distribution b(p);
  Matrix a = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      a(i, j) = a(j, i) = b(gen) ? 1.0 : 0.0;
  return a;
}

/// Symmetric matrix in [0,1] with zero diagonal.
inline Matrix random_probability_matrix(std::mt19937_64 &gen, Eigen::Index n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix a = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      a(i, j) = a(j, i) = u(gen);
  return a;
}

inline double sup_on_grid(int points, double lo, double hi, const auto &f) {
  double worst = 0.0;
  for (int i = 0; i < points; ++i) {
    const double x = lo + (hi - lo) * (i + 0.5) / points;
    worst = std::max(worst, std::abs(f(x)));
  }
  return worst;
}

} // namespace testing_support
