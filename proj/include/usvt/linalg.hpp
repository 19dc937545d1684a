#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <lapacke.h>

#include "usvt/error.hpp"
#include "usvt/rng.hpp"

namespace usvt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Singular value decomposition A = U diag(s) V^T with s nonincreasing.
struct SymmetricSvd {
  Vector singular_values;
  Matrix left;
  Matrix right;
};

/// Eigenpairs of a symmetric matrix ordered by |lambda|, largest first.
struct SymmetricEigen {
  Vector values;
  Matrix vectors;
};

namespace detail {

inline void require_finite(const Matrix &a, const char *what) {
  if (!a.allFinite())
    throw ValidationError(std::string(what) + ": matrix has non-finite entries");
}

inline void require_square(const Matrix &a, const char *what) {
  if (a.rows() != a.cols())
    throw ValidationError(std::string(what) + ": matrix must be square");
}

inline void check_lapack(lapack_int info, const char *routine) {
  if (info != 0)
    throw NumericalError(std::string(routine) + " failed with info = " + std::to_string(info));
}

/// Indices that sort `values` by decreasing magnitude; ties keep input order.
inline std::vector<Eigen::Index> magnitude_order(const Vector &values) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(values[a]) > std::abs(values[b]);
  });
  return order;
}

/// Householder reduction to tridiagonal form, kept so that selected
/// eigenvectors can be back-transformed without a second reduction.
struct Tridiagonal {
  Matrix reflectors;
  Vector diagonal;
  Vector off_diagonal; // length n; last entry is workspace for dstemr
  Vector tau;
};

inline Tridiagonal tridiagonalize(const Matrix &a) {
  const auto n = static_cast<lapack_int>(a.rows());
  Tridiagonal t{a, Vector(n), Vector::Zero(n), Vector::Zero(std::max<lapack_int>(n - 1, 1))};
  check_lapack(LAPACKE_dsytrd(LAPACK_COL_MAJOR, 'L', n, t.reflectors.data(), n, t.diagonal.data(),
                              t.off_diagonal.data(), t.tau.data()),
               "dsytrd");
  return t;
}

/// Eigenpairs of the tridiagonal matrix with ascending indices [first, last]
/// (1-based, LAPACK convention), back-transformed to the original basis.
inline void tridiagonal_pairs(const Tridiagonal &t, lapack_int first, lapack_int last, Vector &values,
                              Matrix &vectors) {
  const auto n = static_cast<lapack_int>(t.diagonal.size());
  const lapack_int count = last - first + 1;
  Vector d = t.diagonal;
  Vector e = t.off_diagonal;
  Vector w(n);
  Matrix z(n, count);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(count));
  lapack_int found = 0;
  lapack_logical try_rac = 1;
  check_lapack(LAPACKE_dstemr(LAPACK_COL_MAJOR, 'V', 'I', n, d.data(), e.data(), 0.0, 0.0, first, last,
                              &found, w.data(), z.data(), n, count, support.data(), &try_rac),
               "dstemr");
  if (found != count)
    throw NumericalError("dstemr returned " + std::to_string(found) + " of " + std::to_string(count) +
                         " requested eigenpairs");
  Matrix reflectors = t.reflectors;
  check_lapack(LAPACKE_dormtr(LAPACK_COL_MAJOR, 'L', 'L', 'N', n, count, reflectors.data(), n,
                              t.tau.data(), z.data(), n),
               "dormtr");
  values = w.head(count);
  vectors = std::move(z);
}

} // namespace detail

/// All eigenvalues of a symmetric matrix, ascending.
inline Vector symmetric_eigenvalues(const Matrix &a) {
  detail::require_square(a, "symmetric_eigenvalues");
  detail::require_finite(a, "symmetric_eigenvalues");
  if (a.rows() == 0)
    return Vector();
  auto t = detail::tridiagonalize(a);
  detail::check_lapack(LAPACKE_dsterf(static_cast<lapack_int>(a.rows()), t.diagonal.data(),
                                      t.off_diagonal.data()),
                       "dsterf");
  return t.diagonal;
}

/// Full symmetric eigendecomposition ordered by |lambda| (largest first).
inline SymmetricEigen symmetric_eigen(const Matrix &a) {
  detail::require_square(a, "symmetric_eigen");
  detail::require_finite(a, "symmetric_eigen");
  const auto n = static_cast<lapack_int>(a.rows());
  if (n == 0)
    return {};
  Matrix work = a;
  Vector w(n);
  Matrix z(n, n);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(n));
  lapack_int found = 0;
  detail::check_lapack(LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'A', 'L', n, work.data(), n, 0.0, 0.0, 0,
                                      0, 0.0, &found, w.data(), z.data(), n, support.data()),
                       "dsyevr");
  const auto order = detail::magnitude_order(w);
  SymmetricEigen out{Vector(n), Matrix(n, n)};
  for (lapack_int i = 0; i < n; ++i) {
    out.values[i] = w[order[i]];
    out.vectors.col(i) = z.col(order[i]);
  }
  return out;
}

/// SVD of a symmetric matrix through its eigendecomposition: s_i = |lambda_i|,
/// u_i = q_i and v_i = sign(lambda_i) q_i.
inline SymmetricSvd svd_full(const Matrix &a) {
  auto eig = symmetric_eigen(a);
  SymmetricSvd out{eig.values.cwiseAbs(), eig.vectors, eig.vectors};
  for (Eigen::Index i = 0; i < eig.values.size(); ++i)
    if (eig.values[i] < 0)
      out.right.col(i) *= -1.0;
  return out;
}

/// Every eigenvalue of a symmetric matrix plus the eigenvectors of those whose
/// magnitude is at least `cutoff - tie_tolerance * max|lambda|`.
struct ThresholdedEigen {
  Vector all_values;      // ascending
  Vector selected_values; // ordered by decreasing magnitude
  Matrix selected_vectors;
};

inline ThresholdedEigen eigenpairs_above(const Matrix &a, double cutoff, double tie_tolerance = 0.0) {
  detail::require_square(a, "eigenpairs_above");
  detail::require_finite(a, "eigenpairs_above");
  const auto n = static_cast<lapack_int>(a.rows());
  ThresholdedEigen out;
  if (n == 0)
    return out;
  const auto t = detail::tridiagonalize(a);
  {
    Vector d = t.diagonal;
    Vector e = t.off_diagonal;
    detail::check_lapack(LAPACKE_dsterf(n, d.data(), e.data()), "dsterf");
    out.all_values = std::move(d);
  }
  const double top = std::max(std::abs(out.all_values[0]), std::abs(out.all_values[n - 1]));
  cutoff -= tie_tolerance * top;
  lapack_int negatives = 0;
  while (negatives < n && out.all_values[negatives] <= -cutoff)
    ++negatives;
  lapack_int positives = 0;
  while (positives < n - negatives && out.all_values[n - 1 - positives] >= cutoff)
    ++positives;

  Vector values(negatives + positives);
  Matrix vectors(n, negatives + positives);
  if (negatives > 0) {
    Vector w;
    Matrix z;
    detail::tridiagonal_pairs(t, 1, negatives, w, z);
    values.head(negatives) = w;
    vectors.leftCols(negatives) = z;
  }
  if (positives > 0) {
    Vector w;
    Matrix z;
    detail::tridiagonal_pairs(t, n - positives + 1, n, w, z);
    values.tail(positives) = w;
    vectors.rightCols(positives) = z;
  }
  const auto order = detail::magnitude_order(values);
  out.selected_values.resize(values.size());
  out.selected_vectors.resize(n, values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    out.selected_values[i] = values[order[i]];
    out.selected_vectors.col(i) = vectors.col(order[i]);
  }
  return out;
}

/// Largest |eigenvalue| of a symmetric matrix by Lanczos iteration with full
/// reorthogonalization. Stops once the Ritz residual bound falls below
/// `rel_tol` times the Ritz value.
inline double lanczos_spectral_norm(const Matrix &a, double rel_tol = 1e-9, int max_steps = 400,
                                    std::uint64_t seed = 0x5eed) {
  detail::require_square(a, "lanczos_spectral_norm");
  detail::require_finite(a, "lanczos_spectral_norm");
  const Eigen::Index n = a.rows();
  if (n == 0)
    return 0.0;
  if (n <= 64) {
    const Vector w = symmetric_eigenvalues(a);
    return std::max(std::abs(w[0]), std::abs(w[n - 1]));
  }
  const Eigen::Index steps_cap = std::min<Eigen::Index>(max_steps, n);
  Matrix basis(n, steps_cap + 1);
  std::vector<double> alpha, beta;
  RandomStream rng(seed, StreamId::Lanczos);
  Vector q(n);
  for (Eigen::Index i = 0; i < n; ++i)
    q[i] = rng.uniform(-1.0, 1.0);
  basis.col(0) = q.normalized();

  double estimate = 0.0;
  for (Eigen::Index j = 0; j < steps_cap; ++j) {
    Vector w = a * basis.col(j);
    alpha.push_back(basis.col(j).dot(w));
    // two passes of classical Gram-Schmidt against the whole basis
    for (int pass = 0; pass < 2; ++pass)
      w -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).transpose() * w);
    const double b = w.norm();

    const auto m = static_cast<Eigen::Index>(alpha.size());
    Matrix tri = Matrix::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      tri(i, i) = alpha[static_cast<std::size_t>(i)];
      if (i + 1 < m)
        tri(i, i + 1) = tri(i + 1, i) = beta[static_cast<std::size_t>(i)];
    }
    Eigen::SelfAdjointEigenSolver<Matrix> ritz(tri);
    const Vector &theta = ritz.eigenvalues();
    const Eigen::Index top = std::abs(theta[0]) > std::abs(theta[m - 1]) ? 0 : m - 1;
    estimate = std::abs(theta[top]);
    const double residual = b * std::abs(ritz.eigenvectors()(m - 1, top));
    if (residual <= rel_tol * estimate || b <= 1e-14 * std::max(estimate, 1.0))
      return estimate;
    beta.push_back(b);
    basis.col(j + 1) = w / b;
  }
  throw NumericalError("lanczos_spectral_norm did not converge in " + std::to_string(steps_cap) +
                       " steps");
}

} // namespace usvt
