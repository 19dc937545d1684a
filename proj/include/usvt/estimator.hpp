#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "usvt/error.hpp"
#include "usvt/linalg.hpp"
#include "usvt/models.hpp"

namespace usvt {

enum class ThresholdMode { Hard, Soft };

inline std::string to_string(ThresholdMode mode) { return mode == ThresholdMode::Hard ? "hard" : "soft"; }

inline ThresholdMode parse_threshold_mode(const std::string &text) {
  if (text == "hard")
    return ThresholdMode::Hard;
  if (text == "soft")
    return ThresholdMode::Soft;
  throw ValidationError("threshold mode must be 'hard' or 'soft', got '" + text + "'");
}

/// tau = c0 * sqrt(n * rho).
inline double default_threshold(Eigen::Index n, double rho, double c0) {
  detail::require(n >= 1, "default_threshold: n must be >= 1");
  require_rho(rho);
  detail::require(c0 > 0.0, "default_threshold: c0 must be positive");
  return c0 * std::sqrt(static_cast<double>(n) * rho);
}

/// Singular values within this fraction of s_1 below tau still count as kept.
inline constexpr double kThresholdTieTolerance = 1e-10;

struct UsvtConfig {
  double rho = 1.0;
  std::optional<double> tau; // explicit threshold; otherwise c0 * sqrt(n rho)
  double c0 = 2.01;
  ThresholdMode mode = ThresholdMode::Hard;

  void validate() const {
    require_rho(rho);
    if (tau)
      detail::require(std::isfinite(*tau) && *tau >= 0.0, "usvt: tau must be finite and >= 0");
    else
      detail::require(c0 > 0.0, "usvt: c0 must be positive");
  }

  double threshold(Eigen::Index n) const { return tau ? *tau : default_threshold(n, rho, c0); }
};

struct EstimateReport {
  EdgeProbabilityMatrix m_hat;
  Matrix m_tilde; // rescaled low-rank part before clipping
  Eigen::Index selected_rank = 0;
  double tau_used = 0.0;
  Vector singular_values; // nonincreasing
};

/// Universal singular value thresholding on a symmetric observation matrix.
///
/// Keeps the singular components with s_i >= tau, rescales by 1/rho, clips
/// to [0,1], zeroes the diagonal and mirrors the upper triangle.
inline EstimateReport usvt(const Matrix &a, const UsvtConfig &cfg) {
  cfg.validate();
  detail::require_square(a, "usvt");
  detail::require_finite(a, "usvt");
  const Eigen::Index n = a.rows();
  detail::require(n >= 1, "usvt: empty matrix");
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 0.0)
    throw ValidationError("usvt: observation matrix must be symmetric");

  EstimateReport report;
  report.tau_used = cfg.threshold(n);
  const auto eig = eigenpairs_above(a, report.tau_used, kThresholdTieTolerance);

  report.singular_values = eig.all_values.cwiseAbs();
  std::sort(report.singular_values.begin(), report.singular_values.end(), std::greater<>());
  report.selected_rank = eig.selected_values.size();

  Vector weights = eig.selected_values;
  if (cfg.mode == ThresholdMode::Soft)
    for (Eigen::Index i = 0; i < weights.size(); ++i)
      weights[i] = std::copysign(std::max(std::abs(weights[i]) - report.tau_used, 0.0), weights[i]);

  const Matrix &q = eig.selected_vectors;
  report.m_tilde = (q * weights.asDiagonal() * q.transpose()) / cfg.rho;
  if (report.selected_rank == 0)
    report.m_tilde = Matrix::Zero(n, n);

  const double scale = std::max(1.0, report.m_tilde.cwiseAbs().maxCoeff());
  if ((report.m_tilde - report.m_tilde.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale)
    throw NumericalError("usvt: rescaled estimate lost symmetry");

  Matrix m_hat(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < j; ++i)
      m_hat(i, j) = m_hat(j, i) = std::clamp(report.m_tilde(i, j), 0.0, 1.0);
    m_hat(j, j) = 0.0;
  }
  report.m_hat = EdgeProbabilityMatrix(std::move(m_hat));
  return report;
}

/// The observation probability is taken from `cfg`, not from `graph.rho`.
inline EstimateReport usvt(const ObservedGraph &graph, const UsvtConfig &cfg) {
  return usvt(graph.dense(), cfg);
}

/// (1/n^2) * sum_ij (a_ij - b_ij)^2.
inline double mse(const Matrix &estimate, const Matrix &truth) {
  if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols())
    throw ValidationError("mse: dimension mismatch");
  const auto n = static_cast<double>(estimate.rows());
  if (n == 0)
    return 0.0;
  return (estimate - truth).squaredNorm() / (n * n);
}

inline double mse(const EdgeProbabilityMatrix &estimate, const EdgeProbabilityMatrix &truth) {
  return mse(estimate.matrix(), truth.matrix());
}

/// Edge density 2|E| / (n(n-1)); a plug-in for rho when it is not known.
inline double estimate_rho(const ObservedGraph &graph) {
  detail::require(graph.n >= 2, "estimate_rho: need at least two vertices");
  const auto n = static_cast<double>(graph.n);
  return 2.0 * static_cast<double>(graph.edge_count()) / (n * (n - 1.0));
}

inline nlohmann::json report_to_json(const EstimateReport &report, std::optional<double> mse_value = {}) {
  nlohmann::json j;
  j["tau"] = report.tau_used;
  j["rank"] = report.selected_rank;
  if (mse_value)
    j["mse"] = *mse_value;
  j["singular_values"] = std::vector<double>(report.singular_values.begin(), report.singular_values.end());
  return j;
}

// ---------------------------------------------------------------------------
// deterministic thresholding bound

struct Lemma1Result {
  bool applicable = false; // tau >= (1 + delta) * ||A - B||
  double perturbation = 0.0;
  double lhs_hard = 0.0;
  double lhs_soft = 0.0;
  double rhs = 0.0;
  Eigen::Index argmin_r = 0;

  bool holds() const { return applicable && lhs_hard <= rhs && lhs_soft <= rhs; }
};

/// Evaluates both sides of
///   ||A_hat - B||_F^2 <= 16 min_r ( tau^2 r + ((1+delta)/delta)^2 sum_{i>r} s_i(B)^2 )
/// for the hard and soft thresholded A_hat. The matrices may be rectangular.
inline Lemma1Result lemma1_check(const Matrix &a, const Matrix &b, double tau, double delta) {
  detail::require(a.rows() == b.rows() && a.cols() == b.cols(), "lemma1_check: dimension mismatch");
  detail::require(tau >= 0.0 && delta > 0.0, "lemma1_check: need tau >= 0 and delta > 0");
  detail::require_finite(a, "lemma1_check");
  detail::require_finite(b, "lemma1_check");

  Lemma1Result out;
  const Matrix diff = a - b;
  out.perturbation = diff.size() == 0 ? 0.0 : Eigen::BDCSVD<Matrix>(diff).singularValues()(0);
  out.applicable = tau >= (1.0 + delta) * out.perturbation;

  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector &s = svd.singularValues();
  Matrix hard = Matrix::Zero(a.rows(), a.cols());
  Matrix soft = Matrix::Zero(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < s.size() && s[i] >= tau; ++i) {
    const Matrix outer = svd.matrixU().col(i) * svd.matrixV().col(i).transpose();
    hard += s[i] * outer;
    soft += (s[i] - tau) * outer;
  }
  out.lhs_hard = (hard - b).squaredNorm();
  out.lhs_soft = (soft - b).squaredNorm();

  const Vector sb = Eigen::BDCSVD<Matrix>(b).singularValues();
  const Eigen::Index m = sb.size();
  Vector tail(m + 1);
  tail[m] = 0.0;
  for (Eigen::Index i = m - 1; i >= 0; --i)
    tail[i] = tail[i + 1] + sb[i] * sb[i];
  const double factor = std::pow((1.0 + delta) / delta, 2);
  out.rhs = std::numeric_limits<double>::infinity();
  for (Eigen::Index r = 0; r <= m; ++r) {
    const double value = tau * tau * static_cast<double>(r) + factor * tail[r];
    if (value < out.rhs) {
      out.rhs = value;
      out.argmin_r = r;
    }
  }
  out.rhs *= 16.0;
  return out;
}

} // namespace usvt
