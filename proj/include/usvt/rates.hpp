#pragma once

// Rate shapes only: the unknown constants in front of each rate are omitted,
// so compare ratios and exponents, never absolute values.

#include <cmath>
#include <limits>
#include <string>
#include <variant>

#include "usvt/error.hpp"
#include "usvt/models.hpp"
#include "usvt/spectral.hpp"

namespace usvt {

/// Threshold constant for the dense regime (n rho >> log^4 n).
inline constexpr double kKappaDense = 2.01;
/// Threshold constant for the sparse regime (n rho >> log n).
inline constexpr double kKappaSparse = 4.01;

struct RateFamily {
  enum class Kind { SBM, Holder, Sobolev, Analytic };
  Kind kind = Kind::SBM;
  int k = 1;
  double alpha = 1.0;
  int d = 1;

  static RateFamily sbm(int blocks) { return {Kind::SBM, blocks, 1.0, 1}; }
  static RateFamily holder(double a, int dim = 1) { return {Kind::Holder, 1, a, dim}; }
  static RateFamily sobolev(double a, int dim = 1) { return {Kind::Sobolev, 1, a, dim}; }
  static RateFamily analytic(int dim = 1) { return {Kind::Analytic, 1, 1.0, dim}; }

  std::string label() const {
    switch (kind) {
    case Kind::SBM:
      return "sbm";
    case Kind::Holder:
      return "holder";
    case Kind::Sobolev:
      return "sobolev";
    case Kind::Analytic:
      return "analytic";
    }
    return "unknown";
  }

  void validate() const {
    detail::require(k >= 1, "rate family: k must be >= 1");
    detail::require(d >= 1, "rate family: d must be >= 1");
    detail::require(alpha > 0.0 && std::isfinite(alpha), "rate family: alpha must be positive");
  }
};

struct RateQuery {
  Eigen::Index n = 1;
  double rho = 1.0;
  RateFamily family;
  double kappa = kKappaDense;
  double delta = 0.01;

  void validate() const {
    detail::require(n >= 1, "rate query: n must be >= 1");
    require_rho(rho);
    family.validate();
    detail::require(kappa > 0.0, "rate query: kappa must be positive");
    detail::require(delta > 0.0, "rate query: delta must be positive");
  }
};

struct OracleBound {
  double value = 0.0;
  Eigen::Index argmin_r = 0;
};

/// 16 (1+delta)^2 min_{0<=r<=n} ( kappa^2 r / (n rho) + T(r) / delta^2 ),
/// by exhaustive scan; ties go to the smallest r.
inline OracleBound theorem1_bound(const EigenTailProfile &tail, Eigen::Index n, double rho, double kappa,
                                  double delta) {
  detail::require(n >= 1 && tail.tail.size() >= n + 1, "theorem1_bound: tail profile shorter than n + 1");
  require_rho(rho);
  detail::require(kappa > 0.0 && delta > 0.0, "theorem1_bound: kappa and delta must be positive");
  const double n_rho = static_cast<double>(n) * rho;
  OracleBound best{std::numeric_limits<double>::infinity(), 0};
  for (Eigen::Index r = 0; r <= n; ++r) {
    // evaluated term by term in the order the bound is written
    const double value = kappa * kappa * static_cast<double>(r) / n_rho + tail.tail[r] / (delta * delta);
    if (value < best.value) {
      best.value = value;
      best.argmin_r = r;
    }
  }
  best.value *= 16.0 * (1.0 + delta) * (1.0 + delta);
  return best;
}

struct PolynomialDecay {
  double beta;
};
struct SuperPolynomialDecay {
  double alpha;
  double c2 = 1.0;
};
using DecayShape = std::variant<PolynomialDecay, SuperPolynomialDecay>;

/// Polynomial(beta): (n rho)^(-beta/(beta+1)).
/// SuperPolynomial(alpha): log(n rho)^(1/alpha) / (n rho).
inline double corollary1_rate(const DecayShape &decay, Eigen::Index n, double rho) {
  require_rho(rho);
  const double nr = static_cast<double>(n) * rho;
  detail::require(nr >= 1.0, "corollary1_rate: need n * rho >= 1");
  if (const auto *p = std::get_if<PolynomialDecay>(&decay)) {
    detail::require(p->beta > 0.0, "corollary1_rate: beta must be positive");
    return std::pow(nr, -p->beta / (p->beta + 1.0));
  }
  const auto &s = std::get<SuperPolynomialDecay>(decay);
  detail::require(s.alpha > 0.0, "corollary1_rate: alpha must be positive");
  return std::pow(std::log(nr), 1.0 / s.alpha) / nr;
}

/// Tail-decay exponent implied by smoothness alpha in dimension d.
inline double smoothness_decay_exponent(double alpha, int d) {
  detail::require(alpha > 0.0 && d >= 1, "smoothness_decay_exponent: need alpha > 0 and d >= 1");
  return 2.0 * alpha / d;
}

/// (n rho)^(-2 alpha / (2 alpha + d)).
inline double smooth_rate(Eigen::Index n, double rho, double alpha, int d) {
  return corollary1_rate(PolynomialDecay{smoothness_decay_exponent(alpha, d)}, n, rho);
}

/// log^d(n rho) / (n rho).
inline double analytic_rate(Eigen::Index n, double rho, int d) {
  detail::require(d >= 1, "analytic_rate: d must be >= 1");
  return corollary1_rate(SuperPolynomialDecay{1.0 / d}, n, rho);
}

/// min(k / (n rho), 1).
inline double sbm_rate(Eigen::Index n, double rho, int k) {
  require_rho(rho);
  detail::require(n >= 1 && k >= 1, "sbm_rate: need n >= 1 and k >= 1");
  return std::min(static_cast<double>(k) / (static_cast<double>(n) * rho), 1.0);
}

/// Below or at this n rho the minimax rate is taken as bounded (case (i)).
inline constexpr double kBoundedDegreeCutoff = 10.0;

struct MinimaxRate {
  double rate = 1.0;
  std::string case_label;
};

/// Minimax rate for alpha-Hoelder graphons with d = 1:
///   (i)   n rho <= 10                                       -> 1
///   (ii)  log(n rho) <  alpha log n + (alpha+1) log log n   -> log(n rho) / (n rho)
///   (iii) log(n rho) >= alpha log n + (alpha+1) log log n   -> (n^2 rho)^(-alpha/(alpha+1))
inline MinimaxRate minimax_rate(Eigen::Index n, double rho, double alpha) {
  detail::require(alpha > 0.0, "minimax_rate: alpha must be positive");
  detail::require(n >= 1, "minimax_rate: n must be >= 1");
  require_rho(rho);
  const double nd = static_cast<double>(n);
  const double nr = nd * rho;
  if (nr <= kBoundedDegreeCutoff)
    return {1.0, "i"};
  const double log_n = std::log(nd);
  const double boundary = alpha * log_n + (alpha + 1.0) * std::log(log_n);
  if (std::log(nr) >= boundary)
    return {std::pow(nd * nd * rho, -alpha / (alpha + 1.0)), "iii"};
  return {std::log(nr) / nr, "ii"};
}

/// min(k^2/(n^2 rho) + log k/(n rho), 1).
inline double sbm_minimax_rate(Eigen::Index n, double rho, int k) {
  require_rho(rho);
  detail::require(n >= 1 && k >= 1, "sbm_minimax_rate: need n >= 1 and k >= 1");
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  return std::min(kd * kd / (nd * nd * rho) + std::log(kd) / (nd * rho), 1.0);
}

/// Rate shape of the estimator for a family.
inline double usvt_rate(Eigen::Index n, double rho, const RateFamily &family) {
  family.validate();
  switch (family.kind) {
  case RateFamily::Kind::SBM:
    return sbm_rate(n, rho, family.k);
  case RateFamily::Kind::Holder:
  case RateFamily::Kind::Sobolev:
    return smooth_rate(n, rho, family.alpha, family.d);
  case RateFamily::Kind::Analytic:
    return analytic_rate(n, rho, family.d);
  }
  throw ValidationError("usvt_rate: unknown family");
}

struct GapReport {
  double usvt_rate = 0.0;
  double minimax_rate = 0.0;
  double ratio = 0.0;         // usvt / minimax
  std::string minimax_case;   // "sbm" or the smooth-case label
  double exponent_ratio = 1.0; // estimator exponent over minimax exponent (smooth families)
};

/// Pairs the estimator's rate shape with the minimax rate shape. Smooth
/// families need d = 1; analytic graphons have no known minimax rate.
inline GapReport gap_report(Eigen::Index n, double rho, const RateFamily &family) {
  family.validate();
  GapReport out;
  switch (family.kind) {
  case RateFamily::Kind::SBM:
    out.usvt_rate = sbm_rate(n, rho, family.k);
    out.minimax_rate = sbm_minimax_rate(n, rho, family.k);
    out.minimax_case = "sbm";
    break;
  case RateFamily::Kind::Holder:
  case RateFamily::Kind::Sobolev: {
    if (family.d != 1)
      throw ValidationError("gap_report: minimax rate is only available for d = 1");
    out.usvt_rate = smooth_rate(n, rho, family.alpha, 1);
    const auto mm = minimax_rate(n, rho, family.alpha);
    out.minimax_rate = mm.rate;
    out.minimax_case = mm.case_label;
    out.exponent_ratio = 2.0 * family.alpha / (2.0 * family.alpha + 1.0);
    break;
  }
  case RateFamily::Kind::Analytic:
    throw ValidationError("gap_report: no minimax rate is available for analytic graphons");
  }
  out.ratio = out.usvt_rate / out.minimax_rate;
  return out;
}

} // namespace usvt
