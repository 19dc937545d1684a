#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "usvt/error.hpp"
#include "usvt/io.hpp"
#include "usvt/linalg.hpp"
#include "usvt/models.hpp"
#include "usvt/quadrature.hpp"

namespace usvt {

/// T(r) = (1/n^2) * sum_{i >= r+1} lambda_i^2, eigenvalues ordered by magnitude.
struct EigenTailProfile {
  Eigen::Index n = 0;
  Vector tail;        // T(0..n)
  Vector eigenvalues; // signed, |lambda_1| >= |lambda_2| >= ...

  double operator()(Eigen::Index r) const { return tail[r]; }
};

inline EigenTailProfile tail_from_eigenvalues(const Vector &values) {
  EigenTailProfile p;
  p.n = values.size();
  const auto order = detail::magnitude_order(values);
  p.eigenvalues.resize(p.n);
  for (Eigen::Index i = 0; i < p.n; ++i)
    p.eigenvalues[i] = values[order[static_cast<std::size_t>(i)]];
  // suffix sums from the smallest magnitude upwards
  p.tail.resize(p.n + 1);
  p.tail[p.n] = 0.0;
  const double scale = p.n > 0 ? 1.0 / (static_cast<double>(p.n) * static_cast<double>(p.n)) : 0.0;
  double running = 0.0;
  for (Eigen::Index i = p.n - 1; i >= 0; --i) {
    running += p.eigenvalues[i] * p.eigenvalues[i];
    p.tail[i] = running * scale;
  }
  return p;
}

/// Eigenvalue tail of any symmetric matrix (e.g. a kernel Gram matrix).
inline EigenTailProfile eigen_tail(const Matrix &m) { return tail_from_eigenvalues(symmetric_eigenvalues(m)); }

inline EigenTailProfile eigen_tail(const EdgeProbabilityMatrix &m) { return eigen_tail(m.matrix()); }

/// ||A - rho M||, the spectral norm of the centred adjacency matrix.
inline double spectral_norm_deviation(const ObservedGraph &a, const EdgeProbabilityMatrix &m, double rho) {
  require_rho(rho);
  detail::require(a.n == m.n(), "spectral_norm_deviation: dimension mismatch");
  return lanczos_spectral_norm(a.dense() - rho * m.matrix());
}

inline double spectral_norm_deviation(const ObservedGraph &a, const EdgeProbabilityMatrix &m) {
  return spectral_norm_deviation(a, m, a.rho);
}

// ---------------------------------------------------------------------------
// integral operators with closed-form spectra

/// Finite prefix of the spectrum of (T g)(x) = \int f(x,y) g(y) mu(dy).
struct OperatorSpectrum {
  std::string kernel;
  Vector eigenvalues;                                // signed, |.| nonincreasing
  std::vector<std::string> labels;                   // eigenfunction names
  std::vector<std::function<double(double)>> eigenfunctions; // unit L2(mu) norm
  Matrix moments;                                    // E[phi_a^2 phi_b^2]
  double total_square_sum = 0.0;                     // sum over the full spectrum of lambda^2
  double domain_lower = 0.0;
  double domain_upper = 1.0;

  Eigen::Index size() const { return eigenvalues.size(); }
};

/// Fourier coefficient of h(x) = |x| on [-1,1]: ((-1)^k - 1) / (pi k)^2 for
/// k >= 1 and 1/2 for k = 0. Its magnitude is 2 sin^2(pi k / 2) / (pi k)^2.
inline double translation_abs_fourier_coefficient(int k) {
  detail::require(k >= 0, "fourier coefficient index must be >= 0");
  if (k == 0)
    return 0.5;
  if (k % 2 == 0)
    return 0.0;
  const double pk = std::numbers::pi * k;
  return -2.0 / (pk * pk);
}

/// lambda_k = (2 / ((2k - 1) pi))^2 for the kernel min(x, y) on [0,1].
inline double min_kernel_eigenvalue(int k) {
  detail::require(k >= 1, "min-kernel eigenvalue index must be >= 1");
  const double v = 2.0 / ((2.0 * k - 1.0) * std::numbers::pi);
  return v * v;
}

inline constexpr int kMomentQuadratureIntervals = 10000;

namespace detail {

/// Fills `moments` by composite Simpson quadrature against the uniform
/// measure, then overwrites the diagonal with `fourth_moments`.
inline void fill_moments(OperatorSpectrum &s, const std::vector<double> &fourth_moments) {
  const Eigen::Index m = s.size();
  const int intervals = kMomentQuadratureIntervals;
  const auto weights = quad::simpson_weights(s.domain_lower, s.domain_upper, intervals);
  const double width = s.domain_upper - s.domain_lower;
  Matrix squares(m, intervals + 1);
  for (Eigen::Index a = 0; a < m; ++a)
    for (int i = 0; i <= intervals; ++i) {
      const double x = s.domain_lower + width * i / intervals;
      const double v = s.eigenfunctions[static_cast<std::size_t>(a)](x);
      squares(a, i) = v * v;
    }
  Vector w(intervals + 1);
  for (int i = 0; i <= intervals; ++i)
    w[i] = weights[static_cast<std::size_t>(i)] / width;
  s.moments = squares * w.asDiagonal() * squares.transpose();
  for (Eigen::Index a = 0; a < m; ++a)
    s.moments(a, a) = fourth_moments[static_cast<std::size_t>(a)];
}

} // namespace detail

/// Spectrum of the convolution operator with h(x) = |x| (period 2) under the
/// uniform measure on [-1,1]. Each nonzero frequency k contributes a cosine
/// and a sine eigenfunction; even k >= 2 have eigenvalue 0 and are omitted.
/// Frequencies 0..K are included.
inline OperatorSpectrum operator_spectrum_translation_abs(int max_frequency) {
  detail::require(max_frequency >= 1, "operator spectrum needs K >= 1");
  OperatorSpectrum s;
  s.kernel = "translation_abs";
  s.domain_lower = -1.0;
  s.domain_upper = 1.0;
  s.total_square_sum = 1.0 / 3.0;
  std::vector<double> values{translation_abs_fourier_coefficient(0)};
  std::vector<double> fourth{1.0};
  s.labels.push_back("const");
  s.eigenfunctions.emplace_back([](double) { return 1.0; });
  for (int k = 1; k <= max_frequency; ++k) {
    const double lambda = translation_abs_fourier_coefficient(k);
    if (lambda == 0.0)
      continue;
    const double w = std::numbers::pi * k;
    for (int kind = 0; kind < 2; ++kind) {
      values.push_back(lambda);
      fourth.push_back(1.5);
      s.labels.push_back((kind == 0 ? "cos" : "sin") + std::to_string(k));
      if (kind == 0)
        s.eigenfunctions.emplace_back([w](double x) { return std::numbers::sqrt2 * std::cos(w * x); });
      else
        s.eigenfunctions.emplace_back([w](double x) { return std::numbers::sqrt2 * std::sin(w * x); });
    }
  }
  s.eigenvalues = Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
  detail::fill_moments(s, fourth);
  return s;
}

/// Spectrum of (T g)(x) = \int_0^1 min(x,y) g(y) dy: eigenfunctions
/// sqrt(2) sin((2k-1) pi x / 2), k = 1..K.
inline OperatorSpectrum operator_spectrum_min(int count) {
  detail::require(count >= 1, "operator spectrum needs K >= 1");
  OperatorSpectrum s;
  s.kernel = "sobolev_min";
  s.total_square_sum = 1.0 / 6.0;
  s.eigenvalues.resize(count);
  std::vector<double> fourth(static_cast<std::size_t>(count), 1.5);
  for (int k = 1; k <= count; ++k) {
    s.eigenvalues[k - 1] = min_kernel_eigenvalue(k);
    const double w = (2.0 * k - 1.0) * std::numbers::pi / 2.0;
    s.labels.push_back("sin" + std::to_string(2 * k - 1));
    s.eigenfunctions.emplace_back([w](double x) { return std::numbers::sqrt2 * std::sin(w * x); });
  }
  detail::fill_moments(s, fourth);
  return s;
}

/// sum_{k > r} lambda_k^2 + (1/n) sum_{k,l <= r} lambda_k lambda_l E[phi_k^2 phi_l^2].
///
/// The infinite tail is the closed-form ||f||^2 minus the first r squares,
/// so only r <= spectrum.size() is required.
inline double theorem6_bound(const OperatorSpectrum &spectrum, Eigen::Index r, Eigen::Index n) {
  detail::require(n >= 1, "theorem6_bound: n must be >= 1");
  detail::require(r >= 0, "theorem6_bound: r must be >= 0");
  if (r > spectrum.size())
    throw ValidationError("theorem6_bound: spectrum prefix has " + std::to_string(spectrum.size()) +
                          " terms, r = " + std::to_string(r) + " requested");
  const Vector head = spectrum.eigenvalues.head(r);
  const double tail = std::max(spectrum.total_square_sum - head.squaredNorm(), 0.0);
  const double diagonal = head.dot(spectrum.moments.topLeftCorner(r, r) * head);
  return tail + diagonal / static_cast<double>(n);
}

// ---------------------------------------------------------------------------
// empirical decay classification

enum class DecayAxis { LogR, R };

struct DecayFit {
  double beta_hat = 0.0; // -slope
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0; // root-mean-square residual of the fit
  int points = 0;
  bool degenerate = false;
};

/// Least-squares fit of log T(r) against log r (or r) for r in [r_lo, r_hi].
/// Points with T(r) <= floor are dropped; fewer than five survivors marks
/// the fit degenerate. A negative floor selects the default 1/n, which bounds
/// what the zeroed diagonal alone can contribute.
inline DecayFit decay_fit(const EigenTailProfile &profile, Eigen::Index r_lo, Eigen::Index r_hi,
                          double floor = -1.0, DecayAxis axis = DecayAxis::LogR) {
  if (r_lo < 1 || r_hi > profile.n - 1 || r_hi - r_lo + 1 < 5)
    throw ValidationError("decay_fit: range must lie in [1, n-1] and hold at least 5 points");
  if (floor < 0.0)
    floor = 1.0 / static_cast<double>(profile.n);
  std::vector<double> xs, ys;
  for (Eigen::Index r = r_lo; r <= r_hi; ++r) {
    const double t = profile.tail[r];
    if (t <= floor)
      continue;
    xs.push_back(axis == DecayAxis::LogR ? std::log(static_cast<double>(r)) : static_cast<double>(r));
    ys.push_back(std::log(t));
  }
  DecayFit fit;
  fit.points = static_cast<int>(xs.size());
  if (fit.points < 5) {
    fit.degenerate = true;
    return fit;
  }
  const double m = fit.points;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.beta_hat = -fit.slope;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / m);
  return fit;
}

// ---------------------------------------------------------------------------
// export

inline std::string tail_csv(const EigenTailProfile &profile) {
  std::string text = "r,tail\n";
  for (Eigen::Index r = 0; r <= profile.n; ++r)
    text += std::to_string(r) + ',' + format_number(profile.tail[r]) + '\n';
  return text;
}

inline std::string spectrum_csv(const OperatorSpectrum &spectrum) {
  std::string text = "k,lambda\n";
  for (Eigen::Index k = 0; k < spectrum.size(); ++k)
    text += std::to_string(k + 1) + ',' + format_number(spectrum.eigenvalues[k]) + '\n';
  return text;
}

} // namespace usvt
