#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "usvt/error.hpp"
#include "usvt/linalg.hpp"
#include "usvt/models.hpp"
#include "usvt/quadrature.hpp"

namespace usvt {

/// Largest integer strictly smaller than alpha (so alpha = 1 gives 0).
/// Every degree choice in this module goes through here.
inline int strict_floor(double alpha) {
  detail::require(alpha > 0.0 && std::isfinite(alpha), "smoothness alpha must be positive");
  return static_cast<int>(std::ceil(alpha)) - 1;
}

inline std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n)
    return 0;
  std::uint64_t out = 1;
  for (int i = 1; i <= k; ++i)
    out = out * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return out;
}

/// Number of monomials x^kappa with |kappa| <= degree in d variables.
inline Eigen::Index monomial_count(int degree, int d) {
  detail::require(d >= 1 && degree >= 0, "monomial_count: need d >= 1 and degree >= 0");
  std::uint64_t total = 0;
  for (int i = 0; i <= degree; ++i)
    total += binomial(i + d - 1, d - 1);
  return static_cast<Eigen::Index>(total);
}

/// C0(alpha, d) = sum_{i=0}^{strict_floor(alpha)} binom(i + d - 1, d - 1).
inline Eigen::Index c0(double alpha, int d) { return monomial_count(strict_floor(alpha), d); }

using MultiIndex = std::vector<int>;

/// Multi-indices with |kappa| <= degree, graded by total degree and, within a
/// degree, in lexicographic order with the first exponent largest.
inline std::vector<MultiIndex> multi_indices(int degree, int d) {
  std::vector<MultiIndex> out;
  MultiIndex current(static_cast<std::size_t>(d), 0);
  std::function<void(int, int)> fill = [&](int axis, int remaining) {
    if (axis == d - 1) {
      current[static_cast<std::size_t>(axis)] = remaining;
      out.push_back(current);
      return;
    }
    for (int e = remaining; e >= 0; --e) {
      current[static_cast<std::size_t>(axis)] = e;
      fill(axis + 1, remaining - e);
    }
  };
  for (int t = 0; t <= degree; ++t)
    fill(0, t);
  return out;
}

inline double factorial(int m) {
  double f = 1.0;
  for (int i = 2; i <= m; ++i)
    f *= i;
  return f;
}

/// Equal partition of [0,1)^d into k^d half-open cubes. Cells are numbered
/// with the first axis varying slowest.
struct CubePartition {
  int k = 1;
  int d = 1;

  CubePartition() = default;
  CubePartition(int cells_per_axis, int dim) : k(cells_per_axis), d(dim) {
    detail::require(k >= 1 && d >= 1, "cube partition: need k >= 1 and d >= 1");
  }

  Eigen::Index cell_count() const {
    Eigen::Index c = 1;
    for (int j = 0; j < d; ++j)
      c *= k;
    return c;
  }

  double width() const { return 1.0 / k; }

  /// floor(k x_j) per axis; x_j = 1 is mapped to the last cell.
  Eigen::Index cell_of(std::span<const double> x) const {
    Eigen::Index index = 0;
    for (int j = 0; j < d; ++j) {
      const double v = x[static_cast<std::size_t>(j)];
      if (!(v >= 0.0 && v <= 1.0))
        throw ValidationError("cube partition: point outside [0,1]^d");
      const int i = std::min(static_cast<int>(std::floor(k * v)), k - 1);
      index = index * k + i;
    }
    return index;
  }

  std::vector<int> axis_indices(Eigen::Index cell) const {
    std::vector<int> idx(static_cast<std::size_t>(d));
    for (int j = d - 1; j >= 0; --j) {
      idx[static_cast<std::size_t>(j)] = static_cast<int>(cell % k);
      cell /= k;
    }
    return idx;
  }

  std::vector<double> lower_corner(Eigen::Index cell) const {
    const auto idx = axis_indices(cell);
    std::vector<double> lo(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j)
      lo[static_cast<std::size_t>(j)] = static_cast<double>(idx[static_cast<std::size_t>(j)]) / k;
    return lo;
  }

  std::vector<double> center(Eigen::Index cell) const {
    auto c = lower_corner(cell);
    for (auto &v : c)
      v += 0.5 / k;
    return c;
  }

  /// Local coordinate t = k (x - lower corner) in [0,1]^d.
  std::vector<double> local(Eigen::Index cell, std::span<const double> x) const {
    auto t = lower_corner(cell);
    for (int j = 0; j < d; ++j)
      t[static_cast<std::size_t>(j)] = k * (x[static_cast<std::size_t>(j)] - t[static_cast<std::size_t>(j)]);
    return t;
  }
};

inline double monomial(const MultiIndex &kappa, std::span<const double> t) {
  double v = 1.0;
  for (std::size_t j = 0; j < kappa.size(); ++j)
    for (int e = 0; e < kappa[j]; ++e)
      v *= t[j];
  return v;
}

/// Piecewise polynomial of a fixed degree on an equal cube partition. Each
/// cell stores coefficients over `basis` in that cell's local coordinates.
struct PiecewisePolynomial {
  CubePartition partition;
  int degree = 0;
  std::vector<MultiIndex> basis;
  Matrix coefficients; // cell_count x basis.size()

  PiecewisePolynomial() = default;
  PiecewisePolynomial(CubePartition p, int deg)
      : partition(p), degree(deg), basis(multi_indices(deg, p.d)),
        coefficients(Matrix::Zero(p.cell_count(), static_cast<Eigen::Index>(basis.size()))) {}

  double evaluate_in_cell(Eigen::Index cell, std::span<const double> x) const {
    const auto t = partition.local(cell, x);
    double v = 0.0;
    for (std::size_t b = 0; b < basis.size(); ++b)
      v += coefficients(cell, static_cast<Eigen::Index>(b)) * monomial(basis[b], t);
    return v;
  }

  double operator()(std::span<const double> x) const { return evaluate_in_cell(partition.cell_of(x), x); }

  double operator()(double x) const { return (*this)(std::span<const double>(&x, 1)); }
};

inline nlohmann::json piecewise_to_json(const PiecewisePolynomial &p) {
  nlohmann::json j;
  j["k"] = p.partition.k;
  j["d"] = p.partition.d;
  j["degree"] = p.degree;
  j["coordinates"] = "local";
  j["monomials"] = p.basis;
  auto cells = nlohmann::json::array();
  for (Eigen::Index c = 0; c < p.coefficients.rows(); ++c) {
    std::vector<double> row(p.coefficients.cols());
    for (Eigen::Index b = 0; b < p.coefficients.cols(); ++b)
      row[static_cast<std::size_t>(b)] = p.coefficients(c, b);
    cells.push_back(row);
  }
  j["cells"] = cells;
  return j;
}

inline PiecewisePolynomial piecewise_from_json(const nlohmann::json &j) {
  try {
    PiecewisePolynomial p(CubePartition(j.at("k").get<int>(), j.at("d").get<int>()), j.at("degree").get<int>());
    const auto &cells = j.at("cells");
    detail::require(static_cast<Eigen::Index>(cells.size()) == p.coefficients.rows(),
                    "piecewise JSON: wrong number of cells");
    for (Eigen::Index c = 0; c < p.coefficients.rows(); ++c) {
      detail::require(static_cast<Eigen::Index>(cells[c].size()) == p.coefficients.cols(),
                      "piecewise JSON: wrong coefficient count");
      for (Eigen::Index b = 0; b < p.coefficients.cols(); ++b)
        p.coefficients(c, b) = cells[c][b].get<double>();
    }
    return p;
  } catch (const nlohmann::json::exception &e) {
    throw ValidationError(std::string("piecewise JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Taylor construction

/// A function on [0,1]^d with optional exact partial derivatives.
struct SmoothFunction {
  int d = 1;
  std::function<double(std::span<const double>)> value;
  std::function<double(std::span<const double>, std::span<const int>)> partial; // may be empty
};

/// Central finite-difference partial derivative of multi-index `order` with
/// step h, built as a tensor product of 1-D difference stencils.
inline double finite_difference(const std::function<double(std::span<const double>)> &f,
                                std::span<const double> x, std::span<const int> order, double h) {
  const auto d = x.size();
  std::vector<double> point(x.begin(), x.end());
  std::function<double(std::size_t)> recurse = [&](std::size_t axis) -> double {
    if (axis == d)
      return f(point);
    const int m = order[axis];
    if (m == 0)
      return recurse(axis + 1);
    const double base = x[axis];
    double sum = 0.0;
    for (int i = 0; i <= m; ++i) {
      point[axis] = base + (0.5 * m - i) * h;
      sum += ((i % 2) ? -1.0 : 1.0) * static_cast<double>(binomial(m, i)) * recurse(axis + 1);
    }
    point[axis] = base;
    return sum / std::pow(h, m);
  };
  return recurse(0);
}

namespace detail {

/// Adds c * prod_j (w (t_j - 1/2))^{kappa_j} to `coefficients` (local basis).
inline void add_shifted_monomial(Eigen::Ref<Matrix> coefficients, Eigen::Index cell,
                                 const std::vector<MultiIndex> &basis, const MultiIndex &kappa, double c,
                                 double w) {
  const std::size_t d = kappa.size();
  MultiIndex m(d, 0);
  std::function<void(std::size_t, double)> expand = [&](std::size_t axis, double weight) {
    if (axis == d) {
      for (std::size_t b = 0; b < basis.size(); ++b)
        if (basis[b] == m) {
          coefficients(cell, static_cast<Eigen::Index>(b)) += weight;
          return;
        }
      return;
    }
    const int e = kappa[axis];
    for (int p = 0; p <= e; ++p) {
      m[axis] = p;
      const double term = static_cast<double>(binomial(e, p)) * std::pow(-0.5, e - p) * std::pow(w, e);
      expand(axis + 1, weight * term);
    }
    m[axis] = 0;
  };
  expand(0, c);
}

} // namespace detail

/// Degree-ell Taylor expansion of `fn` about every cell centre of the k^d
/// partition. Missing derivative handles fall back to central differences
/// with step (cell width) / 1000.
inline PiecewisePolynomial taylor_piecewise(const SmoothFunction &fn, int k, int ell) {
  detail::require(static_cast<bool>(fn.value), "taylor_piecewise: function has no value handle");
  detail::require(ell >= 0, "taylor_piecewise: degree must be >= 0");
  PiecewisePolynomial p(CubePartition(k, fn.d), ell);
  const double w = p.partition.width();
  const double h = w / 1000.0;
  for (Eigen::Index cell = 0; cell < p.partition.cell_count(); ++cell) {
    const auto z = p.partition.center(cell);
    for (const auto &kappa : p.basis) {
      int total = 0;
      double kappa_factorial = 1.0;
      for (int e : kappa) {
        total += e;
        kappa_factorial *= factorial(e);
      }
      double derivative;
      if (total == 0)
        derivative = fn.value(z);
      else if (fn.partial)
        derivative = fn.partial(z, kappa);
      else
        derivative = finite_difference(fn.value, z, kappa, h);
      if (!std::isfinite(derivative))
        throw NumericalError("taylor_piecewise: derivative evaluation failed");
      detail::add_shifted_monomial(p.coefficients, cell, p.basis, kappa, derivative / kappa_factorial, w);
    }
  }
  return p;
}

/// Test function in the Hoelder class H(alpha, L) on [0,1], where L bounds
/// (1/l!) |g^(l)(x) - g^(l)(x')| / |x - x'|^(alpha - l) with l = strict_floor(alpha).
struct HolderTestFunction {
  std::string name;
  double alpha = 1.0;
  double L = 1.0;
  SmoothFunction fn;
};

/// |x - 1/2|^alpha, alpha in (0,1], with L = 1.
inline HolderTestFunction holder_abs_power(double alpha) {
  detail::require(alpha > 0.0 && alpha <= 1.0, "holder_abs_power: alpha must lie in (0,1]");
  HolderTestFunction out;
  out.name = "abs_power";
  out.alpha = alpha;
  out.L = 1.0;
  out.fn.value = [alpha](std::span<const double> x) { return std::pow(std::abs(x[0] - 0.5), alpha); };
  return out;
}

/// sin(2 pi x) viewed in H(alpha, L) for integer alpha >= 1: the
/// (alpha-1)-th derivative is Lipschitz with constant (2 pi)^alpha, so
/// L = (2 pi)^alpha / (alpha - 1)!.
inline HolderTestFunction holder_sine(int alpha) {
  detail::require(alpha >= 1, "holder_sine: alpha must be >= 1");
  const double w = 2.0 * std::numbers::pi;
  HolderTestFunction out;
  out.name = "sine";
  out.alpha = alpha;
  out.L = std::pow(w, alpha) / factorial(alpha - 1);
  out.fn.value = [w](std::span<const double> x) { return std::sin(w * x[0]); };
  out.fn.partial = [w](std::span<const double> x, std::span<const int> order) {
    const int m = order[0];
    return std::pow(w, m) * std::sin(w * x[0] + 0.5 * std::numbers::pi * m);
  };
  return out;
}

/// The built-in families: Lip-alpha for alpha in {1/4, 1/2, 3/4, 1}, and the
/// C^3 sine at alpha = 3.
inline std::vector<HolderTestFunction> holder_test_functions() {
  return {holder_abs_power(0.25), holder_abs_power(0.5), holder_abs_power(0.75), holder_abs_power(1.0),
          holder_sine(3)};
}

/// Largest |f - p| over `points` equally spaced points of [0,1].
inline double sup_error_on_grid(const std::function<double(std::span<const double>)> &f,
                                const PiecewisePolynomial &p, int points) {
  detail::require(p.partition.d == 1 && points >= 2, "sup_error_on_grid: one-dimensional grids only");
  double worst = 0.0;
  for (int i = 0; i < points; ++i) {
    const double x = static_cast<double>(i) / (points - 1);
    const std::span<const double> xs(&x, 1);
    worst = std::max(worst, std::abs(f(xs) - p(xs)));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// moment projection

inline constexpr int kMomentNodesPerAxis = 32;
inline constexpr double kMaxGramCondition = 1e12;

/// Local-coordinate moment projector of degree ell in d variables. The Gram
/// matrix G_ab = \int_{[0,1]^d} t^a t^b dt is the same for every cell, so it is
/// factored once.
class MomentProjector {
public:
  MomentProjector(int ell, int d) : d_(d), basis_(multi_indices(ell, d)) {
    detail::require(ell >= 0 && d >= 1, "moment projection: need degree >= 0 and d >= 1");
    const auto m = static_cast<Eigen::Index>(basis_.size());
    Matrix gram(m, m);
    for (Eigen::Index a = 0; a < m; ++a)
      for (Eigen::Index b = 0; b < m; ++b) {
        double v = 1.0;
        for (int j = 0; j < d; ++j)
          v /= basis_[static_cast<std::size_t>(a)][static_cast<std::size_t>(j)] +
               basis_[static_cast<std::size_t>(b)][static_cast<std::size_t>(j)] + 1.0;
        gram(a, b) = v;
      }
    const Vector s = Eigen::JacobiSVD<Matrix>(gram).singularValues();
    condition_ = s[0] / s[s.size() - 1];
    if (!(condition_ <= kMaxGramCondition))
      throw NumericalError("moment projection: Gram matrix condition number " + std::to_string(condition_) +
                           " exceeds tolerance");
    solver_.compute(gram);

    const auto rule = quad::gauss_legendre(kMomentNodesPerAxis);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      nodes_.push_back(0.5 * (rule.nodes[i] + 1.0));
      weights_.push_back(0.5 * rule.weights[i]);
    }
  }

  const std::vector<MultiIndex> &basis() const { return basis_; }
  double condition() const { return condition_; }

  /// Coefficients (local basis) of the projection of g onto the cube with
  /// lower corner `lower` and side `width`.
  Vector project(const std::function<double(std::span<const double>)> &g, std::span<const double> lower,
                 double width) const {
    const auto m = static_cast<Eigen::Index>(basis_.size());
    Vector rhs = Vector::Zero(m);
    std::vector<double> t(static_cast<std::size_t>(d_)), x(static_cast<std::size_t>(d_));
    std::vector<std::size_t> idx(static_cast<std::size_t>(d_), 0);
    const std::size_t q = nodes_.size();
    while (true) {
      double weight = 1.0;
      for (int j = 0; j < d_; ++j) {
        const auto jj = static_cast<std::size_t>(j);
        t[jj] = nodes_[idx[jj]];
        x[jj] = lower[jj] + width * t[jj];
        weight *= weights_[idx[jj]];
      }
      const double gv = weight * g(x);
      for (Eigen::Index a = 0; a < m; ++a)
        rhs[a] += gv * monomial(basis_[static_cast<std::size_t>(a)], t);
      int j = d_ - 1;
      while (j >= 0 && ++idx[static_cast<std::size_t>(j)] == q) {
        idx[static_cast<std::size_t>(j)] = 0;
        --j;
      }
      if (j < 0)
        break;
    }
    return solver_.solve(rhs);
  }

private:
  int d_;
  std::vector<MultiIndex> basis_;
  Eigen::LDLT<Matrix> solver_;
  double condition_ = 1.0;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// The unique degree-ell polynomial matching all moments of g up to degree
/// ell on the cube [lower, lower + width)^d, in that cube's local coordinates.
inline Vector moment_projection(const std::function<double(std::span<const double>)> &g,
                                std::span<const double> lower, double width, int ell) {
  return MomentProjector(ell, static_cast<int>(lower.size())).project(g, lower, width);
}

/// Cellwise moment projection of g on the k^d partition of [0,1)^d.
inline PiecewisePolynomial moment_piecewise(const std::function<double(std::span<const double>)> &g, int d,
                                            int k, int ell) {
  PiecewisePolynomial p(CubePartition(k, d), ell);
  const MomentProjector projector(ell, d);
  for (Eigen::Index cell = 0; cell < p.partition.cell_count(); ++cell)
    p.coefficients.row(cell) = projector.project(g, p.partition.lower_corner(cell), p.partition.width()).transpose();
  return p;
}

// ---------------------------------------------------------------------------
// low-rank certificate for the eigenvalue tail

enum class ApproximationRoute { Taylor, Moment };

/// Partial derivative of f(., y) in x, exact where available.
inline double graphon_partial_x(const GraphonSpec &spec, std::span<const double> x, std::span<const double> y,
                                std::span<const int> order, double fd_step) {
  int total = 0;
  for (int e : order)
    total += e;
  if (total == 0)
    return spec(x, y);
  switch (spec.kind) {
  case GraphonKind::SobolevMin:
    return total == 1 ? (x[0] <= y[0] ? 1.0 : 0.0) : 0.0;
  case GraphonKind::TranslationInvariantAbs: {
    if (total > 1)
      return 0.0;
    const double period = spec.upper - spec.lower;
    const double z = x[0] - y[0];
    const double reduced = z - period * std::round(z / period);
    return reduced >= 0.0 ? 1.0 : -1.0;
  }
  case GraphonKind::Custom:
    if (spec.custom.partial_x)
      return spec.custom.partial_x(x, y, order);
    {
      std::vector<double> yy(y.begin(), y.end());
      const std::function<double(std::span<const double>)> slice = [&](std::span<const double> p) {
        return spec(p, yy);
      };
      return finite_difference(slice, x, order, fd_step);
    }
  case GraphonKind::SBM:
    break;
  }
  throw ValidationError("graphon_partial_x: block models have no latent derivatives");
}

struct RankBound {
  Matrix N;
  Eigen::Index rank_cap = 0;       // k^d * C0(alpha, d)
  Eigen::Index numerical_rank = 0; // singular values above 1e-8 s_1
  double approximation_error = 0.0; // (1/n^2) ||M - N||_F^2
};

inline constexpr double kNumericalRankTolerance = 1e-8;

inline Eigen::Index numerical_rank(const Matrix &m, double rel_tol = kNumericalRankTolerance) {
  if (m.size() == 0)
    return 0;
  const Vector s = Eigen::BDCSVD<Matrix>(m).singularValues();
  if (s[0] == 0.0)
    return 0;
  Eigen::Index r = 0;
  while (r < s.size() && s[r] > rel_tol * s[0])
    ++r;
  return r;
}

/// N_ij = P(x_i; x_j), where P(.; y) is the degree strict_floor(alpha)
/// piecewise polynomial of f(., y) on the k^d partition of the latent cube
/// (latents are mapped affinely onto [0,1)^d).
inline RankBound rank_bound_matrix(const GraphonSpec &spec, const LatentSample &latents, int k, double alpha,
                                   ApproximationRoute route = ApproximationRoute::Taylor) {
  spec.validate();
  detail::require(spec.kind != GraphonKind::SBM, "rank_bound_matrix: needs a continuous latent space");
  detail::require(k >= 1, "rank_bound_matrix: k must be >= 1");
  const int d = spec.d;
  const int ell = strict_floor(alpha);
  const CubePartition partition(k, d);
  const Eigen::Index n = latents.size();
  const double span = spec.upper - spec.lower;

  // unit-cube coordinates of every latent
  PointMatrix unit(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j)
      unit(i, j) = (latents.points(i, j) - spec.lower) / span;
  auto unit_row = [&](Eigen::Index i) {
    return std::span<const double>(unit.data() + i * d, static_cast<std::size_t>(d));
  };
  std::vector<double> xbuf(static_cast<std::size_t>(d));
  auto to_domain = [&](std::span<const double> u) {
    for (int j = 0; j < d; ++j)
      xbuf[static_cast<std::size_t>(j)] = spec.lower + span * u[static_cast<std::size_t>(j)];
    return std::span<const double>(xbuf);
  };

  std::vector<Eigen::Index> cell(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i)
    cell[static_cast<std::size_t>(i)] = partition.cell_of(unit_row(i));

  RankBound out;
  out.rank_cap = partition.cell_count() * c0(alpha, d);
  out.N.resize(n, n);
  const auto basis = multi_indices(ell, d);

  if (route == ApproximationRoute::Taylor) {
    const double fd_step = span * partition.width() / 1000.0;
    for (Eigen::Index c = 0; c < partition.cell_count(); ++c) {
      const auto z = partition.center(c);
      const std::vector<double> zx(to_domain(z).begin(), to_domain(z).end());
      std::vector<Eigen::Index> members;
      for (Eigen::Index i = 0; i < n; ++i)
        if (cell[static_cast<std::size_t>(i)] == c)
          members.push_back(i);
      if (members.empty())
        continue;
      for (Eigen::Index j = 0; j < n; ++j) {
        const auto yj = latents.row(j);
        for (const auto &kappa : basis) {
          int total = 0;
          double kappa_factorial = 1.0;
          for (int e : kappa) {
            total += e;
            kappa_factorial *= factorial(e);
          }
          // chain rule for the affine map onto the unit cube
          const double coef =
              graphon_partial_x(spec, zx, yj, kappa, fd_step) * std::pow(span, total) / kappa_factorial;
          for (Eigen::Index i : members) {
            double term = coef;
            const auto ui = unit_row(i);
            for (int a = 0; a < d; ++a)
              term *= std::pow(ui[static_cast<std::size_t>(a)] - z[static_cast<std::size_t>(a)],
                               kappa[static_cast<std::size_t>(a)]);
            if (&kappa == &basis.front())
              out.N(i, j) = term;
            else
              out.N(i, j) += term;
          }
        }
      }
    }
  } else {
    const MomentProjector projector(ell, d);
    for (Eigen::Index c = 0; c < partition.cell_count(); ++c) {
      std::vector<Eigen::Index> members;
      for (Eigen::Index i = 0; i < n; ++i)
        if (cell[static_cast<std::size_t>(i)] == c)
          members.push_back(i);
      if (members.empty())
        continue;
      const auto lower = partition.lower_corner(c);
      for (Eigen::Index j = 0; j < n; ++j) {
        const auto yj = latents.row(j);
        const std::function<double(std::span<const double>)> slice = [&](std::span<const double> u) {
          return spec(to_domain(u), yj);
        };
        const Vector beta = projector.project(slice, lower, partition.width());
        for (Eigen::Index i : members) {
          const auto t = partition.local(c, unit_row(i));
          double v = 0.0;
          for (std::size_t b = 0; b < basis.size(); ++b)
            v += beta[static_cast<Eigen::Index>(b)] * monomial(basis[b], t);
          out.N(i, j) = v;
        }
      }
    }
  }

  const Matrix m = edge_prob_matrix(spec, latents).matrix();
  out.approximation_error = (out.N - m).squaredNorm() / (static_cast<double>(n) * static_cast<double>(n));
  out.numerical_rank = numerical_rank(out.N);
  return out;
}

} // namespace usvt
