#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "usvt/error.hpp"
#include "usvt/linalg.hpp"
#include "usvt/rng.hpp"

namespace usvt {

enum class GraphonKind { SBM, TranslationInvariantAbs, SobolevMin, Custom };

/// How SBM block labels are drawn: i.i.d. uniform, or a uniformly shuffled
/// balanced assignment (block sizes differ by at most one).
enum class LabelMode { Iid, Balanced };

/// User-supplied kernel. `partial_x` returns the mixed partial derivative of
/// f(., y) with respect to x of the given multi-index order; leave it empty
/// and callers fall back to finite differences.
struct CustomKernel {
  std::function<double(std::span<const double>, std::span<const double>)> value;
  std::function<double(std::span<const double>, std::span<const double>, std::span<const int>)>
      partial_x;
  std::string name = "custom";
};

/// Declarative description of a graphon together with its latent space.
/// Latent points are uniform on the hyperrectangle [lower, upper)^d; SBM
/// latents are block labels 1..k.
struct GraphonSpec {
  GraphonKind kind = GraphonKind::SobolevMin;
  int k = 1;
  Matrix B; // k x k; may be left empty for SBM templates whose B is drawn later
  int d = 1;
  double lower = 0.0;
  double upper = 1.0;
  LabelMode labels = LabelMode::Iid;
  CustomKernel custom;

  static GraphonSpec sbm(Matrix block_matrix, LabelMode mode = LabelMode::Iid) {
    GraphonSpec s;
    s.kind = GraphonKind::SBM;
    // an empty B is a template whose block matrix is drawn later
    s.k = std::max(1, static_cast<int>(block_matrix.rows()));
    s.B = std::move(block_matrix);
    s.labels = mode;
    s.lower = 1.0;
    s.upper = static_cast<double>(s.k);
    return s;
  }

  /// f(x,y) = h(x - y), h(z) = |z| on [-a,a] extended with period 2a.
  static GraphonSpec translation_abs(double a = 1.0) {
    GraphonSpec s;
    s.kind = GraphonKind::TranslationInvariantAbs;
    s.lower = -a;
    s.upper = a;
    return s;
  }

  /// f(x,y) = min(x, y) on [0,1].
  static GraphonSpec sobolev_min() { return GraphonSpec{}; }

  static GraphonSpec make_custom(CustomKernel kernel, int dim = 1, double lo = 0.0, double hi = 1.0) {
    GraphonSpec s;
    s.kind = GraphonKind::Custom;
    s.custom = std::move(kernel);
    s.d = dim;
    s.lower = lo;
    s.upper = hi;
    return s;
  }

  std::string label() const {
    switch (kind) {
    case GraphonKind::SBM:
      return "sbm";
    case GraphonKind::TranslationInvariantAbs:
      return "translation_abs";
    case GraphonKind::SobolevMin:
      return "sobolev_min";
    case GraphonKind::Custom:
      return custom.name;
    }
    return "unknown";
  }

  bool has_blocks() const { return B.rows() == k && B.cols() == k && k >= 1; }

  void validate() const {
    detail::require(d >= 1, "graphon: latent dimension must be >= 1");
    detail::require(kind == GraphonKind::SBM || lower < upper, "graphon: empty latent domain");
    switch (kind) {
    case GraphonKind::SBM:
      detail::require(k >= 1, "graphon: SBM needs k >= 1");
      detail::require(d == 1, "graphon: SBM latents are scalar labels");
      if (B.size() > 0) {
        detail::require(has_blocks(), "graphon: B must be k x k");
        for (int i = 0; i < k; ++i)
          for (int j = 0; j < k; ++j) {
            if (!(B(i, j) >= 0.0 && B(i, j) <= 1.0))
              throw ModelValidityError("graphon: B entries must lie in [0,1]");
            if (B(i, j) != B(j, i))
              throw ModelValidityError("graphon: B must be symmetric");
          }
      }
      break;
    case GraphonKind::TranslationInvariantAbs:
    case GraphonKind::SobolevMin:
      detail::require(d == 1, "graphon: built-in continuous kernels are one-dimensional");
      break;
    case GraphonKind::Custom:
      detail::require(static_cast<bool>(custom.value), "graphon: custom kernel needs a value handle");
      break;
    }
  }

  /// Kernel value f(x, y). For SBM, x and y hold 1-based block labels.
  double operator()(std::span<const double> x, std::span<const double> y) const {
    switch (kind) {
    case GraphonKind::SBM:
      return B(static_cast<Eigen::Index>(x[0]) - 1, static_cast<Eigen::Index>(y[0]) - 1);
    case GraphonKind::TranslationInvariantAbs: {
      const double period = upper - lower;
      const double z = x[0] - y[0];
      return std::abs(z - period * std::round(z / period));
    }
    case GraphonKind::SobolevMin:
      return std::min(x[0], y[0]);
    case GraphonKind::Custom:
      return custom.value(x, y);
    }
    return 0.0;
  }
};

/// Analytic test graphon on [0,1]: g(x,y) = exp(-(x-y)^2), or its reflection
/// 1 - g, which vanishes on the diagonal. Partial derivatives are exact
/// (Hermite polynomials).
inline GraphonSpec gaussian_graphon(bool reflected) {
  CustomKernel kernel;
  kernel.name = reflected ? "gaussian_reflected" : "gaussian";
  kernel.value = [reflected](std::span<const double> x, std::span<const double> y) {
    const double g = std::exp(-(x[0] - y[0]) * (x[0] - y[0]));
    return reflected ? 1.0 - g : g;
  };
  kernel.partial_x = [reflected](std::span<const double> x, std::span<const double> y,
                                 std::span<const int> order) {
    const double t = x[0] - y[0];
    const int m = order[0];
    double h_prev = 1.0, h = 2.0 * t; // physicists' Hermite H_0, H_1
    if (m == 0)
      h = 1.0;
    for (int i = 1; i < m; ++i) {
      const double next = 2.0 * t * h - 2.0 * i * h_prev;
      h_prev = h;
      h = next;
    }
    const double dm = ((m % 2) ? -1.0 : 1.0) * h * std::exp(-t * t);
    if (!reflected)
      return dm;
    return m == 0 ? 1.0 - dm : -dm;
  };
  return GraphonSpec::make_custom(std::move(kernel));
}

/// Row-major so that each latent point is a contiguous span.
using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// n i.i.d. latent points, one per row of an n x d matrix.
struct LatentSample {
  PointMatrix points;
  std::uint64_t seed = 0;

  Eigen::Index size() const { return points.rows(); }

  std::span<const double> row(Eigen::Index i) const {
    return {points.data() + i * points.cols(), static_cast<std::size_t>(points.cols())};
  }

  /// SBM block labels (1-based).
  std::vector<int> labels() const {
    std::vector<int> out(static_cast<std::size_t>(size()));
    for (Eigen::Index i = 0; i < size(); ++i)
      out[static_cast<std::size_t>(i)] = static_cast<int>(points(i, 0));
    return out;
  }
};

/// Symmetric n x n matrix with zero diagonal and entries in [0,1].
class EdgeProbabilityMatrix {
public:
  EdgeProbabilityMatrix() = default;

  explicit EdgeProbabilityMatrix(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols())
      throw ModelValidityError("edge-probability matrix must be square");
    for (Eigen::Index j = 0; j < m_.cols(); ++j)
      for (Eigen::Index i = 0; i < m_.rows(); ++i) {
        const double v = m_(i, j);
        if (!(v >= 0.0 && v <= 1.0))
          throw ModelValidityError("edge-probability entry outside [0,1]");
        if (i == j && v != 0.0)
          throw ModelValidityError("edge-probability matrix must have a zero diagonal");
        if (v != m_(j, i))
          throw ModelValidityError("edge-probability matrix must be symmetric");
      }
  }

  Eigen::Index n() const { return m_.rows(); }
  const Matrix &matrix() const { return m_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

private:
  Matrix m_;
};

/// Simple undirected graph on vertices 0..n-1, stored as sorted pairs i < j.
struct ObservedGraph {
  Eigen::Index n = 0;
  double rho = 1.0;
  std::vector<std::pair<int, int>> edges;

  Matrix dense() const {
    Matrix a = Matrix::Zero(n, n);
    for (const auto &[i, j] : edges)
      a(i, j) = a(j, i) = 1.0;
    return a;
  }

  std::size_t edge_count() const { return edges.size(); }
};

inline void require_rho(double rho) {
  detail::require(rho > 0.0 && rho <= 1.0, "rho must lie in (0,1]");
}

inline LatentSample sample_latents(const GraphonSpec &spec, Eigen::Index n, std::uint64_t seed) {
  detail::require(n >= 1, "sample_latents: n must be >= 1");
  spec.validate();
  PointMatrix points(n, spec.d);
  if (spec.kind == GraphonKind::SBM) {
    if (spec.labels == LabelMode::Balanced) {
      std::vector<int> labels(static_cast<std::size_t>(n));
      for (Eigen::Index i = 0; i < n; ++i)
        labels[static_cast<std::size_t>(i)] = static_cast<int>(i % spec.k) + 1;
      RandomStream rng(seed, StreamId::Labels);
      rng.shuffle(std::span<int>(labels));
      for (Eigen::Index i = 0; i < n; ++i)
        points(i, 0) = labels[static_cast<std::size_t>(i)];
    } else {
      RandomStream rng(seed, StreamId::Latents);
      for (Eigen::Index i = 0; i < n; ++i)
        points(i, 0) = static_cast<double>(rng.below(static_cast<std::uint64_t>(spec.k)) + 1);
    }
  } else {
    RandomStream rng(seed, StreamId::Latents);
    for (Eigen::Index i = 0; i < n; ++i)
      for (int j = 0; j < spec.d; ++j)
        points(i, j) = rng.uniform(spec.lower, spec.upper);
  }
  return LatentSample{std::move(points), seed};
}

namespace detail {

inline Matrix evaluate_kernel(const GraphonSpec &spec, const LatentSample &latents, bool keep_diagonal) {
  spec.validate();
  if (spec.kind == GraphonKind::SBM)
    require(spec.has_blocks(), "graphon: SBM block matrix B is not set");
  require(latents.points.cols() == spec.d, "latent dimension does not match the graphon");
  const Eigen::Index n = latents.size();
  Matrix m(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      const double v = spec(latents.row(i), latents.row(j));
      if (!(v >= 0.0 && v <= 1.0))
        throw ModelValidityError("graphon value " + std::to_string(v) + " outside [0,1] at (" +
                                 std::to_string(i) + ", " + std::to_string(j) + ")");
      m(i, j) = m(j, i) = v;
    }
    m(j, j) = keep_diagonal ? spec(latents.row(j), latents.row(j)) : 0.0;
  }
  return m;
}

} // namespace detail

/// M_ij = f(x_i, x_j) for i != j and M_ii = 0.
inline EdgeProbabilityMatrix edge_prob_matrix(const GraphonSpec &spec, const LatentSample &latents) {
  return EdgeProbabilityMatrix(detail::evaluate_kernel(spec, latents, false));
}

/// Kernel Gram matrix K_ij = f(x_i, x_j) including the diagonal.
inline Matrix kernel_matrix(const GraphonSpec &spec, const LatentSample &latents) {
  return detail::evaluate_kernel(spec, latents, true);
}

/// A_ij ~ Bernoulli(rho * M_ij) independently for i < j, mirrored.
inline ObservedGraph sample_graph(const EdgeProbabilityMatrix &m, double rho, std::uint64_t seed) {
  require_rho(rho);
  ObservedGraph g{m.n(), rho, {}};
  RandomStream rng(seed, StreamId::Graph);
  const Matrix &p = m.matrix();
  for (Eigen::Index i = 0; i < g.n; ++i)
    for (Eigen::Index j = i + 1; j < g.n; ++j)
      if (rng.uniform() < rho * p(i, j))
        g.edges.emplace_back(static_cast<int>(i), static_cast<int>(j));
  return g;
}

/// k x k symmetric matrix with B_ij = B_ji ~ Uniform[0,1] for i <= j.
inline Matrix random_block_matrix(int k, std::uint64_t seed) {
  detail::require(k >= 1, "random_block_matrix: k must be >= 1");
  Matrix b(k, k);
  RandomStream rng(seed, StreamId::Blocks);
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j)
      b(i, j) = b(j, i) = rng.uniform();
  return b;
}

// ---------------------------------------------------------------------------
// serialization

inline nlohmann::json graphon_to_json(const GraphonSpec &spec) {
  if (spec.kind == GraphonKind::Custom)
    throw ValidationError("custom graphons cannot be serialized");
  nlohmann::json j;
  j["kind"] = spec.label();
  j["d"] = spec.d;
  j["domain"] = {spec.lower, spec.upper};
  if (spec.kind == GraphonKind::SBM) {
    j["k"] = spec.k;
    j["labels"] = spec.labels == LabelMode::Balanced ? "balanced" : "iid";
    if (spec.has_blocks()) {
      auto rows = nlohmann::json::array();
      for (int r = 0; r < spec.k; ++r) {
        auto row = nlohmann::json::array();
        for (int c = 0; c < spec.k; ++c)
          row.push_back(spec.B(r, c));
        rows.push_back(row);
      }
      j["B"] = rows;
    }
  }
  return j;
}

inline GraphonSpec graphon_from_json(const nlohmann::json &j) {
  try {
    const auto kind = j.at("kind").get<std::string>();
    GraphonSpec spec;
    if (kind == "sbm") {
      spec.kind = GraphonKind::SBM;
      if (j.contains("B")) {
        const auto &rows = j.at("B");
        const auto k = static_cast<Eigen::Index>(rows.size());
        spec.B.resize(k, k);
        for (Eigen::Index r = 0; r < k; ++r) {
          detail::require(static_cast<Eigen::Index>(rows[r].size()) == k, "graphon JSON: B must be square");
          for (Eigen::Index c = 0; c < k; ++c)
            spec.B(r, c) = rows[r][c].get<double>();
        }
        spec.k = static_cast<int>(k);
        if (j.contains("k"))
          detail::require(j.at("k").get<int>() == spec.k, "graphon JSON: k disagrees with B");
      } else {
        spec.k = j.value("k", 1);
      }
      spec.lower = 1.0;
      spec.upper = spec.k;
      const auto mode = j.value("labels", std::string("iid"));
      detail::require(mode == "iid" || mode == "balanced", "graphon JSON: labels must be iid|balanced");
      spec.labels = mode == "balanced" ? LabelMode::Balanced : LabelMode::Iid;
    } else if (kind == "translation_abs") {
      spec = GraphonSpec::translation_abs();
    } else if (kind == "sobolev_min") {
      spec = GraphonSpec::sobolev_min();
    } else {
      throw ValidationError("graphon JSON: unknown kind '" + kind + "'");
    }
    spec.d = j.value("d", 1);
    if (kind != "sbm" && j.contains("domain")) {
      spec.lower = j.at("domain").at(0).get<double>();
      spec.upper = j.at("domain").at(1).get<double>();
    }
    spec.validate();
    return spec;
  } catch (const nlohmann::json::exception &e) {
    throw ValidationError(std::string("graphon JSON: ") + e.what());
  }
}

/// One "i j" line per edge, 0-indexed, i < j.
inline void write_edge_list(std::ostream &out, const ObservedGraph &g) {
  for (const auto &[i, j] : g.edges)
    out << i << ' ' << j << '\n';
}

inline void write_edge_list(const std::string &path, const ObservedGraph &g) {
  std::ofstream out(path);
  if (!out)
    throw IoError("cannot open '" + path + "' for writing");
  write_edge_list(out, g);
  if (!out)
    throw IoError("write failed for '" + path + "'");
}

inline ObservedGraph read_edge_list(std::istream &in, Eigen::Index n, double rho) {
  require_rho(rho);
  detail::require(n >= 1, "edge list: n must be >= 1");
  ObservedGraph g{n, rho, {}};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#')
      continue;
    std::istringstream fields(line);
    long long i = -1, j = -1;
    if (!(fields >> i >> j))
      throw ValidationError("edge list line " + std::to_string(line_no) + ": expected 'i j'");
    if (i > j)
      std::swap(i, j);
    if (i < 0 || j >= n || i == j)
      throw ValidationError("edge list line " + std::to_string(line_no) + ": invalid vertex pair");
    g.edges.emplace_back(static_cast<int>(i), static_cast<int>(j));
  }
  std::sort(g.edges.begin(), g.edges.end());
  g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
  return g;
}

inline ObservedGraph read_edge_list(const std::string &path, Eigen::Index n, double rho) {
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open '" + path + "' for reading");
  return read_edge_list(in, n, rho);
}

} // namespace usvt
