#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "usvt/error.hpp"
#include "usvt/estimator.hpp"
#include "usvt/io.hpp"
#include "usvt/models.hpp"
#include "usvt/rng.hpp"

namespace usvt {

struct ExperimentSpec {
  GraphonSpec model; // for SBM, B is drawn per k and k comes from k_grid
  std::vector<Eigen::Index> n_grid;
  std::vector<double> rho_grid;
  std::vector<int> k_grid; // SBM only
  int runs = 1;
  std::uint64_t master_seed = 0;
  double c0 = 2.01;
  ThresholdMode mode = ThresholdMode::Hard;

  bool is_sbm() const { return model.kind == GraphonKind::SBM; }

  void validate() const {
    detail::require(!n_grid.empty() && !rho_grid.empty(), "experiment: n and rho grids must be nonempty");
    detail::require(runs >= 1, "experiment: runs must be >= 1");
    detail::require(c0 > 0.0, "experiment: c0 must be positive");
    for (auto n : n_grid)
      detail::require(n >= 2, "experiment: every n must be >= 2");
    for (double rho : rho_grid)
      require_rho(rho);
    if (is_sbm()) {
      detail::require(!k_grid.empty(), "experiment: SBM sweeps need a nonempty k grid");
      for (int k : k_grid)
        detail::require(k >= 1, "experiment: every k must be >= 1");
    } else {
      detail::require(k_grid.empty(), "experiment: k grid is only meaningful for SBM");
      model.validate();
    }
  }
};

inline nlohmann::json experiment_to_json(const ExperimentSpec &spec) {
  nlohmann::json j;
  j["model"] = graphon_to_json(spec.model);
  j["n"] = spec.n_grid;
  j["rho"] = spec.rho_grid;
  if (spec.is_sbm())
    j["k"] = spec.k_grid;
  j["runs"] = spec.runs;
  j["seed"] = spec.master_seed;
  j["c0"] = spec.c0;
  j["mode"] = to_string(spec.mode);
  return j;
}

inline ExperimentSpec experiment_from_json(const nlohmann::json &j) {
  try {
    ExperimentSpec spec;
    spec.model = graphon_from_json(j.at("model"));
    spec.n_grid = j.at("n").get<std::vector<Eigen::Index>>();
    spec.rho_grid = j.at("rho").get<std::vector<double>>();
    if (j.contains("k"))
      spec.k_grid = j.at("k").get<std::vector<int>>();
    spec.runs = j.value("runs", 1);
    spec.master_seed = j.value("seed", std::uint64_t{0});
    spec.c0 = j.value("c0", 2.01);
    spec.mode = parse_threshold_mode(j.value("mode", std::string("hard")));
    spec.validate();
    return spec;
  } catch (const nlohmann::json::exception &e) {
    throw ValidationError(std::string("experiment JSON: ") + e.what());
  }
}

struct ExperimentRow {
  std::string model;
  Eigen::Index n = 0;
  double rho = 0.0;
  std::optional<int> k;
  int run = 0;
  std::uint64_t seed = 0;
  double tau = 0.0;
  Eigen::Index rank = 0;
  double mse = 0.0;
  std::string error; // nonempty for a failed run; numeric fields are then unset

  bool ok() const { return error.empty(); }
};

/// B depends only on (master seed, k), so every curve with the same number
/// of blocks sees the same block matrix.
inline std::uint64_t block_seed(std::uint64_t master, int k) {
  return derive_seed(derive_seed(master, 0xB10C), static_cast<std::uint64_t>(k));
}

struct SweepCell {
  std::optional<int> k;
  double rho;
  Eigen::Index n;
};

/// Cells in lexicographic (k, rho, n) order of the grids as given.
inline std::vector<SweepCell> sweep_cells(const ExperimentSpec &spec) {
  std::vector<SweepCell> cells;
  std::vector<std::optional<int>> ks;
  if (spec.is_sbm())
    ks.assign(spec.k_grid.begin(), spec.k_grid.end());
  else
    ks.push_back(std::nullopt);
  for (const auto &k : ks)
    for (double rho : spec.rho_grid)
      for (auto n : spec.n_grid)
        cells.push_back({k, rho, n});
  return cells;
}

namespace detail {

inline std::vector<ExperimentRow> run_cell(const ExperimentSpec &spec, const SweepCell &cell,
                                           std::uint64_t cell_seed) {
  std::vector<ExperimentRow> rows;
  GraphonSpec model = spec.model;
  if (cell.k) {
    model = GraphonSpec::sbm(random_block_matrix(*cell.k, block_seed(spec.master_seed, *cell.k)), spec.model.labels);
  }
  UsvtConfig cfg;
  cfg.rho = cell.rho;
  cfg.c0 = spec.c0;
  cfg.mode = spec.mode;
  for (int run = 0; run < spec.runs; ++run) {
    ExperimentRow row;
    row.model = model.label();
    row.n = cell.n;
    row.rho = cell.rho;
    row.k = cell.k;
    row.run = run;
    row.seed = derive_seed(cell_seed, static_cast<std::uint64_t>(run));
    try {
      const auto latents = sample_latents(model, cell.n, row.seed);
      const auto m = edge_prob_matrix(model, latents);
      const auto graph = sample_graph(m, cell.rho, row.seed);
      const auto report = usvt(graph, cfg);
      row.tau = report.tau_used;
      row.rank = report.selected_rank;
      row.mse = mse(report.m_hat, m);
    } catch (const std::exception &e) {
      row.error = e.what();
      if (row.error.empty())
        row.error = "unknown failure";
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

} // namespace detail

/// Runs every (cell, run) of the sweep. Cell c uses seed derive(master, c) and
/// run r within it uses derive(cell seed, r), so the output does not depend on
/// the number of worker threads.
inline std::vector<ExperimentRow> run_sweep(const ExperimentSpec &spec, unsigned threads = 1) {
  spec.validate();
  const auto cells = sweep_cells(spec);
  std::vector<std::vector<ExperimentRow>> results(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c = next++; c < cells.size(); c = next++)
      results[c] = detail::run_cell(spec, cells[c], derive_seed(spec.master_seed, c));
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(cells.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back(worker);
    for (auto &t : pool)
      t.join();
  }
  std::vector<ExperimentRow> rows;
  for (auto &r : results)
    for (auto &row : r)
      rows.push_back(std::move(row));
  return rows;
}

// ---------------------------------------------------------------------------
// CSV

inline constexpr const char *kCsvHeader = "model,n,k,rho,run,seed,tau,rank,mse";

inline std::string rows_csv(const std::vector<ExperimentRow> &rows) {
  std::string text = std::string(kCsvHeader) + "\n";
  for (const auto &r : rows) {
    text += fmt::format("{},{},{},{},{},{},", r.model, r.n, r.k ? std::to_string(*r.k) : std::string(),
                        format_number(r.rho), r.run, r.seed);
    if (r.ok())
      text += fmt::format("{},{},{}", format_number(r.tau), r.rank, format_number(r.mse));
    else
      text += ",,";
    text += '\n';
  }
  return text;
}

inline void emit_csv(const std::vector<ExperimentRow> &rows, const std::string &path) {
  write_text(path, rows_csv(rows));
}

/// Inverse of rows_csv. Rows with empty numeric fields come back as error rows.
inline std::vector<ExperimentRow> read_rows_csv(std::istream &in, const std::string &origin = "<stream>") {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw ValidationError(origin + ": missing header '" + std::string(kCsvHeader) + "'");
  std::vector<ExperimentRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty())
      continue;
    std::vector<std::string> f;
    std::stringstream fields(line);
    std::string cell;
    while (std::getline(fields, cell, ','))
      f.push_back(cell);
    if (!line.empty() && line.back() == ',')
      f.emplace_back();
    if (f.size() != 9)
      throw ValidationError(origin + ": line " + std::to_string(line_no) + " does not have 9 fields");
    try {
      ExperimentRow r;
      r.model = f[0];
      r.n = std::stoll(f[1]);
      if (!f[2].empty())
        r.k = std::stoi(f[2]);
      r.rho = std::stod(f[3]);
      r.run = std::stoi(f[4]);
      r.seed = std::stoull(f[5]);
      if (f[6].empty() || f[7].empty() || f[8].empty()) {
        r.error = "failed run";
      } else {
        r.tau = std::stod(f[6]);
        r.rank = std::stoll(f[7]);
        r.mse = std::stod(f[8]);
      }
      rows.push_back(std::move(r));
    } catch (const std::logic_error &) {
      throw ValidationError(origin + ": bad number on line " + std::to_string(line_no));
    }
  }
  return rows;
}

inline std::vector<ExperimentRow> read_rows_csv(const std::string &path) {
  auto in = open_input(path);
  return read_rows_csv(in, path);
}

// ---------------------------------------------------------------------------
// aggregation and slope fits

enum class XTransform { LogNRhoOverK, LogNRho };

inline std::string x_label(XTransform t) { return t == XTransform::LogNRhoOverK ? "log(n*rho/k)" : "log(n*rho)"; }

struct CurvePoint {
  Eigen::Index n = 0;
  double x = 0.0;
  double mean_mse = 0.0;
  double se_mse = 0.0; // standard error of the run mean
  int runs = 0;

  double log_mse() const { return std::log(mean_mse); }
  /// Delta-method standard error of log(mean_mse).
  double se_log() const { return mean_mse > 0.0 ? se_mse / mean_mse : std::numeric_limits<double>::infinity(); }
};

struct Curve {
  std::string label; // e.g. "k=4,rho=0.1"
  std::optional<int> k;
  double rho = 0.0;
  std::vector<CurvePoint> points; // increasing n
};

/// Groups successful rows into (k, rho) curves and averages MSE over runs.
inline std::vector<Curve> aggregate(const std::vector<ExperimentRow> &rows, XTransform transform) {
  using Key = std::pair<int, double>;
  std::vector<Key> order;
  std::map<Key, std::map<Eigen::Index, std::vector<double>>> groups;
  for (const auto &r : rows) {
    if (!r.ok())
      continue;
    if (transform == XTransform::LogNRhoOverK && !r.k)
      throw ValidationError("aggregate: log(n*rho/k) needs SBM rows with k");
    const Key key{r.k.value_or(0), r.rho};
    if (!groups.count(key))
      order.push_back(key);
    groups[key][r.n].push_back(r.mse);
  }
  std::vector<Curve> curves;
  for (const auto &key : order) {
    Curve c;
    if (key.first > 0)
      c.k = key.first;
    c.rho = key.second;
    c.label = (c.k ? fmt::format("k={},", *c.k) : std::string()) + "rho=" + format_number(c.rho);
    for (const auto &[n, values] : groups[key]) {
      CurvePoint p;
      p.n = n;
      p.runs = static_cast<int>(values.size());
      double sum = 0.0;
      for (double v : values)
        sum += v;
      p.mean_mse = sum / p.runs;
      if (p.runs > 1) {
        double ss = 0.0;
        for (double v : values)
          ss += (v - p.mean_mse) * (v - p.mean_mse);
        p.se_mse = std::sqrt(ss / (p.runs - 1) / p.runs);
      }
      const double nr = static_cast<double>(n) * c.rho;
      p.x = transform == XTransform::LogNRhoOverK ? std::log(nr / key.first) : std::log(nr);
      c.points.push_back(p);
    }
    curves.push_back(std::move(c));
  }
  return curves;
}

struct SlopeReport {
  std::string x_label;
  std::vector<std::pair<double, double>> points; // (x, log mean MSE) used in the fit
  double slope = 0.0;
  double intercept = 0.0;
  double standard_error = 0.0;
  std::vector<std::string> notices; // exclusions
};

/// Ordinary least squares of y on x with the standard error of the slope.
inline SlopeReport ols(const std::vector<std::pair<double, double>> &points) {
  SlopeReport out;
  out.points = points;
  const auto m = static_cast<double>(points.size());
  double sx = 0.0, sy = 0.0;
  for (const auto &[x, y] : points) {
    sx += x;
    sy += y;
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0.0, sxy = 0.0;
  for (const auto &[x, y] : points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  detail::require(sxx > 0.0, "slope fit: x values are all equal");
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  double ssr = 0.0;
  for (const auto &[x, y] : points) {
    const double e = y - out.intercept - out.slope * x;
    ssr += e * e;
  }
  out.standard_error = m > 2.0 ? std::sqrt(ssr / (m - 2.0) / sxx) : 0.0;
  return out;
}

/// Pooled OLS of log(run-mean MSE) on the transformed x over all curves.
/// A curve's smallest-n point is dropped when its standard error exceeds twice
/// the curve's median; cells with zero mean MSE are dropped. Both are noted.
inline SlopeReport slope_fit(const std::vector<Curve> &curves, XTransform transform) {
  std::vector<std::pair<double, double>> points;
  std::vector<std::string> notices;
  for (const auto &c : curves) {
    std::vector<CurvePoint> kept;
    for (const auto &p : c.points) {
      if (p.mean_mse > 0.0)
        kept.push_back(p);
      else
        notices.push_back(fmt::format("{} n={}: zero MSE, excluded", c.label, p.n));
    }
    if (kept.size() >= 3) {
      std::vector<double> se;
      for (const auto &p : kept)
        se.push_back(p.se_log());
      std::nth_element(se.begin(), se.begin() + static_cast<std::ptrdiff_t>(se.size() / 2), se.end());
      double median = se[se.size() / 2];
      if (se.size() % 2 == 0) {
        const double lower = *std::max_element(se.begin(), se.begin() + static_cast<std::ptrdiff_t>(se.size() / 2));
        median = 0.5 * (median + lower);
      }
      if (kept.front().se_log() > 2.0 * median) {
        notices.push_back(fmt::format("{} n={}: standard error {} exceeds twice the curve median {}, excluded",
                                      c.label, kept.front().n, kept.front().se_log(), median));
        kept.erase(kept.begin());
      }
    }
    for (const auto &p : kept)
      points.emplace_back(p.x, p.log_mse());
  }
  std::vector<double> xs;
  for (const auto &pt : points)
    xs.push_back(pt.first);
  std::sort(xs.begin(), xs.end());
  const auto distinct = std::unique(xs.begin(), xs.end(), [](double a, double b) { return std::abs(a - b) <= 1e-12; }) - xs.begin();
  if (distinct < 4)
    throw ValidationError("slope fit: need at least 4 distinct x values, got " + std::to_string(distinct));
  SlopeReport out = ols(points);
  out.x_label = x_label(transform);
  out.notices = std::move(notices);
  return out;
}

inline SlopeReport slope_fit(const std::vector<ExperimentRow> &rows, XTransform transform) {
  return slope_fit(aggregate(rows, transform), transform);
}

/// Piecewise-linear interpolation of log MSE along a curve; x must lie in range.
inline double interpolate_log_mse(const Curve &c, double x) {
  const auto &p = c.points;
  for (std::size_t i = 0; i + 1 < p.size(); ++i)
    if (x >= p[i].x - 1e-12 && x <= p[i + 1].x + 1e-12) {
      const double w = (x - p[i].x) / (p[i + 1].x - p[i].x);
      return (1.0 - w) * p[i].log_mse() + w * p[i + 1].log_mse();
    }
  return p.front().log_mse(); // single-point curve
}

/// Largest vertical distance between any two curves' interpolated log MSE
/// over their common x range; NaN when no pair of curves overlaps.
inline double collapse_gap(const std::vector<Curve> &curves) {
  double gap = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t a = 0; a < curves.size(); ++a)
    for (std::size_t b = a + 1; b < curves.size(); ++b) {
      const auto &ca = curves[a], &cb = curves[b];
      if (ca.points.empty() || cb.points.empty())
        continue;
      const double lo = std::max(ca.points.front().x, cb.points.front().x);
      const double hi = std::min(ca.points.back().x, cb.points.back().x);
      if (lo > hi + 1e-12)
        continue;
      std::vector<double> xs{lo, hi};
      for (const auto *c : {&ca, &cb})
        for (const auto &p : c->points)
          if (p.x > lo && p.x < hi)
            xs.push_back(p.x);
      for (double x : xs) {
        const double d = std::abs(interpolate_log_mse(ca, x) - interpolate_log_mse(cb, x));
        gap = std::isnan(gap) ? d : std::max(gap, d);
      }
    }
  return gap;
}

/// Run-mean MSE is nonincreasing in n, allowing one increase no larger than
/// two combined standard errors.
inline bool is_monotone(const Curve &c) {
  int inversions = 0;
  for (std::size_t i = 0; i + 1 < c.points.size(); ++i) {
    const auto &p = c.points[i], &q = c.points[i + 1];
    if (q.mean_mse <= p.mean_mse)
      continue;
    ++inversions;
    if (q.mean_mse - p.mean_mse > 2.0 * std::hypot(p.se_mse, q.se_mse))
      return false;
  }
  return inversions <= 1;
}

// ---------------------------------------------------------------------------
// SVG

/// Log-MSE against the transformed x, one polyline per curve, with the fitted
/// line when a slope report is given. Output depends only on the inputs.
inline std::string svg_plot(const std::vector<Curve> &curves, XTransform transform,
                            const std::optional<SlopeReport> &fit = {}) {
  constexpr double width = 640, height = 480, left = 70, right = 160, top = 30, bottom = 60;
  static const char *palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto &c : curves)
    for (const auto &p : c.points)
      if (p.mean_mse > 0.0) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.log_mse());
        ymax = std::max(ymax, p.log_mse());
      }
  if (!(xmin <= xmax)) {
    xmin = ymin = 0.0;
    xmax = ymax = 1.0;
  }
  if (xmax - xmin < 1e-9) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (ymax - ymin < 1e-9) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const double pw = width - left - right, ph = height - top - bottom;
  auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) { return top + (ymax - y) / (ymax - ymin) * ph; };

  std::string s;
  s += fmt::format("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" "
                   "viewBox=\"0 0 {:.0f} {:.0f}\" font-family=\"sans-serif\" font-size=\"12\">\n",
                   width, height, width, height);
  s += fmt::format("<rect x=\"0\" y=\"0\" width=\"{:.0f}\" height=\"{:.0f}\" fill=\"white\"/>\n", width, height);
  s += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\" stroke=\"black\"/>\n",
                   left, top, pw, ph);
  for (int t = 0; t <= 4; ++t) {
    const double xv = xmin + (xmax - xmin) * t / 4.0, yv = ymin + (ymax - ymin) * t / 4.0;
    s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{:.2f}</text>\n", sx(xv),
                     top + ph + 18, xv);
    s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{:.2f}</text>\n", left - 6, sy(yv) + 4, yv);
  }
  s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n", left + pw / 2,
                   height - 15, x_label(transform));
  s += fmt::format("<text x=\"18\" y=\"{:.2f}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.2f})\">"
                   "log(MSE)</text>\n",
                   top + ph / 2, top + ph / 2);

  for (std::size_t i = 0; i < curves.size(); ++i) {
    const char *color = palette[i % std::size(palette)];
    std::string pts;
    for (const auto &p : curves[i].points)
      if (p.mean_mse > 0.0)
        pts += fmt::format("{}{:.2f},{:.2f}", pts.empty() ? "" : " ", sx(p.x), sy(p.log_mse()));
    s += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n", color, pts);
    for (const auto &p : curves[i].points)
      if (p.mean_mse > 0.0)
        s += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"{}\"/>\n", sx(p.x), sy(p.log_mse()), color);
    const double ly = top + 16.0 * (static_cast<double>(i) + 1.0);
    s += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"{}\" stroke-width=\"1.5\"/>\n",
                     left + pw + 12, ly - 4, left + pw + 32, ly - 4, color);
    s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n", left + pw + 38, ly, curves[i].label);
  }
  if (fit) {
    s += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"gray\" "
                     "stroke-dasharray=\"5,4\"/>\n",
                     sx(xmin), sy(fit->intercept + fit->slope * xmin), sx(xmax), sy(fit->intercept + fit->slope * xmax));
    s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">slope {:.3f}</text>\n", left + pw + 12,
                     top + 16.0 * (static_cast<double>(curves.size()) + 2.0), fit->slope);
  }
  s += "</svg>\n";
  return s;
}

inline void emit_svg(const std::vector<Curve> &curves, XTransform transform, const std::string &path,
                     const std::optional<SlopeReport> &fit = {}) {
  write_text(path, svg_plot(curves, transform, fit));
}

} // namespace usvt
