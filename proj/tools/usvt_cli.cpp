// usvt: command-line front end for the graphon estimation library.
//
// Exit codes: 0 success, 1 invalid input or failed computation, 2 I/O error.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "usvt/usvt.hpp"

namespace {

using namespace usvt;

struct ModelArgs {
  std::string spec_path;
  std::string model = "sobolev_min";
  int k = 2;
  std::string labels = "balanced";
  std::uint64_t seed = 1;

  void add(CLI::App *cmd) {
    cmd->add_option("--spec", spec_path, "graphon JSON document");
    cmd->add_option("--model", model, "sbm | translation_abs | sobolev_min | gaussian | gaussian_reflected");
    cmd->add_option("--k", k, "number of SBM blocks");
    cmd->add_option("--labels", labels, "SBM labels: iid | balanced");
  }

  GraphonSpec build() const {
    GraphonSpec spec;
    if (!spec_path.empty()) {
      auto in = open_input(spec_path);
      nlohmann::json j;
      try {
        in >> j;
      } catch (const nlohmann::json::exception &e) {
        throw ValidationError(spec_path + ": " + e.what());
      }
      spec = graphon_from_json(j);
    } else if (model == "sbm") {
      spec = GraphonSpec::sbm(Matrix(), labels == "iid" ? LabelMode::Iid : LabelMode::Balanced);
      spec.k = k;
      spec.upper = k;
      detail::require(labels == "iid" || labels == "balanced", "--labels must be iid or balanced");
    } else if (model == "translation_abs") {
      spec = GraphonSpec::translation_abs();
    } else if (model == "sobolev_min") {
      spec = GraphonSpec::sobolev_min();
    } else if (model == "gaussian" || model == "gaussian_reflected") {
      spec = gaussian_graphon(model == "gaussian_reflected");
    } else {
      throw ValidationError("unknown model '" + model + "'");
    }
    if (spec.kind == GraphonKind::SBM && !spec.has_blocks())
      spec.B = random_block_matrix(spec.k, block_seed(seed, spec.k));
    spec.validate();
    return spec;
  }
};

void emit(const std::string &path, const std::string &text) {
  if (path.empty() || path == "-")
    std::cout << text;
  else
    write_text(path, text);
}

int run(int argc, char **argv) {
  CLI::App app{"Graphon estimation by universal singular value thresholding"};
  app.require_subcommand(1);

  // generate ----------------------------------------------------------------
  ModelArgs gen_model;
  Eigen::Index gen_n = 100;
  double gen_rho = 1.0;
  std::string gen_out = "graph";
  auto *gen = app.add_subcommand("generate", "sample a graph; writes <out>.edges, <out>.M.csv, <out>.json");
  gen_model.add(gen);
  gen->add_option("--n", gen_n, "number of vertices")->required();
  gen->add_option("--rho", gen_rho, "observation probability")->required();
  gen->add_option("--seed", gen_model.seed, "master seed");
  gen->add_option("--out", gen_out, "output prefix");

  // estimate ----------------------------------------------------------------
  std::string est_graph, est_truth, est_matrix_out, est_out, est_mode = "hard";
  Eigen::Index est_n = 0;
  double est_rho = 1.0, est_c0 = 2.01;
  std::optional<double> est_tau;
  auto *est = app.add_subcommand("estimate", "run USVT on an edge list and print a JSON report");
  est->add_option("--graph", est_graph, "edge list, one 'i j' pair per line")->required();
  est->add_option("--n", est_n, "number of vertices")->required();
  est->add_option("--rho", est_rho, "observation probability")->required();
  est->add_option("--tau", est_tau, "explicit threshold (overrides --c0)");
  est->add_option("--c0", est_c0, "threshold constant, tau = c0 sqrt(n rho)");
  est->add_option("--mode", est_mode, "hard | soft");
  est->add_option("--truth", est_truth, "edge probability matrix CSV; adds mse to the report");
  est->add_option("--matrix-out", est_matrix_out, "write the estimate as CSV");
  est->add_option("--out", est_out, "report path (default stdout)");

  // spectrum ----------------------------------------------------------------
  ModelArgs spec_model;
  Eigen::Index spec_n = 500;
  std::string spec_matrix, spec_operator, spec_out;
  int spec_terms = 50;
  auto *spectrum = app.add_subcommand("spectrum", "eigenvalue tail CSV (r,tail), or an operator spectrum (k,lambda)");
  spec_model.add(spectrum);
  spectrum->add_option("--n", spec_n, "number of vertices");
  spectrum->add_option("--seed", spec_model.seed, "latent seed");
  spectrum->add_option("--matrix", spec_matrix, "edge probability matrix CSV instead of sampling");
  spectrum->add_option("--operator", spec_operator, "closed-form operator spectrum: translation_abs | min");
  spectrum->add_option("--terms", spec_terms, "frequencies / eigenvalues in the operator spectrum");
  spectrum->add_option("--out", spec_out, "output path (default stdout)");

  // rates -------------------------------------------------------------------
  std::vector<Eigen::Index> rate_n{1000};
  std::vector<double> rate_rho{0.1};
  std::string rate_family = "sbm";
  int rate_k = 2, rate_d = 1;
  double rate_alpha = 1.0;
  std::string rate_out;
  auto *rates = app.add_subcommand("rates", "TSV table of rate shapes over an (n, rho) grid");
  rates->add_option("--n", rate_n, "n values")->delimiter(',');
  rates->add_option("--rho", rate_rho, "rho values")->delimiter(',');
  rates->add_option("--family", rate_family, "sbm | holder | sobolev | analytic");
  rates->add_option("--k", rate_k, "SBM blocks");
  rates->add_option("--alpha", rate_alpha, "smoothness");
  rates->add_option("--d", rate_d, "latent dimension");
  rates->add_option("--out", rate_out, "output path (default stdout)");

  // experiment --------------------------------------------------------------
  ModelArgs exp_model;
  std::string exp_spec, exp_out = "experiment", exp_mode = "hard", exp_x;
  std::vector<Eigen::Index> exp_n{250, 500, 1000, 2000};
  std::vector<double> exp_rho{0.1};
  std::vector<int> exp_k{2};
  int exp_runs = 10;
  double exp_c0 = 2.01;
  unsigned exp_threads = 1;
  auto *experiment = app.add_subcommand("experiment", "Monte Carlo sweep; writes <out>.csv and <out>.svg");
  experiment->add_option("--spec", exp_spec, "experiment JSON document");
  experiment->add_option("--model", exp_model.model, "sbm | translation_abs | sobolev_min");
  experiment->add_option("--labels", exp_model.labels, "SBM labels: iid | balanced");
  experiment->add_option("--n", exp_n, "n grid")->delimiter(',');
  experiment->add_option("--rho", exp_rho, "rho grid")->delimiter(',');
  experiment->add_option("--k", exp_k, "k grid (SBM)")->delimiter(',');
  experiment->add_option("--runs", exp_runs, "runs per cell");
  experiment->add_option("--seed", exp_model.seed, "master seed");
  experiment->add_option("--c0", exp_c0, "threshold constant");
  experiment->add_option("--mode", exp_mode, "hard | soft");
  experiment->add_option("--threads", exp_threads, "worker threads");
  experiment->add_option("--x", exp_x, "plot axis: lognrhok | lognrho (default by model)");
  experiment->add_option("--out", exp_out, "output prefix");

  // plot --------------------------------------------------------------------
  std::string plot_csv, plot_out = "-", plot_x;
  auto *plot = app.add_subcommand("plot", "SVG of log MSE from a sweep CSV");
  plot->add_option("--csv", plot_csv, "sweep CSV")->required();
  plot->add_option("--x", plot_x, "lognrhok | lognrho (default by model)");
  plot->add_option("--out", plot_out, "SVG path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 1;
  }

  auto parse_axis = [](const std::string &text, bool sbm) {
    if (text.empty())
      return sbm ? XTransform::LogNRhoOverK : XTransform::LogNRho;
    if (text == "lognrhok")
      return XTransform::LogNRhoOverK;
    if (text == "lognrho")
      return XTransform::LogNRho;
    throw ValidationError("--x must be lognrhok or lognrho");
  };

  if (*gen) {
    const auto spec = gen_model.build();
    const std::uint64_t latent_seed = derive_seed(gen_model.seed, 0);
    const auto latents = sample_latents(spec, gen_n, latent_seed);
    const auto m = edge_prob_matrix(spec, latents);
    const auto graph = sample_graph(m, gen_rho, derive_seed(gen_model.seed, 1));
    write_matrix_csv(gen_out + ".M.csv", m.matrix());
    {
      auto out = open_output(gen_out + ".edges");
      write_edge_list(out, graph);
    }
    nlohmann::json meta;
    meta["n"] = gen_n;
    meta["rho"] = gen_rho;
    meta["seed"] = gen_model.seed;
    meta["edges"] = graph.edge_count();
    if (spec.kind != GraphonKind::Custom)
      meta["model"] = graphon_to_json(spec);
    else
      meta["model"] = spec.label();
    write_text(gen_out + ".json", meta.dump(2) + "\n");
    return 0;
  }

  if (*est) {
    const auto graph = read_edge_list(est_graph, est_n, est_rho);
    UsvtConfig cfg;
    cfg.rho = est_rho;
    cfg.c0 = est_c0;
    cfg.tau = est_tau;
    cfg.mode = parse_threshold_mode(est_mode);
    const auto report = usvt::usvt(graph, cfg);
    std::optional<double> err;
    if (!est_truth.empty()) {
      const EdgeProbabilityMatrix truth(read_matrix_csv(est_truth));
      err = mse(report.m_hat, truth);
    }
    if (!est_matrix_out.empty())
      write_matrix_csv(est_matrix_out, report.m_hat.matrix());
    emit(est_out, report_to_json(report, err).dump(2) + "\n");
    return 0;
  }

  if (*spectrum) {
    if (!spec_operator.empty()) {
      OperatorSpectrum s;
      if (spec_operator == "translation_abs")
        s = operator_spectrum_translation_abs(spec_terms);
      else if (spec_operator == "min")
        s = operator_spectrum_min(spec_terms);
      else
        throw ValidationError("--operator must be translation_abs or min");
      emit(spec_out, spectrum_csv(s));
      return 0;
    }
    Matrix m;
    if (!spec_matrix.empty()) {
      m = EdgeProbabilityMatrix(read_matrix_csv(spec_matrix)).matrix();
    } else {
      const auto spec = spec_model.build();
      m = edge_prob_matrix(spec, sample_latents(spec, spec_n, spec_model.seed)).matrix();
    }
    emit(spec_out, tail_csv(eigen_tail(m)));
    return 0;
  }

  if (*rates) {
    RateFamily family;
    if (rate_family == "sbm")
      family = RateFamily::sbm(rate_k);
    else if (rate_family == "holder")
      family = RateFamily::holder(rate_alpha, rate_d);
    else if (rate_family == "sobolev")
      family = RateFamily::sobolev(rate_alpha, rate_d);
    else if (rate_family == "analytic")
      family = RateFamily::analytic(rate_d);
    else
      throw ValidationError("--family must be sbm, holder, sobolev or analytic");
    std::string text = "n\trho\tn_rho\tfamily\tusvt_rate\tminimax_rate\tcase\tratio\n";
    for (auto n : rate_n)
      for (double rho : rate_rho) {
        const double usvt_value = usvt_rate(n, rho, family);
        std::string minimax = "NA", label = "NA", ratio = "NA";
        const bool has_minimax =
            family.kind == RateFamily::Kind::SBM || (family.kind != RateFamily::Kind::Analytic && family.d == 1);
        if (has_minimax) {
          const auto gap = gap_report(n, rho, family);
          minimax = format_number(gap.minimax_rate);
          label = gap.minimax_case;
          ratio = format_number(gap.ratio);
        }
        text += fmt::format("{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n", n, format_number(rho),
                            format_number(static_cast<double>(n) * rho), family.label(), format_number(usvt_value),
                            minimax, label, ratio);
      }
    emit(rate_out, text);
    return 0;
  }

  if (*experiment) {
    ExperimentSpec spec;
    if (!exp_spec.empty()) {
      auto in = open_input(exp_spec);
      nlohmann::json j;
      try {
        in >> j;
      } catch (const nlohmann::json::exception &e) {
        throw ValidationError(exp_spec + ": " + e.what());
      }
      spec = experiment_from_json(j);
    } else {
      exp_model.k = exp_k.empty() ? 1 : exp_k.front();
      if (exp_model.model == "sbm") {
        spec.model = GraphonSpec::sbm(Matrix(), exp_model.labels == "iid" ? LabelMode::Iid : LabelMode::Balanced);
        spec.k_grid = exp_k;
      } else {
        spec.model = exp_model.build();
      }
      spec.n_grid = exp_n;
      spec.rho_grid = exp_rho;
      spec.runs = exp_runs;
      spec.master_seed = exp_model.seed;
      spec.c0 = exp_c0;
      spec.mode = parse_threshold_mode(exp_mode);
    }
    const auto rows = run_sweep(spec, exp_threads);
    emit_csv(rows, exp_out + ".csv");
    const auto axis = parse_axis(exp_x, spec.is_sbm());
    const auto curves = aggregate(rows, axis);
    std::optional<SlopeReport> fit;
    try {
      fit = slope_fit(curves, axis);
      std::cerr << fmt::format("slope {:.4f} (se {:.4f}) on {}\n", fit->slope, fit->standard_error, fit->x_label);
      for (const auto &note : fit->notices)
        std::cerr << note << '\n';
    } catch (const ValidationError &e) {
      std::cerr << "no slope fit: " << e.what() << '\n';
    }
    emit_svg(curves, axis, exp_out + ".svg", fit);
    return 0;
  }

  if (*plot) {
    const auto rows = read_rows_csv(plot_csv);
    bool sbm = !rows.empty() && rows.front().k.has_value();
    const auto axis = parse_axis(plot_x, sbm);
    const auto curves = aggregate(rows, axis);
    std::optional<SlopeReport> fit;
    try {
      fit = slope_fit(curves, axis);
    } catch (const ValidationError &) {
    }
    emit(plot_out, svg_plot(curves, axis, fit));
    return 0;
  }
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  try {
    return run(argc, argv);
  } catch (const usvt::IoError &e) {
    std::cerr << "usvt: " << e.what() << '\n';
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "usvt: " << e.what() << '\n';
    return 1;
  }
}
