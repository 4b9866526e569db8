#include "marginsparse/pipelines.hpp"

#include "marginsparse/baselines.hpp"
#include "marginsparse/bss.hpp"
#include "marginsparse/geometry.hpp"
#include "marginsparse/leverage.hpp"
#include "marginsparse/linalg.hpp"
#include "marginsparse/sketch.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace marginsparse {

std::string to_string(Method method) {
  switch (method) {
    case Method::bss: return "bss";
    case Method::leverage: return "leverage";
    case Method::approx_bss: return "approx-bss";
    case Method::uniform: return "uniform";
    case Method::rrqr: return "rrqr";
    case Method::rfe: return "rfe";
  }
  return "unknown";
}

std::string to_string(Mode mode) { return mode == Mode::supervised ? "supervised" : "unsupervised"; }

Method parse_method(std::string_view name) {
  for (Method m : {Method::bss, Method::leverage, Method::approx_bss, Method::uniform, Method::rrqr, Method::rfe})
    if (to_string(m) == name) return m;
  throw InvalidArgument("unknown method '" + std::string(name) + "'");
}

Mode parse_mode(std::string_view name) {
  if (name == "supervised") return Mode::supervised;
  if (name == "unsupervised") return Mode::unsupervised;
  throw InvalidArgument("unknown mode '" + std::string(name) + "'");
}

bool is_weighted(Method method) {
  return method == Method::bss || method == Method::leverage || method == Method::approx_bss;
}

bool is_randomized(Method method) {
  return method == Method::leverage || method == Method::approx_bss || method == Method::uniform;
}

std::string to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::not_applicable: return "na";
  }
  return "na";
}

Index default_feature_count(Index m, double epsilon) {
  require(epsilon > 0.0 && epsilon < 1.0, "epsilon must lie in (0, 1)");
  return static_cast<Index>(std::ceil(36.0 * static_cast<double>(m) / (epsilon * epsilon)));
}

namespace {

std::vector<Index> first_occurrences(const std::vector<Index>& columns) {
  std::vector<Index> out;
  for (Index c : columns)
    if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
  return out;
}

struct Selection {
  SamplingOperator<double> op;
  std::vector<Index> ranked;
  Index sketch_rows = 0;
};

// Runs `config.method` on the selection matrix `x` (X^sv or X^tr) whose
// thin SVD is `svd`. `labeled` is only consulted by RFE.
Selection select_features(const LabeledDataset& labeled, const ThinSvd<double>& svd, Index r,
                          const SelectionConfig& config) {
  const Features& x = labeled.X;
  const Index d = x.cols();
  Selection out;
  switch (config.method) {
    case Method::bss: {
      out.op = bss_select(svd.V, r);
      out.ranked = first_occurrences(out.op.columns());
      break;
    }
    case Method::approx_bss: {
      out.sketch_rows = config.sketch_rows > 0 ? config.sketch_rows : std::max<Index>(1, 4 * svd.rank());
      out.op = approx_bss_select(x, out.sketch_rows, r, config.seed);
      out.ranked = first_occurrences(out.op.columns());
      break;
    }
    case Method::leverage: {
      out.op = leverage_select(svd.V, r, config.seed);
      out.ranked = out.op.distinct_columns();
      const VectorXd p = svd.V.rowwise().squaredNorm();
      std::stable_sort(out.ranked.begin(), out.ranked.end(), [&](Index a, Index b) { return p(a) > p(b); });
      break;
    }
    case Method::uniform: {
      out.ranked = uniform_select(d, r, config.seed);
      out.op = SamplingOperator<double>::unweighted(d, out.ranked);
      break;
    }
    case Method::rrqr: {
      out.ranked = rrqr_select(x, r);
      out.op = SamplingOperator<double>::unweighted(d, out.ranked);
      break;
    }
    case Method::rfe: {
      out.ranked = rfe_select(labeled, r, RfeOptions{config.C, config.chunk_fraction, config.kkt_tol});
      out.op = SamplingOperator<double>::unweighted(d, out.ranked);
      break;
    }
  }
  return out;
}

SelectionReport finish_report(const LabeledDataset& selection_data, const ThinSvd<double>& svd,
                              const SvmModel& full_model, Selection&& sel, Index r, const SelectionConfig& config) {
  SelectionReport report;
  report.method = config.method;
  report.mode = config.mode;
  report.r = r;
  report.C = config.C;
  if (is_randomized(config.method)) report.seed = config.seed;
  report.support_count = selection_data.size();
  report.rank = svd.rank();
  report.sketch_rows = sel.sketch_rows;
  report.selected = std::move(sel.op);
  report.ranked = std::move(sel.ranked);

  const SvmOptions svm{config.C, config.kkt_tol, 0};
  report.sampled_model = solve_dual(LabeledDataset(report.selected.apply(selection_data.X), selection_data.y), svm);
  report.converged = full_model.converged && report.sampled_model.converged;
  report.margin_full = full_model.margin;
  report.margin_sampled = report.sampled_model.margin;
  if (is_weighted(config.method) && svd.rank() > 0) report.spectral_error = report.selected.spectral_error(svd.V);
  if (config.compute_radii) {
    const RadiusCheck rc = radius_bound_check(selection_data.X, report.selected, config.meb_delta);
    report.radius_full = rc.radius_full;
    report.radius_sampled = rc.radius_sampled;
    report.radius_spectral_error = rc.spectral_error;
  }
  return report;
}

}  // namespace

SelectionReport supervised_select(const LabeledDataset& data, const SelectionConfig& config) {
  if (!data.has_both_labels()) throw InvalidArgument("supervised_select: both classes must be present");
  const SvmOptions svm{config.C, config.kkt_tol, 0};
  const SvmModel train_model = solve_dual(data, svm);
  const auto sv = support_vectors(train_model);
  if (sv.size() < 2) throw NumericalError("supervised_select: fewer than 2 support vectors");
  const LabeledDataset sv_data = data.subset(sv);

  const auto svd = thin_svd(sv_data.X);
  const Index r = config.r.value_or(default_feature_count(static_cast<Index>(sv.size()), config.epsilon));
  // gamma* comes from the support-vector problem in the full feature space.
  const SvmModel sv_model = solve_dual(sv_data, svm);
  SelectionReport report = finish_report(sv_data, svd, sv_model, select_features(sv_data, svd, r, config), r, config);
  if (config.full_data_sampled_margin) {
    const SvmModel all = solve_dual(LabeledDataset(report.selected.apply(data.X), data.y), svm);
    report.margin_full_data_sampled = all.margin;
  }
  return report;
}

SelectionReport unsupervised_select(const LabeledDataset& data, const SelectionConfig& config) {
  if (config.method == Method::rfe) throw InvalidArgument("rfe requires supervised mode");
  if (!data.has_both_labels()) throw InvalidArgument("unsupervised_select: both classes must be present");
  const SvmOptions svm{config.C, config.kkt_tol, 0};
  const auto svd = thin_svd(data.X);
  const Index r = config.r.value_or(default_feature_count(svd.rank(), config.epsilon));
  Selection sel = select_features(data, svd, r, config);
  const SvmModel full_model = solve_dual(data, svm);
  return finish_report(data, svd, full_model, std::move(sel), r, config);
}

SelectionReport run_selection(const LabeledDataset& data, const SelectionConfig& config) {
  return config.mode == Mode::supervised ? supervised_select(data, config) : unsupervised_select(data, config);
}

BoundReport verify_margin_bound(const SelectionReport& report) {
  BoundReport out;
  const double g2 = report.margin_full * report.margin_full;
  const double gt2 = report.margin_sampled * report.margin_sampled;
  const bool margins_ok = report.converged && std::isfinite(g2) && std::isfinite(gt2) && g2 > 0.0 && gt2 > 0.0;

  std::optional<double> eps_margin;
  if (report.spectral_error && margins_ok && *report.spectral_error < 1.0) {
    const double e = *report.spectral_error;
    eps_margin = e / (1.0 - e);
    out.margin.lhs = gt2;
    out.margin.rhs = (1.0 - *eps_margin) * g2;
    out.margin.status = gt2 >= out.margin.rhs - 1e-6 * g2 ? CheckStatus::pass : CheckStatus::fail;
  }

  std::optional<double> eps_radius;
  if (report.radius_full && report.radius_sampled && report.radius_spectral_error) {
    eps_radius = *report.radius_spectral_error;
    const double b2 = *report.radius_full * *report.radius_full;
    const double bt2 = *report.radius_sampled * *report.radius_sampled;
    out.radius.lhs = bt2;
    out.radius.rhs = (1.0 + *eps_radius) * b2;
    out.radius.status = bt2 <= out.radius.rhs * (1.0 + 1e-12) ? CheckStatus::pass : CheckStatus::fail;
  }

  if (eps_margin && eps_radius) {
    const double eps = std::max(*eps_margin, *eps_radius);
    out.epsilon_hat = eps;
    if (eps < 1.0) {
      const double b2 = *report.radius_full * *report.radius_full;
      const double bt2 = *report.radius_sampled * *report.radius_sampled;
      out.ratio.lhs = bt2 / gt2;
      out.ratio.rhs = (1.0 + eps) / (1.0 - eps) * b2 / g2;
      out.ratio.status = out.ratio.lhs <= out.ratio.rhs * (1.0 + 1e-6) ? CheckStatus::pass : CheckStatus::fail;
    }
  }
  return out;
}

}  // namespace marginsparse
