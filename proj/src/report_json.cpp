#include "marginsparse/report_json.hpp"

#include <cmath>

namespace marginsparse {

namespace {

using nlohmann::json;

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

template <typename T>
json optional_number(const std::optional<T>& v) {
  return v ? number_or_null(static_cast<double>(*v)) : json(nullptr);
}

json check_json(const BoundCheck& c) {
  return {{"status", to_string(c.status)}, {"lhs", number_or_null(c.lhs)}, {"rhs", number_or_null(c.rhs)}};
}

}  // namespace

json bound_json(const BoundReport& bounds) {
  return {{"margin", check_json(bounds.margin)},
          {"radius", check_json(bounds.radius)},
          {"radius_margin_ratio", check_json(bounds.ratio)},
          {"epsilon_hat", optional_number(bounds.epsilon_hat)}};
}

json selection_json(const SelectionReport& report, const BoundReport& bounds, double wall_time_s) {
  json out;
  out["schema"] = kSchema;
  out["method"] = to_string(report.method);
  out["mode"] = to_string(report.mode);
  out["r"] = report.r;
  out["seed"] = report.seed ? json(*report.seed) : json(nullptr);
  out["C"] = report.C;
  const auto cols = report.selected.columns();
  out["selected_indices"] = cols;
  json features = json::array();
  for (Index c : cols) features.push_back(c + 1);
  out["features"] = features;
  if (is_weighted(report.method))
    out["weights"] = report.selected.weights();
  else
    out["weights"] = nullptr;
  out["ranked_indices"] = report.ranked;
  out["support_count"] = report.support_count;
  out["rank"] = report.rank;
  if (report.method == Method::approx_bss) out["sketch_rows"] = report.sketch_rows;
  out["margin_full"] = number_or_null(report.margin_full);
  out["margin_sampled"] = number_or_null(report.margin_sampled);
  out["margin_full_data_sampled"] = optional_number(report.margin_full_data_sampled);
  out["spectral_error"] = optional_number(report.spectral_error);
  out["radius_full"] = optional_number(report.radius_full);
  out["radius_sampled"] = optional_number(report.radius_sampled);
  out["radius_spectral_error"] = optional_number(report.radius_spectral_error);
  out["converged"] = report.converged;
  out["bound_checks"] = {{"margin_thm1_or_3", to_string(bounds.margin.status)},
                         {"radius_thm5", to_string(bounds.radius.status)},
                         {"radius_margin_ratio", to_string(bounds.ratio.status)}};
  out["bounds"] = bound_json(bounds);
  out["wall_time_s"] = wall_time_s;
  return out;
}

json cv_json(const CvStats& stats) {
  json out;
  out["schema"] = kSchema;
  out["n"] = stats.n;
  out["folds"] = stats.folds;
  out["repeats"] = stats.repeats;
  out["seed"] = stats.seed;
  out["mode"] = to_string(stats.mode);
  out["C"] = stats.C;
  json cells = json::array();
  for (const auto& cell : stats.cells) {
    json c;
    c["method"] = cell.method;
    c["r"] = cell.r;
    c["evaluated"] = cell.evaluated;
    c["skipped"] = cell.skipped;
    c["mean_error"] = cell.evaluated > 0 ? json(cell.mean_error) : json(nullptr);
    c["std_error"] = cell.evaluated > 0 ? json(cell.std_error) : json(nullptr);
    c["per_repeat_error"] = cell.per_repeat_error;
    json folds = json::array();
    for (const auto& f : cell.folds) {
      json jf = {{"repeat", f.repeat}, {"fold", f.fold}, {"skipped", f.skipped}};
      if (f.skipped) {
        jf["reason"] = f.skip_reason;
      } else {
        jf["error"] = f.error;
        jf["margin"] = number_or_null(f.margin);
      }
      folds.push_back(std::move(jf));
    }
    c["folds"] = std::move(folds);
    cells.push_back(std::move(c));
  }
  out["cells"] = std::move(cells);
  return out;
}

json feature_frequency_json(const CvCell& cell, Index top) {
  const auto ranked = feature_frequency(cell);
  json rows = json::array();
  for (std::size_t k = 0; k < ranked.size() && static_cast<Index>(k) < top; ++k)
    rows.push_back({{"feature", ranked[k].index + 1},
                    {"index", ranked[k].index},
                    {"count", ranked[k].count},
                    {"mean_position", ranked[k].mean_position}});
  return {{"schema", kSchema},   {"method", cell.method}, {"r", cell.r},
          {"folds_evaluated", cell.evaluated}, {"folds_skipped", cell.skipped}, {"top", rows}};
}

json error_json(const std::string& kind, const std::string& message, int exit_code) {
  return {{"schema", kSchema}, {"error", {{"kind", kind}, {"message", message}, {"exit_code", exit_code}}}};
}

}  // namespace marginsparse
