#include "marginsparse/cross_validation.hpp"

#include "marginsparse/random.hpp"
#include "marginsparse/svm.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

namespace marginsparse {

std::uint64_t fold_seed(std::uint64_t base, Index repeat, Index fold) {
  return derive_seed(base, static_cast<std::uint64_t>(repeat) + 1, static_cast<std::uint64_t>(fold) + 1);
}

FoldOutcome evaluate_fold(const LabeledDataset& train, const LabeledDataset& test, const SelectionConfig& config,
                          bool record_selection) {
  FoldOutcome out;
  SelectionConfig cfg = config;
  cfg.compute_radii = false;
  cfg.full_data_sampled_margin = false;
  try {
    SelectionReport report = run_selection(train, cfg);
    const LabeledDataset mapped(report.selected.apply(test.X), test.y);
    out.error = error_rate(report.sampled_model, mapped);
    out.margin = report.margin_sampled;
    if (record_selection) out.ranked = std::move(report.ranked);
  } catch (const NumericalError& e) {
    out.skipped = true;
    out.skip_reason = e.what();
  }
  return out;
}

namespace {

FoldOutcome evaluate_full(const LabeledDataset& train, const LabeledDataset& test, const CvConfig& config) {
  FoldOutcome out;
  const SvmModel model = solve_dual(train, SvmOptions{config.C, config.kkt_tol, 0});
  out.error = error_rate(model, test);
  out.margin = model.margin;
  return out;
}

void summarize(CvCell& cell, Index repeats) {
  std::vector<double> errors;
  std::vector<double> rep_sum(static_cast<std::size_t>(repeats), 0.0);
  std::vector<Index> rep_count(static_cast<std::size_t>(repeats), 0);
  for (const auto& f : cell.folds) {
    if (f.skipped) {
      ++cell.skipped;
      continue;
    }
    errors.push_back(f.error);
    rep_sum[static_cast<std::size_t>(f.repeat)] += f.error;
    ++rep_count[static_cast<std::size_t>(f.repeat)];
  }
  cell.evaluated = static_cast<Index>(errors.size());
  for (std::size_t k = 0; k < rep_sum.size(); ++k)
    if (rep_count[k] > 0) cell.per_repeat_error.push_back(rep_sum[k] / static_cast<double>(rep_count[k]));
  if (errors.empty()) return;
  double mean = 0.0;
  for (double e : errors) mean += e;
  mean /= static_cast<double>(errors.size());
  double ss = 0.0;
  for (double e : errors) ss += (e - mean) * (e - mean);
  cell.mean_error = mean;
  cell.std_error = errors.size() > 1 ? std::sqrt(ss / static_cast<double>(errors.size() - 1)) : 0.0;
}

}  // namespace

CvStats run_cv(const LabeledDataset& data, const CvConfig& config) {
  require(config.folds >= 2, "cv: folds must be at least 2");
  require(config.folds <= data.size(), "cv: folds must not exceed the number of points");
  require(config.repeats >= 1, "cv: repeats must be at least 1");
  for (Index r : config.r_values) require(r >= 1, "cv: r must be positive");

  const FoldPlan plan = make_folds(data.size(), config.folds, config.repeats, config.seed);

  CvStats stats;
  stats.n = data.size();
  stats.folds = config.folds;
  stats.repeats = config.repeats;
  stats.seed = config.seed;
  stats.mode = config.mode;
  stats.C = config.C;

  struct CellSpec {
    std::optional<Method> method;
    Index r;
  };
  std::vector<CellSpec> specs;
  if (config.include_full_baseline) specs.push_back({std::nullopt, data.dim()});
  for (Method m : config.methods) {
    if (m == Method::rfe && config.mode == Mode::unsupervised) throw InvalidArgument("rfe requires supervised mode");
    for (Index r : config.r_values) specs.push_back({m, r});
  }

  const Index per_cell = config.folds * config.repeats;
  stats.cells.resize(specs.size());
  for (std::size_t c = 0; c < specs.size(); ++c) {
    stats.cells[c].method = specs[c].method ? to_string(*specs[c].method) : "full";
    stats.cells[c].r = specs[c].r;
    stats.cells[c].folds.resize(static_cast<std::size_t>(per_cell));
  }

  const Index total = per_cell * static_cast<Index>(specs.size());
  std::atomic<Index> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (;;) {
      const Index task = next.fetch_add(1);
      if (task >= total) return;
      const auto c = static_cast<std::size_t>(task / per_cell);
      const Index within = task % per_cell;
      const Index repeat = within / config.folds;
      const Index fold = within % config.folds;
      try {
        FoldSplit split = apply_fold(data, plan, repeat, fold);
        FoldOutcome out;
        if (split.skipped) {
          out.skipped = true;
          out.skip_reason = "training split has a single class";
        } else if (!specs[c].method) {
          out = evaluate_full(split.train, split.test, config);
        } else {
          SelectionConfig sel;
          sel.method = *specs[c].method;
          sel.mode = config.mode;
          sel.r = specs[c].r;
          sel.C = config.C;
          sel.seed = fold_seed(config.seed, repeat, fold);
          sel.sketch_rows = config.sketch_rows;
          sel.chunk_fraction = config.chunk_fraction;
          sel.kkt_tol = config.kkt_tol;
          out = evaluate_fold(split.train, split.test, sel, config.record_selections);
        }
        out.repeat = repeat;
        out.fold = fold;
        stats.cells[c].folds[static_cast<std::size_t>(within)] = std::move(out);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(total);
        return;
      }
    }
  };

  unsigned threads = config.threads > 0 ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<Index>(threads, std::max<Index>(1, total)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  for (auto& cell : stats.cells) summarize(cell, config.repeats);
  return stats;
}

std::vector<FeatureCount> feature_frequency(const CvCell& cell) {
  std::map<Index, std::pair<Index, double>> acc;  // index -> (count, position sum)
  for (const auto& f : cell.folds) {
    if (f.skipped) continue;
    for (std::size_t pos = 0; pos < f.ranked.size(); ++pos) {
      auto& [count, sum] = acc[f.ranked[pos]];
      ++count;
      sum += static_cast<double>(pos);
    }
  }
  std::vector<FeatureCount> out;
  out.reserve(acc.size());
  for (const auto& [index, cs] : acc)
    out.push_back({index, cs.first, cs.second / static_cast<double>(cs.first)});
  std::sort(out.begin(), out.end(), [](const FeatureCount& a, const FeatureCount& b) {
    if (a.count != b.count) return a.count > b.count;
    if (a.mean_position != b.mean_position) return a.mean_position < b.mean_position;
    return a.index < b.index;
  });
  return out;
}

}  // namespace marginsparse
