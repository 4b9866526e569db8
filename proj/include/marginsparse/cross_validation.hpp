#pragma once

// Repeated k-fold evaluation of selection methods over a grid of r values.
// Each (cell, repeat, fold) task is independent and runs on a worker pool;
// statistics are computed after all tasks finish.

#include "marginsparse/common.hpp"
#include "marginsparse/dataset.hpp"
#include "marginsparse/pipelines.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace marginsparse {

struct CvConfig {
  std::vector<Method> methods{Method::bss};
  std::vector<Index> r_values{300, 400, 500};
  Mode mode = Mode::supervised;
  double C = 1.0;
  Index folds = 10;
  Index repeats = 10;
  std::uint64_t seed = 0;
  Index sketch_rows = 0;
  double chunk_fraction = 0.1;
  double kkt_tol = 1e-4;
  bool include_full_baseline = true;
  bool record_selections = false;
  unsigned threads = 0;  // 0: hardware concurrency
};

struct FoldOutcome {
  Index repeat = 0;
  Index fold = 0;
  bool skipped = false;
  std::string skip_reason;
  double error = 0.0;
  double margin = 0.0;            // margin of the model used for prediction
  std::vector<Index> ranked;      // filled when record_selections is set
};

struct CvCell {
  std::string method;  // "full" for the no-selection baseline
  Index r = 0;         // d for the baseline
  double mean_error = 0.0;
  double std_error = 0.0;                 // sample std over evaluated folds
  std::vector<double> per_repeat_error;   // mean over each repeat's evaluated folds
  std::vector<FoldOutcome> folds;         // repeat-major order
  Index evaluated = 0;
  Index skipped = 0;
};

struct CvStats {
  Index n = 0;
  Index folds = 0;
  Index repeats = 0;
  std::uint64_t seed = 0;
  Mode mode = Mode::supervised;
  double C = 1.0;
  std::vector<CvCell> cells;
};

/// Seed of the selection run in (repeat, fold); shared by all cells so
/// randomized methods see the same stream for a given split.
std::uint64_t fold_seed(std::uint64_t base, Index repeat, Index fold);

CvStats run_cv(const LabeledDataset& data, const CvConfig& config);

/// One fold's selection, training and test error. Exposed for tests.
FoldOutcome evaluate_fold(const LabeledDataset& train, const LabeledDataset& test,
                          const SelectionConfig& config, bool record_selection);

struct FeatureCount {
  Index index = 0;  // 0-based column
  Index count = 0;  // number of training folds that selected it
  double mean_position = 0.0;  // mean rank in the method's importance order
};

/// Features ranked by selection frequency across all evaluated training
/// folds; ties go to the better mean position, then the lower index.
std::vector<FeatureCount> feature_frequency(const CvCell& cell);

}  // namespace marginsparse
