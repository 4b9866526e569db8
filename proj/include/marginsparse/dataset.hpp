#pragma once

#include "marginsparse/common.hpp"
#include "marginsparse/feature_matrix.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace marginsparse {

/// Feature matrix plus labels in {-1, +1}.
struct LabeledDataset {
  Features X;
  VectorXd y;

  LabeledDataset() = default;
  LabeledDataset(Features x, VectorXd labels);

  Index size() const { return X.rows(); }
  Index dim() const { return X.cols(); }
  bool has_both_labels() const;

  LabeledDataset subset(std::span<const Index> rows) const;
};

// svmlight text: "<label> <idx>:<val> ..." with 1-based, strictly
// increasing indices; '#' starts a comment. Labels are +1, -1, 1 or -1.

LabeledDataset parse_svmlight(std::string_view text, std::optional<Index> dim = std::nullopt);
std::string serialize_svmlight(const LabeledDataset& data);

struct CsvOptions {
  bool label_first = false;  // default: last column is the label
};

/// Comma-separated values, optional header line. Always dense.
LabeledDataset parse_csv(std::string_view text, const CsvOptions& options = {});
std::string serialize_csv(const LabeledDataset& data);

enum class DataFormat { svmlight, csv };

/// Format by extension: ".csv" is CSV, anything else is svmlight.
DataFormat format_for_path(const std::string& path);
LabeledDataset load_dataset(const std::string& path, const CsvOptions& csv = {},
                            std::optional<DataFormat> format = std::nullopt);
void save_dataset(const LabeledDataset& data, const std::string& path,
                  std::optional<DataFormat> format = std::nullopt);

/// Drops all-zero columns; returns the dataset and the kept column indices.
std::pair<LabeledDataset, std::vector<Index>> remove_zero_columns(const LabeledDataset& data);

/// Labels uniform in {-1, +1}. Feature j in 1..k of point i is
/// y_i * N(-j, 1); the remaining d - k features are N(0, 1). Dense.
LabeledDataset gen_synthetic(Index n, Index d, Index k, std::uint64_t seed);

/// Linearly separable labeled data of exact rank `rank`: X = Z W with a
/// latent Z (n x rank) whose first coordinate is y_i (1 + |g|).
LabeledDataset gen_low_rank(Index n, Index d, Index rank, std::uint64_t seed);

/// Repeated k-fold split. assignments[rep] is a permutation of [0, n);
/// fold f of a repeat is a contiguous block of that permutation.
struct FoldPlan {
  Index n = 0;
  Index folds = 0;
  Index repeats = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<Index>> assignments;

  /// [begin, end) of fold f inside a permutation; sizes differ by at most 1.
  std::pair<Index, Index> fold_range(Index fold) const;
  std::vector<Index> test_rows(Index repeat, Index fold) const;
  std::vector<Index> train_rows(Index repeat, Index fold) const;
};

FoldPlan make_folds(Index n, Index folds, Index repeats, std::uint64_t seed);

struct FoldSplit {
  LabeledDataset train;
  LabeledDataset test;
  bool skipped = false;  // training split is single-class
};

FoldSplit apply_fold(const LabeledDataset& data, const FoldPlan& plan, Index repeat, Index fold);

}  // namespace marginsparse
