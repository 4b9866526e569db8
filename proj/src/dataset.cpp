#include "marginsparse/dataset.hpp"

#include "marginsparse/random.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace marginsparse {

LabeledDataset::LabeledDataset(Features x, VectorXd labels) : X(std::move(x)), y(std::move(labels)) {
  if (y.size() != X.rows())
    throw DataError("label count " + std::to_string(y.size()) + " does not match row count " +
                    std::to_string(X.rows()));
  for (Index i = 0; i < y.size(); ++i)
    if (y(i) != 1.0 && y(i) != -1.0) throw DataError("labels must be +1 or -1");
}

bool LabeledDataset::has_both_labels() const {
  bool pos = false, neg = false;
  for (Index i = 0; i < y.size(); ++i) (y(i) > 0 ? pos : neg) = true;
  return pos && neg;
}

LabeledDataset LabeledDataset::subset(std::span<const Index> rows) const {
  VectorXd labels(static_cast<Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) labels(static_cast<Index>(k)) = y(rows[k]);
  return LabeledDataset(X.select_rows(rows), std::move(labels));
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_double(std::string_view token) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() || token.empty()) return std::nullopt;
  return value;
}

std::optional<long long> parse_integer(std::string_view token) {
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() || token.empty()) return std::nullopt;
  return value;
}

std::vector<std::string_view> split(std::string_view s, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(delim, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> split_whitespace(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

[[noreturn]] void line_error(std::size_t line, const std::string& what) {
  throw DataError("line " + std::to_string(line) + ": " + what);
}

double parse_label(std::string_view token, std::size_t line) {
  if (token == "+1" || token == "1") return 1.0;
  if (token == "-1") return -1.0;
  line_error(line, "label must be +1 or -1, got '" + std::string(token) + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

LabeledDataset parse_svmlight(std::string_view text, std::optional<Index> dim) {
  std::vector<Features::Triplet> triplets;
  std::vector<double> labels;
  Index max_index = 0;
  std::size_t line_no = 0;
  for (std::string_view raw : split(text, '\n')) {
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const auto line = trim(raw);
    if (line.empty()) continue;
    const auto tokens = split_whitespace(line);
    const Index row = static_cast<Index>(labels.size());
    labels.push_back(parse_label(tokens[0], line_no));
    long long previous = 0;
    for (std::size_t k = 1; k < tokens.size(); ++k) {
      const auto colon = tokens[k].find(':');
      if (colon == std::string_view::npos) line_error(line_no, "expected <index>:<value>, got '" + std::string(tokens[k]) + "'");
      const auto idx = parse_integer(tokens[k].substr(0, colon));
      const auto val = parse_double(tokens[k].substr(colon + 1));
      if (!idx || *idx < 1) line_error(line_no, "bad feature index in '" + std::string(tokens[k]) + "'");
      if (!val) line_error(line_no, "bad feature value in '" + std::string(tokens[k]) + "'");
      if (!std::isfinite(*val)) line_error(line_no, "non-finite feature value");
      if (*idx <= previous)
        line_error(line_no, *idx == previous ? "duplicate feature index " + std::to_string(*idx)
                                             : "feature indices must be strictly increasing");
      previous = *idx;
      max_index = std::max<Index>(max_index, static_cast<Index>(*idx));
      triplets.emplace_back(row, static_cast<Index>(*idx - 1), *val);
    }
  }
  Index d = max_index;
  if (dim) {
    if (*dim < max_index)
      throw DataError("feature index " + std::to_string(max_index) + " exceeds dimension " + std::to_string(*dim));
    d = *dim;
  }
  Features x = Features::from_triplets(static_cast<Index>(labels.size()), d, triplets);
  return LabeledDataset(std::move(x), Eigen::Map<VectorXd>(labels.data(), static_cast<Index>(labels.size())));
}

std::string serialize_svmlight(const LabeledDataset& data) {
  std::ostringstream out;
  out << std::setprecision(17);
  for (Index i = 0; i < data.size(); ++i) {
    out << (data.y(i) > 0 ? "+1" : "-1");
    if (data.X.is_sparse()) {
      for (Features::Sparse::InnerIterator it(data.X.sparse(), i); it; ++it)
        out << ' ' << (it.col() + 1) << ':' << it.value();
    } else {
      const auto& row = data.X.dense().row(i);
      for (Index j = 0; j < row.size(); ++j)
        if (row(j) != 0.0) out << ' ' << (j + 1) << ':' << row(j);
    }
    out << '\n';
  }
  return out.str();
}

LabeledDataset parse_csv(std::string_view text, const CsvOptions& options) {
  std::vector<std::vector<double>> rows;
  std::vector<double> labels;
  std::size_t width = 0;
  std::size_t line_no = 0;
  bool first_content_line = true;
  for (std::string_view raw : split(text, '\n')) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty()) continue;
    auto fields = split(line, ',');
    std::vector<double> values;
    values.reserve(fields.size());
    bool numeric = true;
    for (auto f : fields) {
      const auto v = parse_double(trim(f));
      if (!v) {
        numeric = false;
        break;
      }
      values.push_back(*v);
    }
    if (!numeric) {
      if (first_content_line) {  // header
        first_content_line = false;
        continue;
      }
      line_error(line_no, "non-numeric field");
    }
    first_content_line = false;
    if (values.size() < 1) line_error(line_no, "empty row");
    if (width == 0) width = values.size();
    if (values.size() != width) line_error(line_no, "expected " + std::to_string(width) + " fields");
    const double label = options.label_first ? values.front() : values.back();
    if (label != 1.0 && label != -1.0) line_error(line_no, "label must be +1 or -1");
    labels.push_back(label);
    if (options.label_first)
      values.erase(values.begin());
    else
      values.pop_back();
    for (double v : values)
      if (!std::isfinite(v)) line_error(line_no, "non-finite feature value");
    rows.push_back(std::move(values));
  }
  const Index n = static_cast<Index>(rows.size());
  const Index d = width == 0 ? 0 : static_cast<Index>(width) - 1;
  Features::Dense x(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) x(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return LabeledDataset(Features(std::move(x)), Eigen::Map<VectorXd>(labels.data(), n));
}

std::string serialize_csv(const LabeledDataset& data) {
  std::ostringstream out;
  out << std::setprecision(17);
  const MatrixXd x = data.X.to_dense();
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < x.cols(); ++j) out << x(i, j) << ',';
    out << (data.y(i) > 0 ? 1 : -1) << '\n';
  }
  return out.str();
}

DataFormat format_for_path(const std::string& path) {
  const auto dot = path.rfind('.');
  if (dot != std::string::npos && path.substr(dot) == ".csv") return DataFormat::csv;
  return DataFormat::svmlight;
}

LabeledDataset load_dataset(const std::string& path, const CsvOptions& csv, std::optional<DataFormat> format) {
  const std::string text = read_file(path);
  if (format.value_or(format_for_path(path)) == DataFormat::csv) return parse_csv(text, csv);
  return parse_svmlight(text);
}

void save_dataset(const LabeledDataset& data, const std::string& path, std::optional<DataFormat> format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << (format.value_or(format_for_path(path)) == DataFormat::csv ? serialize_csv(data) : serialize_svmlight(data));
}

std::pair<LabeledDataset, std::vector<Index>> remove_zero_columns(const LabeledDataset& data) {
  std::vector<bool> nonzero(static_cast<std::size_t>(data.dim()), false);
  if (data.X.is_sparse()) {
    const auto& s = data.X.sparse();
    for (Index k = 0; k < s.outerSize(); ++k)
      for (Features::Sparse::InnerIterator it(s, k); it; ++it)
        if (it.value() != 0.0) nonzero[static_cast<std::size_t>(it.col())] = true;
  } else {
    const auto& m = data.X.dense();
    for (Index j = 0; j < m.cols(); ++j) nonzero[static_cast<std::size_t>(j)] = (m.col(j).array() != 0.0).any();
  }
  std::vector<Index> kept;
  for (Index j = 0; j < data.dim(); ++j)
    if (nonzero[static_cast<std::size_t>(j)]) kept.push_back(j);
  std::vector<double> ones(kept.size(), 1.0);
  Features reduced = data.X.weighted_columns(kept, ones);
  if (data.X.is_sparse()) reduced = Features(Features::Sparse(reduced.dense().sparseView()));
  return {LabeledDataset(std::move(reduced), data.y), std::move(kept)};
}

LabeledDataset gen_synthetic(Index n, Index d, Index k, std::uint64_t seed) {
  require(n >= 2, "gen_synthetic: n must be at least 2");
  require(k >= 0 && k <= d, "gen_synthetic: need 0 <= k <= d");
  Rng rng(seed);
  Features::Dense x(n, d);
  VectorXd y(n);
  for (Index i = 0; i < n; ++i) {
    y(i) = rng.sign();
    for (Index j = 0; j < d; ++j) {
      const double g = rng.normal();
      x(i, j) = j < k ? y(i) * (-static_cast<double>(j + 1) + g) : g;
    }
  }
  return LabeledDataset(Features(std::move(x)), std::move(y));
}

LabeledDataset gen_low_rank(Index n, Index d, Index rank, std::uint64_t seed) {
  require(n >= 2, "gen_low_rank: n must be at least 2");
  require(rank >= 1 && rank <= std::min(n, d), "gen_low_rank: need 1 <= rank <= min(n, d)");
  Rng rng(seed);
  VectorXd y(n);
  MatrixXd z(n, rank);
  for (Index i = 0; i < n; ++i) {
    y(i) = rng.sign();
    z(i, 0) = y(i) * (1.0 + std::abs(rng.normal()));
    for (Index j = 1; j < rank; ++j) z(i, j) = rng.normal();
  }
  const MatrixXd w = gaussian_matrix<double>(rank, d, rng);
  return LabeledDataset(Features(Features::Dense(z * w)), std::move(y));
}

std::pair<Index, Index> FoldPlan::fold_range(Index fold) const {
  const Index base = n / folds;
  const Index extra = n % folds;
  const Index begin = fold * base + std::min(fold, extra);
  return {begin, begin + base + (fold < extra ? 1 : 0)};
}

std::vector<Index> FoldPlan::test_rows(Index repeat, Index fold) const {
  const auto& perm = assignments.at(static_cast<std::size_t>(repeat));
  const auto [begin, end] = fold_range(fold);
  std::vector<Index> rows(perm.begin() + begin, perm.begin() + end);
  std::sort(rows.begin(), rows.end());
  return rows;
}

std::vector<Index> FoldPlan::train_rows(Index repeat, Index fold) const {
  const auto& perm = assignments.at(static_cast<std::size_t>(repeat));
  const auto [begin, end] = fold_range(fold);
  std::vector<Index> rows;
  rows.reserve(static_cast<std::size_t>(n - (end - begin)));
  rows.insert(rows.end(), perm.begin(), perm.begin() + begin);
  rows.insert(rows.end(), perm.begin() + end, perm.end());
  std::sort(rows.begin(), rows.end());
  return rows;
}

FoldPlan make_folds(Index n, Index folds, Index repeats, std::uint64_t seed) {
  require(folds >= 2, "make_folds: need at least 2 folds");
  require(folds <= n, "make_folds: more folds than rows");
  require(repeats >= 1, "make_folds: need at least 1 repeat");
  FoldPlan plan{n, folds, repeats, seed, {}};
  for (Index rep = 0; rep < repeats; ++rep) {
    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Index{0});
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(rep)));
    for (Index i = n - 1; i > 0; --i)
      std::swap(perm[static_cast<std::size_t>(i)], perm[rng.below(static_cast<std::uint64_t>(i + 1))]);
    plan.assignments.push_back(std::move(perm));
  }
  return plan;
}

FoldSplit apply_fold(const LabeledDataset& data, const FoldPlan& plan, Index repeat, Index fold) {
  require(plan.n == data.size(), "apply_fold: plan does not match dataset size");
  const auto train_rows = plan.train_rows(repeat, fold);
  const auto test_rows = plan.test_rows(repeat, fold);
  FoldSplit split{data.subset(train_rows), data.subset(test_rows), false};
  split.skipped = !split.train.has_both_labels();
  return split;
}

}  // namespace marginsparse
