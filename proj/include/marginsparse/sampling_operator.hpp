#pragma once

#include "marginsparse/common.hpp"
#include "marginsparse/feature_matrix.hpp"
#include "marginsparse/linalg.hpp"

#include <algorithm>
#include <vector>

namespace marginsparse {

/// Column sampling and rescaling R = S D in R^{d x r}.
///
/// Selection k picks source column `column` and scales it by `weight`, so
/// (X R).col(k) = weight * X.col(column). A column may appear more than once.
template <typename Scalar>
class SamplingOperator {
 public:
  struct Selection {
    Index column;
    Scalar weight;
  };

  SamplingOperator() = default;

  SamplingOperator(Index source_dim, std::vector<Selection> selections)
      : source_dim_(source_dim), selections_(std::move(selections)) {
    for (const auto& s : selections_) {
      require(s.column >= 0 && s.column < source_dim_, "sampling operator: column index out of range");
      require(s.weight > Scalar(0), "sampling operator: weights must be positive");
    }
  }

  /// Unit weights on the given columns (unweighted baselines).
  static SamplingOperator unweighted(Index source_dim, const std::vector<Index>& columns) {
    std::vector<Selection> sel;
    sel.reserve(columns.size());
    for (Index c : columns) sel.push_back({c, Scalar(1)});
    return SamplingOperator(source_dim, std::move(sel));
  }

  static SamplingOperator identity(Index d) {
    std::vector<Index> all(static_cast<std::size_t>(d));
    for (Index i = 0; i < d; ++i) all[static_cast<std::size_t>(i)] = i;
    return unweighted(d, all);
  }

  Index source_dim() const { return source_dim_; }
  Index target_dim() const { return static_cast<Index>(selections_.size()); }
  const std::vector<Selection>& selections() const { return selections_; }

  std::vector<Index> columns() const {
    std::vector<Index> out;
    out.reserve(selections_.size());
    for (const auto& s : selections_) out.push_back(s.column);
    return out;
  }

  std::vector<Scalar> weights() const {
    std::vector<Scalar> out;
    out.reserve(selections_.size());
    for (const auto& s : selections_) out.push_back(s.weight);
    return out;
  }

  /// Distinct selected columns, ascending.
  std::vector<Index> distinct_columns() const {
    std::vector<Index> out = columns();
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  /// Multiplies every weight by `factor`.
  void rescale(Scalar factor) {
    for (auto& s : selections_) s.weight *= factor;
  }

  /// The explicit d x r matrix R.
  Matrix<Scalar> to_dense() const {
    Matrix<Scalar> r = Matrix<Scalar>::Zero(source_dim_, target_dim());
    for (Index k = 0; k < target_dim(); ++k) r(selections_[k].column, k) = selections_[k].weight;
    return r;
  }

  /// X R for a dense matrix with d columns.
  template <typename Derived>
  Matrix<Scalar> apply(const Eigen::MatrixBase<Derived>& x) const {
    require(x.cols() == source_dim_, "sampling operator: dimension mismatch");
    Matrix<Scalar> out(x.rows(), target_dim());
    for (Index k = 0; k < target_dim(); ++k) out.col(k) = selections_[k].weight * x.col(selections_[k].column);
    return out;
  }

  FeatureMatrix<Scalar> apply(const FeatureMatrix<Scalar>& x) const {
    require(x.cols() == source_dim_, "sampling operator: dimension mismatch");
    const auto cols = columns();
    const auto w = weights();
    return x.weighted_columns(cols, w);
  }

  /// R^T V, the r x l matrix of selected and rescaled rows of V.
  template <typename Derived>
  Matrix<Scalar> sample_rows(const Eigen::MatrixBase<Derived>& v) const {
    require(v.rows() == source_dim_, "sampling operator: dimension mismatch");
    Matrix<Scalar> out(target_dim(), v.cols());
    for (Index k = 0; k < target_dim(); ++k) out.row(k) = selections_[k].weight * v.row(selections_[k].column);
    return out;
  }

  /// E = V^T V - V^T R R^T V.
  template <typename Derived>
  Matrix<Scalar> error_matrix(const Eigen::MatrixBase<Derived>& v) const {
    const Matrix<Scalar> rv = sample_rows(v);
    return v.transpose() * v - rv.transpose() * rv;
  }

  /// ||V^T V - V^T R R^T V||_2.
  template <typename Derived>
  Scalar spectral_error(const Eigen::MatrixBase<Derived>& v) const {
    return symmetric_spectral_norm(error_matrix(v));
  }

 private:
  Index source_dim_ = 0;
  std::vector<Selection> selections_;
};

}  // namespace marginsparse
