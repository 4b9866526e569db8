#pragma once

#include "marginsparse/common.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cmath>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace marginsparse {

/// n x d data matrix, rows are points and columns are features.
///
/// Holds either a dense row-major array or a compressed sparse row matrix.
/// Construction rejects non-finite values, and sparse rows must have
/// strictly increasing column indices (no duplicates). Values are immutable
/// after construction.
template <typename Scalar>
class FeatureMatrix {
 public:
  using Dense = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using Sparse = Eigen::SparseMatrix<Scalar, Eigen::RowMajor>;
  using Triplet = Eigen::Triplet<Scalar>;

  FeatureMatrix() : storage_(Dense(0, 0)) {}

  explicit FeatureMatrix(Dense values) : storage_(std::move(values)) {
    if (!std::get<Dense>(storage_).allFinite())
      throw DataError("feature matrix contains non-finite values");
  }

  template <typename Derived>
  static FeatureMatrix from_dense(const Eigen::MatrixBase<Derived>& values) {
    return FeatureMatrix(Dense(values));
  }

  explicit FeatureMatrix(Sparse values) {
    values.makeCompressed();
    for (Index k = 0; k < values.outerSize(); ++k) {
      Index previous = -1;
      for (typename Sparse::InnerIterator it(values, k); it; ++it) {
        if (!std::isfinite(static_cast<double>(it.value())))
          throw DataError("feature matrix contains non-finite values");
        if (it.col() <= previous)
          throw DataError("sparse row " + std::to_string(k) + " has non-increasing column indices");
        previous = it.col();
      }
    }
    storage_ = std::move(values);
  }

  /// Builds a sparse matrix; duplicate (row, col) entries are rejected
  /// instead of being summed.
  static FeatureMatrix from_triplets(Index rows, Index cols, const std::vector<Triplet>& triplets) {
    Sparse m(rows, cols);
    m.setFromTriplets(triplets.begin(), triplets.end(), [](const Scalar&, const Scalar&) -> Scalar {
      throw DataError("duplicate entry in sparse feature matrix");
    });
    return FeatureMatrix(std::move(m));
  }

  Index rows() const {
    return std::visit([](const auto& m) { return static_cast<Index>(m.rows()); }, storage_);
  }
  Index cols() const {
    return std::visit([](const auto& m) { return static_cast<Index>(m.cols()); }, storage_);
  }
  bool is_sparse() const { return std::holds_alternative<Sparse>(storage_); }

  const Dense& dense() const { return std::get<Dense>(storage_); }
  const Sparse& sparse() const { return std::get<Sparse>(storage_); }

  Matrix<Scalar> to_dense() const {
    if (is_sparse()) return Matrix<Scalar>(sparse());
    return Matrix<Scalar>(dense());
  }

  /// Entry (i, j); O(log nnz(row)) for sparse storage.
  Scalar coeff(Index i, Index j) const {
    if (is_sparse()) return sparse().coeff(i, j);
    return dense()(i, j);
  }

  Vector<Scalar> row(Index i) const {
    if (is_sparse()) return Vector<Scalar>(sparse().row(i).transpose());
    return dense().row(i).transpose();
  }

  /// X X^T.
  Matrix<Scalar> gram() const {
    if (is_sparse()) {
      const Sparse& s = sparse();
      // sparse-sparse products are slow once a quarter of the entries are set
      if (4 * s.nonZeros() > rows() * cols()) return FeatureMatrix(Dense(s)).gram();
      return Matrix<Scalar>(s * s.transpose());
    }
    const Dense& d = dense();
    Matrix<Scalar> g(d.rows(), d.rows());
    g.setZero();
    g.template selfadjointView<Eigen::Lower>().rankUpdate(Matrix<Scalar>(d));
    return Matrix<Scalar>(g.template selfadjointView<Eigen::Lower>());
  }

  /// X w.
  template <typename Derived>
  Vector<Scalar> multiply(const Eigen::MatrixBase<Derived>& w) const {
    if (is_sparse()) return sparse() * w;
    return dense() * w;
  }

  /// X^T v.
  template <typename Derived>
  Vector<Scalar> transpose_multiply(const Eigen::MatrixBase<Derived>& v) const {
    if (is_sparse()) return sparse().transpose() * v;
    return dense().transpose() * v;
  }

  /// The rows listed in `indices`, in that order, keeping the storage kind.
  FeatureMatrix select_rows(std::span<const Index> indices) const {
    if (is_sparse()) {
      const Sparse& s = sparse();
      std::vector<Triplet> triplets;
      for (std::size_t k = 0; k < indices.size(); ++k)
        for (typename Sparse::InnerIterator it(s, indices[k]); it; ++it)
          triplets.emplace_back(static_cast<Index>(k), it.col(), it.value());
      Sparse out(static_cast<Index>(indices.size()), s.cols());
      out.setFromTriplets(triplets.begin(), triplets.end());
      return FeatureMatrix(std::move(out));
    }
    Dense out(static_cast<Index>(indices.size()), cols());
    for (std::size_t k = 0; k < indices.size(); ++k) out.row(static_cast<Index>(k)) = dense().row(indices[k]);
    return FeatureMatrix(std::move(out));
  }

  /// Dense n x r matrix whose column k is weights[k] times column columns[k].
  FeatureMatrix weighted_columns(std::span<const Index> columns, std::span<const Scalar> weights) const {
    const Index r = static_cast<Index>(columns.size());
    Dense out(rows(), r);
    if (is_sparse()) {
      // Column gather through the CSC transpose.
      const Eigen::SparseMatrix<Scalar, Eigen::ColMajor> csc(sparse());
      out.setZero();
      for (Index k = 0; k < r; ++k)
        for (typename Eigen::SparseMatrix<Scalar, Eigen::ColMajor>::InnerIterator it(csc, columns[k]); it; ++it)
          out(it.row(), k) = weights[k] * it.value();
    } else {
      for (Index k = 0; k < r; ++k) out.col(k) = weights[k] * dense().col(columns[k]);
    }
    return FeatureMatrix(std::move(out));
  }

  /// Appends one dense row (used for the enclosing-ball augmented matrix).
  template <typename Derived>
  FeatureMatrix with_row(const Eigen::MatrixBase<Derived>& extra) const {
    Dense out(rows() + 1, cols());
    out.topRows(rows()) = to_dense();
    out.row(rows()) = extra.transpose();
    return FeatureMatrix(std::move(out));
  }

 private:
  std::variant<Dense, Sparse> storage_;
};

using Features = FeatureMatrix<double>;

}  // namespace marginsparse
