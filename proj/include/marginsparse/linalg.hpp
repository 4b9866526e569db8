#pragma once

#include "marginsparse/common.hpp"
#include "marginsparse/feature_matrix.hpp"
#include "marginsparse/random.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace marginsparse {

/// Relative cutoff below which singular values count as zero.
inline constexpr double kRankThreshold = 1e-10;

/// Widest sparse input that thin_svd will densify; larger inputs go through
/// the Gaussian sketch first.
inline constexpr Index kMaxDensifyCols = 100000;

/// M = U diag(sigma) V^T truncated to numerical rank.
template <typename Scalar>
struct ThinSvd {
  Matrix<Scalar> U;               // n x rank
  Vector<Scalar> singular_values;  // non-increasing, all > threshold * sigma_1
  Matrix<Scalar> V;               // d x rank

  Index rank() const { return singular_values.size(); }

  Matrix<Scalar> reconstruct() const { return U * singular_values.asDiagonal() * V.transpose(); }
};

/// Largest |eigenvalue| of a symmetric matrix, i.e. its spectral norm.
template <typename Derived>
typename Derived::Scalar symmetric_spectral_norm(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if (m.size() == 0) return Scalar(0);
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(m.eval(), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Largest singular value through the exact SVD.
template <typename Derived>
typename Derived::Scalar exact_spectral_norm(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if (m.size() == 0) return Scalar(0);
  Eigen::BDCSVD<Matrix<Scalar>> svd(m.eval());
  return svd.singularValues()(0);
}

/// ||Q^T Q - I||_2 for a matrix with (supposedly) orthonormal columns.
template <typename Derived>
typename Derived::Scalar orthonormality_error(const Eigen::MatrixBase<Derived>& q) {
  using Scalar = typename Derived::Scalar;
  const Matrix<Scalar> gram = q.transpose() * q;
  return symmetric_spectral_norm(gram - Matrix<Scalar>::Identity(q.cols(), q.cols()));
}

template <typename Derived>
Matrix<typename Derived::Scalar> orthonormal_basis(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  Eigen::HouseholderQR<Matrix<Scalar>> qr(a.eval());
  return qr.householderQ() * Matrix<Scalar>::Identity(a.rows(), a.cols());
}

namespace detail {

template <typename Scalar, typename Derived>
ThinSvd<Scalar> truncated_svd(const Eigen::MatrixBase<Derived>& m, Scalar rank_threshold) {
  ThinSvd<Scalar> out;
  if (m.size() == 0) {
    out.U.resize(m.rows(), 0);
    out.V.resize(m.cols(), 0);
    return out;
  }
  Eigen::BDCSVD<Matrix<Scalar>> svd(m.eval(), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sigma = svd.singularValues();
  Index rank = 0;
  if (sigma.size() > 0 && sigma(0) > Scalar(0)) {
    const Scalar cutoff = rank_threshold * sigma(0);
    while (rank < sigma.size() && sigma(rank) > cutoff) ++rank;
  }
  out.U = svd.matrixU().leftCols(rank);
  out.singular_values = sigma.head(rank);
  out.V = svd.matrixV().leftCols(rank);
  return out;
}

}  // namespace detail

/// Thin SVD truncated at rank_threshold * sigma_1.
template <typename Scalar>
ThinSvd<Scalar> thin_svd(const FeatureMatrix<Scalar>& m, Scalar rank_threshold = Scalar(kRankThreshold)) {
  require(rank_threshold > Scalar(0), "thin_svd: rank_threshold must be positive");
  if (m.is_sparse() && m.cols() > kMaxDensifyCols)
    throw InvalidArgument("thin_svd: sparse input with more than 100000 columns; sketch it first");
  return detail::truncated_svd<Scalar>(m.to_dense(), rank_threshold);
}

/// Thin SVD of a plain dense matrix. Rejects non-finite input.
template <typename Derived>
ThinSvd<typename Derived::Scalar> thin_svd(const Eigen::MatrixBase<Derived>& m,
                                          typename Derived::Scalar rank_threshold = kRankThreshold) {
  using Scalar = typename Derived::Scalar;
  require(rank_threshold > Scalar(0), "thin_svd: rank_threshold must be positive");
  if (!m.allFinite()) throw DataError("thin_svd: non-finite input");
  return detail::truncated_svd<Scalar>(m, rank_threshold);
}

/// sigma_1(M) by power iteration on M^T M from a fixed-seed random start.
///
/// Stops once the relative change of the estimate drops below tol.
template <typename Derived>
typename Derived::Scalar spectral_norm(const Eigen::MatrixBase<Derived>& m,
                                       typename Derived::Scalar tol = 1e-12, int max_iterations = 20000) {
  using Scalar = typename Derived::Scalar;
  if (m.size() == 0) return Scalar(0);
  Rng rng(0x5eed5eedULL);
  Vector<Scalar> x(m.cols());
  for (Index i = 0; i < x.size(); ++i) x(i) = static_cast<Scalar>(rng.normal());
  x.normalize();
  Scalar estimate = 0;
  for (int it = 0; it < max_iterations; ++it) {
    Vector<Scalar> y = m.transpose() * (m * x);
    const Scalar norm = y.norm();
    if (norm == Scalar(0)) return Scalar(0);
    // Rayleigh quotient x^T M^T M x for the current unit vector.
    const Scalar next = std::sqrt(std::max(Scalar(0), x.dot(y)));
    x = y / norm;
    if (it > 0 && std::abs(next - estimate) <= tol * next) return next;
    estimate = next;
  }
  return estimate;
}

template <typename Scalar>
Scalar spectral_norm(const FeatureMatrix<Scalar>& m, Scalar tol = 1e-12) {
  return spectral_norm(m.to_dense(), tol);
}

/// Entry i is sum_j M(i, j)^2.
template <typename Scalar>
Vector<Scalar> row_norms_sq(const FeatureMatrix<Scalar>& m) {
  if (m.is_sparse()) {
    Vector<Scalar> out = Vector<Scalar>::Zero(m.rows());
    const auto& s = m.sparse();
    for (Index k = 0; k < s.outerSize(); ++k)
      for (typename FeatureMatrix<Scalar>::Sparse::InnerIterator it(s, k); it; ++it)
        out(k) += it.value() * it.value();
    return out;
  }
  return m.dense().rowwise().squaredNorm();
}

template <typename Derived>
Vector<typename Derived::Scalar> row_norms_sq(const Eigen::MatrixBase<Derived>& m) {
  return m.rowwise().squaredNorm();
}

}  // namespace marginsparse
