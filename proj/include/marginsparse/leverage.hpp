#pragma once

#include "marginsparse/common.hpp"
#include "marginsparse/linalg.hpp"
#include "marginsparse/random.hpp"
#include "marginsparse/sampling_operator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace marginsparse {

/// Sampling distribution over the d rows of an orthonormal V.
template <typename Scalar>
struct LeverageDistribution {
  Vector<Scalar> probabilities;  // p_i = ||V_i||^2 / l
  Index ell = 0;
};

/// p_i = ||row i of V||^2 / l. The row norms of an orthonormal V sum to l,
/// so this is a probability distribution.
template <typename Derived>
LeverageDistribution<typename Derived::Scalar> leverage_scores(const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  require(v.cols() > 0, "leverage_scores: V has no columns");
  require(orthonormality_error(v) <= Scalar(1e-8), "leverage_scores: columns of V are not orthonormal");
  LeverageDistribution<Scalar> out;
  out.ell = v.cols();
  out.probabilities = v.rowwise().squaredNorm() / Scalar(v.cols());
  return out;
}

/// r i.i.d. draws with replacement from the leverage distribution; a draw of
/// column i gets weight 1 / sqrt(r p_i), so E[V^T R R^T V] = I.
template <typename Derived>
SamplingOperator<typename Derived::Scalar> leverage_select(const Eigen::MatrixBase<Derived>& v, Index r,
                                                          std::uint64_t seed) {
  using Scalar = typename Derived::Scalar;
  require(r >= 1, "leverage_select: r must be at least 1");
  const auto dist = leverage_scores(v);
  const auto& p = dist.probabilities;

  std::vector<double> cumulative(static_cast<std::size_t>(p.size()));
  double total = 0;
  for (Index i = 0; i < p.size(); ++i) {
    total += static_cast<double>(p(i));
    cumulative[static_cast<std::size_t>(i)] = total;
  }
  if (!(total > 0)) throw InvalidArgument("leverage_select: all-zero distribution");

  Rng rng(seed);
  std::vector<typename SamplingOperator<Scalar>::Selection> selections;
  selections.reserve(static_cast<std::size_t>(r));
  for (Index k = 0; k < r; ++k) {
    const double u = rng.uniform() * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    Index i = static_cast<Index>(it - cumulative.begin());
    if (i >= p.size()) i = p.size() - 1;
    // upper_bound never lands on a zero-probability row except at the tail
    while (p(i) == Scalar(0)) --i;
    selections.push_back({i, Scalar(1) / std::sqrt(Scalar(r) * p(i))});
  }
  return SamplingOperator<Scalar>(v.rows(), std::move(selections));
}

}  // namespace marginsparse
