#include "marginsparse/baselines.hpp"

#include "marginsparse/random.hpp"
#include "marginsparse/svm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace marginsparse {

std::vector<Index> uniform_select(Index d, Index r, std::uint64_t seed) {
  require(r >= 0, "uniform_select: r must be non-negative");
  require(r <= d, "uniform_select: r > d");
  std::vector<Index> pool(static_cast<std::size_t>(d));
  std::iota(pool.begin(), pool.end(), Index{0});
  Rng rng(seed);
  for (Index k = 0; k < r; ++k) {
    const auto pick = static_cast<Index>(k + static_cast<Index>(rng.below(static_cast<std::uint64_t>(d - k))));
    std::swap(pool[static_cast<std::size_t>(k)], pool[static_cast<std::size_t>(pick)]);
  }
  pool.resize(static_cast<std::size_t>(r));
  return pool;
}

PivotedQr pivoted_qr(const Features& x, Index steps) {
  require(steps >= 0 && steps <= x.cols(), "rrqr_select: r must lie in [0, d]");
  MatrixXd residual = x.to_dense();
  const Index d = residual.cols();
  VectorXd norms = residual.colwise().squaredNorm().transpose();
  const double zero_level = 1e-20 * (norms.size() > 0 ? norms.maxCoeff() : 0.0);
  std::vector<bool> used(static_cast<std::size_t>(d), false);

  PivotedQr out;
  for (Index k = 0; k < steps; ++k) {
    Index pick = -1;
    double best = -1.0;
    for (Index j = 0; j < d; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      const double v = norms(j) <= zero_level ? 0.0 : norms(j);
      if (v > best) {
        best = v;
        pick = j;
      }
    }
    used[static_cast<std::size_t>(pick)] = true;
    out.pivots.push_back(pick);
    out.residual_norms.push_back(std::sqrt(std::max(0.0, norms(pick))));
    if (best <= 0.0) continue;
    const VectorXd q = residual.col(pick) / std::sqrt(norms(pick));
    const Eigen::RowVectorXd coeffs = q.transpose() * residual;
    residual.noalias() -= q * coeffs;
    residual.col(pick).setZero();
    norms = residual.colwise().squaredNorm().transpose();
  }
  return out;
}

std::vector<Index> rrqr_select(const Features& x, Index r) { return pivoted_qr(x, r).pivots; }

std::vector<Index> rfe_select(const LabeledDataset& data, Index r, const RfeOptions& options) {
  const Index d = data.dim();
  require(r >= 1 && r < d, "rfe_select: need 1 <= r < d");
  require(options.chunk_fraction >= 0.0 && options.chunk_fraction < 1.0, "rfe_select: chunk_fraction must lie in [0, 1)");
  if (!data.has_both_labels()) throw InvalidArgument("rfe_select: data must contain both labels");

  std::vector<Index> remaining(static_cast<std::size_t>(d));
  std::iota(remaining.begin(), remaining.end(), Index{0});
  const SvmOptions svm{options.C, options.kkt_tol, 0};

  auto solve_on = [&](const std::vector<Index>& cols) {
    const std::vector<double> ones(cols.size(), 1.0);
    const LabeledDataset reduced(data.X.weighted_columns(cols, ones), data.y);
    SvmModel model = solve_dual(reduced, svm);
    if (!model.converged)
      throw NumericalError("rfe_select: solver did not converge with " + std::to_string(cols.size()) +
                           " features remaining");
    return model;
  };
  auto order_by_weight = [](const SvmModel& model) {
    std::vector<Index> order(static_cast<std::size_t>(model.w.size()));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return std::abs(model.w(a)) < std::abs(model.w(b)); });
    return order;
  };

  while (static_cast<Index>(remaining.size()) > r) {
    const Index count = static_cast<Index>(remaining.size());
    Index drop = std::max<Index>(1, static_cast<Index>(std::ceil(options.chunk_fraction * static_cast<double>(count))));
    drop = std::min(drop, count - r);
    const auto order = order_by_weight(solve_on(remaining));
    std::vector<bool> removed(static_cast<std::size_t>(count), false);
    for (Index k = 0; k < drop; ++k) removed[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = true;
    std::vector<Index> next;
    next.reserve(static_cast<std::size_t>(count - drop));
    for (Index k = 0; k < count; ++k)
      if (!removed[static_cast<std::size_t>(k)]) next.push_back(remaining[static_cast<std::size_t>(k)]);
    remaining = std::move(next);
  }

  auto order = order_by_weight(solve_on(remaining));
  std::vector<Index> out;
  out.reserve(remaining.size());
  for (auto it = order.rbegin(); it != order.rend(); ++it) out.push_back(remaining[static_cast<std::size_t>(*it)]);
  return out;
}

}  // namespace marginsparse
