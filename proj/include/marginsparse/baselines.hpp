#pragma once

#include "marginsparse/common.hpp"
#include "marginsparse/dataset.hpp"
#include "marginsparse/feature_matrix.hpp"

#include <cstdint>
#include <vector>

namespace marginsparse {

/// r distinct indices from [0, d), uniformly without replacement.
std::vector<Index> uniform_select(Index d, Index r, std::uint64_t seed);

/// Greedy column-pivoted QR: each step pivots the column with the largest
/// residual norm. Residuals below 1e-10 of the largest column norm count as
/// zero, and ties go to the lowest index.
struct PivotedQr {
  std::vector<Index> pivots;           // in pivot order
  std::vector<double> residual_norms;  // residual norm of each pivot when chosen
};

PivotedQr pivoted_qr(const Features& x, Index steps);

/// First r pivot columns.
std::vector<Index> rrqr_select(const Features& x, Index r);

struct RfeOptions {
  double C = 1.0;
  double chunk_fraction = 0.1;
  double kkt_tol = 1e-4;
};

/// Recursive feature elimination: solve, drop the max(1, ceil(f * remaining))
/// features with smallest |w_j|, repeat until r remain. The result is sorted
/// by |w_j| of a final solve on the survivors, largest first.
std::vector<Index> rfe_select(const LabeledDataset& data, Index r, const RfeOptions& options = {});

}  // namespace marginsparse
