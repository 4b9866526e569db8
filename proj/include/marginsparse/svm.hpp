#pragma once

#include "marginsparse/common.hpp"
#include "marginsparse/dataset.hpp"
#include "marginsparse/feature_matrix.hpp"

#include <vector>

namespace marginsparse {

struct SvmOptions {
  double C = 1.0;
  /// Stop when the maximal violating pair gap m(alpha) - M(alpha) is below this.
  double kkt_tol = 1e-4;
  /// One pass is n pair updates. 0 selects the default of 10 n passes.
  Index max_passes = 0;
};

/// Solution of the soft 1-norm margin dual
///   max 1^T a - 1/2 a^T Y X X^T Y a  s.t.  y^T a = 0, 0 <= a <= C.
struct SvmModel {
  VectorXd alpha;
  VectorXd w;
  double b = 0.0;
  std::vector<Index> support_indices;  // alpha_i > 1e-6 C
  double margin = 0.0;                 // 1 / ||w||; +inf when w = 0
  double C = 1.0;
  double objective = 0.0;              // dual objective at alpha
  double kkt_residual = 0.0;           // final violating pair gap
  bool converged = false;
  bool degenerate = false;             // w = 0
  Index iterations = 0;
  std::vector<double> objective_trace;  // dual objective after each pass

  Index dim() const { return w.size(); }
};

SvmModel solve_dual(const LabeledDataset& data, const SvmOptions& options = {});

inline SvmModel solve_dual(const LabeledDataset& data, double C, double kkt_tol = 1e-4, Index max_passes = 0) {
  return solve_dual(data, SvmOptions{C, kkt_tol, max_passes});
}

/// 1 / ||w||. Throws NumericalError for a degenerate (w = 0) model.
double margin(const SvmModel& model);

/// {i : alpha_i > 1e-6 C}.
std::vector<Index> support_vectors(const SvmModel& model);

/// sign(X w + b) with 0 mapped to +1.
VectorXd predict(const SvmModel& model, const Features& x);

/// Fraction of rows whose prediction differs from the label.
double error_rate(const SvmModel& model, const LabeledDataset& data);

/// 1^T a - 1/2 a^T Y K Y a for a precomputed Gram matrix K.
double dual_objective(const MatrixXd& gram, const VectorXd& y, const VectorXd& alpha);

}  // namespace marginsparse
