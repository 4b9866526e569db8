#pragma once

#include "marginsparse/common.hpp"
#include "marginsparse/feature_matrix.hpp"
#include "marginsparse/sampling_operator.hpp"

namespace marginsparse {

/// (1 + delta)-approximate minimum enclosing ball.
///
/// `radius` is the distance from `center` to the farthest point, so every
/// point lies inside the reported ball; `lower_bound` is a dual certificate
/// with lower_bound <= B* <= radius <= (1 + delta) lower_bound.
struct EnclosingBall {
  VectorXd center;
  double radius = 0.0;
  double lower_bound = 0.0;
  double delta = 0.0;
  VectorXd weights;  // center = X^T weights, weights on the simplex
  Index iterations = 0;
};

/// Frank-Wolfe with away steps on the dual of the ball problem.
EnclosingBall meb_radius(const Features& x, double delta = 1e-3);

struct RadiusCheck {
  double radius_full = 0.0;     // B on X
  double radius_sampled = 0.0;  // B~ on X R
  double spectral_error = 0.0;  // ||E_B||_2 for the center-augmented matrix
  Index augmented_rank = 0;
  bool pass = false;            // B~^2 <= (1 + ||E_B||) B^2
};

/// Computes B on X, B~ on X R, and ||E_B|| where E_B is measured on the
/// right singular basis of X stacked with the enclosing-ball center.
RadiusCheck radius_bound_check(const Features& x, const SamplingOperator<double>& r, double delta = 1e-3);

}  // namespace marginsparse
