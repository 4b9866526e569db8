#include "marginsparse/geometry.hpp"

#include "marginsparse/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace marginsparse {

namespace {

constexpr Index kMaxIterations = 2000000;

}  // namespace

EnclosingBall meb_radius(const Features& x, double delta) {
  const Index n = x.rows();
  require(n >= 1, "meb_radius: empty input");
  require(delta > 0.0 && delta < 1.0, "meb_radius: delta must lie in (0, 1)");

  const MatrixXd K = x.gram();
  const VectorXd kd = K.diagonal();
  VectorXd lambda = VectorXd::Zero(n);

  EnclosingBall ball;
  ball.delta = delta;

  // Start on the two mutually farthest points found from point 0.
  auto farthest_from = [&](Index a) {
    Index best = a;
    double best_d = -1.0;
    for (Index i = 0; i < n; ++i) {
      const double d2 = kd(i) - 2.0 * K(a, i) + kd(a);
      if (d2 > best_d) {
        best_d = d2;
        best = i;
      }
    }
    return best;
  };
  const Index a = farthest_from(0);
  const Index b = farthest_from(a);
  lambda(a) += 0.5;
  lambda(b) += 0.5;

  VectorXd g = K * lambda;  // K lambda
  const double tol = (1.0 + delta) * (1.0 + delta);
  Index it = 0;
  double max_d2 = 0.0, dual = 0.0;
  for (;; ++it) {
    const double q = lambda.dot(g);
    dual = std::max(0.0, lambda.dot(kd) - q);
    const VectorXd d2 = (kd - 2.0 * g).array() + q;
    Index up = 0;
    max_d2 = d2.maxCoeff(&up);
    max_d2 = std::max(0.0, max_d2);
    if (max_d2 <= tol * dual || max_d2 == 0.0 || it >= kMaxIterations) break;

    Index down = -1;
    double min_d2 = 0.0;
    for (Index i = 0; i < n; ++i)
      if (lambda(i) > 0.0 && (down < 0 || d2(i) < min_d2)) {
        min_d2 = d2(i);
        down = i;
      }
    const double gain_up = max_d2 / dual - 1.0;
    const double gain_down = 1.0 - std::max(0.0, min_d2) / dual;

    if (gain_up >= gain_down || lambda(down) >= 1.0) {
      const double s = gain_up / (2.0 * (1.0 + gain_up));
      lambda *= (1.0 - s);
      lambda(up) += s;
      g = (1.0 - s) * g + s * K.col(up);
    } else {
      const double cap = lambda(down) / (1.0 - lambda(down));
      const double s = std::min(gain_down / (2.0 * (1.0 - gain_down)), cap);
      lambda *= (1.0 + s);
      lambda(down) -= s;
      if (s == cap) lambda(down) = 0.0;
      g = (1.0 + s) * g - s * K.col(down);
    }
    if (it % 1024 == 1023) {  // drift control for the incremental K lambda
      lambda /= lambda.sum();
      g.noalias() = K * lambda;
    }
  }

  ball.weights = lambda;
  ball.center = x.transpose_multiply(lambda);
  // Report the exact farthest distance from the materialized center.
  double far = 0.0;
  for (Index i = 0; i < n; ++i) far = std::max(far, (x.row(i) - ball.center).squaredNorm());
  ball.radius = std::sqrt(far);
  ball.lower_bound = std::min(std::sqrt(dual), ball.radius);
  ball.iterations = it;
  return ball;
}

RadiusCheck radius_bound_check(const Features& x, const SamplingOperator<double>& r, double delta) {
  require(r.source_dim() == x.cols(), "radius_bound_check: operator does not match feature dimension");
  RadiusCheck out;
  const EnclosingBall full = meb_radius(x, delta);
  const Features augmented = x.with_row(full.center);
  const auto svd = thin_svd(augmented);
  out.augmented_rank = svd.rank();
  out.spectral_error = r.spectral_error(svd.V);
  const EnclosingBall sampled = meb_radius(r.apply(x), delta);
  // The projected full-space center is also a feasible center for X R, so
  // the sampled radius is the smaller of the two covering distances.
  const MatrixXd xr = r.apply(x.to_dense());
  const VectorXd cr = r.apply(full.center.transpose()).transpose();
  const double via_full = std::sqrt((xr.rowwise() - cr.transpose()).rowwise().squaredNorm().maxCoeff());
  out.radius_full = full.radius;
  out.radius_sampled = std::min(sampled.radius, via_full);
  const double lhs = out.radius_sampled * out.radius_sampled;
  const double rhs = (1.0 + out.spectral_error) * out.radius_full * out.radius_full;
  out.pass = lhs <= rhs * (1.0 + 1e-12);
  return out;
}

}  // namespace marginsparse
