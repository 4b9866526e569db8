#include "marginsparse/svm.hpp"

#include <cmath>
#include <limits>

namespace marginsparse {

namespace {

constexpr double kTau = 1e-12;
constexpr double kSupportThreshold = 1e-6;

// Bias from the KKT conditions: average of y_i - w.x_i over free support
// vectors, otherwise the midpoint of the feasible interval.
double recover_bias(const VectorXd& alpha, const VectorXd& y, const VectorXd& grad, double C) {
  double upper = std::numeric_limits<double>::infinity();
  double lower = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  Index free = 0;
  for (Index i = 0; i < alpha.size(); ++i) {
    const double yg = y(i) * grad(i);  // w.x_i - y_i
    if (alpha(i) >= C) {
      if (y(i) < 0) upper = std::min(upper, yg);
      else lower = std::max(lower, yg);
    } else if (alpha(i) <= 0.0) {
      if (y(i) > 0) upper = std::min(upper, yg);
      else lower = std::max(lower, yg);
    } else {
      ++free;
      sum += yg;
    }
  }
  double rho = 0.0;
  if (free > 0) rho = sum / static_cast<double>(free);
  else if (std::isfinite(upper) && std::isfinite(lower)) rho = 0.5 * (upper + lower);
  else if (std::isfinite(upper)) rho = upper;
  else if (std::isfinite(lower)) rho = lower;
  return -rho;
}

}  // namespace

double dual_objective(const MatrixXd& gram, const VectorXd& y, const VectorXd& alpha) {
  const VectorXd ya = y.cwiseProduct(alpha);
  return alpha.sum() - 0.5 * ya.dot(gram * ya);
}

SvmModel solve_dual(const LabeledDataset& data, const SvmOptions& options) {
  const Index n = data.size();
  require(options.C > 0.0, "solve_dual: C must be positive");
  require(options.kkt_tol > 0.0, "solve_dual: kkt_tol must be positive");
  require(n >= 2, "solve_dual: need at least two points");
  if (!data.has_both_labels()) throw InvalidArgument("solve_dual: data must contain both labels");

  const double C = options.C;
  const VectorXd& y = data.y;
  const MatrixXd K = data.X.gram();
  const VectorXd diag = K.diagonal();
  const Index max_passes = options.max_passes > 0 ? options.max_passes : 10 * n;
  const long long max_iterations = static_cast<long long>(max_passes) * n;

  VectorXd alpha = VectorXd::Zero(n);
  VectorXd grad = VectorXd::Constant(n, -1.0);  // Q alpha - 1 with Q = Y K Y

  auto objective = [&] { return 0.5 * (alpha.sum() - alpha.dot(grad)); };
  auto in_up = [&](Index t) { return y(t) > 0 ? alpha(t) < C : alpha(t) > 0.0; };
  auto in_low = [&](Index t) { return y(t) > 0 ? alpha(t) > 0.0 : alpha(t) < C; };

  SvmModel model;
  model.C = C;
  long long iter = 0;
  double gap = std::numeric_limits<double>::infinity();
  while (true) {
    // i maximizes -y_t G_t over I_up.
    Index i = -1;
    double gmax = -std::numeric_limits<double>::infinity();
    for (Index t = 0; t < n; ++t) {
      if (!in_up(t)) continue;
      const double v = -y(t) * grad(t);
      if (v >= gmax) {
        gmax = v;
        i = t;
      }
    }
    // j minimizes the second-order objective decrease over I_low.
    Index j = -1;
    double gmax2 = -std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    for (Index t = 0; t < n && i >= 0; ++t) {
      if (!in_low(t)) continue;
      const double v = y(t) * grad(t);  // -(-y_t G_t)
      gmax2 = std::max(gmax2, v);
      const double b = gmax + v;
      if (b > 0.0) {
        double a = diag(i) + diag(t) - 2.0 * K(i, t);
        if (a <= 0.0) a = kTau;
        const double decrease = -(b * b) / a;
        if (decrease <= best) {
          best = decrease;
          j = t;
        }
      }
    }
    gap = gmax + gmax2;
    if (i < 0 || j < 0 || gap < options.kkt_tol) {
      model.converged = true;
      break;
    }
    if (iter >= max_iterations) break;

    const double old_i = alpha(i), old_j = alpha(j);
    double quad = diag(i) + diag(j) - 2.0 * K(i, j);
    if (quad <= 0.0) quad = kTau;
    if (y(i) != y(j)) {
      const double delta = (-grad(i) - grad(j)) / quad;
      const double diff = alpha(i) - alpha(j);
      alpha(i) += delta;
      alpha(j) += delta;
      if (diff > 0.0) {
        if (alpha(j) < 0.0) {
          alpha(j) = 0.0;
          alpha(i) = diff;
        }
      } else if (alpha(i) < 0.0) {
        alpha(i) = 0.0;
        alpha(j) = -diff;
      }
      if (diff > 0.0) {
        if (alpha(i) > C) {
          alpha(i) = C;
          alpha(j) = C - diff;
        }
      } else if (alpha(j) > C) {
        alpha(j) = C;
        alpha(i) = C + diff;
      }
    } else {
      const double delta = (grad(i) - grad(j)) / quad;
      const double sum = alpha(i) + alpha(j);
      alpha(i) -= delta;
      alpha(j) += delta;
      if (sum > C) {
        if (alpha(i) > C) {
          alpha(i) = C;
          alpha(j) = sum - C;
        }
      } else if (alpha(j) < 0.0) {
        alpha(j) = 0.0;
        alpha(i) = sum;
      }
      if (sum > C) {
        if (alpha(j) > C) {
          alpha(j) = C;
          alpha(i) = sum - C;
        }
      } else if (alpha(i) < 0.0) {
        alpha(i) = 0.0;
        alpha(j) = sum;
      }
    }
    const double di = alpha(i) - old_i;
    const double dj = alpha(j) - old_j;
    // G += Q_i di + Q_j dj, Q_tk = y_t y_k K_tk
    grad.noalias() += (y(i) * di) * y.cwiseProduct(K.col(i)) + (y(j) * dj) * y.cwiseProduct(K.col(j));
    ++iter;
    if (iter % n == 0) model.objective_trace.push_back(objective());
  }

  model.alpha = alpha;
  model.iterations = static_cast<Index>(iter);
  model.kkt_residual = std::max(0.0, gap);
  model.objective = objective();
  model.objective_trace.push_back(model.objective);
  model.w = data.X.transpose_multiply(y.cwiseProduct(alpha));
  model.b = recover_bias(alpha, y, grad, C);
  model.support_indices = support_vectors(model);
  const double norm = model.w.norm();
  model.degenerate = norm == 0.0;
  model.margin = model.degenerate ? std::numeric_limits<double>::infinity() : 1.0 / norm;
  return model;
}

double margin(const SvmModel& model) {
  const double norm = model.w.norm();
  if (norm == 0.0) throw NumericalError("margin: degenerate model with w = 0");
  return 1.0 / norm;
}

std::vector<Index> support_vectors(const SvmModel& model) {
  std::vector<Index> out;
  const double threshold = kSupportThreshold * model.C;
  for (Index i = 0; i < model.alpha.size(); ++i)
    if (model.alpha(i) > threshold) out.push_back(i);
  return out;
}

VectorXd predict(const SvmModel& model, const Features& x) {
  require(x.cols() == model.w.size(), "predict: feature dimension does not match model");
  const VectorXd scores = x.multiply(model.w).array() + model.b;
  return scores.unaryExpr([](double s) { return s < 0.0 ? -1.0 : 1.0; });
}

double error_rate(const SvmModel& model, const LabeledDataset& data) {
  if (data.size() == 0) return 0.0;
  const VectorXd labels = predict(model, data.X);
  Index wrong = 0;
  for (Index i = 0; i < labels.size(); ++i)
    if (labels(i) != data.y(i)) ++wrong;
  return static_cast<double>(wrong) / static_cast<double>(data.size());
}

}  // namespace marginsparse
