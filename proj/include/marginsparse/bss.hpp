#pragma once

// Deterministic single-set spectral sparsification.
//
// Given V (d x l) with orthonormal columns and r > l, greedily picks r rows
// v_i of V (features) and weights so that every singular value of R^T V lies
// in [1 - sqrt(l/r), 1 + sqrt(l/r)], hence ||V^T V - V^T R R^T V||_2 <= 3 sqrt(l/r).
//
// The loop keeps A = sum t v v^T between a lower barrier L and an upper
// barrier U. Each step both barriers advance (L by delta_L = 1, U by delta_U),
// and a vector is admissible when its upper score does not exceed its lower
// score; its weight t satisfies 1/t = (upper + lower) / 2.

#include "marginsparse/common.hpp"
#include "marginsparse/linalg.hpp"
#include "marginsparse/sampling_operator.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace marginsparse {

/// Lower potential Phi(L, A) = sum_i 1 / (lambda_i - L). Requires L < min lambda.
template <typename Derived>
typename Derived::Scalar lower_potential(typename Derived::Scalar lower,
                                         const Eigen::MatrixBase<Derived>& eigenvalues) {
  using Scalar = typename Derived::Scalar;
  Scalar sum = 0;
  for (Index i = 0; i < eigenvalues.size(); ++i) {
    if (!(eigenvalues(i) > lower)) throw InvalidArgument("lower_potential: barrier crossed");
    sum += Scalar(1) / (eigenvalues(i) - lower);
  }
  return sum;
}

/// Upper potential Phi^(U, A) = sum_i 1 / (U - lambda_i). Requires U > max lambda.
template <typename Derived>
typename Derived::Scalar upper_potential(typename Derived::Scalar upper,
                                         const Eigen::MatrixBase<Derived>& eigenvalues) {
  using Scalar = typename Derived::Scalar;
  Scalar sum = 0;
  for (Index i = 0; i < eigenvalues.size(); ++i) {
    if (!(upper > eigenvalues(i))) throw InvalidArgument("upper_potential: barrier crossed");
    sum += Scalar(1) / (upper - eigenvalues(i));
  }
  return sum;
}

/// Barrier schedule for a given (l, r).
template <typename Scalar>
struct BarrierSchedule {
  Index ell = 0;
  Index r = 0;
  Scalar delta_lower = 1;
  Scalar delta_upper = 1;

  BarrierSchedule(Index ell_, Index r_) : ell(ell_), r(r_) {
    const Scalar ratio = std::sqrt(Scalar(ell) / Scalar(r));
    delta_upper = (Scalar(1) + ratio) / (Scalar(1) - ratio);
  }

  Scalar lower(Index tau) const { return Scalar(tau) - std::sqrt(Scalar(r) * Scalar(ell)); }
  Scalar upper(Index tau) const { return delta_upper * (Scalar(tau) + std::sqrt(Scalar(ell) * Scalar(r))); }

  /// Step-5 factor applied to every weight once the loop finishes.
  Scalar final_scale() const {
    return std::sqrt((Scalar(1) - std::sqrt(Scalar(ell) / Scalar(r))) / Scalar(r));
  }
};

/// A = sum of accepted t v v^T together with its eigendecomposition.
template <typename Scalar>
struct BarrierState {
  Matrix<Scalar> A;
  Index tau = 0;
  Vector<Scalar> eigenvalues;
  Matrix<Scalar> eigenvectors;

  static BarrierState zero(Index ell) {
    BarrierState s;
    s.A = Matrix<Scalar>::Zero(ell, ell);
    s.eigenvalues = Vector<Scalar>::Zero(ell);
    s.eigenvectors = Matrix<Scalar>::Identity(ell, ell);
    return s;
  }

  static BarrierState from_matrix(const Matrix<Scalar>& a, Index tau = 0) {
    BarrierState s;
    s.A = a;
    s.tau = tau;
    s.refresh();
    return s;
  }

  void refresh() {
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(A);
    eigenvalues = es.eigenvalues();
    eigenvectors = es.eigenvectors();
  }

  template <typename Derived>
  void add(const Eigen::MatrixBase<Derived>& v, Scalar t) {
    A.noalias() += t * v * v.transpose();
    A = Scalar(0.5) * (A + A.transpose()).eval();
    ++tau;
    refresh();
  }
};

template <typename Scalar>
struct CandidateScores {
  Scalar lower = 0;  // the lower score; 1/t may not exceed it
  Scalar upper = 0;  // the upper score; 1/t may not fall below it
  bool valid = true; // false when a shifted resolvent or potential gap is singular
};

namespace detail {

/// Scores from the coordinates z = Q^T v of v in A's eigenbasis.
template <typename Scalar, typename Derived>
CandidateScores<Scalar> scores_in_eigenbasis(const Eigen::MatrixBase<Derived>& z, const Vector<Scalar>& lambda,
                                             Scalar lower, Scalar upper, Scalar delta_lower, Scalar delta_upper) {
  CandidateScores<Scalar> out;
  const Scalar shifted_lower = lower + delta_lower;
  const Scalar shifted_upper = upper + delta_upper;
  Scalar q1_lower = 0, q2_lower = 0, q1_upper = 0, q2_upper = 0;
  Scalar phi_shifted = 0, phi = 0, phi_hat = 0, phi_hat_shifted = 0;
  for (Index j = 0; j < lambda.size(); ++j) {
    const Scalar gap_l = lambda(j) - shifted_lower;
    const Scalar gap_u = shifted_upper - lambda(j);
    if (gap_l == Scalar(0) || gap_u == Scalar(0)) {
      out.valid = false;
      return out;
    }
    const Scalar zz = z(j) * z(j);
    q1_lower += zz / gap_l;
    q2_lower += zz / (gap_l * gap_l);
    q1_upper += zz / gap_u;
    q2_upper += zz / (gap_u * gap_u);
    phi_shifted += Scalar(1) / gap_l;
    phi += Scalar(1) / (lambda(j) - lower);
    phi_hat += Scalar(1) / (upper - lambda(j));
    phi_hat_shifted += Scalar(1) / gap_u;
  }
  const Scalar lower_gap = phi_shifted - phi;
  const Scalar upper_gap = phi_hat - phi_hat_shifted;
  if (lower_gap == Scalar(0) || upper_gap == Scalar(0) || !std::isfinite(lower_gap) || !std::isfinite(upper_gap)) {
    out.valid = false;
    return out;
  }
  out.lower = q2_lower / lower_gap - q1_lower;
  out.upper = q2_upper / upper_gap + q1_upper;
  out.valid = std::isfinite(out.lower) && std::isfinite(out.upper);
  return out;
}

}  // namespace detail

/// Lower and upper scores of candidate v for barriers (L, U) and steps
/// (delta_L, delta_U), evaluated through A's eigendecomposition.
template <typename Scalar, typename Derived>
CandidateScores<Scalar> candidate_scores(const Eigen::MatrixBase<Derived>& v, const BarrierState<Scalar>& state,
                                         Scalar lower, Scalar upper, Scalar delta_lower, Scalar delta_upper) {
  require(v.size() == state.eigenvalues.size(), "candidate_scores: dimension mismatch");
  const Vector<Scalar> z = state.eigenvectors.transpose() * v;
  return detail::scores_in_eigenbasis<Scalar>(z, state.eigenvalues, lower, upper, delta_lower, delta_upper);
}

/// One accepted step of the greedy loop.
template <typename Scalar>
struct BssStep {
  Index tau;
  Index column;
  Scalar t;
  Scalar lower_score;
  Scalar upper_score;
  Scalar lower_barrier;  // L_{tau+1}
  Scalar upper_barrier;  // U_{tau+1}
  Scalar min_eigenvalue; // of A_{tau+1}
  Scalar max_eigenvalue;
  bool fresh;            // column was not selected before
};

/// Instrumentation counters and per-step record.
template <typename Scalar>
struct BssTrace {
  Index iterations = 0;
  Index eigendecompositions = 0;
  Index score_evaluations = 0;
  Index skipped_candidates = 0;  // singular shifted resolvent
  Index reselections = 0;
  long long projection_madds = 0;  // multiply-adds forming V Q each iteration
  std::vector<BssStep<Scalar>> steps;
};

/// Relative slack when testing upper <= lower.
inline constexpr double kScoreSlack = 1e-12;

/// Selects r rescaled rows of V (features). Deterministic.
///
/// Among admissible candidates, picks the not-yet-selected row with the
/// largest Euclidean norm; re-selects an earlier row only when no fresh row
/// is admissible. Rows with zero norm are never picked.
template <typename Derived>
SamplingOperator<typename Derived::Scalar> bss_select(const Eigen::MatrixBase<Derived>& v_in, Index r,
                                                     BssTrace<typename Derived::Scalar>* trace = nullptr) {
  using Scalar = typename Derived::Scalar;
  const Matrix<Scalar> V = v_in;
  const Index d = V.rows();
  const Index ell = V.cols();
  require(ell > 0, "bss_select: V has no columns");
  require(r > ell, "bss_select: need r > l (got r = " + std::to_string(r) + ", l = " + std::to_string(ell) + ")");
  require(orthonormality_error(V) <= Scalar(1e-8), "bss_select: columns of V are not orthonormal");

  const BarrierSchedule<Scalar> schedule(ell, r);
  const Vector<Scalar> norms = V.rowwise().norm();
  std::vector<bool> chosen(static_cast<std::size_t>(d), false);
  std::vector<typename SamplingOperator<Scalar>::Selection> selections;
  selections.reserve(static_cast<std::size_t>(r));

  BssTrace<Scalar> local;
  BssTrace<Scalar>& tr = trace ? *trace : local;
  tr = BssTrace<Scalar>{};

  auto state = BarrierState<Scalar>::zero(ell);
  ++tr.eigendecompositions;
  Matrix<Scalar> Z(d, ell);

  for (Index tau = 0; tau < r; ++tau) {
    const Scalar L = schedule.lower(tau);
    const Scalar U = schedule.upper(tau);
    Z.noalias() = V * state.eigenvectors;
    tr.projection_madds += static_cast<long long>(d) * ell * ell;

    Index best_fresh = -1, best_any = -1;
    CandidateScores<Scalar> fresh_scores, any_scores;
    for (Index i = 0; i < d; ++i) {
      if (norms(i) == Scalar(0)) continue;
      const auto s = detail::scores_in_eigenbasis<Scalar>(Z.row(i).transpose(), state.eigenvalues, L, U,
                                                          schedule.delta_lower, schedule.delta_upper);
      ++tr.score_evaluations;
      if (!s.valid) {
        ++tr.skipped_candidates;
        continue;
      }
      if (!(s.lower > Scalar(0)) || s.upper > s.lower + Scalar(kScoreSlack) * std::abs(s.lower)) continue;
      if (!chosen[static_cast<std::size_t>(i)] && (best_fresh < 0 || norms(i) > norms(best_fresh))) {
        best_fresh = i;
        fresh_scores = s;
      }
      if (best_any < 0 || norms(i) > norms(best_any)) {
        best_any = i;
        any_scores = s;
      }
    }

    const bool fresh = best_fresh >= 0;
    const Index pick = fresh ? best_fresh : best_any;
    if (pick < 0) {
      std::ostringstream dump;
      dump << "bss_select: no admissible candidate at tau = " << tau << " (l = " << ell << ", r = " << r
           << ", d = " << d << ", L = " << L << ", U = " << U << ", eigenvalues = ["
           << state.eigenvalues.transpose() << "], skipped = " << tr.skipped_candidates << ")";
      throw NumericalError(dump.str());
    }
    const CandidateScores<Scalar> s = fresh ? fresh_scores : any_scores;
    const Scalar inv_t = Scalar(0.5) * (s.upper + s.lower);
    const Scalar t = Scalar(1) / inv_t;

    state.add(V.row(pick).transpose(), t);
    ++tr.eigendecompositions;
    chosen[static_cast<std::size_t>(pick)] = true;
    if (!fresh) ++tr.reselections;
    selections.push_back({pick, std::sqrt(t)});

    const Scalar next_L = schedule.lower(tau + 1);
    const Scalar next_U = schedule.upper(tau + 1);
    const Scalar lo = state.eigenvalues.minCoeff();
    const Scalar hi = state.eigenvalues.maxCoeff();
    if (!(lo > next_L) || !(hi < next_U)) {
      std::ostringstream dump;
      dump << "bss_select: barrier crossed after tau = " << tau << ": eigenvalues in [" << lo << ", " << hi
           << "], barriers (" << next_L << ", " << next_U << ")";
      throw NumericalError(dump.str());
    }
    tr.steps.push_back({tau, pick, t, s.lower, s.upper, next_L, next_U, lo, hi, fresh});
    ++tr.iterations;
  }

  SamplingOperator<Scalar> op(d, std::move(selections));
  op.rescale(schedule.final_scale());
  return op;
}

}  // namespace marginsparse
