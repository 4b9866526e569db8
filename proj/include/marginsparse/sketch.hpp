#pragma once

// Approximate BSS: run the deterministic sparsifier on the right singular
// vectors of a Gaussian sketch G X (G is t x p) instead of X itself.

#include "marginsparse/bss.hpp"
#include "marginsparse/common.hpp"
#include "marginsparse/feature_matrix.hpp"
#include "marginsparse/linalg.hpp"
#include "marginsparse/random.hpp"

#include <cstdint>

namespace marginsparse {

struct SketchConfig {
  Index rows = 1;  // t
  std::uint64_t seed = 0;
};

/// The t x p Gaussian matrix realized for `cfg`. Entries are unscaled
/// standard normals; only the row space of G X matters downstream.
template <typename Scalar>
Matrix<Scalar> sketch_matrix(Index p, const SketchConfig& cfg) {
  require(cfg.rows >= 1, "gaussian_sketch: t must be at least 1");
  Rng rng(cfg.seed);
  return gaussian_matrix<Scalar>(cfg.rows, p, rng);
}

/// G X for X of size p x d.
template <typename Scalar>
Matrix<Scalar> gaussian_sketch(const FeatureMatrix<Scalar>& x, const SketchConfig& cfg) {
  const Matrix<Scalar> g = sketch_matrix<Scalar>(x.rows(), cfg);
  if (x.is_sparse()) return g * x.sparse();
  return g * x.dense();
}

/// BSS on the right singular vectors of G X. The sparsifier dimension is the
/// numerical rank of G X.
template <typename Scalar>
SamplingOperator<Scalar> approx_bss_select(const FeatureMatrix<Scalar>& x, Index t, Index r, std::uint64_t seed,
                                           BssTrace<Scalar>* trace = nullptr) {
  const Matrix<Scalar> sketched = gaussian_sketch(x, SketchConfig{t, seed});
  const auto svd = thin_svd(sketched);
  return bss_select(svd.V, r, trace);
}

}  // namespace marginsparse
