#pragma once

// Supervised and unsupervised feature-selection protocols.
//
// Supervised: solve the SVM on the training data, keep the support vectors
// X^sv, select features from the right singular vectors of X^sv and re-solve
// on (X^sv R, Y^sv). Unsupervised: select from the right singular vectors of
// the whole training matrix, labels unused, and re-solve on (X R, Y).

#include "marginsparse/common.hpp"
#include "marginsparse/dataset.hpp"
#include "marginsparse/sampling_operator.hpp"
#include "marginsparse/svm.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace marginsparse {

enum class Method { bss, leverage, approx_bss, uniform, rrqr, rfe };
enum class Mode { supervised, unsupervised };

std::string to_string(Method method);
std::string to_string(Mode mode);
Method parse_method(std::string_view name);
Mode parse_mode(std::string_view name);

/// bss, leverage and approx-bss carry weights; the baselines use raw columns.
bool is_weighted(Method method);
bool is_randomized(Method method);

struct SelectionConfig {
  Method method = Method::bss;
  Mode mode = Mode::supervised;
  std::optional<Index> r;  // default: ceil(36 p / eps^2) or ceil(36 rho / eps^2)
  double epsilon = 0.5;
  double C = 1.0;
  std::uint64_t seed = 0;
  Index sketch_rows = 0;  // t for approx-bss; 0 means 4 * rank
  double chunk_fraction = 0.1;
  double kkt_tol = 1e-4;
  double meb_delta = 1e-3;
  bool compute_radii = true;
  bool full_data_sampled_margin = true;  // supervised only
};

struct SelectionReport {
  Method method = Method::bss;
  Mode mode = Mode::supervised;
  Index r = 0;
  SamplingOperator<double> selected;
  std::vector<Index> ranked;  // distinct features, most important first
  std::optional<std::uint64_t> seed;
  double C = 1.0;

  Index support_count = 0;  // p (supervised) or n (unsupervised)
  Index rank = 0;           // rank of the matrix features were selected from
  Index sketch_rows = 0;

  double margin_full = 0.0;     // gamma*
  double margin_sampled = 0.0;  // gamma~*
  std::optional<double> margin_full_data_sampled;  // supervised: all training points in X R
  std::optional<double> spectral_error;            // ||V^T V - V^T R R^T V||_2
  std::optional<double> radius_full;
  std::optional<double> radius_sampled;
  std::optional<double> radius_spectral_error;     // ||E_B||_2
  bool converged = true;

  SvmModel sampled_model;  // trained in the selected feature space
};

/// Default r: ceil(36 m / eps^2).
Index default_feature_count(Index m, double epsilon);

SelectionReport supervised_select(const LabeledDataset& data, const SelectionConfig& config);
SelectionReport unsupervised_select(const LabeledDataset& data, const SelectionConfig& config);
SelectionReport run_selection(const LabeledDataset& data, const SelectionConfig& config);

enum class CheckStatus { pass, fail, not_applicable };
std::string to_string(CheckStatus status);

struct BoundCheck {
  CheckStatus status = CheckStatus::not_applicable;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct BoundReport {
  BoundCheck margin;  // gamma~^2 >= (1 - E/(1-E)) gamma^2
  BoundCheck radius;  // B~^2 <= (1 + E_B) B^2
  BoundCheck ratio;   // B~^2/gamma~^2 <= (1+e)/(1-e) B^2/gamma^2
  std::optional<double> epsilon_hat;
};

/// Evaluates the margin, radius and radius/margin inequalities with the
/// measured spectral errors of the report.
BoundReport verify_margin_bound(const SelectionReport& report);

}  // namespace marginsparse
