// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Run a subset with: acceptance 2 5 9

#include "oracles.hpp"

#include "marginsparse/bss.hpp"
#include "marginsparse/cross_validation.hpp"
#include "marginsparse/dataset.hpp"
#include "marginsparse/geometry.hpp"
#include "marginsparse/linalg.hpp"
#include "marginsparse/pipelines.hpp"
#include "marginsparse/random.hpp"
#include "marginsparse/svm.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace marginsparse;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Index sv_rank(const LabeledDataset& data, double C) {
  const SvmModel m = solve_dual(data, C);
  return thin_svd(data.subset(support_vectors(m)).X).rank();
}

// Random orthonormal V and BSS on it; singular values of R^T V and ||E||.
Outcome spectral_suite() {
  const std::vector<std::pair<Index, Index>> configs{{2, 16}, {4, 64}, {8, 128}};
  int failures = 0;
  double worst_ratio = 0.0;  // ||E|| / (3 sqrt(l/r))
  for (auto [ell, r] : configs) {
    const double root = std::sqrt(static_cast<double>(ell) / static_cast<double>(r));
    for (int trial = 0; trial < 50; ++trial) {
      Rng rng(derive_seed(101, static_cast<std::uint64_t>(ell), static_cast<std::uint64_t>(trial)));
      const MatrixXd v = orthonormal_basis(gaussian_matrix<double>(4 * r, ell, rng));
      const auto op = bss_select(v, r);
      const VectorXd sv = Eigen::JacobiSVD<MatrixXd>(op.sample_rows(v)).singularValues();
      const double err = op.spectral_error(v);
      const bool ok = sv.minCoeff() >= 1.0 - root - 1e-9 && sv.maxCoeff() <= 1.0 + root + 1e-9 && err <= 3.0 * root;
      failures += ok ? 0 : 1;
      worst_ratio = std::max(worst_ratio, err / (3.0 * root));
    }
  }
  return {failures == 0, fmt("150 trials, %d failures, max ||E||/(3 sqrt(l/r)) = %.3f", failures, worst_ratio)};
}

// Supervised margin inequality on n=60, d=300, k=10 with r = 4 rank(X^sv).
Outcome margin_chain(Method method, int required) {
  int passed = 0, vacuous = 0, violated = 0;
  double worst_e = 0.0;
  for (int seed = 0; seed < 20; ++seed) {
    const LabeledDataset data = gen_synthetic(60, 300, 10, static_cast<std::uint64_t>(seed));
    SelectionConfig cfg;
    cfg.method = method;
    cfg.mode = Mode::supervised;
    cfg.r = 4 * sv_rank(data, 1.0);
    cfg.seed = derive_seed(202, static_cast<std::uint64_t>(seed));
    cfg.compute_radii = false;
    cfg.full_data_sampled_margin = false;
    const SelectionReport rep = supervised_select(data, cfg);
    const BoundReport b = verify_margin_bound(rep);
    worst_e = std::max(worst_e, *rep.spectral_error);
    if (b.margin.status == CheckStatus::pass) ++passed;
    if (b.margin.status == CheckStatus::not_applicable) ++vacuous;
    if (b.margin.status == CheckStatus::fail) ++violated;
  }
  return {passed >= required, fmt("%d/20 pass (need %d), %d with ||E|| >= 1, %d violated, max ||E|| = %.3f", passed,
                                  required, vacuous, violated, worst_e)};
}

// Radius bound with R selected on the center-augmented basis V_B.
Outcome radius_suite() {
  int passed = 0;
  double worst = 0.0;  // B~^2 / ((1 + ||E_B||) B^2)
  for (int seed = 0; seed < 20; ++seed) {
    const LabeledDataset data = gen_low_rank(40, 500, 10, static_cast<std::uint64_t>(seed));
    const EnclosingBall ball = meb_radius(data.X);
    const auto vb = thin_svd(data.X.with_row(ball.center)).V;
    const auto op = bss_select(vb, 36 * vb.cols());
    const RadiusCheck rc = radius_bound_check(data.X, op);
    passed += rc.pass ? 1 : 0;
    worst = std::max(worst, rc.radius_sampled * rc.radius_sampled /
                                ((1.0 + rc.spectral_error) * rc.radius_full * rc.radius_full));
  }
  return {passed == 20, fmt("%d/20 pass, max B~^2 / ((1+||E_B||) B^2) = %.4f", passed, worst)};
}

// Unsupervised radius/margin ratio on the same rank-10 datasets, r = 36 rho.
Outcome ratio_suite() {
  int bss = 0, lev = 0;
  double worst_eps[2] = {0.0, 0.0};
  for (int seed = 0; seed < 20; ++seed) {
    const LabeledDataset data = gen_low_rank(40, 500, 10, static_cast<std::uint64_t>(seed));
    const Index rho = thin_svd(data.X).rank();
    for (Method m : {Method::bss, Method::leverage}) {
      SelectionConfig cfg;
      cfg.method = m;
      cfg.mode = Mode::unsupervised;
      cfg.r = 36 * rho;
      cfg.seed = derive_seed(505, static_cast<std::uint64_t>(seed));
      const SelectionReport rep = unsupervised_select(data, cfg);
      const BoundReport b = verify_margin_bound(rep);
      const bool ok = b.ratio.status == CheckStatus::pass;
      const int k = m == Method::bss ? 0 : 1;
      (k == 0 ? bss : lev) += ok ? 1 : 0;
      worst_eps[k] = std::max(worst_eps[k], b.epsilon_hat.value_or(INFINITY));
    }
  }
  return {bss == 20 && lev >= 19,
          fmt("bss %d/20, leverage %d/20 (need 20 and 19), max eps_hat bss %.3f leverage %.3f", bss, lev, worst_eps[0],
              worst_eps[1])};
}

// Synthetic experiment: n=200, d=1000, k=40, r=30, 10x10 CV.
Outcome synthetic_cv() {
  const LabeledDataset data = gen_synthetic(200, 1000, 40, 1);
  CvConfig cfg;
  cfg.methods = {Method::bss, Method::leverage, Method::rfe, Method::rrqr};
  cfg.r_values = {30};
  cfg.seed = 1;
  const CvStats stats = run_cv(data, cfg);
  bool ok = true;
  std::ostringstream out;
  for (const auto& c : stats.cells) {
    if (c.method == "full") continue;
    ok = ok && c.skipped == 0 && c.mean_error <= 0.02;
    out << c.method << " " << fmt("%.4f", c.mean_error) << (c.skipped ? fmt(" (%lld skipped)", (long long)c.skipped) : "")
        << "; ";
  }
  return {ok, "mean error " + out.str() + "threshold 0.02"};
}

// Top-5 most frequent features across CV training folds.
Outcome frequency_table() {
  int passed = 0;
  std::ostringstream misses;
  for (Index k : {40, 50}) {
    const LabeledDataset data = gen_synthetic(200, 1000, k, 1);
    for (Index r : {30, 40}) {
      CvConfig cfg;
      cfg.methods = {Method::bss, Method::leverage, Method::rfe, Method::rrqr};
      cfg.r_values = {r};
      cfg.seed = 1;
      cfg.include_full_baseline = false;
      cfg.record_selections = true;
      const CvStats stats = run_cv(data, cfg);
      for (const auto& cell : stats.cells) {
        const auto ranked = feature_frequency(cell);
        bool relevant = ranked.size() >= 5, has_k = false;
        std::string top;
        for (std::size_t i = 0; i < 5 && i < ranked.size(); ++i) {
          relevant = relevant && ranked[i].index < k;
          has_k = has_k || ranked[i].index == k - 1;
          top += (i ? "," : "") + std::to_string(ranked[i].index + 1);
        }
        if (relevant && has_k)
          ++passed;
        else
          misses << " " << cell.method << "(k=" << k << ",r=" << r << "):" << top;
      }
    }
  }
  return {passed == 16, fmt("%d/16 cells", passed) + (passed < 16 ? "; misses" + misses.str() : std::string())};
}

// Two-point closed form plus projected-gradient oracle on small instances.
Outcome svm_oracle() {
  MatrixXd x2(2, 2);
  x2 << 1, 0, -1, 0;
  const SvmModel two = solve_dual(LabeledDataset(Features::from_dense(x2), (VectorXd(2) << 1, -1).finished()), 1.0);
  const bool closed = std::abs(two.alpha(0) - 0.5) <= 1e-6 && std::abs(two.alpha(1) - 0.5) <= 1e-6 &&
                      std::abs(two.margin - 1.0) <= 1e-6;
  double worst = 0.0;
  Rng rng(808);
  for (int inst = 0; inst < 20; ++inst) {
    const Index n = 2 + static_cast<Index>(rng.below(7));
    const Index d = 1 + static_cast<Index>(rng.below(3));
    MatrixXd x(n, d);
    VectorXd y(n);
    for (Index i = 0; i < n; ++i) {
      y(i) = i < 2 ? (i == 0 ? 1.0 : -1.0) : rng.sign();
      for (Index j = 0; j < d; ++j) x(i, j) = rng.normal() + (j == 0 ? 1.5 * y(i) : 0.0);
    }
    const SvmModel m = solve_dual(LabeledDataset(Features::from_dense(x), y), 1.0, 1e-8);
    const double ref = oracle::svm_dual_optimum(x, y, 1.0);
    worst = std::max(worst, std::abs(m.objective - ref) / std::max(1e-12, std::abs(ref)));
  }
  return {closed && worst <= 1e-4,
          fmt("two-point alpha = (%.7f, %.7f), margin %.7f; max relative dual gap vs oracle %.2e over 20 instances",
              two.alpha(0), two.alpha(1), two.margin, worst)};
}

// Approximate BSS at t = 4l and 8l against exact BSS, 10-fold CV, 5 seeds.
Outcome approx_trend() {
  double bss = 0.0, t4 = 0.0, t8 = 0.0;
  Index ell_sum = 0;
  for (int seed = 0; seed < 5; ++seed) {
    const LabeledDataset data = gen_synthetic(80, 300, 2, static_cast<std::uint64_t>(seed));
    const Index ell = sv_rank(data, 1.0);
    ell_sum += ell;
    CvConfig cfg;
    cfg.methods = {Method::bss, Method::approx_bss};
    cfg.r_values = {2 * ell};
    cfg.repeats = 1;
    cfg.seed = derive_seed(909, static_cast<std::uint64_t>(seed));
    cfg.include_full_baseline = false;
    cfg.sketch_rows = 8 * ell;
    const CvStats s8 = run_cv(data, cfg);
    cfg.methods = {Method::approx_bss};
    cfg.sketch_rows = 4 * ell;
    const CvStats s4 = run_cv(data, cfg);
    bss += s8.cells[0].mean_error;
    t8 += s8.cells[1].mean_error;
    t4 += s4.cells[0].mean_error;
  }
  bss /= 5.0;
  t8 /= 5.0;
  t4 /= 5.0;
  return {std::abs(t8 - bss) <= 0.05 && t8 <= t4 + 0.02,
          fmt("mean l = %.1f; CV error exact %.4f, t=8l %.4f, t=4l %.4f", static_cast<double>(ell_sum) / 5.0, bss, t8, t4)};
}

// Enclosing ball of 10 random planar points against the exhaustive oracle.
Outcome meb_oracle() {
  Rng rng(1010);
  double worst = 0.0, lowest = INFINITY;
  for (int inst = 0; inst < 50; ++inst) {
    std::vector<Eigen::Vector2d> pts;
    MatrixXd x(10, 2);
    for (int i = 0; i < 10; ++i) {
      pts.emplace_back(rng.uniform() * 4 - 2, rng.uniform() * 4 - 2);
      x.row(i) = pts.back().transpose();
    }
    const double ref = oracle::planar_meb_radius(pts);
    const double got = meb_radius(Features::from_dense(x), 1e-3).radius;
    worst = std::max(worst, got / ref);
    lowest = std::min(lowest, got / ref);
  }
  return {worst <= 1.0 + 1e-3 && lowest >= 1.0 - 1e-9, fmt("radius / oracle in [%.6f, %.6f]", lowest, worst)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"spectral bound of deterministic selection", spectral_suite},
      {"margin chain, supervised bss", [] { return margin_chain(Method::bss, 20); }},
      {"margin chain, supervised leverage", [] { return margin_chain(Method::leverage, 19); }},
      {"radius bound with center row", radius_suite},
      {"radius/margin ratio", ratio_suite},
      {"synthetic 10x10 cross-validation", synthetic_cv},
      {"most frequent features", frequency_table},
      {"svm dual oracle", svm_oracle},
      {"approximate bss sketch size", approx_trend},
      {"enclosing ball oracle", meb_oracle},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %2d %s: %s (%.1fs) %s\n", id, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(), secs,
                o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
