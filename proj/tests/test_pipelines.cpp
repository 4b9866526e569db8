#include <doctest.h>

#include "marginsparse/baselines.hpp"
#include "marginsparse/cross_validation.hpp"
#include "marginsparse/pipelines.hpp"

#include <cmath>
#include <set>

using namespace marginsparse;

namespace {

LabeledDataset two_points() {
  MatrixXd x(2, 3);
  x << 1, 0, 0, -1, 0, 0;
  return LabeledDataset(Features::from_dense(x), (VectorXd(2) << 1, -1).finished());
}

}  // namespace

TEST_CASE("uniform selection") {
  const auto s = uniform_select(10, 4, 3);
  CHECK(s.size() == 4);
  CHECK(std::set<Index>(s.begin(), s.end()).size() == 4);
  CHECK(uniform_select(10, 4, 3) == s);
  CHECK(uniform_select(5, 0, 1).empty());
  auto all = uniform_select(5, 5, 1);
  std::sort(all.begin(), all.end());
  CHECK(all == std::vector<Index>{0, 1, 2, 3, 4});
  CHECK_THROWS_AS(uniform_select(3, 4, 1), InvalidArgument);

  int hits = 0;
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) {
    const auto one = uniform_select(5, 1, 1000 + static_cast<std::uint64_t>(t));
    hits += one[0] == 2;
  }
  CHECK(hits / static_cast<double>(trials) == doctest::Approx(0.2).epsilon(0.1));
}

TEST_CASE("pivoted qr") {
  MatrixXd d = MatrixXd::Zero(3, 3);
  d.diagonal() << 1, 3, 2;
  CHECK(rrqr_select(Features::from_dense(d), 3) == std::vector<Index>{1, 2, 0});

  MatrixXd dup(3, 3);
  dup << 1, 1, 0, 2, 2, 0, 0, 0, 0.5;
  const auto qr = pivoted_qr(Features::from_dense(dup), 3);
  CHECK(qr.pivots == std::vector<Index>{0, 2, 1});
  CHECK(qr.residual_norms[0] == doctest::Approx(std::sqrt(5.0)));
  CHECK(qr.residual_norms[1] == doctest::Approx(0.5));
  CHECK(qr.residual_norms[2] == doctest::Approx(0.0));
  CHECK_THROWS_AS(rrqr_select(Features::from_dense(d), 4), InvalidArgument);
}

TEST_CASE("recursive feature elimination keeps the informative feature") {
  const auto data = gen_synthetic(80, 12, 1, 4);
  CHECK(rfe_select(data, 1) == std::vector<Index>{0});
  const auto three = rfe_select(data, 3, RfeOptions{1.0, 0.0, 1e-4});
  CHECK(three.size() == 3);
  CHECK(three.front() == 0);
  CHECK_THROWS_AS(rfe_select(data, 12), InvalidArgument);
}

TEST_CASE("method names") {
  for (Method m : {Method::bss, Method::leverage, Method::approx_bss, Method::uniform, Method::rrqr, Method::rfe})
    CHECK(parse_method(to_string(m)) == m);
  CHECK(to_string(Method::approx_bss) == "approx-bss");
  CHECK(parse_mode("unsupervised") == Mode::unsupervised);
  CHECK_THROWS_AS(parse_method("lasso"), InvalidArgument);
  CHECK(default_feature_count(2, 0.5) == 288);
  CHECK(default_feature_count(3, 0.9) == 134);
  CHECK_THROWS_AS(default_feature_count(1, 1.0), InvalidArgument);
}

TEST_CASE("supervised selection on two points") {
  SelectionConfig cfg;
  cfg.method = Method::rrqr;
  cfg.r = 1;
  const auto rep = supervised_select(two_points(), cfg);
  CHECK(rep.support_count == 2);
  CHECK(rep.rank == 1);
  CHECK(rep.ranked == std::vector<Index>{0});
  CHECK(rep.margin_full == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(rep.margin_sampled == doctest::Approx(1.0).epsilon(1e-4));

  cfg.method = Method::bss;
  cfg.r = 4;
  const auto bss = supervised_select(two_points(), cfg);
  CHECK(bss.selected.distinct_columns() == std::vector<Index>{0});
  REQUIRE(bss.spectral_error);
  CHECK(*bss.spectral_error <= 3.0 * std::sqrt(1.0 / 4.0));
  CHECK(verify_margin_bound(bss).margin.status == CheckStatus::pass);
}

TEST_CASE("all features keep the margin") {
  const auto data = gen_synthetic(40, 8, 2, 5);
  SelectionConfig cfg;
  cfg.method = Method::uniform;
  cfg.r = 8;
  for (Mode mode : {Mode::supervised, Mode::unsupervised}) {
    cfg.mode = mode;
    const auto rep = run_selection(data, cfg);
    CHECK(rep.margin_sampled == doctest::Approx(rep.margin_full).epsilon(1e-3));
  }
}

TEST_CASE("randomized selections reproduce from the seed") {
  const auto data = gen_synthetic(40, 30, 3, 6);
  for (Method m : {Method::uniform, Method::leverage, Method::approx_bss}) {
    SelectionConfig cfg;
    cfg.method = m;
    cfg.r = 12;
    cfg.seed = 99;
    const auto a = run_selection(data, cfg);
    const auto b = run_selection(data, cfg);
    CHECK(a.selected.columns() == b.selected.columns());
    CHECK(a.margin_sampled == b.margin_sampled);
  }
}

TEST_CASE("rfe needs labels") {
  SelectionConfig cfg;
  cfg.method = Method::rfe;
  cfg.mode = Mode::unsupervised;
  cfg.r = 2;
  CHECK_THROWS_AS(run_selection(gen_synthetic(20, 6, 1, 1), cfg), InvalidArgument);
}

TEST_CASE("unsupervised selection ignores the labels") {
  const auto data = gen_synthetic(50, 20, 2, 7);
  VectorXd shuffled = data.y;
  std::reverse(shuffled.begin(), shuffled.end());
  if (std::abs(shuffled.sum()) == shuffled.size()) shuffled(0) = -shuffled(0);
  SelectionConfig cfg;
  cfg.mode = Mode::unsupervised;
  cfg.r = 60;
  const auto a = run_selection(data, cfg);
  const auto b = run_selection(LabeledDataset(data.X, shuffled), cfg);
  CHECK(a.selected.columns() == b.selected.columns());
  CHECK(a.selected.weights() == b.selected.weights());
}

TEST_CASE("both modes agree when every point is a support vector") {
  SelectionConfig cfg;
  cfg.r = 4;
  cfg.mode = Mode::supervised;
  const auto sup = run_selection(two_points(), cfg);
  cfg.mode = Mode::unsupervised;
  const auto uns = run_selection(two_points(), cfg);
  CHECK(sup.selected.columns() == uns.selected.columns());
  CHECK(sup.selected.weights() == uns.selected.weights());
  CHECK(sup.margin_sampled == doctest::Approx(uns.margin_sampled));
}

TEST_CASE("bound checks with no distortion") {
  SelectionReport rep;
  rep.margin_full = rep.margin_sampled = 2.0;
  rep.spectral_error = 0.0;
  rep.radius_full = rep.radius_sampled = 3.0;
  rep.radius_spectral_error = 0.0;
  const auto b = verify_margin_bound(rep);
  CHECK(b.margin.status == CheckStatus::pass);
  CHECK(b.radius.status == CheckStatus::pass);
  CHECK(b.ratio.status == CheckStatus::pass);
  CHECK(*b.epsilon_hat == 0.0);

  rep.spectral_error = 1.0;
  CHECK(verify_margin_bound(rep).margin.status == CheckStatus::not_applicable);
  rep.spectral_error = 0.2;
  rep.margin_sampled = 1.0;  // 1 < (1 - 0.25) * 4
  CHECK(verify_margin_bound(rep).margin.status == CheckStatus::fail);
  rep.converged = false;
  CHECK(verify_margin_bound(rep).margin.status == CheckStatus::not_applicable);
  CHECK(to_string(CheckStatus::not_applicable) == "na");
}

TEST_CASE("fold seeds and feature frequency") {
  CHECK(fold_seed(1, 0, 0) == fold_seed(1, 0, 0));
  CHECK(fold_seed(1, 0, 1) != fold_seed(1, 1, 0));

  CvCell cell;
  auto fold = [](std::vector<Index> ranked) {
    FoldOutcome f;
    f.ranked = std::move(ranked);
    return f;
  };
  cell.folds = {fold({2, 0}), fold({0, 5}), fold({0, 2}), fold({}), fold({})};
  cell.folds[3].skipped = true;
  cell.folds[3].ranked = {7};
  const auto freq = feature_frequency(cell);
  REQUIRE(freq.size() == 3);
  CHECK(freq[0].index == 0);
  CHECK(freq[0].count == 3);
  CHECK(freq[0].mean_position == doctest::Approx(1.0 / 3.0));
  CHECK(freq[1].index == 2);
  CHECK(freq[2].index == 5);

  CvCell tie;
  tie.folds = {fold({3, 1}), fold({1, 3})};
  const auto t = feature_frequency(tie);
  CHECK(t[0].index == 1);
  CHECK(t[1].index == 3);
}

TEST_CASE("cross validation is deterministic across thread counts") {
  const auto data = gen_synthetic(40, 8, 3, 8);
  CvConfig cfg;
  cfg.methods = {Method::bss, Method::leverage};
  cfg.r_values = {12};
  cfg.folds = 4;
  cfg.repeats = 2;
  cfg.seed = 3;
  cfg.record_selections = true;
  cfg.threads = 1;
  const auto one = run_cv(data, cfg);
  cfg.threads = 4;
  const auto four = run_cv(data, cfg);
  REQUIRE(one.cells.size() == 3);
  CHECK(one.cells[0].method == "full");
  CHECK(one.cells[0].r == 8);
  for (std::size_t c = 0; c < one.cells.size(); ++c) {
    const auto& a = one.cells[c];
    const auto& b = four.cells[c];
    CHECK(a.mean_error == b.mean_error);
    CHECK(a.folds.size() == 8);
    CHECK(a.evaluated + a.skipped == 8);
    CHECK(a.per_repeat_error.size() == 2);
    double mean = 0, sq = 0;
    for (const auto& f : a.folds) mean += f.error;
    mean /= 8;
    for (const auto& f : a.folds) sq += (f.error - mean) * (f.error - mean);
    CHECK(a.mean_error == doctest::Approx(mean));
    CHECK(a.std_error == doctest::Approx(std::sqrt(sq / 7)));
    for (std::size_t k = 0; k < a.folds.size(); ++k) CHECK(a.folds[k].ranked == b.folds[k].ranked);
  }
}

TEST_CASE("evaluate_fold scores the sampled model on the test split") {
  const auto data = gen_synthetic(60, 10, 2, 9);
  const auto plan = make_folds(60, 3, 1, 1);
  const auto split = apply_fold(data, plan, 0, 0);
  SelectionConfig cfg;
  cfg.method = Method::rrqr;
  cfg.r = 10;
  const auto out = evaluate_fold(split.train, split.test, cfg, true);
  CHECK_FALSE(out.skipped);
  CHECK(out.ranked.size() == 10);
  const auto model = supervised_select(split.train, cfg).sampled_model;
  CHECK(out.error >= 0.0);
  CHECK(out.error <= 0.5);
  CHECK(out.margin == doctest::Approx(model.margin));
}
