#include <doctest.h>

#include "marginsparse/dataset.hpp"

#include <filesystem>
#include <set>

using namespace marginsparse;

TEST_CASE("svmlight parsing") {
  const auto data = parse_svmlight("+1 1:0.5 3:2 # note\n\n-1 2:-1\n1\n");
  CHECK(data.size() == 3);
  CHECK(data.dim() == 3);
  CHECK(data.X.is_sparse());
  CHECK(data.y == (VectorXd(3) << 1, -1, 1).finished());
  CHECK(data.X.coeff(0, 0) == 0.5);
  CHECK(data.X.coeff(0, 2) == 2.0);
  CHECK(data.X.coeff(1, 1) == -1.0);
  CHECK(data.X.coeff(2, 0) == 0.0);
  CHECK(parse_svmlight("1 2:1\n-1 1:1\n", 7).dim() == 7);
}

TEST_CASE("svmlight errors") {
  CHECK_THROWS_AS(parse_svmlight("2 1:1\n"), DataError);
  CHECK_THROWS_AS(parse_svmlight("1 0:1\n"), DataError);
  CHECK_THROWS_AS(parse_svmlight("1 2:1 2:3\n"), DataError);
  CHECK_THROWS_AS(parse_svmlight("1 3:1 2:3\n"), DataError);
  CHECK_THROWS_AS(parse_svmlight("1 1:abc\n"), DataError);
  CHECK_THROWS_AS(parse_svmlight("1 1:inf\n"), DataError);
  CHECK_THROWS_AS(parse_svmlight("1 1\n"), DataError);
  CHECK_THROWS_AS(parse_svmlight("1 5:1\n", 3), DataError);
}

TEST_CASE("svmlight and csv round trips") {
  const auto data = gen_synthetic(12, 5, 2, 3);
  const auto back = parse_svmlight(serialize_svmlight(data), data.dim());
  CHECK(back.y == data.y);
  CHECK(back.X.to_dense() == data.X.to_dense());
  const auto csv = parse_csv(serialize_csv(data));
  CHECK(csv.y == data.y);
  CHECK(csv.X.to_dense() == data.X.to_dense());

  const auto dir = std::filesystem::temp_directory_path();
  const std::string path = (dir / "marginsparse_roundtrip.csv").string();
  save_dataset(data, path);
  CHECK(load_dataset(path).X.to_dense() == data.X.to_dense());
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_dataset((dir / "marginsparse_missing.svm").string()), DataError);
}

TEST_CASE("csv parsing") {
  const auto last = parse_csv("a,b,label\n1,2,1\n3,4,-1\n");
  CHECK(last.size() == 2);
  CHECK(last.dim() == 2);
  CHECK(last.X.coeff(1, 0) == 3.0);
  CHECK(last.y(1) == -1.0);
  const auto first = parse_csv("-1,5,6\n1,7,8\n", CsvOptions{true});
  CHECK(first.y(0) == -1.0);
  CHECK(first.X.coeff(0, 1) == 6.0);
  CHECK_THROWS_AS(parse_csv("1,2,1\n3,-1\n"), DataError);
  CHECK_THROWS_AS(parse_csv("1,2,0\n"), DataError);
  CHECK_THROWS_AS(parse_csv("1,2,1\nx,2,1\n"), DataError);
}

TEST_CASE("zero columns are removed") {
  const auto data = parse_svmlight("1 1:1 3:2\n-1 3:1\n", 4);
  const auto [kept, cols] = remove_zero_columns(data);
  CHECK(cols == std::vector<Index>{0, 2});
  CHECK(kept.dim() == 2);
  CHECK(kept.X.coeff(0, 1) == 2.0);
}

TEST_CASE("synthetic class means") {
  const auto data = gen_synthetic(4000, 6, 3, 5);
  const MatrixXd x = data.X.to_dense();
  for (Index j = 0; j < 6; ++j) {
    double mean = 0;
    for (Index i = 0; i < data.size(); ++i) mean += data.y(i) * x(i, j);
    mean /= static_cast<double>(data.size());
    // y_i x_ij = -(j + 1) + noise for relevant features, zero-mean otherwise
    CHECK(mean == doctest::Approx(j < 3 ? -static_cast<double>(j + 1) : 0.0).epsilon(0.05).scale(1.0));
  }
  const double positive = (data.y.array() > 0).cast<double>().mean();
  CHECK(positive == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("synthetic data is deterministic") {
  CHECK(gen_synthetic(10, 4, 2, 9).X.to_dense() == gen_synthetic(10, 4, 2, 9).X.to_dense());
  CHECK(gen_synthetic(10, 4, 2, 9).X.to_dense() != gen_synthetic(10, 4, 2, 10).X.to_dense());
  const auto low = gen_low_rank(30, 20, 4, 1);
  CHECK(Eigen::FullPivLU<MatrixXd>(low.X.to_dense()).rank() == 4);
}

TEST_CASE("fold plan") {
  const auto plan = make_folds(10, 3, 2, 4);
  CHECK(plan.fold_range(0) == std::pair<Index, Index>{0, 4});
  CHECK(plan.fold_range(1) == std::pair<Index, Index>{4, 7});
  CHECK(plan.fold_range(2) == std::pair<Index, Index>{7, 10});
  for (Index rep = 0; rep < 2; ++rep) {
    std::set<Index> seen;
    for (Index f = 0; f < 3; ++f) {
      const auto test = plan.test_rows(rep, f);
      const auto train = plan.train_rows(rep, f);
      CHECK(test.size() + train.size() == 10);
      seen.insert(test.begin(), test.end());
    }
    CHECK(seen.size() == 10);
  }
  CHECK(plan.assignments[0] != plan.assignments[1]);
  CHECK(make_folds(10, 3, 2, 4).assignments == plan.assignments);
}

TEST_CASE("single-class training folds are skipped") {
  const auto data = parse_svmlight("1 1:1\n1 1:2\n1 1:3\n-1 1:-1\n");
  const auto plan = make_folds(4, 4, 1, 1);
  int skipped = 0;
  for (Index f = 0; f < 4; ++f) skipped += apply_fold(data, plan, 0, f).skipped;
  CHECK(skipped == 1);
}
