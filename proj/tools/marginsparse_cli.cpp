// marginsparse: feature selection for linear SVMs.
//
//   marginsparse select --method bss --mode supervised --features 30 --data synth.svm --out r.json
//   marginsparse cv --method bss,leverage --features 300,400,500 --data d.svm
//   marginsparse synth --n 200 --d 1000 --k 40 --seed 1 --out synth.svm
//   marginsparse verify --bound spectral --l 8 --r 128 --trials 50
//   marginsparse feature-freq --method bss --features 30 --data synth.svm
//
// Exit codes: 0 ok, 2 usage, 3 data, 4 numerical.

#include "marginsparse/bss.hpp"
#include "marginsparse/cross_validation.hpp"
#include "marginsparse/dataset.hpp"
#include "marginsparse/leverage.hpp"
#include "marginsparse/linalg.hpp"
#include "marginsparse/pipelines.hpp"
#include "marginsparse/random.hpp"
#include "marginsparse/report_json.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

using namespace marginsparse;
using nlohmann::json;

namespace {

constexpr int kUsage = 2;
constexpr int kData = 3;
constexpr int kNumerical = 4;

struct Options {
  std::string data;
  std::string out;
  bool csv_label_first = false;
  std::vector<std::string> methods{"bss"};
  std::string mode = "supervised";
  std::vector<Index> features;
  double C = 1.0;
  double epsilon = 0.5;
  double kkt_tol = 1e-4;
  double delta = 1e-3;
  double chunk = 0.1;
  std::uint64_t seed = 0;
  Index t = 0;
  Index folds = 10;
  Index repeats = 10;
  unsigned threads = 0;
  Index top = 5;

  // synth
  Index n = 200, d = 1000, k = 40, rank = 0;

  // verify
  std::string bound = "spectral";
  Index ell = 8, r = 128, trials = 50, dim = 0;
};

void emit(const json& doc, const std::string& out) {
  const std::string text = doc.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw DataError("cannot open '" + out + "' for writing");
  f << text;
  if (!f) throw DataError("failed writing '" + out + "'");
}

LabeledDataset load(const Options& o) {
  if (o.data.empty()) throw InvalidArgument("--data is required");
  return load_dataset(o.data, CsvOptions{o.csv_label_first});
}

SelectionConfig selection_config(const Options& o) {
  if (o.methods.size() != 1) throw InvalidArgument("exactly one --method is allowed here");
  if (o.features.size() > 1) throw InvalidArgument("exactly one --features value is allowed here");
  SelectionConfig cfg;
  cfg.method = parse_method(o.methods.front());
  cfg.mode = parse_mode(o.mode);
  if (!o.features.empty()) cfg.r = o.features.front();
  cfg.epsilon = o.epsilon;
  cfg.C = o.C;
  cfg.seed = o.seed;
  cfg.sketch_rows = o.t;
  cfg.chunk_fraction = o.chunk;
  cfg.kkt_tol = o.kkt_tol;
  cfg.meb_delta = o.delta;
  if (cfg.method == Method::rfe && cfg.mode == Mode::unsupervised) throw InvalidArgument("rfe requires supervised mode");
  return cfg;
}

CvConfig cv_config(const Options& o) {
  CvConfig cfg;
  cfg.methods.clear();
  for (const auto& m : o.methods) cfg.methods.push_back(parse_method(m));
  if (!o.features.empty()) cfg.r_values = o.features;
  cfg.mode = parse_mode(o.mode);
  cfg.C = o.C;
  cfg.folds = o.folds;
  cfg.repeats = o.repeats;
  cfg.seed = o.seed;
  cfg.sketch_rows = o.t;
  cfg.chunk_fraction = o.chunk;
  cfg.kkt_tol = o.kkt_tol;
  cfg.threads = o.threads;
  return cfg;
}

int cmd_select(const Options& o) {
  const SelectionConfig cfg = selection_config(o);
  const LabeledDataset data = load(o);
  const auto start = std::chrono::steady_clock::now();
  const SelectionReport report = run_selection(data, cfg);
  const BoundReport bounds = verify_margin_bound(report);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  emit(selection_json(report, bounds, wall), o.out);
  return 0;
}

int cmd_cv(const Options& o) {
  CvConfig cfg = cv_config(o);
  const LabeledDataset data = load(o);
  emit(cv_json(run_cv(data, cfg)), o.out);
  return 0;
}

int cmd_feature_freq(const Options& o) {
  CvConfig cfg = cv_config(o);
  if (cfg.methods.size() != 1 || cfg.r_values.size() != 1)
    throw InvalidArgument("feature-freq needs exactly one --method and one --features value");
  cfg.include_full_baseline = false;
  cfg.record_selections = true;
  const LabeledDataset data = load(o);
  const CvStats stats = run_cv(data, cfg);
  const CvCell& cell = stats.cells.front();
  const auto ranked = feature_frequency(cell);
  std::printf("%s r=%lld folds=%lld skipped=%lld\n", cell.method.c_str(), static_cast<long long>(cell.r),
              static_cast<long long>(cell.evaluated), static_cast<long long>(cell.skipped));
  std::printf("%6s %8s %7s\n", "rank", "feature", "count");
  for (std::size_t k = 0; k < ranked.size() && static_cast<Index>(k) < o.top; ++k)
    std::printf("%6zu %8lld %7lld\n", k + 1, static_cast<long long>(ranked[k].index + 1),
                static_cast<long long>(ranked[k].count));
  if (!o.out.empty()) emit(feature_frequency_json(cell, o.top), o.out);
  return 0;
}

int cmd_synth(const Options& o) {
  if (o.out.empty()) throw InvalidArgument("--out is required");
  const LabeledDataset data = o.rank > 0 ? gen_low_rank(o.n, o.d, o.rank, o.seed) : gen_synthetic(o.n, o.d, o.k, o.seed);
  save_dataset(data, o.out);
  return 0;
}

int verify_spectral(const Options& o) {
  if (o.methods.size() != 1) throw InvalidArgument("exactly one --method is allowed here");
  const Method method = parse_method(o.methods.front());
  if (method != Method::bss && method != Method::leverage)
    throw InvalidArgument("verify --bound spectral supports bss and leverage");
  const Index d = o.dim > 0 ? o.dim : 4 * o.r;
  if (o.ell < 1 || o.r <= o.ell || d < o.ell) throw InvalidArgument("need 1 <= l < r and d >= l");
  const double root = std::sqrt(static_cast<double>(o.ell) / static_cast<double>(o.r));
  const double bound = 3.0 * root;

  json trials = json::array();
  Index passed = 0;
  for (Index k = 0; k < o.trials; ++k) {
    const std::uint64_t seed = derive_seed(o.seed, static_cast<std::uint64_t>(k));
    Rng rng(seed);
    const MatrixXd v = orthonormal_basis(gaussian_matrix<double>(d, o.ell, rng));
    const SamplingOperator<double> op =
        method == Method::bss ? bss_select(v, o.r) : leverage_select(v, o.r, derive_seed(seed, 1));
    const double err = op.spectral_error(v);
    const Eigen::VectorXd sv = Eigen::JacobiSVD<MatrixXd>(op.sample_rows(v)).singularValues();
    const bool ok = err <= bound;
    passed += ok ? 1 : 0;
    trials.push_back({{"trial", k},
                      {"seed", seed},
                      {"spectral_error", err},
                      {"sigma_min", sv.minCoeff()},
                      {"sigma_max", sv.maxCoeff()},
                      {"pass", ok}});
  }
  json out = {{"schema", kSchema},
              {"bound", "spectral"},
              {"method", to_string(method)},
              {"l", o.ell},
              {"r", o.r},
              {"d", d},
              {"threshold", bound},
              {"sigma_interval", {1.0 - root, 1.0 + root}},
              {"trials", trials},
              {"passed", passed},
              {"total", o.trials}};
  emit(out, o.out);
  return 0;
}

int cmd_verify(const Options& o) {
  if (o.bound == "spectral") return verify_spectral(o);
  const SelectionConfig cfg = selection_config(o);
  const LabeledDataset data = load(o);
  const SelectionReport report = run_selection(data, cfg);
  const BoundReport bounds = verify_margin_bound(report);
  json out = {{"schema", kSchema},
              {"bound", o.bound},
              {"method", to_string(report.method)},
              {"mode", to_string(report.mode)},
              {"r", report.r},
              {"spectral_error", report.spectral_error ? json(*report.spectral_error) : json(nullptr)},
              {"margin_full", report.margin_full},
              {"margin_sampled", report.margin_sampled}};
  if (o.bound == "margin") {
    out["check"] = bound_json(bounds)["margin"];
    out["radius_margin_ratio"] = bound_json(bounds)["radius_margin_ratio"];
  } else {
    out["radius_full"] = report.radius_full ? json(*report.radius_full) : json(nullptr);
    out["radius_sampled"] = report.radius_sampled ? json(*report.radius_sampled) : json(nullptr);
    out["radius_spectral_error"] = report.radius_spectral_error ? json(*report.radius_spectral_error) : json(nullptr);
    out["check"] = bound_json(bounds)["radius"];
  }
  emit(out, o.out);
  return 0;
}

void add_data_flags(CLI::App* app, Options& o) {
  app->add_option("--data", o.data, "svmlight file, or .csv")->check(CLI::ExistingFile);
  app->add_flag("--csv-label-first", o.csv_label_first, "CSV label is the first column (default: last)");
  app->add_option("--out", o.out, "output path (default: stdout)");
}

void add_selection_flags(CLI::App* app, Options& o, bool lists) {
  auto* m = app->add_option("--method", o.methods, "bss|leverage|approx-bss|uniform|rrqr|rfe");
  auto* f = app->add_option("--features", o.features, "number of selected features r")->check(CLI::PositiveNumber);
  if (lists) {
    m->delimiter(',');
    f->delimiter(',');
  } else {
    m->expected(1);
    f->expected(1);
  }
  app->add_option("--mode", o.mode, "supervised|unsupervised")->check(CLI::IsMember({"supervised", "unsupervised"}));
  app->add_option("--C", o.C, "SVM box constraint")->check(CLI::PositiveNumber);
  app->add_option("--epsilon", o.epsilon, "accuracy for the default r")->check(CLI::Range(1e-12, 1.0 - 1e-12));
  app->add_option("--seed", o.seed, "random seed");
  app->add_option("--t", o.t, "sketch rows for approx-bss (default 4 * rank)")->check(CLI::NonNegativeNumber);
  app->add_option("--kkt-tol", o.kkt_tol, "solver stopping tolerance")->check(CLI::PositiveNumber);
  app->add_option("--chunk", o.chunk, "fraction of features RFE drops per round")->check(CLI::Range(0.0, 1.0 - 1e-12));
}

void add_cv_flags(CLI::App* app, Options& o) {
  app->add_option("--folds", o.folds, "folds per repeat")->check(CLI::Range(Index{2}, Index{1} << 40));
  app->add_option("--repeats", o.repeats, "repeats")->check(CLI::Range(Index{1}, Index{1} << 40));
  app->add_option("--threads", o.threads, "worker threads (0: all cores)");
}

int fail(const std::string& kind, const std::string& message, int code, const std::string& out) {
  const std::string text = error_json(kind, message, code).dump(2) + "\n";
  std::cerr << text;
  if (!out.empty()) {
    std::ofstream f(out, std::ios::binary);
    if (f) f << text;
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Feature selection for linear SVMs"};
  app.require_subcommand(1);

  auto* select = app.add_subcommand("select", "select features and check the margin and radius bounds");
  add_data_flags(select, o);
  add_selection_flags(select, o, false);
  select->add_option("--delta", o.delta, "enclosing-ball accuracy")->check(CLI::Range(1e-12, 1.0 - 1e-12));

  auto* cv = app.add_subcommand("cv", "repeated k-fold cross-validation over methods and r values");
  add_data_flags(cv, o);
  add_selection_flags(cv, o, true);
  add_cv_flags(cv, o);

  auto* freq = app.add_subcommand("feature-freq", "most frequently selected features across CV training folds");
  add_data_flags(freq, o);
  add_selection_flags(freq, o, false);
  add_cv_flags(freq, o);
  freq->add_option("--top", o.top, "rows to print")->check(CLI::PositiveNumber);

  auto* synth = app.add_subcommand("synth", "write a synthetic dataset");
  synth->add_option("--n", o.n, "points")->check(CLI::Range(Index{2}, Index{1} << 40));
  synth->add_option("--d", o.d, "features")->check(CLI::PositiveNumber);
  synth->add_option("--k", o.k, "informative features")->check(CLI::NonNegativeNumber);
  synth->add_option("--rank", o.rank, "low-rank separable data of this rank instead")->check(CLI::NonNegativeNumber);
  synth->add_option("--seed", o.seed, "random seed");
  synth->add_option("--out", o.out, "output path (.csv for CSV)");

  auto* verify = app.add_subcommand("verify", "evaluate the spectral, margin or radius bound");
  add_data_flags(verify, o);
  add_selection_flags(verify, o, false);
  verify->add_option("--bound", o.bound, "spectral|margin|radius")->check(CLI::IsMember({"spectral", "margin", "radius"}));
  verify->add_option("--l", o.ell, "columns of the random orthonormal V")->check(CLI::PositiveNumber);
  verify->add_option("--r", o.r, "selected columns")->check(CLI::PositiveNumber);
  verify->add_option("--d", o.dim, "rows of V (default 4 r)")->check(CLI::NonNegativeNumber);
  verify->add_option("--trials", o.trials, "random trials")->check(CLI::PositiveNumber);
  verify->add_option("--delta", o.delta, "enclosing-ball accuracy")->check(CLI::Range(1e-12, 1.0 - 1e-12));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), kUsage, "");
  }

  try {
    if (*select) return cmd_select(o);
    if (*cv) return cmd_cv(o);
    if (*freq) return cmd_feature_freq(o);
    if (*synth) return cmd_synth(o);
    if (*verify) return cmd_verify(o);
  } catch (const InvalidArgument& e) {
    return fail("usage", e.what(), kUsage, o.out);
  } catch (const DataError& e) {
    return fail("data", e.what(), kData, o.out);
  } catch (const NumericalError& e) {
    return fail("numerical", e.what(), kNumerical, o.out);
  } catch (const std::exception& e) {
    return fail("numerical", e.what(), kNumerical, o.out);
  }
  return kUsage;
}
