#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path& workdir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "marginsparse_cli_test";
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string path(const std::string& name) { return (workdir() / name).string(); }

int run(const std::string& args) {
  const std::string cmd = std::string(MARGINSPARSE_CLI) + " " + args + " 2>" + path("stderr.txt");
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json load(const std::string& file) { return json::parse(slurp(file)); }

void synth() {
  static bool done = false;
  if (done) return;
  REQUIRE(run("synth --n 40 --d 50 --k 5 --seed 1 --out " + path("data.svm")) == 0);
  done = true;
}

}  // namespace

TEST_CASE("cli: synth is reproducible") {
  REQUIRE(run("synth --n 20 --d 8 --k 2 --seed 4 --out " + path("a.svm")) == 0);
  REQUIRE(run("synth --n 20 --d 8 --k 2 --seed 4 --out " + path("b.svm")) == 0);
  CHECK(slurp(path("a.svm")) == slurp(path("b.svm")));
  CHECK(!slurp(path("a.svm")).empty());
}

TEST_CASE("cli: select writes a deterministic report") {
  synth();
  const std::string base = "select --data " + path("data.svm") + " --method bss --features 30 --out ";
  REQUIRE(run(base + path("s1.json")) == 0);
  REQUIRE(run(base + path("s2.json")) == 0);
  json a = load(path("s1.json"));
  json b = load(path("s2.json"));
  CHECK(a["schema"] == "margin-sparse/1");
  CHECK(a["selected_indices"].size() == 30);
  CHECK(a["weights"].size() == 30);
  for (const auto& key : {"margin_thm1_or_3", "radius_thm5"}) {
    const std::string s = a["bound_checks"][key];
    CHECK((s == "pass" || s == "fail" || s == "na"));
  }
  a.erase("wall_time_s");
  b.erase("wall_time_s");
  CHECK(a == b);
}

TEST_CASE("cli: baselines report null weights") {
  synth();
  REQUIRE(run("select --data " + path("data.svm") + " --method rrqr --features 5 --out " + path("q.json")) == 0);
  const json q = load(path("q.json"));
  CHECK(q["weights"].is_null());
  CHECK(q["selected_indices"].size() == 5);
}

TEST_CASE("cli: usage and data errors") {
  synth();
  CHECK(run("select --data " + path("data.svm") + " --method rfe --mode unsupervised --features 5 --out " +
            path("e.json")) == 2);
  CHECK(load(path("e.json"))["error"]["kind"] == "usage");
  CHECK(run("select --data " + path("data.svm") + " --method nope --features 5") == 2);
  CHECK(run("frobnicate") == 2);
  std::ofstream(path("bad.svm")) << "3 1:1\n";
  CHECK(run("select --data " + path("bad.svm") + " --method bss --features 5") == 3);
}

TEST_CASE("cli: verify spectral") {
  REQUIRE(run("verify --bound spectral --l 2 --r 16 --trials 50 --out " + path("v.json")) == 0);
  const json v = load(path("v.json"));
  CHECK(v["passed"] == 50);
  CHECK(v["total"] == 50);
}

TEST_CASE("cli: cv and feature-freq") {
  std::ofstream(path("four.svm")) << "+1 1:2 2:0.1\n+1 1:3 2:-0.1\n-1 1:-2 2:0.2\n-1 1:-3 2:-0.2\n";
  REQUIRE(run("cv --data " + path("four.svm") + " --method rrqr --features 1 --folds 2 --repeats 1 --out " +
              path("cv.json")) == 0);
  const json cv = load(path("cv.json"));
  CHECK(cv["schema"] == "margin-sparse/1");
  CHECK(cv["cells"].size() == 2);
  for (const auto& cell : cv["cells"]) CHECK(cell["evaluated"].get<int>() + cell["skipped"].get<int>() == 2);

  synth();
  REQUIRE(run("feature-freq --data " + path("data.svm") + " --method bss --features 30 --folds 2 --repeats 1 --out " +
              path("ff.json")) == 0);
  const json ff = load(path("ff.json"));
  CHECK(ff["schema"] == "margin-sparse/1");
}
