#include "doctest.h"

#include "smoothridge/cli.hpp"
#include "smoothridge/simlab.hpp"

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

using namespace smoothridge;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "smoothridge");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("smoothridge_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::size_t line_count(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) ++n;
  return n;
}

fs::path sample_csv() {
  const fs::path dir = fresh_dir("data");
  SimConfig cfg;
  cfg.n = 60;
  const SimData d = generate(cfg, 0);
  const fs::path file = dir / "data.csv";
  std::ofstream out(file);
  write_dataset_csv(out, d.data);
  return file;
}

}  // namespace

TEST_CASE("grid and domain parsing") {
  const auto g = parse_grid_spec("1e-4:1:5");
  REQUIRE(g.size() == 5);
  CHECK(g.front() == 1e-4);
  CHECK(g.back() == 1.0);
  CHECK_THROWS(parse_grid_spec("1:2"));
  CHECK_THROWS(parse_grid_spec("0:1:3"));
  const auto d = parse_domain("-2:2");
  REQUIRE(d.size() == 1);
  CHECK(d[0].lo == -2.0);
  CHECK(parse_domain("0:1,0:2").size() == 2);
  CHECK_THROWS(parse_domain("1:0"));
}

TEST_CASE("missing dataset exits with a usage error") {
  const Run r = run({"fit", "--method", "ridge", "--select", "/nonexistent/nowhere.csv", "--out", fresh_dir("missing").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("dataset: not found") != std::string::npos);
  CHECK(r.err.find('\n') == r.err.size() - 1);
}

TEST_CASE("unknown subcommand and bad flags") {
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"fit", "--method", "lasso", sample_csv().string()}).code == 2);
  CHECK(run({"fit", "--method", "svr", "--gamma1", "0.1", sample_csv().string()}).code == 2);
}

TEST_CASE("ridge fit writes its artifacts") {
  const fs::path data = sample_csv();
  const fs::path out = fresh_dir("ridge");
  const Run r = run({"fit", "--method", "ridge", "--select", data.string(), "--out", out.string()});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(out / "fit.json"));
  CHECK(fs::exists(out / "gic.json"));
  CHECK(fs::exists(out / "curve.csv"));
  CHECK(line_count(out / "curve.csv") == 513);

  const fs::path again = fresh_dir("ridge2");
  REQUIRE(run({"fit", "--method", "ridge", "--select", data.string(), "--out", again.string()}).code == 0);
  for (const char* f : {"fit.json", "gic.json", "curve.csv"}) CHECK(slurp(out / f) == slurp(again / f));
}

TEST_CASE("svr fit with fixed gammas") {
  const fs::path out = fresh_dir("svr");
  const Run r = run({"fit", "--method", "svr", "--gamma1", "0.01", "--gamma2", "0.001", "--boundary", "exact", "--m", "12",
                     sample_csv().string(), "--out", out.string()});
  REQUIRE(r.code == 0);
  const std::string fit = slurp(out / "fit.json");
  CHECK(fit.find("\"lambda\"") != std::string::npos);
  CHECK(fit.find("objective_trace") != std::string::npos);
}

TEST_CASE("svr fit without gammas scans the default grid") {
  const fs::path out = fresh_dir("svrscan");
  const Run r = run({"fit", "--method", "svr", "--m", "10", sample_csv().string(), "--out", out.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("scan") != std::string::npos);
  CHECK(line_count(out / "scan.csv") == 1 + 49);
}

TEST_CASE("scan on a 2x2 grid") {
  const fs::path out = fresh_dir("scan");
  const Run r = run({"scan", sample_csv().string(), "--gamma1-grid", "1e-3:1e-1:2", "--gamma2-grid", "1e-3:1e-2:2", "--m",
                     "10", "--truth", "peak10", "--out", out.string()});
  REQUIRE(r.code == 0);
  CHECK(line_count(out / "scan.csv") == 5);
  CHECK(fs::exists(out / "fit.json"));
}

TEST_CASE("basis dump") {
  const fs::path out = fresh_dir("basis");
  const Run r = run({"basis-dump", "--m", "5", "--domain", "-2:2", "--out", out.string()});
  REQUIRE(r.code == 0);
  CHECK(line_count(out / "basis.csv") == 6);
  const std::string text = slurp(out / "basis.csv");
  CHECK(text.find("-2") != std::string::npos);
}

TEST_CASE("simulate is reproducible") {
  const fs::path a = fresh_dir("simA");
  const fs::path b = fresh_dir("simB");
  const std::vector<std::string> common{"simulate", "--function", "chirp11", "--n", "50", "--alpha", "0.05", "--trials", "2",
                                        "--seed", "1", "--gamma1-grid", "1e-3:1e-1:2", "--gamma2-grid", "1e-3:1e-1:2"};
  auto args_a = common, args_b = common;
  args_a.insert(args_a.end(), {"--out", a.string()});
  args_b.insert(args_b.end(), {"--out", b.string(), "--threads", "1"});
  REQUIRE(run(args_a).code == 0);
  REQUIRE(run(args_b).code == 0);
  for (const char* f : {"report.json", "trials.csv", "curve_svr.csv", "curve_ridge.csv"}) {
    CHECK(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
}

TEST_CASE("help lists flags with defaults") {
  const Run fit = run({"fit", "--help"});
  CHECK(fit.code == 0);
  for (const char* flag : {"--method", "--gamma1-grid", "--gamma2-grid", "--boundary", "--gic-mode", "--threads", "--out"})
    CHECK(fit.out.find(flag) != std::string::npos);
  CHECK(fit.out.find("1e-6:1:7") != std::string::npos);
  const Run sim = run({"simulate", "--help"});
  CHECK(sim.code == 0);
  CHECK(sim.out.find("--trials") != std::string::npos);
  CHECK(sim.out.find("20") != std::string::npos);
}
