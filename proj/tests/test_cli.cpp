#include "mbn/cli.hpp"
#include "mbn/io.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace mbn;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "mbn");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("mbn_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter_++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

int exit_status(const std::string& cmd) {
  const int raw = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

}  // namespace

TEST(StateJson, RoundTrip) {
  const auto st = random_mixed(Bipartition(2, 3), 4);
  std::stringstream buf;
  io::write_state(buf, st.rho, st.bip);
  const auto back = io::read_state(buf);
  EXPECT_EQ(back.bip, st.bip);
  EXPECT_LT((back.rho.matrix() - st.rho.matrix()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(StateJson, SchemaErrors) {
  const std::vector<std::string> docs{
      R"([1,2])",
      R"({"dim": 2, "bipartition": [2], "matrix": []})",
      R"({"dim": 2, "bipartition": [1, 2], "matrix": [[[1,0],[0,0]],[[0,0],[0,0]]]})",
      R"({"dim": 2, "bipartition": [2, 2], "matrix": [[[0.5,0],[0,0]],[[0,0],[0.5,0]]]})",
      R"({"dim": 2, "bipartition": [2, 1], "matrix": [[[0.5,0],[0,0]],[[0,0]]]})",
      R"({"dim": 2, "bipartition": [2, 1], "matrix": [[[0.5,0],[0,"x"]],[[0,0],[0.5,0]]]})",
      R"({"dim": 2)"};
  for (const auto& d : docs) {
    std::istringstream in(d);
    EXPECT_THROW(io::read_state(in), Error) << d;
  }
  std::istringstream broken(R"({"dim": 2)");
  try {
    io::read_state(broken);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::parse);
  }
}

TEST(Csv, TimeSeriesFormat) {
  TimeSeries ts({0.0, 0.5}, "p");
  ts.add("mbn", {0.125, 1.0 / 3.0});
  std::ostringstream out;
  io::write_csv(out, ts);
  EXPECT_EQ(out.str(), "p,mbn\n0,0.125\n0.5,0.333333333333\n");
}

TEST(Cli, CatalogListAndExport) {
  const auto list = run({"catalog", "list"});
  EXPECT_EQ(list.code, 0);
  EXPECT_NE(list.out.find("toth_4qubit\n"), std::string::npos);
  TempDir dir;
  const auto path = dir.file("bell.json");
  EXPECT_EQ(run({"catalog", "export", "bell", "--out", path}).code, 0);
  const auto m = run({"measure", path});
  ASSERT_EQ(m.code, 0) << m.err;
  const auto report = nlohmann::json::parse(m.out);
  EXPECT_NEAR(report["mbn"].get<double>(), 1.0, 1e-12);
  EXPECT_NEAR(report["negativity"].get<double>(), 0.5, 1e-12);
  EXPECT_NEAR(report["threshold"].get<double>(), 5.0, 1e-12);
  EXPECT_NEAR(report["violation"].get<double>(), 2.0, 1e-12);
  EXPECT_EQ(report["params"]["m"].get<int>(), 4);
}

TEST(Cli, MeasureOverrides) {
  TempDir dir;
  const auto path = dir.file("me.json");
  ASSERT_EQ(run({"catalog", "export", "max_entangled", "--dims", "3", "4", "--out", path}).code, 0);
  const auto m = run({"measure", path, "--m", "2", "--a", "0.5", "--b", "0.25"});
  ASSERT_EQ(m.code, 0) << m.err;
  const auto report = nlohmann::json::parse(m.out);
  EXPECT_NEAR(report["mbn"].get<double>(), 1.0, 1e-12);
  EXPECT_EQ(report["bipartition"][1].get<int>(), 4);
  EXPECT_NEAR(report["params"]["a"].get<double>(), 0.5, 0.0);
}

TEST(Cli, QuasiStatesNeedFlag) {
  TempDir dir;
  const auto path = dir.file("quasi.json");
  write_file(path, R"({"dim": 4, "bipartition": [2, 2], "matrix": [
    [[0.6,0],[0,0],[0,0],[0,0]], [[0,0],[0.5,0],[0,0],[0,0]],
    [[0,0],[0,0],[0,0],[0,0]], [[0,0],[0,0],[0,0],[-0.1,0]]]})");
  EXPECT_EQ(run({"measure", path}).code, 2);
  EXPECT_EQ(run({"measure", path, "--quasi"}).code, 0);
}

TEST(Cli, InputErrorsExitTwo) {
  TempDir dir;
  const auto bad = dir.file("bad.json");
  write_file(bad, "{ not json");
  EXPECT_EQ(run({"measure", bad}).code, 2);
  EXPECT_EQ(run({"measure", dir.file("missing.json")}).code, 2);
  const auto nonherm = dir.file("nonherm.json");
  write_file(nonherm, R"({"dim": 2, "bipartition": [2, 1], "matrix": [[[0.5,0],[0.2,0]],[[0,0],[0.5,0]]]})");
  EXPECT_EQ(run({"measure", nonherm}).code, 2);
  EXPECT_EQ(run({"nonsense"}).code, 2);
  EXPECT_EQ(run({"example1", "--p-step", "abc"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
}

TEST(Cli, DomainErrorsExitOne) {
  EXPECT_EQ(run({"catalog", "export", "horodecki_qutrit", "--alpha", "7"}).code, 1);
  EXPECT_EQ(run({"catalog", "export", "ghz"}).code, 1);
  EXPECT_EQ(run({"example2", "--t2", "0"}).code, 1);
  EXPECT_EQ(run({"example3", "--form", "sideways"}).code, 1);
  TempDir dir;
  EXPECT_EQ(run({"tomo", "--k", "5", "--out-dir", dir.file("t")}).code, 1);
  EXPECT_EQ(run({"tomo", "--basis", "zeta", "--out-dir", dir.file("t")}).code, 1);
}

TEST(Cli, HelpMentionsShotsPerObservable) {
  const auto h = run({"tomo", "--help"});
  EXPECT_EQ(h.code, 0);
  EXPECT_NE(h.out.find("shots per"), std::string::npos);
}

TEST(Cli, Example1Output) {
  const auto r = run({"example1", "--p-step", "0.25"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "p,mbn,negativity");
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 6);
  const auto summary = nlohmann::json::parse(r.err);
  EXPECT_TRUE(summary["p_star"].contains("mbn"));
}

TEST(Cli, Example3BothForms) {
  const auto r = run({"example3", "--t-end", "0.05", "--points", "6", "--window", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "t,mbn_standard,negativity_standard,mbn_literal,negativity_literal");
  const auto summary = nlohmann::json::parse(r.err);
  EXPECT_TRUE(summary["forms"].contains("literal"));
  const auto one = run({"example3", "--form", "standard", "--t-end", "0.05", "--points", "6"});
  EXPECT_EQ(one.out.substr(0, one.out.find('\n')), "t,mbn,negativity");
}

TEST(Cli, TomoFilesAreThreadIndependent) {
  TempDir dir;
  const auto a = run({"tomo", "--k", "2", "--n", "50", "--trials", "9", "--out-dir", dir.file("a")});
  const auto b = run({"tomo", "--k", "2", "--n", "50", "--trials", "9", "--threads", "3", "--out-dir", dir.file("b")});
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(b.code, 0) << b.err;
  for (const auto* name : {"tomo_k2_n50.csv", "tomo_k2_n50_hist_mbn.csv", "tomo_k2_n50_hist_negativity.csv"}) {
    const auto x = slurp(dir.file(std::string("a/") + name));
    EXPECT_FALSE(x.empty()) << name;
    EXPECT_EQ(x, slurp(dir.file(std::string("b/") + name))) << name;
  }
  EXPECT_EQ(slurp(dir.file("a/tomo_k2_n50.csv")).substr(0, 32), "trial,measure,E_true,E_expt,delt");
  const auto summary = nlohmann::json::parse(a.out);
  EXPECT_EQ(summary["trials"].get<int>(), 9);
}

TEST(Binary, ExitCodes) {
  const std::string exe = MBN_CLI_PATH;
  TempDir dir;
  EXPECT_EQ(exit_status(exe + " catalog list"), 0);
  EXPECT_EQ(exit_status(exe + " measure " + dir.file("missing.json")), 2);
  EXPECT_EQ(exit_status(exe + " catalog export horodecki --alpha 9"), 1);
  EXPECT_EQ(exit_status(exe + " --bogus"), 2);
}

TEST(Binary, ReproducibleOutput) {
  const std::string exe = MBN_CLI_PATH;
  TempDir dir;
  const auto p1 = dir.file("one.csv");
  const auto p2 = dir.file("two.csv");
  ASSERT_EQ(exit_status(exe + " example2 --points 31 --out " + p1), 0);
  ASSERT_EQ(exit_status(exe + " example2 --points 31 --out " + p2), 0);
  EXPECT_EQ(slurp(p1), slurp(p2));
  EXPECT_FALSE(slurp(p1).empty());
}
