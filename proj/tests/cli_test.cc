#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct Invocation {
  int status = -1;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / ("mcd_cli_" + std::string(info->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  Invocation mcd(const std::string& args) const {
    const auto out = dir_ / "stdout.txt";
    const auto err = dir_ / "stderr.txt";
    const std::string cmd = std::string(MCD_CLI_PATH) + " " + args + " >" + out.string() +
                            " 2>" + err.string();
    const int raw = std::system(cmd.c_str());
    Invocation r;
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  void write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
  }

  // gen -> split -> learn into the temp dir.
  void pipeline(const std::string& tag) const {
    ASSERT_EQ(mcd("gen --users 150 --edges 700 --actions 12 --repeat-rate 0.3 --adopt 0.15 "
                  "--seed 5 --out-graph " + path("g.txt") + " --out-log " + path("log.txt"))
                  .status,
              0);
    ASSERT_EQ(mcd("split --log " + path("log.txt") + " --test-fraction 0.25 --seed 3 --out-train " +
                  path("train.txt") + " --out-test " + path("test.txt"))
                  .status,
              0);
    ASSERT_EQ(mcd("learn --graph " + path("g.txt") + " --log " + path("train.txt") + " --out " +
                  path("params" + tag + ".txt"))
                  .status,
              0);
  }

  std::string solve_args(const std::string& tag) const {
    return "solve --graph " + path("g.txt") + " --params " + path("params" + tag + ".txt") +
           " --log " + path("test.txt");
  }

  fs::path dir_;
};

std::string without_time(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line)) {
    if (line.rfind("time_s=", 0) != 0) out += line + '\n';
  }
  return out;
}

TEST_F(CliTest, VersionIsSemantic) {
  const auto r = mcd("--version");
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out.rfind("1.0.0", 0), 0u);
}

TEST_F(CliTest, UnknownSubcommandIsUsageError) {
  const auto r = mcd("frobnicate");
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
}

TEST_F(CliTest, MissingRequiredFlagIsUsageError) {
  EXPECT_EQ(mcd("learn --graph /nonexistent").status, 2);
  EXPECT_EQ(mcd("").status, 2);
}

TEST_F(CliTest, ZeroKIsDomainError) {
  pipeline("");
  const auto r = mcd(solve_args("") + " --mode stream --constraint k=0 --out " + path("r.txt"));
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.err.find("k must be >= 1"), std::string::npos);
}

TEST_F(CliTest, MalformedConstraintIsUsageError) {
  pipeline("");
  EXPECT_EQ(mcd(solve_args("") + " --constraint q=3 --out " + path("r.txt")).status, 2);
  EXPECT_EQ(mcd(solve_args("") + " --constraint budget=3 --out " + path("r.txt")).status, 2);
}

TEST_F(CliTest, MalformedLogNamesLine) {
  write("bad.txt", "1 7 0\n1 7 x\n");
  const auto r = mcd("stats --log " + path("bad.txt"));
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.err.find("line 2"), std::string::npos);
}

TEST_F(CliTest, StatsPrintsRates) {
  write("log.txt", "1 5 0\n1 5 4\n2 6 0\n");
  const auto r = mcd("stats --log " + path("log.txt"));
  ASSERT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("5\t1\t2\t0.500000"), std::string::npos);
  EXPECT_NE(r.out.find("6\t1\t1\t0.000000"), std::string::npos);
}

TEST_F(CliTest, SolveWritesResultAndManifest) {
  pipeline("");
  const auto r = mcd(solve_args("") + " --mode stream --constraint k=5 --out " + path("r.txt"));
  ASSERT_EQ(r.status, 0) << r.err;
  const auto result = slurp(path("r.txt"));
  EXPECT_EQ(result.rfind("value=", 0), 0u);
  EXPECT_NE(result.find("passes=1\n"), std::string::npos);
  const auto manifest = slurp(path("r.txt.manifest"));
  for (const char* key : {"version=1.0.0", "command=solve", "argv=", "input.graph.sha256=",
                          "input.log.sha256=", "mode=stream", "constraint=k=5", "elapsed_s="}) {
    EXPECT_NE(manifest.find(key), std::string::npos) << key;
  }
}

TEST_F(CliTest, KnapsackAndBruteModes) {
  pipeline("");
  std::ifstream test(path("test.txt"));
  std::ostringstream weights;
  std::string line;
  while (std::getline(test, line)) {
    std::istringstream fields(line);
    std::string user;
    if (fields >> user) weights << user << " 2\n";
  }
  write("w.txt", weights.str());
  const auto r = mcd(solve_args("") + " --constraint budget=6 --weights " + path("w.txt") +
                     " --out " + path("k.txt"));
  EXPECT_EQ(r.status, 0) << r.err;
  const auto refused = mcd(solve_args("") + " --mode brute --constraint k=40 --limit 100 --out " +
                           path("b.txt"));
  EXPECT_EQ(refused.status, 1);
}

TEST_F(CliTest, PipelineIsDeterministic) {
  pipeline("a");
  const auto first_log = slurp(path("log.txt"));
  pipeline("b");
  EXPECT_EQ(first_log, slurp(path("log.txt")));
  EXPECT_EQ(slurp(path("paramsa.txt")), slurp(path("paramsb.txt")));
  for (const char* mode : {"stream", "celf"}) {
    ASSERT_EQ(mcd(solve_args("a") + " --mode " + mode + " --constraint k=8 --shuffle 4 --out " +
                  path("ra.txt"))
                  .status,
              0);
    ASSERT_EQ(mcd("--threads 3 " + solve_args("b") + " --mode " + mode +
                  " --constraint k=8 --shuffle 4 --out " + path("rb.txt"))
                  .status,
              0);
    EXPECT_EQ(without_time(slurp(path("ra.txt"))), without_time(slurp(path("rb.txt")))) << mode;
  }
}

TEST_F(CliTest, ScanDumpAndEvaluate) {
  pipeline("");
  const auto scan = mcd("scan --graph " + path("g.txt") + " --params " + path("params.txt") +
                        " --log " + path("test.txt") + " --dump " + path("dump.txt"));
  ASSERT_EQ(scan.status, 0) << scan.err;
  EXPECT_NE(scan.out.find("credit_entries"), std::string::npos);
  EXPECT_TRUE(fs::exists(path("dump.txt.manifest")));

  const auto eval = mcd("evaluate --graph " + path("g.txt") + " --params " + path("params.txt") +
                        " --train " + path("train.txt") + " --test " + path("test.txt") +
                        " --seed-size 5 --ic-sims 200 --ic-select-sims 20 --report " +
                        path("rep.tsv") + " --plot " + path("plot.csv"));
  ASSERT_EQ(eval.status, 0) << eval.err;
  EXPECT_EQ(slurp(path("rep.tsv")).rfind("action\ttrue_count\tmcd_estimate\tcd_estimate", 0), 0u);
  EXPECT_TRUE(fs::exists(path("plot.csv")));
}

TEST_F(CliTest, BenchReportsPasses) {
  const auto r = mcd("bench --users 120 --edges 500 --actions 10 --k 3,5");
  ASSERT_EQ(r.status, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    std::istringstream f(line);
    std::string k, mode, value, passes;
    f >> k >> mode >> value >> passes;
    if (mode == "stream") {
      EXPECT_EQ(passes, "1");
      ++rows;
    } else if (mode == "celf") {
      EXPECT_GE(std::stoul(passes), 1u);
      ++rows;
    }
  }
  EXPECT_EQ(rows, 4);
}

}  // namespace
