#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gradspace/cli.hpp"

using namespace gradspace;
namespace fs = std::filesystem;

namespace {

const fs::path problems = GRADSPACE_PROBLEMS_DIR;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("gradspace_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return cli::run(args, out_, err_);
  }

  fs::path write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

}  // namespace

TEST_F(CliTest, ProblemFilesRoundTrip) {
  for (const auto& entry : fs::directory_iterator(problems)) {
    const auto pf = cli::parse_problem_text(slurp(entry.path()));
    const std::string once = cli::serialize_problem(pf);
    EXPECT_EQ(cli::serialize_problem(cli::parse_problem_text(once)), once) << entry.path();
  }
}

TEST_F(CliTest, SolveThenCertifyToyComplex) {
  const std::string out = (dir_ / "toy").string();
  ASSERT_EQ(run({"solve", (problems / "toy_complex.problem").string(), "--out", out}), 0) << err_.str();
  const auto report = nlohmann::json::parse(slurp(fs::path(out) / "report.json"));
  EXPECT_EQ(report["status"], "ok");
  EXPECT_NEAR(report["objective"].get<double>(), 1.0, 1e-8);
  EXPECT_EQ(run({"certify", (problems / "toy_complex.problem").string(), "--out", out}), 0) << out_.str();
}

TEST_F(CliTest, OutputsAreDeterministic) {
  const std::string a = (dir_ / "a").string(), b = (dir_ / "b").string();
  const std::string prob = (problems / "hajlasz_dirichlet.problem").string();
  ASSERT_EQ(run({"solve", prob, "--out", a}), 0);
  ASSERT_EQ(run({"solve", prob, "--out", b}), 0);
  for (const auto& entry : fs::directory_iterator(a))
    EXPECT_EQ(slurp(entry.path()), slurp(fs::path(b) / entry.path().filename())) << entry.path().filename();
}

TEST_F(CliTest, MalformedProblemIsUsageErrorWithoutOutputs) {
  const auto bad = write("bad.problem", "{ \"problem\": \"dirichlet\", ");
  const fs::path out = dir_ / "none";
  EXPECT_EQ(run({"solve", bad.string(), "--out", out.string()}), 4);
  EXPECT_FALSE(fs::exists(out));
  const auto unknown = write("unknown.problem", R"({"problem": "dirichlet", "instance": "toy-complex", "colour": 1})");
  EXPECT_EQ(run({"solve", unknown.string(), "--out", out.string()}), 4);
  EXPECT_FALSE(fs::exists(out));
}

TEST_F(CliTest, UsageErrors) {
  const std::string prob = (problems / "toy_complex.problem").string();
  EXPECT_EQ(run({"rayleigh", prob, "--out", (dir_ / "x").string()}), 4);
  EXPECT_EQ(run({"solve", prob, "--format", "xml"}), 4);
  EXPECT_EQ(run({"solve", prob, "--tol", "-1"}), 4);
  EXPECT_EQ(run({"frobnicate"}), 4);
  EXPECT_EQ(run({}), 4);
  EXPECT_EQ(run({"solve", (dir_ / "missing.problem").string()}), 4);
  EXPECT_EQ(run({"--help"}), 0);
  EXPECT_NE(out_.str().find("selftest"), std::string::npos);
}

TEST_F(CliTest, InfeasibleObstacleExitsTwo) {
  const auto p = write("inf.problem", R"({
    "problem": "obstacle", "instance": "graph",
    "graph": { "vertices": 3, "edges": [[0, 1, 1], [1, 2, 1]] },
    "data": { "f": [0, 0, 0], "fixed": [true, false, true], "obstacle": [1, 0, 0] }
  })");
  const fs::path out = dir_ / "inf";
  EXPECT_EQ(run({"solve", p.string(), "--out", out.string()}), 2) << err_.str();
  const auto report = nlohmann::json::parse(slurp(out / "report.json"));
  EXPECT_EQ(report["status"], "infeasible");
}

TEST_F(CliTest, CorruptedMinimizerFailsCertification) {
  const std::string prob = (problems / "graph_path.problem").string();
  const fs::path out = dir_ / "g";
  ASSERT_EQ(run({"solve", prob, "--out", out.string()}), 0);
  std::string csv = slurp(out / "minimizer.csv");
  const auto pos = csv.find("\n1,");
  ASSERT_NE(pos, std::string::npos);
  const auto end = csv.find('\n', pos + 1);
  csv.replace(pos + 1, end - pos - 1, "1,0.9");
  std::ofstream(out / "minimizer.csv") << csv;
  EXPECT_EQ(run({"certify", prob, "--out", out.string()}), 5);
  EXPECT_NE(out_.str().find("FAIL"), std::string::npos);
}

TEST_F(CliTest, CertifyWithMissingArtifactsIsUsageError) {
  const std::string prob = (problems / "graph_path.problem").string();
  EXPECT_EQ(run({"certify", prob, "--out", (dir_ / "nothing").string()}), 4);
  const fs::path out = dir_ / "g";
  ASSERT_EQ(run({"solve", prob, "--out", out.string()}), 0);
  fs::remove(out / "gradient.csv");
  EXPECT_EQ(run({"certify", prob, "--out", out.string()}), 4);
}

TEST_F(CliTest, ZeroProblemCertifies) {
  const auto p = write("zero.problem", R"({
    "problem": "dirichlet", "instance": "graph",
    "graph": { "vertices": 3, "edges": [[0, 1, 1], [1, 2, 1]] },
    "data": { "f": [0, 0, 0], "fixed": [true, false, true] }
  })");
  const fs::path out = dir_ / "z";
  ASSERT_EQ(run({"solve", p.string(), "--out", out.string()}), 0) << err_.str();
  EXPECT_EQ(run({"certify", p.string(), "--out", out.string()}), 0) << out_.str();
  EXPECT_EQ(nlohmann::json::parse(slurp(out / "report.json"))["objective"].get<double>(), 0.0);
}

TEST_F(CliTest, AnnulusMatchesLogProfile) {
  const fs::path out = dir_ / "ann";
  ASSERT_EQ(run({"solve", (problems / "annulus.problem").string(), "--out", out.string()}), 0);
  std::ifstream in(out / "minimizer.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "i,j,value");
  const double h = 1.0 / 32.0;
  double err = 0.0;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string a, b, v;
    std::getline(row, a, ',');
    std::getline(row, b, ',');
    std::getline(row, v);
    const double x = -2.5 + h * std::stod(a), y = -2.5 + h * std::stod(b);
    const double r = std::hypot(x, y);
    if (r > 1.0 + 1e-9 && r < 2.0 - 1e-9) err = std::max(err, std::abs(std::stod(v) - (1.0 - std::log2(r))));
  }
  EXPECT_LT(err, 0.05);
}

TEST_F(CliTest, PsdLatticeMaximumIsIdentity) {
  const fs::path out = dir_ / "psd";
  ASSERT_EQ(run({"lattice", (problems / "psd2x2.problem").string(), "--out", out.string()}), 0);
  const Vec m = cli::parse_csv_values(slurp(out / "result.csv"), "result.csv");
  ASSERT_EQ(m.size(), 4u);
  const Vec id{1.0, 0.0, 0.0, 1.0};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(m[i], id[i], 1e-6);
  EXPECT_EQ(slurp(out / "result.csv").substr(0, 14), "row,col,value\n");
}

TEST_F(CliTest, EverySampleProblemSolvesAndCertifies) {
  for (const auto& entry : fs::directory_iterator(problems)) {
    const auto pf = cli::parse_problem_text(slurp(entry.path()));
    std::string sub;
    for (const auto& [name, kinds] : cli::detail::subcommand_problems())
      if (std::find(kinds.begin(), kinds.end(), pf.problem) != kinds.end()) sub = name;
    const fs::path out = dir_ / entry.path().stem();
    EXPECT_EQ(run({sub, entry.path().string(), "--out", out.string()}), 0) << entry.path() << err_.str();
    EXPECT_EQ(run({"certify", entry.path().string(), "--out", out.string()}), 0) << entry.path() << out_.str();
  }
}

TEST_F(CliTest, SelftestPasses) {
  EXPECT_EQ(run({"selftest"}), 0) << out_.str();
  EXPECT_EQ(out_.str().find("FAIL"), std::string::npos);
}
