// SPDX-License-Identifier: Apache-2.0
//
// End-to-end checks of the command-line tool: exit codes, emitted files and
// byte-level determinism. The binary path comes from the build system.

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

std::string cli_path() { return QED_CLI_PATH; }

int run(const std::string& args) {
  std::string cmd = cli_path() + " " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("qed_cli_test_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& content) {
    fs::path p = dir_ / name;
    std::ofstream(p) << content;
    return p;
  }

  fs::path dir_;
};

TEST_F(CliTest, EstimateExactRowsEmitsThirds) {
  fs::path in = write("obs.csv",
                      "c_lo,c_hi,t_lo,t_hi\n"
                      "1,1,-inf,inf\n"
                      "2,2,-inf,inf\n"
                      "3,3,-inf,inf\n");
  fs::path out = dir_ / "out";
  ASSERT_EQ(run("estimate " + in.string() + " --out-dir " + out.string()), 0);
  std::string json = slurp(out / "estimate.json");
  EXPECT_NE(json.find("0.3333333333333333"), std::string::npos);
  EXPECT_NE(json.find("\"converged\": true"), std::string::npos);
  std::string cdf = slurp(out / "estimate_cdf.csv");
  EXPECT_EQ(cdf.substr(0, 11), "x,mass,cdf\n");
}

TEST_F(CliTest, EmptyInputExitsOne) {
  fs::path in = write("empty.csv", "");
  EXPECT_EQ(run("estimate " + in.string() + " --out-dir " + dir_.string()), 1);
  EXPECT_EQ(run("estimate /nonexistent.csv --out-dir " + dir_.string()), 1);
}

TEST_F(CliTest, NonConvergenceExitsTwo) {
  fs::path in = write("obs.csv",
                      "c_lo,c_hi,t_lo,t_hi\n"
                      "1,1,-inf,inf\n"
                      "2,inf,-inf,inf\n"
                      "3,3,0.5,inf\n");
  EXPECT_EQ(run("estimate " + in.string() + " --max-iter 1 --out-dir " +
                dir_.string()),
            2);
}

TEST_F(CliTest, DegenerateTruncationExitsThree) {
  // Event below the truncated subject's entry drives P(T) to one; with a
  // loose tolerance the fit converges and reports the degeneracy flag.
  fs::path in = write("obs.csv",
                      "c_lo,c_hi,t_lo,t_hi\n"
                      "1,1,-inf,inf\n"
                      "2,2,1.5,inf\n");
  EXPECT_EQ(run("estimate " + in.string() + " --trunc-guard 0.2 --out-dir " +
                dir_.string()),
            3);
}

TEST_F(CliTest, SimulateDeterministicBytes) {
  fs::path cfg = write("study.json", R"({
    "dist": {"family": "gamma", "shape": 4, "scale": 1.7},
    "mix": {"preset": "example8:right_censored_nontruncated"},
    "n": 40, "replications": 5, "seed": 11,
    "estimators": ["qed", "km"], "tol": 1e-6
  })");
  fs::path out1 = dir_ / "a", out2 = dir_ / "b";
  ASSERT_EQ(run("simulate " + cfg.string() + " --jobs 2 --out-dir " +
                out1.string()),
            0);
  ASSERT_EQ(run("simulate " + cfg.string() + " --jobs 1 --out-dir " +
                out2.string()),
            0);
  EXPECT_EQ(slurp(out1 / "replications.csv"), slurp(out2 / "replications.csv"));
  EXPECT_EQ(slurp(out1 / "summary.csv"), slurp(out2 / "summary.csv"));
  std::string rep = slurp(out1 / "replications.csv");
  EXPECT_NE(rep.find("qed_rho"), std::string::npos);
  EXPECT_NE(rep.find("km_rho"), std::string::npos);
  // 5 replications + header.
  EXPECT_EQ(std::count(rep.begin(), rep.end(), '\n'), 6);
}

TEST_F(CliTest, CompareNeedsTwoEstimators) {
  fs::path cfg = write("cmp.json", R"({
    "dist": {"family": "gamma", "shape": 4, "scale": 1.7},
    "mix": {"preset": "example9"},
    "n": 30, "replications": 2, "seed": 3,
    "estimators": ["qed"], "tol": 1e-5
  })");
  EXPECT_EQ(run("compare " + cfg.string() + " --out-dir " + dir_.string()), 1);
}

TEST_F(CliTest, CompareEmitsLongFormat) {
  fs::path cfg = write("cmp.json", R"({
    "dists": [{"family": "gamma", "shape": 4, "scale": 1.7},
               {"family": "weibull", "shape": 5, "scale": 10}],
    "mix": {"preset": "example9"},
    "n": 40, "replications": 2, "seed": 3,
    "estimators": ["qed", "turnbull"], "tol": 1e-5
  })");
  fs::path out = dir_ / "out";
  ASSERT_EQ(run("compare " + cfg.string() + " --out-dir " + out.string()), 0);
  std::string csv = slurp(out / "compare.csv");
  EXPECT_NE(csv.find("# reference_rho_thresholds,0.05,0.10"),
            std::string::npos);
  EXPECT_NE(csv.find("estimator,distribution,replication,rho,delta"),
            std::string::npos);
  EXPECT_NE(csv.find("turnbull,weibull(5,10)"), std::string::npos);
  // 2 arms x 2 estimators x 2 replications + header + metadata line.
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 10);
}

TEST_F(CliTest, TablesEmitsMatrixAndSelections) {
  std::ostringstream rec;
  rec << "birth,hire,term,reason,period_start,period_end\n";
  for (int i = 0; i < 30; ++i) {
    int hire_year = 1990 + (i % 8);
    rec << (1960 + i % 5) << "-01-01," << hire_year << "-06-01,";
    if (i % 3 == 0) {
      rec << (2011 + i % 3) << "-03-01,2,";
    } else {
      rec << ",3,";
    }
    rec << "2010-01-01,2013-12-31\n";
  }
  fs::path in = write("employees.csv", rec.str());
  fs::path out = dir_ / "out";
  ASSERT_EQ(run("tables " + in.string() + " --hire-ages 30 --tol 1e-6"
                " --max-iter 200000 --out-dir " + out.string()),
            0);
  std::string matrix = slurp(out / "bivariate_cdf.csv");
  EXPECT_EQ(matrix.substr(0, 4), "age,");
  EXPECT_TRUE(fs::exists(out / "selection_30.csv"));
  std::string sel = slurp(out / "selection_30.csv");
  EXPECT_EQ(sel.substr(0, 8), "age,cdf\n");
}

}  // namespace
