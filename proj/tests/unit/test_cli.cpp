// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>

namespace fs = std::filesystem;

namespace {

const fs::path &workdir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("jbfmc_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path write(const std::string &name, const std::string &text) {
  const fs::path p = workdir() / name;
  std::ofstream(p) << text;
  return p;
}

int run(const std::string &args) {
  const std::string cmd = std::string(JBFMC_CLI_PATH) + " " + args + " > " + (workdir() / "stdout.txt").string() +
                          " 2> " + (workdir() / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char *kSmall = "N = 12\nM = 6\nL = 8\nT = 48\nK_h = 2\nK_g = 6\nr = 2\nlambda = 0.3\n"
                     "bigamp_max_restarts = 1\nbigamp_max_sweeps = 40\n";

} // namespace

TEST(Cli, UsageErrorsExitWithOne) {
  EXPECT_EQ(run(""), 1);
  EXPECT_EQ(run("bogus"), 1);
  EXPECT_EQ(run("trial"), 1);
  EXPECT_EQ(run("trial --config /does/not/exist.cfg"), 1);
  EXPECT_EQ(run("trial --config " + write("bad.cfg", "nonsense_key = 3\n").string()), 1);
  EXPECT_EQ(run("trial --config " + write("ok.cfg", kSmall).string() + " --method svd"), 1);
}

TEST(Cli, TrialPrintsNmse) {
  EXPECT_EQ(run("trial --config " + write("ok.cfg", kSmall).string() + " --method jbf-mc --seed 3"), 0);
  const std::string out = slurp(workdir() / "stdout.txt");
  EXPECT_NE(out.find("status = ok"), std::string::npos);
  EXPECT_NE(out.find("nmse_g_db = "), std::string::npos);
  EXPECT_NE(out.find("nmse_h_db = "), std::string::npos);
}

TEST(Cli, FailedTrialExitsWithTwo) {
  const auto cfg = write("off.cfg", std::string(kSmall) + "lambda = 0\n");
  EXPECT_EQ(run("trial --config " + cfg.string()), 2);
}

TEST(Cli, SweepWritesArtifacts) {
  const auto spec = write("sweep.spec", std::string(kSmall) + "axis1 = snr_db\naxis1_values = 10, 20\n"
                                                              "trials_per_point = 2\nmethods = jbf-mc,jbf-ist\n");
  const fs::path out = workdir() / "sweep_out";
  EXPECT_EQ(run("sweep --spec " + spec.string() + " --out " + out.string() + " --jobs 2"), 0);
  const std::string csv = slurp(out / "results.csv");
  EXPECT_EQ(csv.rfind("method,axis1_name,axis1,axis2_name,axis2,nmse_g_db,nmse_h_db,fail_rate,iters,wall_ms\n", 0),
            0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
  EXPECT_TRUE(fs::exists(out / "nmse.svg"));
  EXPECT_TRUE(fs::exists(out / "metadata.txt"));
}

TEST(Cli, SweepWhereEveryTrialFailsExitsWithTwo) {
  const auto spec = write("dead.spec", std::string(kSmall) + "lambda = 0\naxis1 = snr_db\naxis1_values = 10\n");
  EXPECT_EQ(run("sweep --spec " + spec.string() + " --out " + (workdir() / "dead").string()), 2);
}

TEST(Cli, SweepRejectsBadSpec) {
  const auto spec = write("badspec.spec", "axis1 = snr_db\naxis1_values = 20, 10\n");
  EXPECT_EQ(run("sweep --spec " + spec.string() + " --out " + (workdir() / "bad").string()), 1);
  EXPECT_EQ(run("sweep --spec " + spec.string() + " --out " + (workdir() / "bad").string() + " --jobs 0"), 1);
}

TEST(Cli, SelftestPasses) {
  EXPECT_EQ(run("selftest"), 0);
  const std::string out = slurp(workdir() / "stdout.txt");
  EXPECT_EQ(out.find("[FAIL]"), std::string::npos);
  EXPECT_NE(out.find("[PASS]"), std::string::npos);
}
