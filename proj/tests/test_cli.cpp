#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "ypq/verify.hpp"

using namespace ypq;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run_cli(const std::string& args) {
  const std::string cmd = std::string(YPQ_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, {}};
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string l;
  while (std::getline(ss, l)) out.push_back(l);
  return out;
}

}  // namespace

TEST(Verify, DefaultsPass) {
  RunConfig cfg;
  const auto rep = run_verify(cfg);
  EXPECT_TRUE(rep.all_passed());
  for (const auto& r : rep.checks) {
    EXPECT_EQ(r.status, CheckStatus::Pass) << r.name << " " << r.max_residual;
    EXPECT_EQ(r.points, 100) << r.name;
  }
  EXPECT_FALSE(rep.wall_seconds.has_value());
}

TEST(Verify, NarrowDomainPasses) {
  RunConfig cfg;
  cfg.a = 0.99;
  cfg.n_points = 30;
  EXPECT_TRUE(run_verify(cfg).all_passed());
}

TEST(Verify, T11SkipsFormChecks) {
  RunConfig cfg;
  cfg.c = 0;
  cfg.n_points = 10;
  const auto rep = run_verify(cfg);
  EXPECT_TRUE(rep.all_passed());
  int ran = 0;
  for (const auto& r : rep.checks) {
    if (r.status == CheckStatus::Pass) {
      ++ran;
      EXPECT_TRUE(r.group == "einstein" || r.group == "compatibility") << r.name;
    } else {
      EXPECT_EQ(r.status, CheckStatus::Skipped) << r.name;
    }
  }
  EXPECT_EQ(ran, 3);
}

TEST(Verify, CheckSelection) {
  RunConfig cfg;
  cfg.n_points = 5;
  cfg.checks = {"einstein", "sky_Psi"};
  const auto rep = run_verify(cfg);
  ASSERT_EQ(rep.checks.size(), 3u);
  EXPECT_EQ(rep.checks[2].name, "sky_Psi");
  cfg.checks = {"nonsense"};
  EXPECT_THROW(run_verify(cfg), Error);
}

TEST(Verify, EveryCheckOnce) {
  RunConfig cfg;
  cfg.n_points = 3;
  const auto rep = run_verify(cfg);
  std::set<std::string> names;
  for (const auto& r : rep.checks) EXPECT_TRUE(names.insert(r.name).second) << r.name;
  EXPECT_EQ(rep.checks.front().name, "einstein_base");
  EXPECT_EQ(rep.checks.back().name, "poisson_H_Q");
}

TEST(Verify, ThreadCountDoesNotChangeReport) {
  RunConfig a, b;
  a.n_points = b.n_points = 16;
  a.threads = 1;
  b.threads = 4;
  EXPECT_EQ(to_json(run_verify(a)).dump(), to_json(run_verify(b)).dump());
}

TEST(Verify, BadConfig) {
  RunConfig cfg;
  cfg.n_points = 0;
  EXPECT_THROW(run_verify(cfg), Error);
  cfg = {};
  cfg.a = 2.0;
  EXPECT_THROW(run_verify(cfg), Error);
}

TEST(Cli, VerifyExitCodeAndDeterminism) {
  const auto a = run_cli("verify --points 10");
  const auto b = run_cli("verify --points 10");
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  const auto j = nlohmann::json::parse(a.out);
  EXPECT_EQ(j["params"]["a"], 0.5);
  EXPECT_TRUE(j["passed"].get<bool>());
  EXPECT_FALSE(j.contains("wall_seconds"));
}

TEST(Cli, ConfigErrorsExitTwo) {
  EXPECT_EQ(run_cli("verify --a 2").code, 2);
  EXPECT_EQ(run_cli("verify --c 3").code, 2);
  EXPECT_EQ(run_cli("verify --checks bogus").code, 2);
  EXPECT_EQ(run_cli("verify --points abc").code, 2);
  EXPECT_EQ(run_cli("geodesic --state 1,2,3").code, 2);
  EXPECT_EQ(run_cli("").code, 2);
}

TEST(Cli, GeodesicZeroDuration) {
  const auto r = run_cli("geodesic --t-end 0");
  EXPECT_EQ(r.code, 0);
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 2u);
  EXPECT_EQ(ls[0], "t,H,P_phi,P_beta,P_psi,J2,Q_Psi_Psi,Q_Xi_Xi,Q_Upsilon_Upsilon,Q_Xi_Upsilon");
  EXPECT_EQ(ls[1], "0,0,0,0,0,0,0,0,0,0");
}

TEST(Cli, GeodesicDriftTable) {
  const auto r = run_cli("geodesic --seed 3");
  EXPECT_EQ(r.code, 0);
  const auto ls = lines(r.out);
  ASSERT_GT(ls.size(), 100u);
  double worst = 0.0, t_last = 0.0;
  for (std::size_t i = 1; i < ls.size(); ++i) {
    std::stringstream ss(ls[i]);
    std::string cell;
    std::getline(ss, cell, ',');
    t_last = std::stod(cell);
    while (std::getline(ss, cell, ',')) worst = std::max(worst, std::stod(cell));
  }
  EXPECT_DOUBLE_EQ(t_last, 100.0);
  EXPECT_LT(worst, 1e-8);
}

TEST(Cli, GeodesicDomainExit) {
  const auto r = run_cli("geodesic --t-end 10 --state 1.5707,0,0,0,0,5,0,0,0,0");
  const auto ls = lines(r.out);
  ASSERT_GE(ls.size(), 3u);
  EXPECT_EQ(ls.back().rfind("# domain_exit,t=", 0), 0u);
}

TEST(Cli, RankSummary) {
  const auto r = run_cli("rank --points 10");
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["verdict"]["classical_modal_rank"], 5);
  EXPECT_TRUE(j["verdict"]["classical_rank_5_everywhere"].get<bool>());
  EXPECT_EQ(j["samples"].size(), 10u);
  EXPECT_EQ(j["samples"][0]["full"]["singular_values"].size(), 9u);
  // the quadratic invariants do not raise the rank, so the verdict is negative
  EXPECT_EQ(j["verdict"]["full_modal_rank"], 5);
  EXPECT_EQ(r.code, 1);
}

TEST(Cli, RankDegenerateState) {
  const auto r = run_cli("rank --state 1.5707963,0,0,0,0,1,0,0,0,0");
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["verdict"]["degenerate_states"], 1);
  EXPECT_TRUE(j["samples"][0]["classical"]["degenerate"].get<bool>());
}

TEST(Cli, OutputFile) {
  const std::string path = ::testing::TempDir() + "ypq_report.json";
  EXPECT_EQ(run_cli("verify --points 3 --checks einstein --out " + path).code, 0);
  std::ifstream f(path);
  const auto j = nlohmann::json::parse(f);
  EXPECT_EQ(j["checks"].size(), 2u);
}
