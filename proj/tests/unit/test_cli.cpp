#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "helpers.hpp"

namespace {

const std::string cli = BLAB_CLI_PATH;
const std::string source = BLAB_SOURCE_DIR;

struct Outcome {
  int code = -1;
  std::string out;
};

Outcome run(const std::string& args) {
  const std::string cmd = "'" + cli + "' " + args + " 2>/dev/null";
  Outcome o;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return o;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) o.out.append(buf, n);
  const int status = pclose(pipe);
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return o;
}

std::string write_config(const std::string& name, const std::string& body) {
  const std::string path = ::testing::TempDir() + name;
  std::ofstream(path) << body;
  return path;
}

const std::string small_cfg = source + "/configs/small.cfg";

}  // namespace

TEST(Cli, VersionAndUsage) {
  const Outcome v = run("--version");
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.out.find("BLAB1"), std::string::npos);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
}

TEST(Cli, CheckSmallConfigSucceeds) { EXPECT_EQ(run("check --config '" + small_cfg + "' --trials 2").code, 0); }

TEST(Cli, CorrectRejectsLargeBeta) {
  const std::string cfg = write_config("beta03.cfg",
                                       "sites_per_dim = 8\ntorus_length = 4\nparticles = 3\nbeta = 0.3\n"
                                       "t_final = 0.5\ndt = 0.001\n");
  EXPECT_EQ(run("correct --config '" + cfg + "' --order 3 --t 0.5").code, 3);
}

TEST(Cli, SweepWithMissingConfigIsConfigError) {
  EXPECT_EQ(run("sweep --config /nonexistent/blab.cfg").code, 2);
  EXPECT_EQ(run("sweep").code, 2);
}

TEST(Cli, BadInputsMapToConfigError) {
  EXPECT_EQ(run("evolve --config '" + small_cfg + "' --observable entropy").code, 2);
  const std::string bad = write_config("bad.cfg", "particles = 3\ncolour = blue\n");
  EXPECT_EQ(run("hartree --config '" + bad + "'").code, 2);
  EXPECT_EQ(run("sweep --config '" + small_cfg + "' --grid N=4,x").code, 2);
}

TEST(Cli, HartreeCsv) {
  const Outcome o = run("hartree --config '" + small_cfg + "'");
  ASSERT_EQ(o.code, 0);
  std::istringstream in(o.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,norm,mu,energy_proxy");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 201);
}

TEST(Cli, CorrectAndMomentsCsv) {
  const Outcome c = run("correct --config '" + small_cfg + "' --order 2 --t 0.1");
  ASSERT_EQ(c.code, 0);
  EXPECT_EQ(c.out.rfind("order,t,err,corr_norm\n", 0), 0u);
  EXPECT_NE(c.out.find("n,k,term_norm\n0,0,"), std::string::npos);
  const Outcome m = run("moments --config '" + small_cfg + "' --initial one_excitation");
  ASSERT_EQ(m.code, 0);
  EXPECT_EQ(m.out.rfind("k,weight\n", 0), 0u);
  EXPECT_NE(m.out.find("a,m_moment,n_moment,excitation_moment,c_a\n"), std::string::npos);
}

TEST(Cli, EvolveSaveLoadAndSeedDeterminism) {
  const std::string snap = ::testing::TempDir() + "cli_state.blab";
  const Outcome a = run("--seed 5 evolve --config '" + small_cfg + "' --observable moments --every 50 --save '" + snap + "'");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out.rfind("step,t,m1,m2,m3\n", 0), 0u);
  const Outcome b = run("--seed 5 evolve --config '" + small_cfg + "' --observable moments --every 50");
  EXPECT_EQ(a.out, b.out);
  const Outcome l = run("evolve --config '" + small_cfg + "' --load '" + snap + "' --every 200");
  EXPECT_EQ(l.code, 0);
  EXPECT_EQ(run("evolve --config '" + small_cfg + "' --rep tensor --load '" + snap + "'").code, 2);
  std::remove(snap.c_str());
}

TEST(Cli, SweepWritesCsv) {
  const std::string out = ::testing::TempDir() + "cli_sweep.csv";
  const std::string cfg = write_config("sweep_small.cfg",
                                       "sites_per_dim = 3\nparticles = 3\nt_final = 0.05\ndt = 0.001\n");
  ASSERT_EQ(run("sweep --config '" + cfg + "' --grid N=2,3,4 --orders 1,2 --no-timing --out '" + out + "'").code, 0);
  std::ifstream f(out);
  std::string header;
  std::getline(f, header);
  EXPECT_EQ(header, "N,M,d,beta,gamma,t,dt,order,err_sq,corr_norm,runtime_s");
  std::remove(out.c_str());
}
