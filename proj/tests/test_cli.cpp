#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "freeab/serialize.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

auto run(const std::string &args) -> Run {
  std::string cmd = std::string(FREEAB_CLI) + " " + args + " 2>&1";
  Run r;
  FILE *p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[512];
  while (std::fgets(buf, sizeof buf, p)) r.out += buf;
  int raw = pclose(p);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

auto data(const std::string &name) -> std::string { return std::string(FREEAB_DATA) + "/" + name; }

auto scratch(const std::string &name) -> std::string {
  fs::path dir = fs::temp_directory_path() / ("freeab_cli_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return (dir / name).string();
}

auto slurp(const std::string &path) -> std::string {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

TEST(Cli, ClassifyTau) {
  auto r = run("classify " + data("tau.aut"));
  EXPECT_EQ(r.status, 0) << r.out;
  EXPECT_NE(r.out.find("normal generator: true; ladder rung: 1"), std::string::npos) << r.out;
}

TEST(Cli, ClassifyShearFour) {
  auto r = run("classify " + data("shear4.aut"));
  EXPECT_EQ(r.status, 0) << r.out;
  EXPECT_NE(r.out.find("normal generator: false; ladder rung: 4"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("certified"), std::string::npos) << r.out;
}

TEST(Cli, ClassifyGraded) {
  auto r = run("classify " + data("graded_2_3.aut"));
  EXPECT_EQ(r.status, 0) << r.out;
  EXPECT_NE(r.out.find("ladder rung: undefined"), std::string::npos) << r.out;
}

TEST(Cli, ShearWritesVerifiableCertificate) {
  std::string cert = scratch("shear.cert");
  auto r = run("shear --n 3 --m 5 --out " + cert);
  EXPECT_EQ(r.status, 0) << r.out;
  EXPECT_NE(r.out.find("lambda:"), std::string::npos);
  EXPECT_NE(r.out.find("sigma:"), std::string::npos);
  auto v = run("verify " + cert);
  EXPECT_EQ(v.status, 0) << v.out;
}

TEST(Cli, TamperedCertificateFails) {
  std::string cert = scratch("bez.cert"), bad = scratch("bez_bad.cert");
  auto r = run("factor " + data("f.mat") + " --m 2 --out " + cert);
  ASSERT_EQ(r.status, 0) << r.out;
  auto j = freeab::Json::parse(slurp(cert));
  j["target"]["M_window"][0][2] = 5;
  j["target"].erase("M_window_inv");
  std::ofstream(bad) << j.dump(2);
  auto v = run("verify " + bad);
  EXPECT_NE(v.status, 0) << v.out;
  EXPECT_NE(v.out.find("entry (0,2)"), std::string::npos) << v.out;
}

TEST(Cli, MalformedCertificateIsError) {
  std::string bad = scratch("broken.cert");
  std::ofstream(bad) << R"({"format_version":1,"kind":"certificate","claim":"order"})";
  auto v = run("verify " + bad);
  EXPECT_EQ(v.status, 2) << v.out;
  EXPECT_NE(v.out.find("error (parse)"), std::string::npos) << v.out;
}

TEST(Cli, UnknownSubcommand) {
  auto r = run("frobnicate");
  EXPECT_NE(r.status, 0);
  EXPECT_FALSE(r.out.empty());
}

TEST(Cli, Zaushko) {
  auto r = run("zaushko " + data("rho.mat"));
  EXPECT_EQ(r.status, 0) << r.out;
}

TEST(Cli, Wans) {
  auto r = run("wans " + data("f.mat"));
  EXPECT_EQ(r.status, 0) << r.out;
  EXPECT_NE(r.out.find("window sum = f: yes"), std::string::npos) << r.out;
}

TEST(Cli, PipelineAndVerifyChain) {
  std::string chain = scratch("three_four.chain");
  auto r = run("pipeline " + data("three_four.aut") + " --out " + chain);
  EXPECT_EQ(r.status, 0) << r.out;
  auto v = run("verify " + chain);
  EXPECT_EQ(v.status, 0) << v.out;
  EXPECT_NE(v.out.find("chain verified"), std::string::npos) << v.out;
}

TEST(Cli, DemoCounterexample) {
  auto r = run("filters demo-counterexample --primes 3,5 --probe 7");
  EXPECT_EQ(r.status, 0) << r.out;
  EXPECT_NE(r.out.find("phi_3 in Lambda(2): true (explicit summand check: ok)"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("phi_5 in Lambda(7): true (explicit summand check: ok)"), std::string::npos) << r.out;
  auto bad = run("filters demo-counterexample --primes 3,5 --probe 3");
  EXPECT_EQ(bad.status, 2) << bad.out;
}

TEST(Cli, Centered) {
  auto a = run("filters centered " + data("centered.json"));
  EXPECT_EQ(a.status, 0) << a.out;
  EXPECT_NE(a.out.find(": true"), std::string::npos) << a.out;
  auto b = run("filters centered " + data("disjoint.json"));
  EXPECT_NE(b.out.find(": false"), std::string::npos) << b.out;
}

TEST(Cli, DeterministicOutput) {
  std::string a = scratch("det_a.chain"), b = scratch("det_b.chain");
  run("pipeline " + data("shear4.aut") + " --out " + a);
  run("pipeline " + data("shear4.aut") + " --out " + b);
  EXPECT_FALSE(slurp(a).empty());
  EXPECT_EQ(slurp(a), slurp(b));
}
