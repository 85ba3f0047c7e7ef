#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "apep/cli.hpp"
#include "vapep/json_io.hpp"
#include "vapep/mipgen.hpp"

namespace fs = std::filesystem;
using vapep::Json;

namespace {

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  CliRun r;
  r.code = apep::run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("apep_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

const char* kBodeSod = R"({
  "resources": ["r1", "r2", "r3"],
  "users": ["u1", "u2", "u3", "u4"],
  "auth": {"pairs": [["u1","r1"],["u1","r2"],["u2","r3"],["u3","r1"],["u4","r2"],["u4","r3"]], "pair_penalty": 2},
  "constraints": [
    {"type": "bod_e", "scope": ["r1", "r2"], "ell": 3},
    {"type": "sod_u", "scope": ["r2", "r3"], "penalty": 4}
  ]
})";

}  // namespace

TEST_F(Cli, GenerateIsDeterministic) {
  const std::vector<std::string> base = {"generate", "--n", "80", "--k", "8", "--tau", "4", "--alpha", "1", "--seed", "1"};
  auto a = base;
  a.insert(a.end(), {"--out", path("a.json")});
  auto b = base;
  b.insert(b.end(), {"--out", path("b.json")});
  ASSERT_EQ(cli(a).code, 0);
  ASSERT_EQ(cli(b).code, 0);
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
  const vapep::Instance inst = vapep::instance_from_json(vapep::read_json_file(path("a.json")));
  EXPECT_EQ(inst.n(), 80u);
  EXPECT_EQ(inst.k(), 8);
  // Same document on stdout.
  EXPECT_EQ(cli(base).out, slurp(path("a.json")));
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(cli({"generate"}).code, 2);
  EXPECT_EQ(cli({"generate", "--n", "1"}).code, 2);
  EXPECT_EQ(cli({"generate", "--n", "10", "--alpha", "zero"}).code, 2);
  EXPECT_EQ(cli({"solve", "--in", path("missing.json")}).code, 2);
  EXPECT_EQ(cli({"frobnicate"}).code, 2);
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"--help"}).code, 0);
  spit(path("bad.json"), "{\"resources\": [\"r1\"], \"users\": [\"u1\"], \"oops\": 1}");
  const CliRun r = cli({"solve", "--in", path("bad.json")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("oops"), std::string::npos);
}

TEST_F(Cli, BruteAndProfileAgree) {
  ASSERT_EQ(cli({"generate", "--n", "6", "--k", "3", "--tau", "1", "--seed", "2", "--out", path("g.json")}).code, 0);
  const CliRun brute = cli({"solve", "--in", path("g.json"), "--solver", "brute"});
  const CliRun prof = cli({"solve", "--in", path("g.json"), "--solver", "profile", "--ell", "6"});
  ASSERT_EQ(brute.code, 0) << brute.err;
  ASSERT_EQ(prof.code, 0) << prof.err;
  EXPECT_EQ(vapep::parse_json(brute.out)["total"], vapep::parse_json(prof.out)["total"]);
  EXPECT_EQ(vapep::parse_json(brute.out)["assignment"], vapep::parse_json(prof.out)["assignment"]);
}

TEST_F(Cli, ThreadCountDoesNotChangeOutput) {
  ASSERT_EQ(cli({"generate", "--n", "30", "--k", "3", "--tau", "2", "--seed", "5", "--out", path("g.json")}).code, 0);
  const CliRun one = cli({"solve", "--in", path("g.json"), "--threads", "1"});
  const CliRun eight = cli({"solve", "--in", path("g.json"), "--threads", "8"});
  ASSERT_EQ(one.code, 0);
  EXPECT_EQ(one.out, eight.out);
  const CliRun stats = cli({"solve", "--in", path("g.json"), "--stats"});
  EXPECT_TRUE(vapep::parse_json(stats.out).contains("stats"));
}

TEST_F(Cli, WspSolverOnReducibleInstance) {
  spit(path("i.json"), kBodeSod);
  const CliRun wsp = cli({"solve", "--in", path("i.json"), "--solver", "wsp"});
  const CliRun prof = cli({"solve", "--in", path("i.json"), "--ell", "4"});
  ASSERT_EQ(wsp.code, 0) << wsp.err;
  EXPECT_EQ(vapep::parse_json(wsp.out)["total"], vapep::parse_json(prof.out)["total"]);
  EXPECT_EQ(vapep::parse_json(wsp.out)["solver"], "wsp");
  ASSERT_EQ(cli({"generate", "--n", "10", "--k", "3", "--out", path("g.json")}).code, 0);
  EXPECT_EQ(cli({"solve", "--in", path("g.json"), "--solver", "wsp"}).code, 2);
}

TEST_F(Cli, GuardsExitThree) {
  ASSERT_EQ(cli({"generate", "--n", "20", "--k", "3", "--out", path("g.json")}).code, 0);
  const CliRun r = cli({"solve", "--in", path("g.json"), "--solver", "brute"});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("24"), std::string::npos);
}

TEST_F(Cli, ExportMipParsesBack) {
  ASSERT_EQ(cli({"generate", "--n", "10", "--k", "3", "--tau", "1", "--seed", "4", "--out", path("g.json")}).code, 0);
  for (const char* form : {"naive", "up"}) {
    const std::string lp = path(std::string(form) + ".lp");
    ASSERT_EQ(cli({"export-mip", "--in", path("g.json"), "--form", form, "--out", lp}).code, 0);
    const vapep::Formulation f = vapep::parse_lp(slurp(lp));
    EXPECT_EQ(vapep::export_lp(f), slurp(lp));
    EXPECT_EQ(f.count_prefix(std::string(form) == "up" ? "xT" : "x_r"), std::string(form) == "up" ? 80u : 30u);
  }
  EXPECT_EQ(cli({"export-mip", "--in", path("g.json"), "--form", "mps"}).code, 2);
}

TEST_F(Cli, CheckResilienceOnZeroPenaltySolve) {
  ASSERT_EQ(cli({"generate", "--n", "8", "--k", "2", "--tau", "1", "--seed", "1", "--out", path("g.json"), "--wsp-out",
                 path("w.json")})
                .code,
            0);
  ASSERT_EQ(cli({"solve", "--in", path("g.json"), "--ell", "8", "--out", path("s.json")}).code, 0);
  const Json report = vapep::read_json_file(path("s.json"));
  const CliRun r = cli({"check-resilience", "--wsp", path("w.json"), "--plan", path("s.json"), "--tau", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json check = vapep::parse_json(r.out);
  const auto& b = report["breakdown"];
  ASSERT_EQ(b["sod"], 0);
  ASSERT_EQ(b["cardinality"], 0);
  ASSERT_EQ(b["authorizations"], 0);
  EXPECT_EQ(check["resilient"], true);
  EXPECT_TRUE(check["witness"].is_null());
  EXPECT_EQ(check["tau"], 1);

  spit(path("p.json"), R"({"s1":["u1"],"s2":["u1"]})");
  const Json fail = vapep::parse_json(cli({"check-resilience", "--wsp", path("w.json"), "--plan", path("p.json"), "--tau", "1"}).out);
  EXPECT_EQ(fail["resilient"], false);
  EXPECT_TRUE(fail["witness"].is_array());
}

TEST_F(Cli, BenchRowsAndMeans) {
  const CliRun r = cli({"bench", "--grid", "n=20,40,80;k=3;seeds=1..10", "--out", path("b.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream csv(slurp(path("b.csv")));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line,
            "n,k,tau,alpha,seed,solver,time_ms,objective,users,sod_penalty,card_penalty,usercount_penalty,auth_penalty");
  int rows = 0;
  int means = 0;
  while (std::getline(csv, line)) {
    if (line.find(",mean,") != std::string::npos) {
      ++means;
    } else {
      ++rows;
    }
  }
  EXPECT_EQ(rows, 30);
  EXPECT_EQ(means, 3);
  EXPECT_EQ(cli({"bench", "--grid", "k=3"}).code, 2);
  EXPECT_EQ(cli({"bench", "--grid", "n=10;colour=red"}).code, 2);
}
