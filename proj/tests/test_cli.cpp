#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "support.hpp"

using rdfidx::testing::TempDir;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

CliRun cli(const TempDir& tmp, const std::string& args) {
  const auto out = tmp / "stdout";
  const auto err = tmp / "stderr";
  const std::string cmd = std::string(RDFIDX_CLI) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

std::string data(const std::string& name) { return rdfidx::testing::data_path(name).string(); }

}  // namespace

TEST(Cli, StatsOnDocGraph) {
  TempDir tmp;
  const CliRun r = cli(tmp, "stats " + data("docs.nt"));
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("|G|=12\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("|S&P|=1\n"), std::string::npos);
}

TEST(Cli, BuildAndQueryDocQueryEveryFamily) {
  TempDir tmp;
  for (const char* family : {"triplet", "map", "hex"}) {
    const std::string index = (tmp / (std::string(family) + ".db")).string();
    CliRun b = cli(tmp, "build --family " + std::string(family) + " " + data("docs.nt") + " -o " + index);
    ASSERT_EQ(b.code, 0) << b.err;
    CliRun q = cli(tmp, "query " + index + " " + data("docs.rq"));
    EXPECT_EQ(q.code, 0) << q.err;
    EXPECT_EQ(q.out, "26.10.08,MP3\n") << family;
  }
}

TEST(Cli, ExplainPrintsPlan) {
  TempDir tmp;
  const std::string index = (tmp / "t.db").string();
  ASSERT_EQ(cli(tmp, "build " + data("docs.nt") + " -o " + index).code, 0);
  CliRun q = cli(tmp, "query --explain " + index + " " + data("docs.rq"));
  EXPECT_EQ(q.code, 0);
  EXPECT_EQ(q.out, "26.10.08,MP3\n");
  EXPECT_NE(q.err.find("triplet plan"), std::string::npos) << q.err;
  CliRun j = cli(tmp, "query --explain --json " + index + " " + data("docs.rq"));
  EXPECT_NE(j.err.find("\"family\": \"triplet\""), std::string::npos) << j.err;
}

TEST(Cli, BenchSizeOnEmptyInput) {
  TempDir tmp;
  { std::ofstream empty(tmp / "empty.nt"); }
  const CliRun r = cli(tmp, "bench size --data " + (tmp / "empty.nt").string());
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "dataset,n,family,experiment,scenario,mean_reads_or_blocks,trials\n");
}

TEST(Cli, BenchIsDeterministic) {
  TempDir tmp;
  const std::string args = "--seed 3 bench k1 --sizes 500,1000 --trials 3";
  const CliRun a = cli(tmp, args);
  const CliRun b = cli(tmp, args);
  EXPECT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("synthetic-avg,1000,triplet,k1,4,"), std::string::npos) << a.out;
}

TEST(Cli, GenIngestRoundTrip) {
  TempDir tmp;
  const auto a = (tmp / "a.run").string();
  const auto b = (tmp / "b.run").string();
  ASSERT_EQ(cli(tmp, "--seed 5 gen -n 1000 --variant 2 -o " + a).code, 0);
  ASSERT_EQ(cli(tmp, "--seed 5 gen -n 1000 --variant 2 -o " + b).code, 0);
  EXPECT_EQ(slurp(a), slurp(b));
  const auto nt = (tmp / "g.nt").string();
  ASSERT_EQ(cli(tmp, "--seed 5 gen -n 1000 --variant 2 --ntriples -o " + nt).code, 0);
  const auto c = (tmp / "c.run").string();
  const CliRun ing = cli(tmp, "ingest " + nt + " -o " + c);
  ASSERT_EQ(ing.code, 0) << ing.err;
  EXPECT_EQ(slurp(a), slurp(c));
  EXPECT_NE(cli(tmp, "stats " + c).out.find("|G|=1000\n"), std::string::npos);
}

TEST(Cli, ExitCodes) {
  TempDir tmp;
  EXPECT_EQ(cli(tmp, "").code, 2);
  EXPECT_EQ(cli(tmp, "frobnicate").code, 2);
  EXPECT_EQ(cli(tmp, "gen -o x.run").code, 2);
  EXPECT_EQ(cli(tmp, "bench sizes").code, 2);
  EXPECT_EQ(cli(tmp, "build --family btree " + data("docs.nt") + " -o " + (tmp / "x.db").string()).code, 2);
  EXPECT_EQ(cli(tmp, "--help").code, 0);
  EXPECT_EQ(cli(tmp, "stats " + (tmp / "missing.nt").string()).code, 1);
  EXPECT_EQ(cli(tmp, "query " + (tmp / "missing.db").string() + " " + data("docs.rq")).code, 1);
  const std::string index = (tmp / "t.db").string();
  ASSERT_EQ(cli(tmp, "build " + data("docs.nt") + " -o " + index).code, 0);
  { std::ofstream bad(tmp / "bad.rq"); bad << "SELECT ?x WHERE { ?x a }"; }
  const CliRun q = cli(tmp, "query " + index + " " + (tmp / "bad.rq").string());
  EXPECT_EQ(q.code, 2);
  EXPECT_NE(q.err.find("line 1"), std::string::npos) << q.err;
}
