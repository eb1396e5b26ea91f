#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mkdiv/cli.hpp"

using mkdiv::cli::run;

namespace {

struct Result {
  int status;
  std::string out, err;
};

Result invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int status = run(args, out, err);
  return {status, out.str(), err.str()};
}

std::string write_file(const std::string& name, const std::string& text) {
  const std::string path = ::testing::TempDir() + name;
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST(Cli, DivergenceExample) {
  const auto a = write_file("a.csv", "value\n0\n1\n");
  const auto b = write_file("b.csv", "2\n3\n");
  const auto r = invoke({"divergence", "--score", "score:bregman,phi=quadratic", "--from", "empirical:" + a, "--to",
                         "empirical:" + b});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["value"].get<double>(), 4.0);
  EXPECT_EQ(j["coupling"], "comonotonic");
  EXPECT_EQ(j["score"], "score:bregman,phi=quadratic");
}

TEST(Cli, WorstCaseExample) {
  const auto r = invoke({"worst-case", "--phi", "phi:quadratic", "--distortion", "distortion:dualpower,k=2", "--ref",
                         "uniform:a=0,b=1", "--eps", "0.03"});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["worst_value"].get<double>(), 0.866667, 1e-6);
  EXPECT_EQ(j["grid"]["nodes"].size(), 10000u);
  EXPECT_EQ(j["truncation_delta"].get<double>(), 1e-7);
}

TEST(Cli, VerifyExample) {
  const auto r = invoke({"verify", "--score", "score:gpl,alpha=0.9,g=identity", "--n", "8", "--instances", "100",
                         "--seed", "7"});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j["pass"].get<bool>());
  EXPECT_LE(j["max_deviation"].get<double>(), 1e-9);
  EXPECT_EQ(j["instances"], 100);
}

TEST(Cli, VerifyUnequalSizesUsesLp) {
  const auto r = invoke({"verify", "--score", "score:expectile,alpha=0.7,phi=quadratic", "--n", "6", "--instances",
                         "30", "--unequal"});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out)["oracle"], "lp");
}

TEST(Cli, PayoffExample) {
  const auto r = invoke({"payoff", "--phi", "phi:quadratic", "--benchmark", "uniform:a=0,b=1", "--market",
                         "market:spd=uniform:a=0,b=1;r=0;T=1", "--eps", "0.0208333333333333333", "--no-nodes"});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["lambda_star"].get<double>(), 2.0, 1e-6);
  EXPECT_NEAR(j["cost"].get<double>(), 1.0 / 12.0, 1e-5);
  EXPECT_TRUE(j["nonneg_violation"].get<bool>());
  EXPECT_FALSE(j["grid"].contains("nodes"));
}

TEST(Cli, ElicitAndAxioms) {
  const auto data = write_file("elicit.csv", "0\n1\n");
  auto r = invoke({"elicit-check", "--functional", "functional:expectile,alpha=0.8", "--score",
                   "score:expectile,alpha=0.8,phi=quadratic", "--dist", "empirical:" + data});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_LE(nlohmann::json::parse(r.out)["deviation"].get<double>(), 1e-6);

  r = invoke({"axioms", "--functional", "functional:expectile,alpha=0.3", "--seed", "3"});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  bool convexity_failed = false;
  for (const auto& f : j["findings"]) {
    if (f["axiom"] == "convexity" && !f["passed"].get<bool>()) {
      convexity_failed = true;
      EXPECT_TRUE(f.contains("witness"));
    }
  }
  EXPECT_TRUE(convexity_failed);
}

TEST(Cli, ErrorsExitWithStatusOne) {
  auto r = invoke({"divergence", "--score", "score:bregman,phi=cubic", "--from", "normal:mu=0,sigma=1", "--to",
                   "normal:mu=1,sigma=1"});
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.err.find("cubic"), std::string::npos) << r.err;
  EXPECT_TRUE(r.out.empty());

  r = invoke({"divergence", "--score", "score:bregman", "--from", "normal:mu=0,sigma=-1", "--to", "normal:mu=1"});
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.err.find("sigma"), std::string::npos) << r.err;

  r = invoke({"divergence", "--score", "score:bregman", "--from", "empirical:/nonexistent/x.csv", "--to",
              "normal:mu=1"});
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.err.find("/nonexistent/x.csv"), std::string::npos) << r.err;

  EXPECT_EQ(invoke({"frobnicate"}).status, 1);
  EXPECT_EQ(invoke({"worst-case", "--phi", "phi:quadratic"}).status, 1);
  EXPECT_EQ(invoke({"--help"}).status, 0);
}

TEST(Cli, VerificationFailureExitsTwo) {
  const auto data = write_file("normal.csv", "0\n1\n2\n3\n");
  // Squared error is minimised at the mean 1.5, not at the 0.3-quantile 1.
  const auto r = invoke({"elicit-check", "--functional", "functional:quantile,alpha=0.3", "--score",
                         "score:bregman,phi=quadratic", "--dist", "empirical:" + data});
  EXPECT_EQ(r.status, 2);
}

TEST(Cli, CsvAndOutFile) {
  const auto out = ::testing::TempDir() + "wc.csv";
  const auto r = invoke({"worst-case", "--phi", "phi:quadratic", "--distortion", "distortion:dualpower,k=2", "--ref",
                         "uniform:a=0,b=1", "--eps", "0.03", "--M", "8", "--format", "csv", "--out", out});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream f(out);
  std::string header;
  std::getline(f, header);
  EXPECT_EQ(header, "u,value");
  int rows = 0;
  for (std::string line; std::getline(f, line);) ++rows;
  EXPECT_EQ(rows, 8);
}

TEST(Cli, DeterministicAndThreadIndependent) {
  const std::vector<std::string> base{"worst-case", "--phi", "phi:quartic", "--distortion", "distortion:dualpower,k=3",
                                      "--ref", "normal:mu=0,sigma=1", "--eps", "0.05", "--M", "5000"};
  auto one = base, four = base;
  one.insert(one.end(), {"--threads", "1"});
  four.insert(four.end(), {"--threads", "4"});
  const auto a = invoke(one), b = invoke(one), c = invoke(four);
  ASSERT_EQ(a.status, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out, c.out);
}

TEST(Cli, GridSizeFromEnvironment) {
  ::setenv("MKDIV_GRID_M", "16", 1);
  auto r = invoke({"worst-case", "--phi", "phi:quadratic", "--distortion", "distortion:identity", "--ref",
                   "normal:mu=0,sigma=1", "--eps", "0.1"});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out)["grid"]["M"], 16);
  ::setenv("MKDIV_GRID_M", "many", 1);
  r = invoke({"worst-case", "--phi", "phi:quadratic", "--distortion", "distortion:identity", "--ref",
              "normal:mu=0,sigma=1", "--eps", "0.1"});
  EXPECT_EQ(r.status, 1);
  ::unsetenv("MKDIV_GRID_M");
}

TEST(CanonicalJson, SortedKeysAndSeventeenDigits) {
  nlohmann::json j{{"b", 0.1}, {"a", {{"z", 1}, {"y", true}}}, {"c", nullptr}};
  EXPECT_EQ(mkdiv::canonical_json(j), R"({"a":{"y":true,"z":1},"b":0.10000000000000001,"c":null})");
}
