#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "json.hpp"
#include "qcov/cli.hpp"

using qcov::cli::run;

namespace {

struct Out {
  int code;
  std::string out, err;
};

Out call(const std::vector<std::string>& args) {
  std::ostringstream o, e;
  int code = run(args, o, e);
  return {code, o.str(), e.str()};
}

}  // namespace

TEST(Cli, UpsilonHasOnlyEvenHeights) {
  Out r = call({"upsilon", "--datum", "rank1", "--height", "5"});
  ASSERT_EQ(r.code, qcov::cli::kOk) << r.err;
  auto doc = nlohmann::json::parse(r.out);
  std::vector<std::string> keys;
  for (const auto& [k, v] : doc["parts"].items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"0", "2", "4"}));
}

TEST(Cli, SpecializedPrinting) {
  Out generic = call({"upsilon", "--datum", "rank1", "--height", "2"});
  Out plus = call({"upsilon", "--datum", "rank1", "--height", "2", "--pi", "1"});
  ASSERT_EQ(plus.code, 0);
  auto g = nlohmann::json::parse(generic.out), p = nlohmann::json::parse(plus.out);
  EXPECT_NE(g["parts"]["2"][0]["coeff"].get<std::string>().find('p'), std::string::npos);
  EXPECT_EQ(p["parts"]["2"][0]["coeff"].get<std::string>().find('p'), std::string::npos);
  EXPECT_EQ(p["pi"], "1");
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(call({}).code, qcov::cli::kUsage);
  EXPECT_EQ(call({"theta", "--height", "x"}).code, qcov::cli::kUsage);
  EXPECT_EQ(call({"--help"}).code, qcov::cli::kOk);
  EXPECT_EQ(call({"icb", "--datum", "b02", "--lambda", "1,0"}).code, qcov::cli::kInvalid);
  EXPECT_EQ(call({"upsilon", "--datum", "/nonexistent/datum.json"}).code, qcov::cli::kIo);
  Out bad = call({"verify", "--datum", "rank1", "--height", "3", "--varsigma", "1"});
  EXPECT_EQ(bad.code, qcov::cli::kAssertion);
  EXPECT_FALSE(nlohmann::json::parse(bad.out)["ok"].get<bool>());
}

TEST(Cli, ThreadCap) {
  setenv("QPI_THREADS", "3", 1);
  EXPECT_EQ(qcov::cli::thread_cap(), 3);
  setenv("QPI_THREADS", "0", 1);
  EXPECT_GE(qcov::cli::thread_cap(), 1);
  setenv("QPI_THREADS", "many", 1);
  EXPECT_GE(qcov::cli::thread_cap(), 1);
  unsetenv("QPI_THREADS");
}

TEST(Cli, VerifyIsThreadCountIndependent) {
  setenv("QPI_THREADS", "1", 1);
  Out one = call({"verify", "--datum", "b02", "--height", "3", "--seed", "5"});
  setenv("QPI_THREADS", "6", 1);
  Out six = call({"verify", "--datum", "b02", "--height", "3", "--seed", "5"});
  unsetenv("QPI_THREADS");
  EXPECT_EQ(one.code, 0);
  EXPECT_EQ(one.out, six.out);
}
