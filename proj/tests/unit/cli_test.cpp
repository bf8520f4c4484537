#include <gtest/gtest.h>

#include <algorithm>
#include <json.hpp>

#include "process.hpp"

using namespace svrt::testing;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::string kCli = SVRT_CLI;

fs::path scratch_dir(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("svrt_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST(Cli, UnsupportedProblemIsAJsonErrorWithExitOne) {
  const auto r = run_command(kCli + " generate --problem 3 --out " + scratch_dir("bad").string());
  EXPECT_EQ(r.exit_code, 1);
  const auto err = json::parse(r.err);
  EXPECT_EQ(err["error"], "invalid_argument");
  EXPECT_NE(err["message"].get<std::string>().find("3"), std::string::npos);
}

TEST(Cli, UsageErrorExitsTwo) {
  const auto r = run_command(kCli + " generate --no-such-flag");
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_EQ(json::parse(r.err)["error"], "usage");
}

TEST(Cli, HumanAccuracy) {
  const auto r = run_command(kCli + " human-accuracy --p-a 13 --p-n 7 --n 20");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["accuracy"].get<double>(), 0.825);
  EXPECT_EQ(run_command(kCli + " human-accuracy --p-a 13 --p-n 7 --n 21").exit_code, 1);
}

TEST(Cli, GenerateTwiceIsByteIdentical) {
  const auto a = scratch_dir("gen_a"), b = scratch_dir("gen_b");
  const std::string args = " generate --problem 6 --n-train 5 --n-test 3 --seed 42 --out ";
  ASSERT_EQ(run_command(kCli + args + a.string()).exit_code, 0);
  ASSERT_EQ(run_command(kCli + args + b.string()).exit_code, 0);
  const auto ta = snapshot_tree(a), tb = snapshot_tree(b);
  EXPECT_EQ(ta.size(), 2u * (5 + 3) + 2);
  EXPECT_TRUE(ta == tb);
}

TEST(Cli, TrainEvalAndDeterministicCheckpoint) {
  const auto dir = scratch_dir("train");
  const std::string common = " --problem 2 --n-train 6 --n-test 3 --seed 5 --arch small --iterations 4 --batch-size 4"
                             " --threads 1 --out " + (dir / "data").string();
  const auto first = run_command(kCli + " train" + common + " --checkpoint " + (dir / "a.ckpt").string() +
                                 " --log " + (dir / "a.jsonl").string());
  ASSERT_EQ(first.exit_code, 0) << first.err;
  const auto second = run_command(kCli + " train" + common + " --checkpoint " + (dir / "b.ckpt").string());
  ASSERT_EQ(second.exit_code, 0) << second.err;
  EXPECT_EQ(read_file(dir / "a.ckpt"), read_file(dir / "b.ckpt"));
  const auto log = read_file(dir / "a.jsonl");
  EXPECT_EQ(std::count(log.begin(), log.end(), '\n'), 4);
  const auto eval = run_command(kCli + " eval --checkpoint " + (dir / "a.ckpt").string() + " --data " +
                                (dir / "data" / "p2" / "original").string());
  ASSERT_EQ(eval.exit_code, 0) << eval.err;
  EXPECT_EQ(json::parse(eval.out)["examples"], 6);
}

TEST(Cli, MissingCheckpointIsAnIoError) {
  const auto r = run_command(kCli + " eval --checkpoint /nonexistent.ckpt --data /nonexistent");
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_EQ(json::parse(r.err)["error"], "io");
}

TEST(Cli, ReportRendersCsv) {
  const auto dir = scratch_dir("report");
  {
    std::ofstream csv(dir / "r.csv");
    csv << "problem,variant,image_size,n_train,accuracy,category,seed,wall_seconds\n"
        << "1,original,64,2000,0.5,compare,0,1\n";
  }
  const auto r = run_command(kCli + " report --csv " + (dir / "r.csv").string());
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("average"), std::string::npos);
}
