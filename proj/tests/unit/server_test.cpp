#include <gtest/gtest.h>

#include <httplib.h>
#include <json.hpp>
#include <thread>

#include "base64.hpp"
#include "p1_oracle.hpp"
#include "svrt/harness/server.hpp"
#include "svrt/harness/trials.hpp"

using namespace svrt;
using namespace svrt::harness;
using json = nlohmann::json;

namespace {

class ServerTest : public ::testing::Test {
 protected:
  void SetUp() override {
    port_ = server_.bind("127.0.0.1", 0);
    thread_ = std::thread([this] { server_.serve(); });
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
    for (int i = 0; i < 100 && !client_->Get("/api/cohort/1"); ++i)
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }

  void TearDown() override {
    server_.stop();
    thread_.join();
  }

  json post(const std::string& path, const json& body, int expected_status = 200) {
    const auto res = client_->Post(path, body.dump(), "application/json");
    EXPECT_TRUE(res);
    if (!res) return {};
    EXPECT_EQ(res->status, expected_status) << path << " " << res->body;
    return json::parse(res->body);
  }

  json get(const std::string& path, int expected_status = 200) {
    const auto res = client_->Get(path);
    EXPECT_TRUE(res);
    if (!res) return {};
    EXPECT_EQ(res->status, expected_status) << path << " " << res->body;
    return json::parse(res->body);
  }

  std::string new_session(int problem) { return post("/api/session", {{"problem", problem}})["session_id"]; }

  int read_label(const json& next) {
    const std::string bytes = svrt::testing::base64_decode(next["pixels"].get<std::string>());
    return svrt::testing::p1_label_from_pixels(next["width"], next["height"],
                                         std::vector<std::uint8_t>(bytes.begin(), bytes.end()));
  }

  TrialSessionManager manager_{{10, 50, 64}, 21, {1, 2}};
  TrialServer server_{manager_};
  int port_ = 0;
  std::thread thread_;
  std::unique_ptr<httplib::Client> client_;
};

}  // namespace

TEST_F(ServerTest, FullSessionLifecycle) {
  const auto id = new_session(1);
  int trials = 0;
  json last;
  while (true) {
    const auto next = get("/api/session/" + id + "/next");
    EXPECT_EQ(next["trial_index"], trials);
    EXPECT_EQ(next["width"], 64);
    EXPECT_EQ(svrt::testing::base64_decode(next["pixels"].get<std::string>()).size(), 64u * 64u);
    last = post("/api/session/" + id + "/answer", {{"label", read_label(next)}});
    ++trials;
    EXPECT_TRUE(last["correct"].get<bool>());
    if (last["status"] != "active") break;
  }
  EXPECT_EQ(last["status"], "solved");
  EXPECT_EQ(last["trials"], 10);
  EXPECT_EQ(trials, 10);
  const auto cohort = get("/api/cohort/1");
  EXPECT_EQ(cohort["p_a"], 1);
  EXPECT_EQ(cohort["n"], 1);
  EXPECT_EQ(cohort["accuracy"], 1.0);
}

TEST_F(ServerTest, CohortOfThreeSolvedAndOneFailed) {
  for (int s = 0; s < 4; ++s) {
    const bool honest = s < 3;
    const auto id = new_session(1);
    json last;
    do {
      const int seen = read_label(get("/api/session/" + id + "/next"));
      last = post("/api/session/" + id + "/answer", {{"label", honest ? seen : 1 - seen}});
    } while (last["status"] == "active");
    EXPECT_EQ(last["status"], honest ? "solved" : "failed");
    EXPECT_EQ(last["trials"], honest ? 10 : 50);
  }
  const auto cohort = get("/api/cohort/1");
  EXPECT_EQ(cohort["p_a"], 3);
  EXPECT_EQ(cohort["p_n"], 1);
  EXPECT_EQ(cohort["accuracy"].get<double>(), 0.875);
}

TEST_F(ServerTest, EmptyCohortHasNullAccuracy) {
  const auto cohort = get("/api/cohort/2");
  EXPECT_EQ(cohort["n"], 0);
  EXPECT_TRUE(cohort["accuracy"].is_null());
}

TEST_F(ServerTest, ErrorStatuses) {
  EXPECT_EQ(get("/api/session/nope/next", 404)["error"], "not_found");
  const auto id = new_session(2);
  EXPECT_EQ(post("/api/session/" + id + "/answer", {{"label", 0}}, 409)["error"], "conflict");
  get("/api/session/" + id + "/next");
  EXPECT_EQ(post("/api/session/" + id + "/answer", {{"label", 5}}, 400)["error"], "invalid_argument");
  post("/api/session/" + id + "/answer", {{"label", 0}});
  post("/api/session/" + id + "/answer", {{"label", 0}}, 409);
  post("/api/session", {{"problem", 3}}, 400);
  post("/api/session", {{"problem", 4}}, 400);
  post("/api/session", {{"nothing", 1}}, 400);
  const auto bad = client_->Post("/api/session", "{not json", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);
}

TEST_F(ServerTest, HistoryListsAnsweredTrials) {
  const auto id = new_session(2);
  std::vector<std::string> shown;
  for (int i = 0; i < 3; ++i) {
    shown.push_back(get("/api/session/" + id + "/next")["pixels"]);
    post("/api/session/" + id + "/answer", {{"label", 1}});
  }
  const auto history = get("/api/session/" + id + "/history");
  ASSERT_TRUE(history.is_array());
  ASSERT_EQ(history.size(), 3u);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(history[i]["trial_index"], i);
    EXPECT_EQ(history[i]["given_label"], 1);
    EXPECT_EQ(history[i]["pixels"], shown[i]);
    EXPECT_EQ(history[i]["correct"].get<bool>(), history[i]["true_label"] == 1);
  }
  get("/api/session/missing/history", 404);
}

TEST_F(ServerTest, CorsPreflight) {
  const auto res = client_->Options("/api/session");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 204);
  EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "*");
}
