#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <thread>

#include "p1_oracle.hpp"
#include "svrt/error.hpp"
#include "svrt/harness/experiments.hpp"
#include "svrt/harness/human.hpp"
#include "svrt/harness/report.hpp"
#include "svrt/harness/trials.hpp"

using namespace svrt;
using namespace svrt::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("svrt_harness_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

ExperimentConfig tiny_config(const fs::path& root) {
  ExperimentConfig c;
  c.data.n_train = 8;
  c.data.n_test = 4;
  c.data.master_seed = 3;
  c.data.output_path = root;
  c.training.iterations = 10;
  c.training.batch_size = 8;
  c.training.architecture = "small";
  c.training.seed = 4;
  return c;
}

int p1_answer(TrialSessionManager& m, const std::string& id) {
  const auto t = m.next(id);
  return svrt::testing::p1_label_from_pixels(t.image.width, t.image.height, t.image.pixels);
}

}  // namespace

TEST(HumanAccuracy, MatchesExactRationalForAllSmallCohorts) {
  // (2 p_a + p_n) / (2 n) must be the correctly rounded double of the exact rational.
  for (std::int64_t n = 1; n <= 300; ++n) {
    for (std::int64_t pa = 0; pa <= n; ++pa) {
      const double a = human_accuracy({pa, n - pa, n});
      const double expected = double(2 * pa + (n - pa)) / double(2 * n);
      ASSERT_EQ(a, expected) << pa << "/" << n;
      ASSERT_NEAR(a, 0.5 + double(pa) / (2.0 * n), 1e-15);
    }
  }
}

TEST(HumanAccuracy, KnownValues) {
  EXPECT_EQ(human_accuracy({13, 7, 20}), 0.825);
  EXPECT_EQ(human_accuracy({0, 9, 9}), 0.5);
  EXPECT_EQ(human_accuracy({9, 0, 9}), 1.0);
  EXPECT_EQ(human_accuracy({3, 1, 4}), 0.875);
}

TEST(HumanAccuracy, RejectsInconsistentCounts) {
  EXPECT_THROW(human_accuracy({1, 1, 3}), InvalidArgument);
  EXPECT_THROW(human_accuracy({0, 0, 0}), InvalidArgument);
  EXPECT_THROW(human_accuracy({-1, 2, 1}), InvalidArgument);
}

TEST(Report, ReferenceAveragesFollowFromTheRows) {
  const auto& refs = reference_accuracies();
  ASSERT_EQ(refs.size(), 20u);
  double lenet = 0, google = 0, baseline = 0, human = 0;
  for (const auto& r : refs) {
    lenet += r.lenet / 20;
    google += r.googlenet / 20;
    baseline += r.svrt_baseline / 20;
    human += r.human / 20;
  }
  EXPECT_NEAR(lenet, 0.77, 0.005);
  EXPECT_NEAR(google, 0.76, 0.005);
  EXPECT_NEAR(baseline, 0.83, 0.005);
  EXPECT_NEAR(human, 0.93, 0.005);
}

TEST(Report, SpotValuesAndControls) {
  EXPECT_EQ(reference_accuracy(22)->human, 1.00);
  EXPECT_EQ(reference_accuracy(16)->lenet, 0.98);
  EXPECT_EQ(reference_accuracy(17)->googlenet, 0.95);
  EXPECT_EQ(reference_accuracy(21)->svrt_baseline, 0.50);
  EXPECT_FALSE(reference_accuracy(3));
  EXPECT_EQ(reference_control_accuracy(6), 0.75);
  EXPECT_EQ(reference_control_accuracy(8), 0.95);
  EXPECT_EQ(reference_control_accuracy(17), 0.77);
  EXPECT_FALSE(reference_control_accuracy(1));
}

TEST(Report, CsvRoundTripIsExact) {
  const std::vector<ResultRow> rows{{1, "original", 64, 2000, 0.1 + 0.2, "compare", 18446744073709551615ull, 1.5},
                                    {17, "identical_control", 128, 10, 1.0 / 3.0, "compare+relative-position", 0,
                                     0.0}};
  const auto text = to_csv(rows);
  EXPECT_EQ(text.substr(0, kCsvHeader.size()), kCsvHeader);
  EXPECT_EQ(parse_csv(text), rows);
  EXPECT_THROW(parse_csv("wrong,header\n"), InvalidArgument);
  EXPECT_THROW(parse_csv(std::string(kCsvHeader) + "\n1,original,64\n"), InvalidArgument);
}

TEST(Report, TableHasThreeAverageRows) {
  std::vector<ResultRow> rows;
  for (const auto& r : reference_accuracies())
    rows.push_back({r.problem, "original", 64, 2000, r.lenet, "", 0, 0});
  const auto table = render_table(rows);
  std::size_t count = 0;
  for (std::size_t pos = 0; (pos = table.find("\naverage", pos)) != std::string::npos; ++pos) ++count;
  EXPECT_EQ(count, 3u);
  EXPECT_NE(table.find("comparison"), std::string::npos);
  EXPECT_NE(table.find("all"), std::string::npos);
  EXPECT_LT(table.find("\n22 "), table.find("\n2 "));
  EXPECT_NE(table.find("\n2 "), std::string::npos);
}

TEST(Session, AlwaysCorrectSolvesInExactlyK) {
  for (int k : {1, 3, 10}) {
    TrialSession s(1, {k, 50, 64}, 7);
    int answered = 0;
    while (s.status() == SessionStatus::active) {
      const auto& t = s.next();
      s.answer(t.true_label);
      ++answered;
    }
    EXPECT_EQ(s.status(), SessionStatus::solved);
    EXPECT_EQ(answered, k);
  }
}

TEST(Session, AlwaysWrongFailsAtMaxTrials) {
  TrialSession s(1, {10, 50, 64}, 8);
  while (s.status() == SessionStatus::active) s.answer(1 - s.next().true_label);
  EXPECT_EQ(s.status(), SessionStatus::failed);
  EXPECT_EQ(s.answered(), 50);
  EXPECT_THROW(s.next(), Conflict);
}

TEST(Session, WrongAnswerResetsTheRun) {
  TrialSession s(1, {3, 50, 64}, 9);
  s.answer(s.next().true_label);
  s.answer(s.next().true_label);
  const auto o = s.answer(1 - s.next().true_label);
  EXPECT_FALSE(o.correct);
  EXPECT_EQ(o.consecutive, 0);
  for (int i = 0; i < 3; ++i) s.answer(s.next().true_label);
  EXPECT_EQ(s.status(), SessionStatus::solved);
  EXPECT_EQ(s.answered(), 6);
}

TEST(Session, LabelsAreBalancedAndNextIsIdempotent) {
  TrialSession s(2, {50, 50, 64}, 10);
  int ones = 0;
  while (s.status() == SessionStatus::active) {
    const auto first = s.next().index;
    EXPECT_EQ(s.next().index, first);
    ones += s.next().true_label;
    s.answer(0);
  }
  EXPECT_EQ(ones, 25);
}

TEST(Session, AnswerWithoutPendingTrialConflicts) {
  TrialSession s(1, {10, 50, 64}, 11);
  EXPECT_THROW(s.answer(0), Conflict);
  s.next();
  EXPECT_THROW(s.answer(2), InvalidArgument);
  s.answer(0);
  EXPECT_THROW(s.answer(0), Conflict);
}

TEST(Session, CoinFlipperRarelySolves) {
  Rng rng(12);
  int solved = 0;
  for (int i = 0; i < 400; ++i) {
    TrialSession s(1, {10, 50, 64}, i);
    while (s.status() == SessionStatus::active) {
      s.next();
      s.answer(rng.coin() ? 1 : 0);
    }
    solved += s.status() == SessionStatus::solved;
  }
  // A run of 10 heads within 50 flips has probability about 0.022.
  EXPECT_LT(solved / 400.0, 0.06);
}

TEST(Session, ParamsValidation) {
  EXPECT_THROW((SessionParams{0, 50, 64}.validate()), InvalidArgument);
  EXPECT_THROW((SessionParams{10, 5, 64}.validate()), InvalidArgument);
  EXPECT_THROW((SessionParams{10, 50, 40}.validate()), InvalidArgument);
}

TEST(TrialImage, DeterministicAndMatchesLabel) {
  const auto a = trial_image(1, 1, 99, 64), b = trial_image(1, 1, 99, 64);
  EXPECT_EQ(a.pixels, b.pixels);
  EXPECT_EQ(a.width, 64);
  for (std::uint64_t seed = 0; seed < 40; ++seed)
    for (int label : {0, 1}) {
      const auto img = trial_image(1, label, seed, 64);
      EXPECT_EQ(svrt::testing::p1_label_from_pixels(img.width, img.height, img.pixels), label);
    }
}

TEST(Manager, ImageReadingClientsFollowTheStoppingRule) {
  TrialSessionManager m({10, 50, 64}, 1, {1});
  for (int i = 0; i < 3; ++i) {
    const auto id = m.create(1);
    int trials = 0;
    while (m.status(id) == SessionStatus::active) {
      m.answer(id, p1_answer(m, id));
      ++trials;
    }
    EXPECT_EQ(m.status(id), SessionStatus::solved);
    EXPECT_EQ(trials, 10);
  }
  const auto loser = m.create(1);
  int trials = 0;
  while (m.status(loser) == SessionStatus::active) {
    m.answer(loser, 1 - p1_answer(m, loser));
    ++trials;
  }
  EXPECT_EQ(m.status(loser), SessionStatus::failed);
  EXPECT_EQ(trials, 50);
  const auto stats = m.cohort(1);
  EXPECT_EQ(stats, (HumanCohortStats{3, 1, 4}));
  EXPECT_EQ(human_accuracy(stats), 0.875);
}

TEST(Manager, ActiveSessionsAreNotCounted) {
  TrialSessionManager m({2, 50, 64}, 2);
  const auto id = m.create(2);
  m.next(id);
  EXPECT_EQ(m.cohort(2).n, 0);
  EXPECT_THROW(m.next("s_unknown"), NotFound);
  EXPECT_THROW(m.create(3), InvalidArgument);
  TrialSessionManager only_one({2, 50, 64}, 2, {1});
  EXPECT_THROW(only_one.create(2), InvalidArgument);
}

TEST(Manager, HistoryHoldsAnsweredTrialsWithImages) {
  TrialSessionManager m({10, 50, 64}, 3);
  const auto id = m.create(1);
  std::vector<std::vector<std::uint8_t>> shown;
  for (int i = 0; i < 4; ++i) {
    shown.push_back(m.next(id).image.pixels);
    m.answer(id, 0);
  }
  m.next(id);
  const auto h = m.history(id);
  ASSERT_EQ(h.size(), 4u);
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(h[i].trial.index, i);
    EXPECT_EQ(h[i].trial.given_label, 0);
    EXPECT_EQ(h[i].image.pixels, shown[i]);
    EXPECT_EQ(h[i].trial.correct, h[i].trial.true_label == 0);
  }
}

TEST(Manager, ConcurrentSessionsStayIndependent) {
  TrialSessionManager m({5, 50, 64}, 4, {1});
  std::vector<std::string> ids(8);
  std::vector<int> trials(8, 0);
  std::vector<std::thread> workers;
  for (int w = 0; w < 8; ++w) {
    workers.emplace_back([&, w] {
      ids[w] = m.create(1);
      while (m.status(ids[w]) == SessionStatus::active) {
        m.answer(ids[w], p1_answer(m, ids[w]));
        ++trials[w];
      }
    });
  }
  for (auto& t : workers) t.join();
  EXPECT_EQ(std::set<std::string>(ids.begin(), ids.end()).size(), 8u);
  for (int w = 0; w < 8; ++w) EXPECT_EQ(trials[w], 5);
  EXPECT_EQ(m.cohort(1), (HumanCohortStats{8, 0, 8}));
}

TEST(Manager, DoubleAnswerRaceHasOneWinner) {
  TrialSessionManager m({10, 50, 64}, 5);
  const auto id = m.create(1);
  m.next(id);
  std::atomic<int> ok{0}, conflict{0};
  std::vector<std::thread> workers;
  for (int i = 0; i < 4; ++i)
    workers.emplace_back([&] {
      try {
        m.answer(id, 0);
        ++ok;
      } catch (const Conflict&) {
        ++conflict;
      }
    });
  for (auto& t : workers) t.join();
  EXPECT_EQ(ok, 1);
  EXPECT_EQ(conflict, 3);
}

TEST(Manager, AppendsOneLogLinePerAnswer) {
  const auto dir = scratch_dir("log");
  const auto path = dir / "sessions.jsonl";
  {
    TrialSessionManager m({10, 50, 64}, 6, {}, path);
    const auto id = m.create(2);
    for (int i = 0; i < 3; ++i) {
      m.next(id);
      m.answer(id, 1);
    }
  }
  std::ifstream in(path);
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    EXPECT_NE(line.find("\"given_label\":1"), std::string::npos);
    EXPECT_NE(line.find("\"trial\":" + std::to_string(lines)), std::string::npos);
    ++lines;
  }
  EXPECT_EQ(lines, 3);
}

TEST(Experiments, RunSingleProducesARow) {
  const auto root = scratch_dir("single");
  auto config = tiny_config(root);
  config.checkpoint_dir = root / "ckpt";
  const auto row = run_single(problems::ProblemId(2), problems::VariantKind::original(), config);
  EXPECT_EQ(row.problem, 2);
  EXPECT_EQ(row.variant, "original");
  EXPECT_EQ(row.n_train, 8);
  EXPECT_EQ(row.category, "relative-position");
  EXPECT_GE(row.accuracy, 0.0);
  EXPECT_LE(row.accuracy, 1.0);
  EXPECT_TRUE(fs::exists(root / "p2" / "original" / "manifest.jsonl"));
  EXPECT_TRUE(fs::exists(root / "ckpt" / "p2_original_64_8.ckpt"));
  const auto again = run_single(problems::ProblemId(2), problems::VariantKind::original(), config);
  EXPECT_EQ(again.accuracy, row.accuracy);
}

TEST(Experiments, BenchmarkRecordsFailuresAndContinues) {
  auto config = tiny_config(scratch_dir("bench"));
  config.training.iterations = 0;
  const auto r = run_benchmark({problems::ProblemId(2), problems::ProblemId(4)}, config);
  EXPECT_TRUE(r.rows.empty());
  ASSERT_EQ(r.failures.size(), 2u);
  EXPECT_EQ(r.failures[0].problem, 2);
  EXPECT_EQ(r.failures[0].kind, "invalid_argument");
  config.training.iterations = 5;
  const auto ok = run_benchmark({problems::ProblemId(2)}, config);
  EXPECT_EQ(ok.rows.size(), 1u);
  EXPECT_TRUE(ok.failures.empty());
}

TEST(Experiments, AuditListsControlNullAndInjectedVariants) {
  const auto report = audit_leakage(problems::ProblemId(1), tiny_config(scratch_dir("audit")));
  ASSERT_EQ(report.entries.size(), 4u);
  EXPECT_EQ(report.entries[0].variant, "identical_control");
  EXPECT_TRUE(report.entries[1].injected);
  EXPECT_TRUE(report.entries[2].injected);
  EXPECT_EQ(report.entries[3].variant, "null");
  EXPECT_FALSE(report.entries[3].injected);
  bool flagged = false;
  for (const auto& e : report.entries) {
    EXPECT_EQ(e.leak, e.accuracy > kLeakThreshold);
    if (!e.injected) flagged = flagged || e.leak;
  }
  EXPECT_EQ(report.generator_leak, flagged);
  const auto text = render_audit(report);
  EXPECT_NE(text.find("identical_control"), std::string::npos);
  const auto no_control = audit_leakage(problems::ProblemId(2), tiny_config(scratch_dir("audit2")));
  EXPECT_EQ(no_control.entries.size(), 3u);
}

TEST(Experiments, AblationAndSweepShapes) {
  const auto root = scratch_dir("ablate");
  const auto config = tiny_config(root);
  const auto rows = resolution_ablation(problems::ProblemId(2), {64, 128}, config);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].image_size, 64);
  EXPECT_EQ(rows[1].image_size, 128);
  EXPECT_THROW(resolution_ablation(problems::ProblemId(2), {96}, config), InvalidArgument);

  const auto sweep = sample_efficiency(problems::ProblemId(2), {4, 8}, config, 0.0);
  ASSERT_EQ(sweep.curve.size(), 2u);
  EXPECT_EQ(sweep.curve[0].n_train, 4);
  EXPECT_EQ(sweep.smallest_n, 4);
  const auto unreachable = sample_efficiency(problems::ProblemId(2), {4}, config, 1.01);
  EXPECT_FALSE(unreachable.smallest_n);
  EXPECT_THROW(sample_efficiency(problems::ProblemId(2), {8, 4}, config), InvalidArgument);
}
