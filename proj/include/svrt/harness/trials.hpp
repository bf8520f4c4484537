#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "svrt/geometry.hpp"
#include "svrt/harness/human.hpp"
#include "svrt/problems.hpp"

namespace svrt::harness {

enum class SessionStatus { active, solved, failed };
std::string to_string(SessionStatus status);

struct SessionParams {
  int k_consecutive = 10;  // consecutive correct answers that count as solved
  int max_trials = 50;     // answered trials after which an unsolved session fails
  int image_size = 64;

  void validate() const;
};

struct Trial {
  int index = 0;  // 0-based
  std::uint64_t per_image_seed = 0;
  int true_label = 0;
  std::optional<int> given_label;
  bool correct = false;
};

struct AnswerOutcome {
  bool correct = false;
  int true_label = 0;
  SessionStatus status = SessionStatus::active;
  int trials = 0;       // answered so far
  int consecutive = 0;  // current run of correct answers
};

/// Stopping-rule state machine of one participant on one problem. Labels are balanced and
/// shuffled over max_trials; the sequence depends only on the seed. Not thread-safe.
class TrialSession {
 public:
  TrialSession(int problem, SessionParams params, std::uint64_t seed);

  int problem() const { return problem_; }
  const SessionParams& params() const { return params_; }
  SessionStatus status() const { return status_; }
  int consecutive() const { return consecutive_; }
  int answered() const;
  /// Presented trials, answered ones first in order, then at most one pending.
  const std::vector<Trial>& trials() const { return trials_; }

  /// The pending trial; presents a new one when none is pending. Throws Conflict when finished.
  const Trial& next();
  /// Answers the pending trial. Throws Conflict when no trial is pending (including a repeated
  /// answer) or the session is finished, InvalidArgument for a label outside {0, 1}.
  AnswerOutcome answer(int label);

 private:
  int problem_;
  SessionParams params_;
  std::uint64_t seed_;
  std::vector<int> labels_;
  std::vector<Trial> trials_;
  int consecutive_ = 0;
  SessionStatus status_ = SessionStatus::active;
};

struct TrialImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major, 255 background, 0 ink
};

struct NextTrial {
  int trial_index = 0;
  TrialImage image;
};

struct HistoryEntry {
  Trial trial;
  TrialImage image;
};

/// Deterministic image of one trial.
TrialImage trial_image(int problem, int label, std::uint64_t per_image_seed, int image_size);

/// Thread-safe registry of sessions. Each session is serialized by its own mutex; sessions never
/// block each other beyond the registry lookup.
class TrialSessionManager {
 public:
  /// `problems` lists the problems participants may be given; empty means all.
  TrialSessionManager(SessionParams params, std::uint64_t seed, std::vector<int> problems = {},
                      std::optional<std::filesystem::path> log_path = std::nullopt);

  const SessionParams& params() const { return params_; }

  /// Throws InvalidArgument for an unknown or unbound problem.
  std::string create(int problem);
  NextTrial next(const std::string& id);
  AnswerOutcome answer(const std::string& id, int label);
  std::vector<HistoryEntry> history(const std::string& id);
  SessionStatus status(const std::string& id);
  /// Finished sessions of the problem: solved count as p_a, failed as p_n. Active ones are ignored.
  HumanCohortStats cohort(int problem);

 private:
  struct Entry {
    std::mutex mutex;
    TrialSession session;
    std::vector<TrialImage> images;  // per presented trial
    Entry(int problem, SessionParams params, std::uint64_t seed) : session(problem, params, seed) {}
  };
  std::shared_ptr<Entry> find(const std::string& id);
  void append_log(const std::string& id, const Entry& entry, const AnswerOutcome& outcome);

  SessionParams params_;
  std::uint64_t seed_;
  std::vector<int> problems_;
  std::mutex registry_mutex_;
  std::uint64_t created_ = 0;
  std::unordered_map<std::string, std::shared_ptr<Entry>> sessions_;
  std::mutex log_mutex_;
  std::optional<std::ofstream> log_;
};

}  // namespace svrt::harness
