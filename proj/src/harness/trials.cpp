#include "svrt/harness/trials.hpp"

#include <algorithm>
#include <cstdio>
#include <json.hpp>

#include "svrt/error.hpp"
#include "svrt/rng.hpp"

namespace svrt::harness {

std::string to_string(SessionStatus status) {
  switch (status) {
    case SessionStatus::active: return "active";
    case SessionStatus::solved: return "solved";
    case SessionStatus::failed: return "failed";
  }
  return "unknown";
}

void SessionParams::validate() const {
  if (k_consecutive < 1) throw InvalidArgument("k_consecutive must be >= 1");
  if (max_trials < k_consecutive) throw InvalidArgument("max_trials must be >= k_consecutive");
  if (image_size < problems::kMinCanvas) throw InvalidArgument("image size below the minimum canvas");
}

TrialSession::TrialSession(int problem, SessionParams params, std::uint64_t seed)
    : problem_(problem), params_(params), seed_(seed) {
  params_.validate();
  static_cast<void>(problems::ProblemId(problem));  // validates
  Rng rng(hash_combine(seed, 0x6c61626c));
  labels_.resize(params_.max_trials);
  for (int i = 0; i < params_.max_trials; ++i) labels_[i] = i % 2;
  if (params_.max_trials % 2 == 1) labels_.back() = rng.coin() ? 1 : 0;
  shuffle(labels_, rng);
}

int TrialSession::answered() const {
  return static_cast<int>(std::count_if(trials_.begin(), trials_.end(), [](const Trial& t) { return t.given_label.has_value(); }));
}

const Trial& TrialSession::next() {
  if (status_ != SessionStatus::active) throw Conflict("session is " + to_string(status_));
  if (!trials_.empty() && !trials_.back().given_label) return trials_.back();
  Trial t;
  t.index = static_cast<int>(trials_.size());
  t.per_image_seed = hash_combine(seed_, static_cast<std::uint64_t>(t.index));
  t.true_label = labels_[t.index];
  trials_.push_back(t);
  return trials_.back();
}

AnswerOutcome TrialSession::answer(int label) {
  if (label != 0 && label != 1) throw InvalidArgument("label must be 0 or 1");
  if (status_ != SessionStatus::active) throw Conflict("session is " + to_string(status_));
  if (trials_.empty() || trials_.back().given_label) throw Conflict("no pending trial to answer");
  Trial& t = trials_.back();
  t.given_label = label;
  t.correct = label == t.true_label;
  consecutive_ = t.correct ? consecutive_ + 1 : 0;
  const int done = static_cast<int>(trials_.size());
  if (consecutive_ >= params_.k_consecutive)
    status_ = SessionStatus::solved;
  else if (done >= params_.max_trials)
    status_ = SessionStatus::failed;
  return {t.correct, t.true_label, status_, done, consecutive_};
}

TrialImage trial_image(int problem, int label, std::uint64_t per_image_seed, int image_size) {
  const auto spec = problems::problem_spec(problems::ProblemId(problem));
  Rng rng(per_image_seed);
  const auto bitmap = problems::render(problems::sample_scene(spec, problems::ClassLabel(label), rng, image_size));
  return {bitmap.width, bitmap.height, bitmap.pixels};
}

TrialSessionManager::TrialSessionManager(SessionParams params, std::uint64_t seed, std::vector<int> problems,
                                         std::optional<std::filesystem::path> log_path)
    : params_(params), seed_(seed), problems_(std::move(problems)) {
  params_.validate();
  for (int p : problems_) static_cast<void>(problems::ProblemId(p));
  if (log_path) {
    log_.emplace(*log_path, std::ios::app);
    if (!*log_) throw IoError("cannot open session log " + log_path->string());
  }
}

std::string TrialSessionManager::create(int problem) {
  static_cast<void>(problems::ProblemId(problem));  // validates
  if (!problems_.empty() && std::find(problems_.begin(), problems_.end(), problem) == problems_.end())
    throw InvalidArgument("problem " + std::to_string(problem) + " is not served");
  std::lock_guard lock(registry_mutex_);
  const std::uint64_t session_seed = hash_combine(seed_, created_++);
  char id[24];
  std::snprintf(id, sizeof id, "s%016llx", static_cast<unsigned long long>(session_seed));
  sessions_.emplace(id, std::make_shared<Entry>(problem, params_, session_seed));
  return id;
}

std::shared_ptr<TrialSessionManager::Entry> TrialSessionManager::find(const std::string& id) {
  std::lock_guard lock(registry_mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw NotFound("unknown session '" + id + "'");
  return it->second;
}

NextTrial TrialSessionManager::next(const std::string& id) {
  auto entry = find(id);
  std::lock_guard lock(entry->mutex);
  const Trial& t = entry->session.next();
  if (entry->images.size() <= std::size_t(t.index))
    entry->images.push_back(trial_image(entry->session.problem(), t.true_label, t.per_image_seed, params_.image_size));
  return {t.index, entry->images[t.index]};
}

AnswerOutcome TrialSessionManager::answer(const std::string& id, int label) {
  auto entry = find(id);
  std::lock_guard lock(entry->mutex);
  const auto outcome = entry->session.answer(label);
  append_log(id, *entry, outcome);
  return outcome;
}

std::vector<HistoryEntry> TrialSessionManager::history(const std::string& id) {
  auto entry = find(id);
  std::lock_guard lock(entry->mutex);
  std::vector<HistoryEntry> out;
  for (const auto& t : entry->session.trials())
    if (t.given_label) out.push_back({t, entry->images[t.index]});
  return out;
}

SessionStatus TrialSessionManager::status(const std::string& id) {
  auto entry = find(id);
  std::lock_guard lock(entry->mutex);
  return entry->session.status();
}

HumanCohortStats TrialSessionManager::cohort(int problem) {
  static_cast<void>(problems::ProblemId(problem));  // validates
  std::vector<std::shared_ptr<Entry>> all;
  {
    std::lock_guard lock(registry_mutex_);
    for (const auto& [id, e] : sessions_) all.push_back(e);
  }
  HumanCohortStats stats;
  for (const auto& e : all) {
    std::lock_guard lock(e->mutex);
    if (e->session.problem() != problem) continue;
    if (e->session.status() == SessionStatus::solved) ++stats.p_a;
    if (e->session.status() == SessionStatus::failed) ++stats.p_n;
  }
  stats.n = stats.p_a + stats.p_n;
  return stats;
}

void TrialSessionManager::append_log(const std::string& id, const Entry& entry, const AnswerOutcome& outcome) {
  if (!log_) return;
  const Trial& t = entry.session.trials().back();
  nlohmann::ordered_json j;
  j["session"] = id;
  j["problem"] = entry.session.problem();
  j["trial"] = t.index;
  j["per_image_seed"] = t.per_image_seed;
  j["true_label"] = t.true_label;
  j["given_label"] = *t.given_label;
  j["correct"] = t.correct;
  j["status"] = to_string(outcome.status);
  std::lock_guard lock(log_mutex_);
  *log_ << j.dump() << '\n';
  log_->flush();
}

}  // namespace svrt::harness
