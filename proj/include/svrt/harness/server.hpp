#pragma once

#include <memory>
#include <string>

#include "svrt/harness/trials.hpp"

namespace svrt::harness {

/// HTTP/JSON front end of a TrialSessionManager.
///
///   POST /api/session               {"problem": p}  -> {"session_id"}
///   GET  /api/session/{id}/next                     -> {"trial_index", "width", "height", "pixels"}
///   POST /api/session/{id}/answer   {"label": 0|1}  -> {"correct", "true_label", "status", "trials"}
///   GET  /api/session/{id}/history                  -> [{"trial_index", "true_label", "given_label",
///                                                        "correct", "width", "height", "pixels"}]
///   GET  /api/cohort/{problem}                      -> {"p_a", "p_n", "n", "accuracy"}
///
/// pixels is base64 of the raw row-major bytes. Errors are {"error": kind, "message"} with
/// 400 (bad request), 404 (unknown session), 409 (answer without a pending trial, finished session).
class TrialServer {
 public:
  explicit TrialServer(TrialSessionManager& manager);
  ~TrialServer();
  TrialServer(const TrialServer&) = delete;
  TrialServer& operator=(const TrialServer&) = delete;

  /// Binds; port 0 picks a free port. Returns the bound port. Throws IoError on failure.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  void serve();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace svrt::harness
