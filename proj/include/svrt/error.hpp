#pragma once

#include <stdexcept>
#include <string>

namespace svrt {

/// Base of every error thrown by the workbench. `kind()` is a short stable
/// token used in machine-readable CLI error lines.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

struct GenerationError : Error {
  explicit GenerationError(const std::string& m) : Error("generation", m) {}
};

struct OutOfCanvasError : Error {
  explicit OutOfCanvasError(const std::string& m) : Error("out_of_canvas", m) {}
};

struct InvalidArgument : Error {
  explicit InvalidArgument(const std::string& m) : Error("invalid_argument", m) {}
};

struct IoError : Error {
  explicit IoError(const std::string& m) : Error("io", m) {}
};

struct ShapeMismatch : Error {
  explicit ShapeMismatch(const std::string& m) : Error("shape_mismatch", m) {}
};

struct NumericalError : Error {
  explicit NumericalError(const std::string& m) : Error("numerical", m) {}
};

struct NotFound : Error {
  explicit NotFound(const std::string& m) : Error("not_found", m) {}
};

/// A request that is valid in form but not in the current state (e.g. a
/// second answer for one trial).
struct Conflict : Error {
  explicit Conflict(const std::string& m) : Error("conflict", m) {}
};

/// Non-finite loss or gradient during training. Iteration 0 means the first
/// step already failed.
struct TrainingDiverged : Error {
  TrainingDiverged(int last_good, const std::string& m)
      : Error("diverged", m + " (last good iteration " + std::to_string(last_good) + ")"),
        last_good_iteration(last_good) {}
  int last_good_iteration;
};

}  // namespace svrt
