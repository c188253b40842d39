#pragma once

#include <stdexcept>
#include <string>

namespace uos {

// Least-squares system S*B lost column rank; carries the effective rank so
// callers (e.g. the restart loop) can log it and move on.
class SingularSystemError : public std::runtime_error {
 public:
  SingularSystemError(const std::string& what, int effective_rank)
      : std::runtime_error(what), effective_rank_(effective_rank) {}
  int effective_rank() const noexcept { return effective_rank_; }

 private:
  int effective_rank_;
};

// Rejection sampler starved (acceptance below the configured floor).
class SamplingFailureError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A parameter regime assumption does not hold (e.g. varrho >= 1).
class ConditionViolatedError : public std::domain_error {
  using std::domain_error::domain_error;
};

// Requested analysis only exists in a restricted parameter range.
class OutOfRegimeError : public std::domain_error {
  using std::domain_error::domain_error;
};

// genie_init could not complete a selection with the requested overlap.
class InfeasibleInitError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace uos
