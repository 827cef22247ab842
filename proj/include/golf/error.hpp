#pragma once

#include <stdexcept>
#include <string>

namespace golf {

// Error codes used across the library. Callers that care about the failure
// kind catch golf::error and switch on code().
enum class errc {
  empty_group,
  non_binary_reward,
  bad_task_spec,
  bad_token,
  bad_shape,
  non_finite_gradient,
  group_too_small,
  missing_behavior,
  no_failures,
  context_overflow,
  no_failure_slot,
  bad_provenance,
  prompt_mismatch,
  empty_batch,
  bad_k,
  no_examples,
  bad_config,
  io_failure,
};

const char* errc_name(errc code);

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  errc code() const { return code_; }

 private:
  errc code_;
};

}  // namespace golf
