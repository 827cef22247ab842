#pragma once

#include <cstdint>
#include <string>

#include "golf/types.hpp"

namespace golf::envs {

// Shared token vocabulary for prompts, responses and critiques. Content
// tokens (ids below content_end) are what the tasks count and compare;
// everything above is structural.
namespace vocab {
inline constexpr int size = 64;

inline constexpr TokenId digit0 = 0;    // '0'..'9' -> 0..9
inline constexpr TokenId letter_a = 10; // 'a'..'p' -> 10..25
inline constexpr int num_letters = 16;
inline constexpr TokenId plus = 26;
inline constexpr TokenId minus = 27;
inline constexpr TokenId times = 28;
inline constexpr TokenId equals = 29;
inline constexpr TokenId comma = 30;
inline constexpr TokenId query = 31;
inline constexpr TokenId content_end = 32;

inline constexpr TokenId bos = 32;
inline constexpr TokenId eos = 33;
inline constexpr TokenId sep = 34;
inline constexpr TokenId fail = 35;  // failure marker
inline constexpr TokenId ok = 36;    // satisfaction marker

inline constexpr TokenId kw_unique = 37;
inline constexpr TokenId kw_sorted = 38;
inline constexpr TokenId kw_answer = 39;
inline constexpr TokenId kw_require = 40;

std::string to_string(const TokenSeq& seq);  // human-readable rendering
}  // namespace vocab

enum class TaskKind { unique_symbol_count, exact_answer_arithmetic, sorted_output };
enum class FeedbackMode { simple, intra, external, mixed };

struct TaskSpec {
  TaskKind kind = TaskKind::unique_symbol_count;
  int difficulty = 9;  // required distinct symbols / max operand / list length
  int vocab_size = vocab::size;
  int max_prompt_len = 16;
  int max_response_len = 16;
};

struct Verdict {
  double reward = 0.0;  // {0,1}
  CritiqueText critique;
};

struct Instance {
  TokenSeq prompt;
  TokenSeq hidden_target;  // verifier reference, never shown to the policy
};

/// Deterministically generates a task instance from a seed. The prompt always
/// starts with BOS and ends with SEP; the hidden target is what verify()
/// checks responses against. Throws bad_task_spec when the difficulty cannot
/// fit the configured vocab or length limits.
Instance generate_instance(const TaskSpec& task, uint64_t seed);

/// Pure verification of a response against an instance. Any token sequence is
/// verifiable; the critique names the violated requirement (constraint tasks)
/// or carries the ground truth (exact-answer tasks).
Verdict verify(const TaskSpec& task, const TokenSeq& prompt, const TokenSeq& hidden_target,
               const TokenSeq& response);

/// Reduces a verdict's critique for a feedback ablation mode. Success
/// critiques pass through unchanged; simple and intra modes collapse failure
/// critiques to the bare failure marker.
CritiqueText critique_for_mode(const Verdict& verdict, FeedbackMode mode);

/// Number of distinct content tokens in a sequence.
int distinct_content_count(const TokenSeq& seq);

/// Content tokens of a sequence (structural tokens stripped).
TokenSeq content_tokens(const TokenSeq& seq);

/// Decimal token encoding of a nonnegative integer.
TokenSeq encode_number(int value);

const char* task_kind_name(TaskKind kind);

}  // namespace golf::envs
