#include "golf/envs.hpp"

#include <algorithm>
#include <array>
#include <set>

#include "golf/rng.hpp"

namespace golf::envs {

namespace vocab {

std::string to_string(const TokenSeq& seq) {
  std::string out;
  for (TokenId t : seq) {
    if (!out.empty()) out += ' ';
    if (t >= digit0 && t < digit0 + 10) {
      out += static_cast<char>('0' + t);
    } else if (t >= letter_a && t < letter_a + num_letters) {
      out += static_cast<char>('a' + (t - letter_a));
    } else {
      switch (t) {
        case plus: out += '+'; break;
        case minus: out += '-'; break;
        case times: out += '*'; break;
        case equals: out += '='; break;
        case comma: out += ','; break;
        case query: out += '?'; break;
        case bos: out += "<bos>"; break;
        case eos: out += "<eos>"; break;
        case sep: out += "<sep>"; break;
        case fail: out += "<fail>"; break;
        case ok: out += "<ok>"; break;
        case kw_unique: out += "<unique>"; break;
        case kw_sorted: out += "<sorted>"; break;
        case kw_answer: out += "<answer>"; break;
        case kw_require: out += "<require>"; break;
        default: out += "<" + std::to_string(t) + ">"; break;
      }
    }
  }
  return out;
}

}  // namespace vocab

const char* task_kind_name(TaskKind kind) {
  switch (kind) {
    case TaskKind::unique_symbol_count: return "unique_symbol_count";
    case TaskKind::exact_answer_arithmetic: return "exact_answer_arithmetic";
    case TaskKind::sorted_output: return "sorted_output";
  }
  return "?";
}

TokenSeq encode_number(int value) {
  if (value < 0) throw error(errc::bad_task_spec, "encode_number of negative value");
  if (value == 0) return {vocab::digit0};
  TokenSeq digits;
  while (value > 0) {
    digits.push_back(vocab::digit0 + value % 10);
    value /= 10;
  }
  std::reverse(digits.begin(), digits.end());
  return digits;
}

static int decode_number(const TokenSeq& digits) {
  int value = 0;
  for (TokenId t : digits) value = value * 10 + (t - vocab::digit0);
  return value;
}

TokenSeq content_tokens(const TokenSeq& seq) {
  TokenSeq out;
  for (TokenId t : seq)
    if (t < vocab::content_end) out.push_back(t);
  return out;
}

int distinct_content_count(const TokenSeq& seq) {
  std::set<TokenId> distinct;
  for (TokenId t : seq)
    if (t < vocab::content_end) distinct.insert(t);
  return static_cast<int>(distinct.size());
}

static bool contains_contiguous(const TokenSeq& haystack, const TokenSeq& needle) {
  if (needle.empty()) return true;
  if (haystack.size() < needle.size()) return false;
  for (size_t i = 0; i + needle.size() <= haystack.size(); ++i) {
    bool match = true;
    for (size_t j = 0; j < needle.size(); ++j) {
      if (haystack[i + j] != needle[j]) {
        match = false;
        break;
      }
    }
    if (match) return true;
  }
  return false;
}

static void validate_spec(const TaskSpec& task) {
  if (task.vocab_size != vocab::size)
    throw error(errc::bad_task_spec, "environments require the shared 64-token vocabulary");
  if (task.difficulty < 1) throw error(errc::bad_task_spec, "difficulty must be >= 1");
  if (task.max_prompt_len < 4 || task.max_response_len < 1)
    throw error(errc::bad_task_spec, "length limits too small");
  switch (task.kind) {
    case TaskKind::unique_symbol_count:
      // Requirement must be satisfiable: enough distinct content symbols and
      // enough room in the response.
      if (task.difficulty > vocab::content_end || task.difficulty > task.max_response_len)
        throw error(errc::bad_task_spec, "distinct-symbol requirement is unsatisfiable");
      break;
    case TaskKind::exact_answer_arithmetic: {
      int worst = task.difficulty * task.difficulty;  // largest product
      size_t prompt_len = 3 + 2 * encode_number(task.difficulty).size() + 2;
      if (prompt_len > static_cast<size_t>(task.max_prompt_len))
        throw error(errc::bad_task_spec, "operands do not fit max_prompt_len");
      if (encode_number(worst).size() > static_cast<size_t>(task.max_response_len))
        throw error(errc::bad_task_spec, "answers do not fit max_response_len");
      break;
    }
    case TaskKind::sorted_output:
      if (task.difficulty + 3 > task.max_prompt_len)
        throw error(errc::bad_task_spec, "list does not fit max_prompt_len");
      if (task.difficulty > task.max_response_len)
        throw error(errc::bad_task_spec, "sorted list does not fit max_response_len");
      break;
  }
}

Instance generate_instance(const TaskSpec& task, uint64_t seed) {
  validate_spec(task);
  rng::Engine engine(seed);
  Instance inst;
  inst.prompt.push_back(vocab::bos);
  switch (task.kind) {
    case TaskKind::unique_symbol_count: {
      // "emit at least k distinct content symbols"; the requirement is drawn
      // from a band below the difficulty so each batch spans a spectrum from
      // routine to frontier instances
      const int lo = std::min(task.difficulty, std::max(2, task.difficulty - 5));
      const int k = lo + static_cast<int>(engine.uniform_int(task.difficulty - lo + 1));
      inst.prompt.push_back(vocab::kw_unique);
      for (TokenId t : encode_number(k)) inst.prompt.push_back(t);
      inst.hidden_target = encode_number(k);
      break;
    }
    case TaskKind::exact_answer_arithmetic: {
      int a = static_cast<int>(engine.uniform_int(task.difficulty + 1));
      int b = static_cast<int>(engine.uniform_int(task.difficulty + 1));
      int op = static_cast<int>(engine.uniform_int(2));
      int result = op == 0 ? a + b : a * b;
      TokenId op_token = op == 0 ? vocab::plus : vocab::times;
      for (TokenId t : encode_number(a)) inst.prompt.push_back(t);
      inst.prompt.push_back(op_token);
      for (TokenId t : encode_number(b)) inst.prompt.push_back(t);
      inst.prompt.push_back(vocab::equals);
      inst.hidden_target = encode_number(result);
      break;
    }
    case TaskKind::sorted_output: {
      inst.prompt.push_back(vocab::kw_sorted);
      TokenSeq letters;
      for (int i = 0; i < task.difficulty; ++i)
        letters.push_back(vocab::letter_a +
                          static_cast<TokenId>(engine.uniform_int(vocab::num_letters)));
      for (TokenId t : letters) inst.prompt.push_back(t);
      std::sort(letters.begin(), letters.end());
      inst.hidden_target = letters;
      break;
    }
  }
  inst.prompt.push_back(vocab::sep);
  if (inst.prompt.size() > static_cast<size_t>(task.max_prompt_len))
    throw error(errc::bad_task_spec, "generated prompt exceeds max_prompt_len");
  return inst;
}

Verdict verify(const TaskSpec& task, const TokenSeq& prompt, const TokenSeq& hidden_target,
               const TokenSeq& response) {
  (void)prompt;  // verification depends only on the hidden target and response
  Verdict verdict;
  switch (task.kind) {
    case TaskKind::unique_symbol_count: {
      int required = decode_number(hidden_target);
      int actual = distinct_content_count(response);
      bool passed = actual >= required;
      verdict.reward = passed ? 1.0 : 0.0;
      // "contains <actual>, at least <required> required"
      verdict.critique.kind = CritiqueKind::constraint_report;
      verdict.critique.tokens.push_back(passed ? vocab::ok : vocab::fail);
      verdict.critique.tokens.push_back(vocab::kw_unique);
      for (TokenId t : encode_number(actual)) verdict.critique.tokens.push_back(t);
      verdict.critique.tokens.push_back(vocab::kw_require);
      for (TokenId t : encode_number(required)) verdict.critique.tokens.push_back(t);
      break;
    }
    case TaskKind::exact_answer_arithmetic:
    case TaskKind::sorted_output: {
      // the answer counts wherever it appears, as in code-based answer checkers
      bool passed = contains_contiguous(content_tokens(response), hidden_target);
      verdict.reward = passed ? 1.0 : 0.0;
      verdict.critique.kind = CritiqueKind::indicative_ground_truth;
      if (passed) {
        verdict.critique.tokens.push_back(vocab::ok);
      } else {
        // carries the ground truth so a refinement can recover it
        verdict.critique.tokens.push_back(vocab::fail);
        verdict.critique.tokens.push_back(vocab::kw_answer);
        for (TokenId t : hidden_target) verdict.critique.tokens.push_back(t);
      }
      break;
    }
  }
  return verdict;
}

CritiqueText critique_for_mode(const Verdict& verdict, FeedbackMode mode) {
  if (verdict.reward == 1.0) return verdict.critique;
  switch (mode) {
    case FeedbackMode::simple:
    case FeedbackMode::intra:
      // intra information enters through context aggregation, not the critique
      return CritiqueText{CritiqueKind::simple, {vocab::fail}};
    case FeedbackMode::external:
    case FeedbackMode::mixed:
      return verdict.critique;
  }
  return verdict.critique;
}

}  // namespace golf::envs
