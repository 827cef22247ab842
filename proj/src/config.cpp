#include "golf/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "golf/error.hpp"

namespace golf::trainer {

namespace {

std::string trim(const std::string& s) {
  size_t begin = s.find_first_not_of(" \t\r");
  size_t end = s.find_last_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  return s.substr(begin, end - begin + 1);
}

int parse_int(const std::string& key, const std::string& value) {
  int out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw error(errc::bad_config, key + " expects an integer, got '" + value + "'");
  return out;
}

uint64_t parse_u64(const std::string& key, const std::string& value) {
  uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw error(errc::bad_config, key + " expects an unsigned integer, got '" + value + "'");
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    double out = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return out;
  } catch (const std::exception&) {
    throw error(errc::bad_config, key + " expects a number, got '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "on") return true;
  if (value == "false" || value == "0" || value == "off") return false;
  throw error(errc::bad_config, key + " expects true/false, got '" + value + "'");
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

envs::TaskKind parse_task(const std::string& value) {
  if (value == "unique_symbol_count") return envs::TaskKind::unique_symbol_count;
  if (value == "exact_answer_arithmetic") return envs::TaskKind::exact_answer_arithmetic;
  if (value == "sorted_output") return envs::TaskKind::sorted_output;
  throw error(errc::bad_config, "unknown task '" + value + "'");
}

Algorithm parse_algorithm(const std::string& value) {
  if (value == "grpo") return Algorithm::grpo;
  if (value == "dr_grpo") return Algorithm::dr_grpo;
  if (value == "golf") return Algorithm::golf;
  throw error(errc::bad_config, "unknown algorithm '" + value + "'");
}

envs::FeedbackMode parse_feedback(const std::string& value) {
  if (value == "simple") return envs::FeedbackMode::simple;
  if (value == "intra") return envs::FeedbackMode::intra;
  if (value == "external") return envs::FeedbackMode::external;
  if (value == "mixed") return envs::FeedbackMode::mixed;
  throw error(errc::bad_config, "unknown feedback_mode '" + value + "'");
}

InjectionMode parse_injection(const std::string& value) {
  if (value == "adaptive") return InjectionMode::adaptive;
  if (value == "always") return InjectionMode::always;
  if (value == "never") return InjectionMode::never;
  throw error(errc::bad_config, "unknown injection_mode '" + value + "'");
}

OffPolicyMode parse_offpolicy(const std::string& value) {
  if (value == "mixed_rl") return OffPolicyMode::mixed_rl;
  if (value == "sft") return OffPolicyMode::sft;
  throw error(errc::bad_config, "unknown offpolicy_mode '" + value + "'");
}

}  // namespace

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::grpo: return "grpo";
    case Algorithm::dr_grpo: return "dr_grpo";
    case Algorithm::golf: return "golf";
  }
  return "?";
}

const char* feedback_mode_name(envs::FeedbackMode m) {
  switch (m) {
    case envs::FeedbackMode::simple: return "simple";
    case envs::FeedbackMode::intra: return "intra";
    case envs::FeedbackMode::external: return "external";
    case envs::FeedbackMode::mixed: return "mixed";
  }
  return "?";
}

const char* injection_mode_name(InjectionMode m) {
  switch (m) {
    case InjectionMode::adaptive: return "adaptive";
    case InjectionMode::always: return "always";
    case InjectionMode::never: return "never";
  }
  return "?";
}

const char* offpolicy_mode_name(OffPolicyMode m) {
  switch (m) {
    case OffPolicyMode::mixed_rl: return "mixed_rl";
    case OffPolicyMode::sft: return "sft";
  }
  return "?";
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "task",          "difficulty",      "max_prompt_len",  "max_response_len",
      "max_context_len", "algorithm",     "feedback_mode",   "injection_mode",
      "offpolicy_mode", "joint_refinement", "clip_off_policy", "rollout_n",
      "tau",           "epsilon",         "lambda",          "temperature",
      "learning_rate", "sft_coef",        "entry_cap",       "steps",
      "prompts_per_step", "seed",         "d_emb",           "d_h",
      "init_scale",
      "out_dir",       "checkpoint_every", "eval_instances", "eval_samples",
  };
  return keys;
}

void apply_override(TrainConfig& config, const std::string& key, const std::string& value) {
  if (key == "task") config.task.kind = parse_task(value);
  else if (key == "difficulty") config.task.difficulty = parse_int(key, value);
  else if (key == "max_prompt_len") config.task.max_prompt_len = parse_int(key, value);
  else if (key == "max_response_len") config.task.max_response_len = parse_int(key, value);
  else if (key == "max_context_len") config.max_context_len = parse_int(key, value);
  else if (key == "algorithm") config.algorithm = parse_algorithm(value);
  else if (key == "feedback_mode") config.feedback_mode = parse_feedback(value);
  else if (key == "injection_mode") config.injection_mode = parse_injection(value);
  else if (key == "offpolicy_mode") config.offpolicy_mode = parse_offpolicy(value);
  else if (key == "joint_refinement") config.joint_refinement = parse_bool(key, value);
  else if (key == "clip_off_policy") config.clip_off_policy = parse_bool(key, value);
  else if (key == "rollout_n") config.rollout_n = parse_int(key, value);
  else if (key == "tau") config.tau = parse_double(key, value);
  else if (key == "epsilon") config.epsilon = parse_double(key, value);
  else if (key == "lambda") config.lambda = parse_double(key, value);
  else if (key == "temperature") config.temperature = parse_double(key, value);
  else if (key == "learning_rate") config.learning_rate = parse_double(key, value);
  else if (key == "sft_coef") config.sft_coef = parse_double(key, value);
  else if (key == "entry_cap") config.entry_cap = parse_int(key, value);
  else if (key == "steps") config.steps = parse_int(key, value);
  else if (key == "prompts_per_step") config.prompts_per_step = parse_int(key, value);
  else if (key == "seed") config.seed = parse_u64(key, value);
  else if (key == "d_emb") config.d_emb = parse_int(key, value);
  else if (key == "d_h") config.d_h = parse_int(key, value);
  else if (key == "init_scale") config.init_scale = parse_double(key, value);
  else if (key == "out_dir") config.out_dir = value;
  else if (key == "checkpoint_every") config.checkpoint_every = parse_int(key, value);
  else if (key == "eval_instances") config.eval_instances = parse_int(key, value);
  else if (key == "eval_samples") config.eval_samples = parse_int(key, value);
  else throw error(errc::bad_config, "unknown config key '" + key + "'");
}

TrainConfig parse_config_text(const std::string& text) {
  TrainConfig config;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (size_t hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw error(errc::bad_config,
                  "line " + std::to_string(line_no) + " is not 'key = value': " + line);
    apply_override(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return config;
}

TrainConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw error(errc::io_failure, "cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string serialize_config(const TrainConfig& c) {
  std::ostringstream out;
  out << "# golf run configuration (effective values)\n";
  out << "task = " << envs::task_kind_name(c.task.kind) << "\n";
  out << "difficulty = " << c.task.difficulty << "\n";
  out << "max_prompt_len = " << c.task.max_prompt_len << "\n";
  out << "max_response_len = " << c.task.max_response_len << "\n";
  out << "max_context_len = " << c.max_context_len << "\n";
  out << "algorithm = " << algorithm_name(c.algorithm) << "\n";
  out << "feedback_mode = " << feedback_mode_name(c.feedback_mode) << "\n";
  out << "injection_mode = " << injection_mode_name(c.injection_mode) << "\n";
  out << "offpolicy_mode = " << offpolicy_mode_name(c.offpolicy_mode) << "\n";
  out << "joint_refinement = " << (c.joint_refinement ? "true" : "false") << "\n";
  out << "clip_off_policy = " << (c.clip_off_policy ? "true" : "false") << "\n";
  out << "rollout_n = " << c.rollout_n << "\n";
  out << "tau = " << format_double(c.effective_tau()) << "\n";
  out << "epsilon = " << format_double(c.epsilon) << "\n";
  out << "lambda = " << format_double(c.lambda) << "\n";
  out << "temperature = " << format_double(c.temperature) << "\n";
  out << "learning_rate = " << format_double(c.learning_rate) << "\n";
  out << "sft_coef = " << format_double(c.sft_coef) << "\n";
  out << "entry_cap = " << c.entry_cap << "\n";
  out << "steps = " << c.steps << "\n";
  out << "prompts_per_step = " << c.prompts_per_step << "\n";
  out << "seed = " << c.seed << "\n";
  out << "d_emb = " << c.d_emb << "\n";
  out << "d_h = " << c.d_h << "\n";
  out << "init_scale = " << format_double(c.init_scale) << "\n";
  out << "out_dir = " << c.out_dir << "\n";
  out << "checkpoint_every = " << c.checkpoint_every << "\n";
  out << "eval_instances = " << c.eval_instances << "\n";
  out << "eval_samples = " << c.eval_samples << "\n";
  return out.str();
}

TrainConfig medium_preset() {
  TrainConfig config;
  config.task.kind = envs::TaskKind::unique_symbol_count;
  config.task.difficulty = 15;
  config.task.max_response_len = 16;
  config.init_scale = 0.25;
  return config;
}

TrainConfig hard_preset() {
  TrainConfig config;
  config.task.kind = envs::TaskKind::exact_answer_arithmetic;
  config.task.difficulty = 8;
  config.task.max_response_len = 6;
  config.init_scale = 0.3;
  config.learning_rate = 2e-3;
  return config;
}

}  // namespace golf::trainer
