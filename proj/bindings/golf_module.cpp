#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "golf/golf.hpp"
#include "golf/metrics.hpp"
#include "golf/trainer.hpp"

namespace py = pybind11;

namespace {

golf::grpo::AdvMode adv_mode_from_string(const std::string& mode) {
  if (mode == "grpo") return golf::grpo::AdvMode::grpo;
  if (mode == "dr_grpo") return golf::grpo::AdvMode::dr_grpo;
  throw golf::error(golf::errc::bad_config, "mode must be 'grpo' or 'dr_grpo'");
}

golf::envs::TaskKind task_kind_from_string(const std::string& kind) {
  if (kind == "unique_symbol_count") return golf::envs::TaskKind::unique_symbol_count;
  if (kind == "exact_answer_arithmetic") return golf::envs::TaskKind::exact_answer_arithmetic;
  if (kind == "sorted_output") return golf::envs::TaskKind::sorted_output;
  throw golf::error(golf::errc::bad_config, "unknown task kind '" + kind + "'");
}

// Thin wrappers so the python surface works with plain lists of ints/floats.
struct PyPolicy {
  golf::policy::PolicyParams params;

  PyPolicy(int vocab, int d_emb, int d_h, uint64_t seed)
      : params(golf::policy::PolicyParams::init({vocab, d_emb, d_h}, seed)) {}

  size_t num_params() const { return params.size(); }

  std::pair<golf::TokenSeq, std::vector<double>> sample(const golf::TokenSeq& context,
                                                        int max_len, double temperature,
                                                        uint64_t seed, int eos,
                                                        bool greedy) const {
    auto result = golf::policy::sample(params, context, max_len, temperature, seed, eos, greedy);
    return {result.response, result.logprobs};
  }

  std::vector<double> logprobs(const golf::TokenSeq& context,
                               const golf::TokenSeq& response) const {
    return golf::policy::logprobs(params, context, response);
  }

  std::vector<double> token_entropies(const golf::TokenSeq& context,
                                      const golf::TokenSeq& response) const {
    return golf::policy::token_entropies(params, context, response);
  }

  std::vector<std::vector<double>> step_distributions(const golf::TokenSeq& context,
                                                      const golf::TokenSeq& response) const {
    return golf::policy::step_distributions(params, context, response);
  }
};

struct PyTask {
  golf::envs::TaskSpec spec;

  PyTask(const std::string& kind, int difficulty, int max_prompt_len, int max_response_len) {
    spec.kind = task_kind_from_string(kind);
    spec.difficulty = difficulty;
    spec.max_prompt_len = max_prompt_len;
    spec.max_response_len = max_response_len;
  }

  std::pair<golf::TokenSeq, golf::TokenSeq> generate_instance(uint64_t seed) const {
    auto inst = golf::envs::generate_instance(spec, seed);
    return {inst.prompt, inst.hidden_target};
  }

  py::dict verify(const golf::TokenSeq& prompt, const golf::TokenSeq& hidden_target,
                  const golf::TokenSeq& response) const {
    auto verdict = golf::envs::verify(spec, prompt, hidden_target, response);
    py::dict out;
    out["reward"] = verdict.reward;
    out["critique_tokens"] = verdict.critique.tokens;
    out["critique_kind"] = static_cast<int>(verdict.critique.kind);
    return out;
  }
};

}  // namespace

PYBIND11_MODULE(golf_rl, m) {
  m.doc() = "group-relative policy optimization with group-level feedback";

  m.def(
      "group_advantages",
      [](const std::vector<double>& rewards, const std::string& mode) {
        return golf::grpo::group_advantages(rewards, adv_mode_from_string(mode)).values;
      },
      py::arg("rewards"), py::arg("mode") = "dr_grpo");
  m.def("clip_term", &golf::grpo::clip_term, py::arg("ratio"), py::arg("advantage"),
        py::arg("epsilon"));
  m.def("reshape_ratio", &golf::refine::reshape_ratio, py::arg("u"), py::arg("lambda_"));
  m.def("should_inject", &golf::refine::should_inject, py::arg("mean_reward"), py::arg("tau"));
  m.def("pass_at_k", &golf::metrics::pass_at_k, py::arg("n"), py::arg("c"), py::arg("k"));
  m.def(
      "avg_at_n",
      [](const std::vector<double>& rewards) { return golf::metrics::avg_at_n(rewards); },
      py::arg("rewards"));

  py::class_<PyPolicy>(m, "Policy")
      .def(py::init<int, int, int, uint64_t>(), py::arg("vocab") = 64, py::arg("d_emb") = 32,
           py::arg("d_h") = 64, py::arg("seed") = 1)
      .def("num_params", &PyPolicy::num_params)
      .def("sample", &PyPolicy::sample, py::arg("context"), py::arg("max_len"),
           py::arg("temperature") = 1.0, py::arg("seed") = 1, py::arg("eos") = 33,
           py::arg("greedy") = false)
      .def("logprobs", &PyPolicy::logprobs, py::arg("context"), py::arg("response"))
      .def("token_entropies", &PyPolicy::token_entropies, py::arg("context"),
           py::arg("response"))
      .def("step_distributions", &PyPolicy::step_distributions, py::arg("context"),
           py::arg("response"));

  py::class_<PyTask>(m, "Task")
      .def(py::init<const std::string&, int, int, int>(), py::arg("kind"), py::arg("difficulty"),
           py::arg("max_prompt_len") = 16, py::arg("max_response_len") = 16)
      .def("generate_instance", &PyTask::generate_instance, py::arg("seed"))
      .def("verify", &PyTask::verify, py::arg("prompt"), py::arg("hidden_target"),
           py::arg("response"));

  m.def(
      "run_experiment",
      [](const std::string& config_path,
         const std::map<std::string, std::string>& overrides) {
        golf::trainer::TrainConfig config;
        if (!config_path.empty()) config = golf::trainer::parse_config_file(config_path);
        for (const auto& [key, value] : overrides)
          golf::trainer::apply_override(config, key, value);
        return golf::trainer::run_experiment(config).string();
      },
      py::arg("config_path") = "",
      py::arg("overrides") = std::map<std::string, std::string>{});
}
