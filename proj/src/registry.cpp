#include "uqzoo/registry.hpp"

#include <algorithm>

namespace uqzoo {
namespace {

using enum Category;
constexpr auto U = Orientation::uncertainty;
constexpr auto C = Orientation::confidence;

std::vector<MethodDescriptor> build_registry() {
  const std::vector<std::string> tokens{"token_steps"};
  const std::vector<std::string> output{"class_dist"};
  const std::vector<std::string> samples{"ensemble"};
  const std::vector<std::string> perturbed{"perturbations"};
  const std::vector<std::string> traces{"traces"};

  ParamSpec layer{"layer", ParamType::integer, std::nullopt, {}, 0,
                  "0-based layer to decode; defaults to the middle layer floor(L/2)"};
  ParamSpec orientation{"orientation", ParamType::string, ParamValue{std::string("confidence")},
                        {"confidence", "uncertainty"}, 0,
                        "orientation tag reported with the weighted keyword sum"};

  return {
      {"avg_nll", "Average Negative Log-Likelihood", "Avg Neg Log-Likelihood", predictive, U, tokens, {}},
      {"avg_prob", "Average Probability", "Avg Probability", predictive, C, tokens, {}},
      {"perplexity", "Perplexity", "Perplexity", predictive, U, tokens, {}},
      {"max_token_entropy", "Maximum Token Entropy", "Max Token Entropy", predictive, U, tokens, {}},
      {"avg_pred_entropy", "Average Prediction Entropy", "Avg Pred Entropy", predictive, U, tokens, {}},
      {"token_impossibility", "Token Impossibility Score", "Token Impossibility Score", predictive, U,
       tokens, {}},
      {"margin", "Margin Score", "Margin", predictive, C, output, {}},
      {"max_prob", "Maximum Probability", "Max Probability", predictive, C, output, {}},
      {"least_confidence", "Least Confidence", "Least Confidence", predictive, U, output, {}},
      {"pred_entropy", "Predictive Entropy", "Predictive Entropy", predictive, U, output, {}},
      {"deep_gini", "DeepGini", "DeepGini", predictive, U, output, {}},

      {"expected_entropy", "Expected Entropy", "Expected Entropy", ensemble, U, samples, {}},
      {"bald", "Mutual Information (BALD)", "Mutual Info (BALD)", ensemble, U, samples, {}},
      {"mc_dropout_var", "Monte Carlo Dropout Variance", "MC Dropout Var", ensemble, U, samples, {}},
      {"class_pred_var", "Class Prediction Variance", "Class Pred Var", ensemble, U, samples, {}},
      {"class_prob_var", "Class Probability Variance", "Class Prob Var", ensemble, U, samples, {}},
      {"sample_var", "Sample Variance", "Sample Var", ensemble, U, samples, {}},
      {"max_diff_var", "Maximum Difference Variance", "Max Diff Var", ensemble, U, samples, {}},
      {"min_var", "Minimum Variance", "Min Var", ensemble, U, samples, {}},
      {"embed_cosine", "Cosine Similarity of Embeddings", "Cosine Sim (Embed)", ensemble, C, samples, {}},

      {"spuq", "Self-Perturbation Uncertainty Quantification", "SPUQ", input_level, C,
       {"perturbations", "base_prompt", "base_output"}, {}},
      {"icl_sample", "In-Context Learning Sampling", "ICL-Sample", input_level, U, perturbed, {}},
      {"ice", "Input Clarification Ensembles", "ICE (Clarif. Ens.)", input_level, U, perturbed, {}},

      {"uag", "Uncertainty-Aware Attention Gradients (UAG)", "UAG (Attn Grad)", reasoning, U, traces, {}},
      {"cot_uq", "Chain-of-Thought Uncertainty (CoT-UQ)", "CoT-UQ", reasoning, C, traces, {orientation}},
      {"tout", "Tree-of-Thought Uncertainty (TouT)", "TouT (Tree-of-Thought)", reasoning, U, traces, {}},
      {"topology_uq", "Topology-Based Uncertainty (TopologyUQ)", "TopologyUQ", reasoning, U, traces, {}},
      {"stable_explanation", "Stable Explanation Confidence", "Stable Exp Conf", reasoning, C, traces, {}},

      {"logit_lens_entropy", "Logit Lens Entropy", "Logit Lens Entropy", representation, U,
       {"layer_logits"}, {layer}},
  };
}

const std::vector<MethodDescriptor>& registry() {
  static const std::vector<MethodDescriptor> methods = build_registry();
  return methods;
}

}  // namespace

std::string_view to_string(Category category) noexcept {
  switch (category) {
    case Category::predictive: return "predictive";
    case Category::ensemble: return "ensemble";
    case Category::input_level: return "input_level";
    case Category::reasoning: return "reasoning";
    case Category::representation: return "representation";
  }
  return "predictive";
}

std::optional<Category> parse_category(std::string_view text) noexcept {
  for (auto c : {Category::predictive, Category::ensemble, Category::input_level, Category::reasoning,
                 Category::representation}) {
    if (to_string(c) == text) return c;
  }
  return std::nullopt;
}

std::string_view category_title(Category category) noexcept {
  switch (category) {
    case Category::predictive: return "Predictive Distribution Methods";
    case Category::ensemble: return "Ensemble-Based Methods";
    case Category::input_level: return "Input-Level Sensitivity Methods";
    case Category::reasoning: return "Reasoning-Level Methods";
    case Category::representation: return "Representation-Based Methods";
  }
  return "";
}

const ParamSpec* MethodDescriptor::find_param(std::string_view param) const noexcept {
  const auto it = std::find_if(params.begin(), params.end(), [&](const ParamSpec& p) { return p.name == param; });
  return it == params.end() ? nullptr : &*it;
}

std::span<const MethodDescriptor> list_methods() noexcept { return registry(); }

const MethodDescriptor* find_method(std::string_view id) noexcept {
  const auto& methods = registry();
  const auto it = std::find_if(methods.begin(), methods.end(), [&](const MethodDescriptor& m) { return m.id == id; });
  return it == methods.end() ? nullptr : &*it;
}

std::optional<std::size_t> method_rank(std::string_view id) noexcept {
  const auto* m = find_method(id);
  if (m == nullptr) return std::nullopt;
  return static_cast<std::size_t>(m - registry().data());
}

}  // namespace uqzoo
