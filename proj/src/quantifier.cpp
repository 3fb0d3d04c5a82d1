#include "uqzoo/quantifier.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <thread>
#include <unordered_map>

#include "uqzoo/ensemble.hpp"
#include "uqzoo/input_sensitivity.hpp"
#include "uqzoo/predictive.hpp"
#include "uqzoo/reasoning.hpp"
#include "uqzoo/representation.hpp"

namespace uqzoo {
namespace {

using json = nlohmann::json;
using Scorer = MethodScore (*)(const PredictionRecord&, const MethodParams&);

// Required fields are checked before a scorer runs, so dereferencing the
// optionals below is safe.
const std::unordered_map<std::string_view, Scorer>& scorers() {
  static const std::unordered_map<std::string_view, Scorer> table{
      {"avg_nll", [](const PredictionRecord& r, const MethodParams&) { return predictive::avg_neg_log_likelihood(*r.token_steps); }},
      {"avg_prob", [](const PredictionRecord& r, const MethodParams&) { return predictive::avg_probability(*r.token_steps); }},
      {"perplexity", [](const PredictionRecord& r, const MethodParams&) { return predictive::perplexity(*r.token_steps); }},
      {"max_token_entropy", [](const PredictionRecord& r, const MethodParams&) { return predictive::max_token_entropy(*r.token_steps); }},
      {"avg_pred_entropy", [](const PredictionRecord& r, const MethodParams&) { return predictive::avg_prediction_entropy(*r.token_steps); }},
      {"token_impossibility", [](const PredictionRecord& r, const MethodParams&) { return predictive::token_impossibility(*r.token_steps); }},
      {"margin", [](const PredictionRecord& r, const MethodParams&) { return predictive::margin(*r.class_dist); }},
      {"max_prob", [](const PredictionRecord& r, const MethodParams&) { return predictive::max_probability(*r.class_dist); }},
      {"least_confidence", [](const PredictionRecord& r, const MethodParams&) { return predictive::least_confidence(*r.class_dist); }},
      {"pred_entropy", [](const PredictionRecord& r, const MethodParams&) { return predictive::predictive_entropy(*r.class_dist); }},
      {"deep_gini", [](const PredictionRecord& r, const MethodParams&) { return predictive::deep_gini(*r.class_dist); }},

      {"expected_entropy", [](const PredictionRecord& r, const MethodParams&) { return ensemble::expected_entropy(*r.ensemble); }},
      {"bald", [](const PredictionRecord& r, const MethodParams&) { return ensemble::bald(*r.ensemble); }},
      {"mc_dropout_var", [](const PredictionRecord& r, const MethodParams&) { return ensemble::mc_dropout_variance(*r.ensemble); }},
      {"class_pred_var", [](const PredictionRecord& r, const MethodParams&) { return ensemble::class_prediction_variance(*r.ensemble); }},
      {"class_prob_var", [](const PredictionRecord& r, const MethodParams&) { return ensemble::class_probability_variance(*r.ensemble); }},
      {"sample_var", [](const PredictionRecord& r, const MethodParams&) { return ensemble::sample_variance(*r.ensemble); }},
      {"max_diff_var", [](const PredictionRecord& r, const MethodParams&) { return ensemble::max_diff_variance(*r.ensemble); }},
      {"min_var", [](const PredictionRecord& r, const MethodParams&) { return ensemble::min_variance(*r.ensemble); }},
      {"embed_cosine", [](const PredictionRecord& r, const MethodParams&) { return ensemble::embedding_cosine(*r.ensemble); }},

      {"spuq", [](const PredictionRecord& r, const MethodParams&) {
         return input_sensitivity::spuq(*r.base_prompt, *r.base_output, *r.perturbations);
       }},
      {"icl_sample", [](const PredictionRecord& r, const MethodParams&) { return input_sensitivity::icl_sample(*r.perturbations); }},
      {"ice", [](const PredictionRecord& r, const MethodParams&) { return input_sensitivity::ice(*r.perturbations); }},

      {"uag", [](const PredictionRecord& r, const MethodParams&) { return reasoning::uag(*r.traces); }},
      {"cot_uq", [](const PredictionRecord& r, const MethodParams& p) {
         const auto& tag = std::get<std::string>(p.at("orientation"));
         return reasoning::cot_uq(*r.traces, tag == "uncertainty" ? Orientation::uncertainty : Orientation::confidence);
       }},
      {"tout", [](const PredictionRecord& r, const MethodParams&) { return reasoning::tout(*r.traces); }},
      {"topology_uq", [](const PredictionRecord& r, const MethodParams&) { return reasoning::topology_uq(*r.traces); }},
      {"stable_explanation", [](const PredictionRecord& r, const MethodParams&) {
         return reasoning::stable_explanation_confidence(*r.traces);
       }},

      {"logit_lens_entropy", [](const PredictionRecord& r, const MethodParams& p) {
         std::optional<std::size_t> layer;
         if (const auto it = p.find("layer"); it != p.end()) {
           layer = static_cast<std::size_t>(std::get<std::int64_t>(it->second));
         }
         return representation::logit_lens_entropy(*r.layer_logits, layer);
       }},
  };
  return table;
}

bool has_field(const PredictionRecord& r, std::string_view field) {
  if (field == "class_dist") return r.class_dist.has_value();
  if (field == "token_steps") return r.token_steps.has_value();
  if (field == "ensemble") return r.ensemble.has_value();
  if (field == "perturbations") return r.perturbations.has_value();
  if (field == "base_prompt") return r.base_prompt.has_value();
  if (field == "base_output") return r.base_output.has_value();
  if (field == "traces") return r.traces.has_value();
  if (field == "layer_logits") return r.layer_logits.has_value();
  if (field == "ground_truth") return r.ground_truth.has_value();
  if (field == "predicted_label") return r.predicted_label.has_value();
  return false;
}

[[noreturn]] void invalid_param(const std::string& what) { throw Error(ErrorCode::InvalidParam, what); }

ParamValue read_param(const MethodDescriptor& method, const ParamSpec& spec, const json& value) {
  const std::string where = method.id + "." + spec.name;
  if (spec.type == ParamType::integer) {
    if (!value.is_number_integer()) invalid_param(where + ": expected an integer");
    const auto v = value.get<std::int64_t>();
    if (v < spec.minimum) invalid_param(where + ": must be >= " + std::to_string(spec.minimum));
    return v;
  }
  if (!value.is_string()) invalid_param(where + ": expected a string");
  auto text = value.get<std::string>();
  if (!spec.choices.empty() && std::find(spec.choices.begin(), spec.choices.end(), text) == spec.choices.end()) {
    invalid_param(where + ": '" + text + "' is not an allowed value");
  }
  return text;
}

void check_param(const MethodDescriptor& method, const std::string& name, const ParamValue& value) {
  const auto* spec = method.find_param(name);
  if (spec == nullptr) invalid_param(method.id + "." + name + ": unknown parameter");
  // Round-trip through JSON so programmatic overrides get the same checks as files.
  std::visit([&](const auto& v) { read_param(method, *spec, json(v)); }, value);
}

const MethodDescriptor& require_method(std::string_view id) {
  const auto* m = find_method(id);
  if (m == nullptr) throw Error(ErrorCode::UnknownMethod, "unknown method '" + std::string(id) + "'");
  return *m;
}

std::string skip_reason(const Error& e) {
  return std::string(error_code_name(e.code())) + ": " + e.what();
}

}  // namespace

Config Config::from_json(const json& object) {
  if (!object.is_object()) invalid_param("config must be a JSON object");
  Config config;
  for (const auto& [key, value] : object.items()) {
    if (key == "methods") {
      std::vector<std::string> ids;
      if (value.is_string()) {
        ids.push_back(value.get<std::string>());
      } else if (value.is_array()) {
        for (const auto& v : value) {
          if (!v.is_string()) invalid_param("methods: expected strings");
          ids.push_back(v.get<std::string>());
        }
      } else {
        invalid_param("methods: expected \"all\" or a list of method ids");
      }
      config.methods = normalize_methods(ids);
    } else if (key == "sample_seed") {
      if (!value.is_number_integer()) invalid_param("sample_seed: expected an integer");
      config.sample_seed = value.get<std::int64_t>();
    } else if (const auto* method = find_method(key)) {
      if (!value.is_object()) invalid_param(key + ": expected an object of parameters");
      auto& params = config.params[key];
      for (const auto& [name, v] : value.items()) {
        const auto* spec = method->find_param(name);
        if (spec == nullptr) invalid_param(key + "." + name + ": unknown parameter");
        params[name] = read_param(*method, *spec, v);
      }
    } else {
      invalid_param("unknown config key '" + key + "'");
    }
  }
  return config;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path.string());
  json object;
  try {
    object = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::MalformedJson, "config " + path.string() + ": " + e.what());
  }
  return from_json(object);
}

Config Config::layered(const Config& overrides) const {
  Config out = *this;
  if (overrides.methods) out.methods = overrides.methods;
  if (overrides.sample_seed) out.sample_seed = overrides.sample_seed;
  for (const auto& [method, params] : overrides.params) {
    for (const auto& [name, value] : params) out.params[method][name] = value;
  }
  return out;
}

std::vector<std::string> normalize_methods(std::span<const std::string> ids) {
  std::vector<std::size_t> ranks;
  for (const auto& id : ids) {
    if (id == "all") {
      for (std::size_t i = 0; i < list_methods().size(); ++i) ranks.push_back(i);
      continue;
    }
    require_method(id);
    ranks.push_back(*method_rank(id));
  }
  std::sort(ranks.begin(), ranks.end());
  ranks.erase(std::unique(ranks.begin(), ranks.end()), ranks.end());
  std::vector<std::string> out;
  out.reserve(ranks.size());
  for (auto r : ranks) out.push_back(list_methods()[r].id);
  return out;
}

Quantifier::Quantifier(std::span<const std::string> methods, const Config& config) {
  for (const auto& [method_id, params] : config.params) {
    const auto& method = require_method(method_id);
    for (const auto& [name, value] : params) check_param(method, name, value);
  }
  for (const auto& id : normalize_methods(methods)) {
    const auto& method = require_method(id);
    Resolved resolved{&method, {}};
    for (const auto& spec : method.params) {
      if (spec.default_value) resolved.params[spec.name] = *spec.default_value;
    }
    if (const auto it = config.params.find(id); it != config.params.end()) {
      for (const auto& [name, value] : it->second) resolved.params[name] = value;
    }
    methods_.push_back(&method);
    resolved_.push_back(std::move(resolved));
  }
}

QuantifyResult Quantifier::quantify(const PredictionRecord& record) const {
  QuantifyResult result;
  result.record_id = record.id;
  for (const auto& [method, params] : resolved_) {
    const auto missing = std::find_if(method->required_fields.begin(), method->required_fields.end(),
                                      [&](const std::string& f) { return !has_field(record, f); });
    if (missing != method->required_fields.end()) {
      result.skipped[method->id] = "missing " + *missing;
      continue;
    }
    try {
      auto score = scorers().at(method->id)(record, params);
      if (!std::isfinite(score.value)) {
        result.skipped[method->id] = "non-finite score";
        continue;
      }
      result.scores[method->id] = std::move(score);
    } catch (const Error& e) {
      result.skipped[method->id] = skip_reason(e);
    }
  }
  return result;
}

std::vector<DatasetResult> Quantifier::quantify_dataset(std::span<const DatasetLine> lines,
                                                        unsigned parallelism) const {
  if (parallelism == 0) throw Error(ErrorCode::InvalidParam, "parallelism must be at least 1");
  std::vector<DatasetResult> results(lines.size());
  auto score_line = [&](std::size_t i) {
    const auto& line = lines[i];
    if (line.ok()) {
      results[i] = DatasetResult{line.line_number, quantify(line.record())};
    } else {
      results[i] = DatasetResult{line.line_number, line.error()};
    }
  };

  const auto workers = std::min<std::size_t>(parallelism, lines.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < lines.size(); ++i) score_line(i);
    return results;
  }
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < lines.size(); i = next.fetch_add(1)) score_line(i);
      });
    }
  }
  return results;
}

std::vector<DatasetResult> Quantifier::quantify_dataset(std::span<const PredictionRecord> records,
                                                        unsigned parallelism) const {
  std::vector<DatasetLine> lines;
  lines.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) lines.push_back(DatasetLine{i + 1, records[i]});
  return quantify_dataset(lines, parallelism);
}

QuantifyResult quantify(const PredictionRecord& record, std::span<const std::string> methods,
                        const Config& config) {
  return Quantifier(methods, config).quantify(record);
}

nlohmann::ordered_json result_to_json(const DatasetResult& result) {
  nlohmann::ordered_json out;
  if (!result.ok()) {
    out["line"] = result.line_number;
    out["error"]["kind"] = std::string(error_code_name(result.error().code()));
    out["error"]["message"] = result.error().what();
    return out;
  }
  const auto& r = result.result();
  out["id"] = r.record_id;
  out["scores"] = nlohmann::ordered_json::object();
  out["skipped"] = nlohmann::ordered_json::object();
  for (const auto& method : list_methods()) {
    if (const auto it = r.scores.find(method.id); it != r.scores.end()) {
      out["scores"][method.id]["value"] = it->second.value;
      out["scores"][method.id]["orientation"] = std::string(to_string(it->second.orientation));
    }
    if (const auto it = r.skipped.find(method.id); it != r.skipped.end()) {
      out["skipped"][method.id] = it->second;
    }
  }
  return out;
}

}  // namespace uqzoo
