#include "uqzoo/record.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <numeric>

#include "uqzoo/error.hpp"

namespace uqzoo {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::SchemaViolation, path + ": " + what);
}

[[noreturn]] void inconsistent(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::InconsistentRecord, path + ": " + what);
}

std::string index_path(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

void reject_unknown_keys(const json& object, const std::string& path,
                         std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : object.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      schema_error(path.empty() ? key : path + "." + key, "unknown field");
    }
  }
}

const json& require_array(const json& value, const std::string& path) {
  if (!value.is_array()) schema_error(path, "expected an array");
  return value;
}

const json& require_object(const json& value, const std::string& path) {
  if (!value.is_object()) schema_error(path, "expected an object");
  return value;
}

double read_real(const json& value, const std::string& path) {
  if (!value.is_number()) schema_error(path, "expected a number");
  const double x = value.get<double>();
  if (!std::isfinite(x)) schema_error(path, "expected a finite number");
  return x;
}

double read_unit_real(const json& value, const std::string& path) {
  const double x = read_real(value, path);
  if (x < 0.0 || x > 1.0) schema_error(path, "expected a value in [0, 1]");
  return x;
}

std::int64_t read_nonneg_int(const json& value, const std::string& path) {
  if (!value.is_number_integer()) schema_error(path, "expected an integer");
  if (value.is_number_unsigned()) {
    const auto u = value.get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(INT64_MAX)) schema_error(path, "integer out of range");
    return static_cast<std::int64_t>(u);
  }
  const auto i = value.get<std::int64_t>();
  if (i < 0) schema_error(path, "expected a non-negative integer");
  return i;
}

std::string read_string(const json& value, const std::string& path) {
  if (!value.is_string()) schema_error(path, "expected a string");
  return value.get<std::string>();
}

std::vector<double> read_reals(const json& value, const std::string& path) {
  require_array(value, path);
  std::vector<double> out;
  out.reserve(value.size());
  for (std::size_t i = 0; i < value.size(); ++i) out.push_back(read_real(value[i], index_path(path, i)));
  return out;
}

Distribution read_distribution(const json& value, const std::string& path) {
  require_array(value, path);
  std::vector<double> probs;
  probs.reserve(value.size());
  for (std::size_t i = 0; i < value.size(); ++i) {
    const auto& v = value[i];
    if (!v.is_number()) schema_error(index_path(path, i), "expected a number");
    probs.push_back(v.get<double>());
  }
  return Distribution::from_probs(std::move(probs), path);
}

Grid read_grid(const json& value, const std::string& path) {
  require_array(value, path);
  std::vector<std::vector<double>> rows;
  rows.reserve(value.size());
  for (std::size_t i = 0; i < value.size(); ++i) rows.push_back(read_reals(value[i], index_path(path, i)));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) schema_error(index_path(path, i), "ragged rows");
  }
  return Grid::from_rows(rows);
}

TokenStep read_token_step(const json& value, const std::string& path) {
  require_object(value, path);
  reject_unknown_keys(value, path, {"dist", "chosen_index", "chosen_prob"});
  for (const char* key : {"dist", "chosen_index", "chosen_prob"}) {
    if (!value.contains(key)) schema_error(path + "." + key, "required");
  }
  const json& raw_dist = value.at("dist");
  auto dist = read_distribution(raw_dist, path + ".dist");
  const auto index = read_nonneg_int(value.at("chosen_index"), path + ".chosen_index");
  if (static_cast<std::size_t>(index) >= dist.size()) {
    schema_error(path + ".chosen_index", "outside the distribution");
  }
  const double chosen = read_real(value.at("chosen_prob"), path + ".chosen_prob");
  if (!(chosen > 0.0 && chosen <= 1.0)) schema_error(path + ".chosen_prob", "expected a value in (0, 1]");
  // Compare against the collector's own value; renormalization moves entries by up to 1e-6.
  const double raw = raw_dist[static_cast<std::size_t>(index)].get<double>();
  if (std::abs(chosen - raw) > kChosenProbTolerance) {
    inconsistent(path + ".chosen_prob", "does not match dist[chosen_index]");
  }
  TokenStep step{std::move(dist), static_cast<std::size_t>(index), 0.0};
  step.chosen_prob = step.dist[step.chosen_index];
  return step;
}

EnsembleSample read_ensemble_sample(const json& value, const std::string& path) {
  require_object(value, path);
  reject_unknown_keys(value, path, {"class_dist", "predicted_label", "embedding"});
  for (const char* key : {"class_dist", "predicted_label"}) {
    if (!value.contains(key)) schema_error(path + "." + key, "required");
  }
  auto dist = read_distribution(value.at("class_dist"), path + ".class_dist");
  const auto label = read_nonneg_int(value.at("predicted_label"), path + ".predicted_label");
  if (static_cast<std::size_t>(label) >= dist.size()) {
    schema_error(path + ".predicted_label", "outside the class range");
  }
  if (static_cast<std::size_t>(label) != argmax(dist.probs())) {
    inconsistent(path + ".predicted_label", "is not the argmax of class_dist");
  }
  EnsembleSample sample{std::move(dist), static_cast<std::size_t>(label), std::nullopt};
  if (value.contains("embedding")) {
    auto embedding = read_reals(value.at("embedding"), path + ".embedding");
    if (embedding.empty()) schema_error(path + ".embedding", "must not be empty");
    sample.embedding = std::move(embedding);
  }
  return sample;
}

PerturbationKind read_kind(const json& value, const std::string& path) {
  const auto text = read_string(value, path);
  if (text == "paraphrase") return PerturbationKind::paraphrase;
  if (text == "clarification") return PerturbationKind::clarification;
  if (text == "icl_context") return PerturbationKind::icl_context;
  schema_error(path, "unknown kind '" + text + "'");
}

PerturbationSample read_perturbation(const json& value, const std::string& path) {
  require_object(value, path);
  reject_unknown_keys(value, path, {"kind", "prompt_text", "output_text", "output_dist"});
  for (const char* key : {"kind", "prompt_text", "output_text"}) {
    if (!value.contains(key)) schema_error(path + "." + key, "required");
  }
  PerturbationSample sample;
  sample.kind = read_kind(value.at("kind"), path + ".kind");
  sample.prompt_text = read_string(value.at("prompt_text"), path + ".prompt_text");
  sample.output_text = read_string(value.at("output_text"), path + ".output_text");
  if (value.contains("output_dist")) {
    sample.output_dist = read_distribution(value.at("output_dist"), path + ".output_dist");
  }
  if (sample.kind == PerturbationKind::paraphrase) {
    if (sample.prompt_text.empty()) schema_error(path + ".prompt_text", "paraphrase samples need a prompt");
    if (sample.output_text.empty()) schema_error(path + ".output_text", "paraphrase samples need an output");
  } else if (!sample.output_dist) {
    schema_error(path + ".output_dist", std::string("required for ") +
                                            std::string(to_string(sample.kind)) + " samples");
  }
  return sample;
}

Keyword read_keyword(const json& value, const std::string& path) {
  require_object(value, path);
  reject_unknown_keys(value, path, {"term", "frequency", "weight"});
  for (const char* key : {"term", "frequency", "weight"}) {
    if (!value.contains(key)) schema_error(path + "." + key, "required");
  }
  Keyword keyword;
  keyword.term = read_string(value.at("term"), path + ".term");
  keyword.frequency = read_real(value.at("frequency"), path + ".frequency");
  keyword.weight = read_real(value.at("weight"), path + ".weight");
  if (keyword.frequency < 0.0) schema_error(path + ".frequency", "must be non-negative");
  if (keyword.weight < 0.0) schema_error(path + ".weight", "must be non-negative");
  return keyword;
}

ReasoningTrace read_trace(const json& value, const std::string& path) {
  require_object(value, path);
  reject_unknown_keys(value, path,
                      {"steps", "attention", "keywords", "branch_scores", "answer_prob",
                       "entailment_scores"});
  ReasoningTrace trace;
  if (value.contains("steps")) {
    const auto& steps = require_array(value.at("steps"), path + ".steps");
    for (std::size_t i = 0; i < steps.size(); ++i) {
      trace.steps.push_back(read_string(steps[i], index_path(path + ".steps", i)));
    }
  }
  if (value.contains("attention")) trace.attention = read_grid(value.at("attention"), path + ".attention");
  if (value.contains("keywords")) {
    const auto& keywords = require_array(value.at("keywords"), path + ".keywords");
    for (std::size_t i = 0; i < keywords.size(); ++i) {
      trace.keywords.push_back(read_keyword(keywords[i], index_path(path + ".keywords", i)));
    }
  }
  if (value.contains("branch_scores")) {
    trace.branch_scores = read_reals(value.at("branch_scores"), path + ".branch_scores");
  }
  if (value.contains("answer_prob")) {
    trace.answer_prob = read_unit_real(value.at("answer_prob"), path + ".answer_prob");
  }
  if (value.contains("entailment_scores")) {
    const auto& scores = require_array(value.at("entailment_scores"), path + ".entailment_scores");
    std::vector<double> out;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      out.push_back(read_unit_real(scores[i], index_path(path + ".entailment_scores", i)));
    }
    trace.entailment_scores = std::move(out);
  }
  return trace;
}

template <typename T, typename Reader>
std::vector<T> read_list(const json& value, const std::string& path, Reader reader) {
  require_array(value, path);
  std::vector<T> out;
  out.reserve(value.size());
  for (std::size_t i = 0; i < value.size(); ++i) out.push_back(reader(value[i], index_path(path, i)));
  return out;
}

void check_record_consistency(const PredictionRecord& record) {
  if (record.ensemble && !record.ensemble->empty()) {
    const auto& samples = *record.ensemble;
    const auto classes = samples.front().class_dist.size();
    std::optional<std::size_t> dim;
    for (std::size_t s = 0; s < samples.size(); ++s) {
      if (samples[s].class_dist.size() != classes) {
        inconsistent(index_path("ensemble", s) + ".class_dist", "class count differs from ensemble[0]");
      }
      if (samples[s].embedding) {
        if (!dim) dim = samples[s].embedding->size();
        if (samples[s].embedding->size() != *dim) {
          inconsistent(index_path("ensemble", s) + ".embedding", "embedding dimension differs");
        }
      }
    }
  }
  if (record.perturbations) {
    std::optional<std::size_t> classes;
    for (std::size_t i = 0; i < record.perturbations->size(); ++i) {
      const auto& dist = (*record.perturbations)[i].output_dist;
      if (!dist) continue;
      if (!classes) classes = dist->size();
      if (dist->size() != *classes) {
        inconsistent(index_path("perturbations", i) + ".output_dist", "class count differs");
      }
    }
  }
  if (record.traces && !record.traces->empty()) {
    const auto& first = record.traces->front().attention;
    for (std::size_t k = 1; k < record.traces->size(); ++k) {
      const auto& grid = (*record.traces)[k].attention;
      if (grid.rows != first.rows || grid.cols != first.cols) {
        inconsistent(index_path("traces", k) + ".attention", "grid shape differs from traces[0]");
      }
    }
  }
}

ordered_json distribution_to_json(const Distribution& dist) {
  return ordered_json(std::vector<double>(dist.probs().begin(), dist.probs().end()));
}

ordered_json grid_to_json(const Grid& grid) {
  ordered_json rows = ordered_json::array();
  for (std::size_t r = 0; r < grid.rows; ++r) {
    const auto row = grid.row(r);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return rows;
}

}  // namespace

std::size_t argmax(std::span<const double> values) noexcept {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

Distribution Distribution::from_probs(std::vector<double> probs, std::string_view field) {
  const std::string path(field);
  if (probs.size() < 2) schema_error(path, "needs at least 2 entries");
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!std::isfinite(probs[i]) || probs[i] < 0.0 || probs[i] > 1.0) {
      schema_error(index_path(path, i), "probability outside [0, 1]");
    }
  }
  const double sum = std::accumulate(probs.begin(), probs.end(), 0.0);
  if (std::abs(sum - 1.0) > kSimplexTolerance) {
    schema_error(path, "probabilities sum to " + std::to_string(sum) + ", expected 1");
  }
  for (double& p : probs) p /= sum;
  return Distribution(std::move(probs));
}

Grid Grid::from_rows(const std::vector<std::vector<double>>& rows) {
  Grid grid;
  grid.rows = rows.size();
  grid.cols = rows.empty() ? 0 : rows.front().size();
  grid.values.reserve(grid.rows * grid.cols);
  for (const auto& row : rows) {
    if (row.size() != grid.cols) throw Error(ErrorCode::ShapeMismatch, "grid rows have different lengths");
    grid.values.insert(grid.values.end(), row.begin(), row.end());
  }
  return grid;
}

std::string_view to_string(PerturbationKind kind) noexcept {
  switch (kind) {
    case PerturbationKind::paraphrase: return "paraphrase";
    case PerturbationKind::clarification: return "clarification";
    case PerturbationKind::icl_context: return "icl_context";
  }
  return "paraphrase";
}

PredictionRecord record_from_json(const json& object) {
  if (!object.is_object()) throw Error(ErrorCode::MalformedJson, "record is not a JSON object");
  if (object.contains("header")) schema_error("header", "only allowed on the first line of a dataset");
  reject_unknown_keys(object, "",
                      {"schema", "id", "class_dist", "token_steps", "ensemble", "perturbations",
                       "base_prompt", "base_output", "traces", "layer_logits", "ground_truth",
                       "predicted_label"});

  if (object.contains("schema")) {
    const auto& schema = object.at("schema");
    if (!schema.is_number_integer() || schema.get<std::int64_t>() != 1) {
      schema_error("schema", "only version 1 is supported");
    }
  }

  PredictionRecord record;
  if (!object.contains("id")) schema_error("id", "required");
  record.id = read_string(object.at("id"), "id");
  if (record.id.empty()) schema_error("id", "must not be empty");

  if (object.contains("class_dist")) record.class_dist = read_distribution(object.at("class_dist"), "class_dist");
  if (object.contains("token_steps")) {
    record.token_steps = read_list<TokenStep>(object.at("token_steps"), "token_steps", read_token_step);
  }
  if (object.contains("ensemble")) {
    record.ensemble = read_list<EnsembleSample>(object.at("ensemble"), "ensemble", read_ensemble_sample);
  }
  if (object.contains("perturbations")) {
    record.perturbations =
        read_list<PerturbationSample>(object.at("perturbations"), "perturbations", read_perturbation);
  }
  if (object.contains("base_prompt")) record.base_prompt = read_string(object.at("base_prompt"), "base_prompt");
  if (object.contains("base_output")) record.base_output = read_string(object.at("base_output"), "base_output");
  if (object.contains("traces")) {
    record.traces = read_list<ReasoningTrace>(object.at("traces"), "traces", read_trace);
  }
  if (object.contains("layer_logits")) {
    auto grid = read_grid(object.at("layer_logits"), "layer_logits");
    if (grid.rows == 0) schema_error("layer_logits", "needs at least one layer");
    if (grid.cols < 2) schema_error("layer_logits", "each layer needs at least 2 logits");
    record.layer_logits = std::move(grid);
  }
  if (object.contains("ground_truth")) record.ground_truth = read_nonneg_int(object.at("ground_truth"), "ground_truth");
  if (object.contains("predicted_label")) {
    record.predicted_label = read_nonneg_int(object.at("predicted_label"), "predicted_label");
  }

  check_record_consistency(record);
  return record;
}

PredictionRecord parse_record(std::string_view line) {
  json object;
  try {
    object = json::parse(line);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::MalformedJson, std::string("unparseable JSON: ") + e.what());
  }
  return record_from_json(object);
}

ordered_json record_to_json(const PredictionRecord& record) {
  ordered_json out;
  out["id"] = record.id;
  if (record.class_dist) out["class_dist"] = distribution_to_json(*record.class_dist);
  if (record.token_steps) {
    ordered_json steps = ordered_json::array();
    for (const auto& step : *record.token_steps) {
      ordered_json s;
      s["dist"] = distribution_to_json(step.dist);
      s["chosen_index"] = step.chosen_index;
      s["chosen_prob"] = step.chosen_prob;
      steps.push_back(std::move(s));
    }
    out["token_steps"] = std::move(steps);
  }
  if (record.ensemble) {
    ordered_json samples = ordered_json::array();
    for (const auto& sample : *record.ensemble) {
      ordered_json s;
      s["class_dist"] = distribution_to_json(sample.class_dist);
      s["predicted_label"] = sample.predicted_label;
      if (sample.embedding) s["embedding"] = *sample.embedding;
      samples.push_back(std::move(s));
    }
    out["ensemble"] = std::move(samples);
  }
  if (record.perturbations) {
    ordered_json samples = ordered_json::array();
    for (const auto& sample : *record.perturbations) {
      ordered_json s;
      s["kind"] = std::string(to_string(sample.kind));
      s["prompt_text"] = sample.prompt_text;
      s["output_text"] = sample.output_text;
      if (sample.output_dist) s["output_dist"] = distribution_to_json(*sample.output_dist);
      samples.push_back(std::move(s));
    }
    out["perturbations"] = std::move(samples);
  }
  if (record.base_prompt) out["base_prompt"] = *record.base_prompt;
  if (record.base_output) out["base_output"] = *record.base_output;
  if (record.traces) {
    ordered_json traces = ordered_json::array();
    for (const auto& trace : *record.traces) {
      ordered_json t = ordered_json::object();
      if (!trace.steps.empty()) t["steps"] = trace.steps;
      if (!trace.attention.empty()) t["attention"] = grid_to_json(trace.attention);
      if (!trace.keywords.empty()) {
        ordered_json keywords = ordered_json::array();
        for (const auto& k : trace.keywords) {
          ordered_json kw;
          kw["term"] = k.term;
          kw["frequency"] = k.frequency;
          kw["weight"] = k.weight;
          keywords.push_back(std::move(kw));
        }
        t["keywords"] = std::move(keywords);
      }
      if (!trace.branch_scores.empty()) t["branch_scores"] = trace.branch_scores;
      if (trace.answer_prob) t["answer_prob"] = *trace.answer_prob;
      if (trace.entailment_scores) t["entailment_scores"] = *trace.entailment_scores;
      traces.push_back(std::move(t));
    }
    out["traces"] = std::move(traces);
  }
  if (record.layer_logits) out["layer_logits"] = grid_to_json(*record.layer_logits);
  if (record.ground_truth) out["ground_truth"] = *record.ground_truth;
  if (record.predicted_label) out["predicted_label"] = *record.predicted_label;
  return out;
}

std::string serialize_record(const PredictionRecord& record) {
  return record_to_json(record).dump();
}

}  // namespace uqzoo
