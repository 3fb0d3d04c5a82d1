#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace uqzoo {

/// Simplex sum tolerance accepted at parse time. Collectors emit float32.
inline constexpr double kSimplexTolerance = 1e-6;
/// How far a token step's chosen_prob may sit from dist.probs[chosen_index].
inline constexpr double kChosenProbTolerance = 1e-9;

/// Index of the largest entry; ties go to the lowest index.
std::size_t argmax(std::span<const double> values) noexcept;

/// A categorical probability vector over C classes or V vocabulary entries.
///
/// Only constructible through from_probs(), which checks the simplex
/// constraints and renormalizes so the entries sum to one within 1e-12.
class Distribution {
 public:
  /// Throws Error(SchemaViolation) naming `field` when fewer than two
  /// entries are given, an entry falls outside [0, 1] or is not finite, or
  /// the sum misses 1 by more than kSimplexTolerance.
  static Distribution from_probs(std::vector<double> probs,
                                 std::string_view field = "probs");

  std::span<const double> probs() const noexcept { return probs_; }
  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }

  bool operator==(const Distribution&) const = default;

 private:
  explicit Distribution(std::vector<double> probs) : probs_(std::move(probs)) {}

  std::vector<double> probs_;
};

/// Dense row-major matrix of reals, used for attention grids
/// ([layer][token]) and per-layer logits ([layer][class]).
struct Grid {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  /// Throws Error(ShapeMismatch) when the rows are ragged.
  static Grid from_rows(const std::vector<std::vector<double>>& rows);

  bool empty() const noexcept { return rows == 0; }
  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(values).subspan(r * cols, cols);
  }

  bool operator==(const Grid&) const = default;
};

struct TokenStep {
  Distribution dist;
  std::size_t chosen_index = 0;
  double chosen_prob = 0.0;

  bool operator==(const TokenStep&) const = default;
};

/// One stochastic forward pass (MC dropout draw or ensemble member).
struct EnsembleSample {
  Distribution class_dist;
  std::size_t predicted_label = 0;
  std::optional<std::vector<double>> embedding;

  bool operator==(const EnsembleSample&) const = default;
};

enum class PerturbationKind { paraphrase, clarification, icl_context };

std::string_view to_string(PerturbationKind kind) noexcept;

struct PerturbationSample {
  PerturbationKind kind = PerturbationKind::paraphrase;
  std::string prompt_text;
  std::string output_text;
  std::optional<Distribution> output_dist;

  bool operator==(const PerturbationSample&) const = default;
};

struct Keyword {
  std::string term;
  double frequency = 0.0;
  double weight = 0.0;

  bool operator==(const Keyword&) const = default;
};

/// One sampled reasoning path.
struct ReasoningTrace {
  std::vector<std::string> steps;
  Grid attention;  // [layer][token]; empty when not collected
  std::vector<Keyword> keywords;
  std::vector<double> branch_scores;
  std::optional<double> answer_prob;
  std::optional<std::vector<double>> entailment_scores;

  bool operator==(const ReasoningTrace&) const = default;
};

/// Everything the engine knows about one input. Optional members are
/// absent when the collector did not produce that kind of evidence.
struct PredictionRecord {
  std::string id;
  std::optional<Distribution> class_dist;
  std::optional<std::vector<TokenStep>> token_steps;
  std::optional<std::vector<EnsembleSample>> ensemble;
  std::optional<std::vector<PerturbationSample>> perturbations;
  std::optional<std::string> base_prompt;
  std::optional<std::string> base_output;
  std::optional<std::vector<ReasoningTrace>> traces;
  std::optional<Grid> layer_logits;  // raw logits, softmax applied downstream
  std::optional<std::int64_t> ground_truth;
  std::optional<std::int64_t> predicted_label;

  bool operator==(const PredictionRecord&) const = default;
};

/// Parses and validates one JSONL line.
///
/// Errors: MalformedJson when the text is not a JSON object,
/// SchemaViolation when a field has the wrong type or range (the message
/// names the field), InconsistentRecord when cross-field invariants fail
/// (argmax/chosen_prob mismatch, differing class counts, ragged traces).
PredictionRecord parse_record(std::string_view line);

/// Same validation as parse_record() on an already-decoded object.
PredictionRecord record_from_json(const nlohmann::json& object);

nlohmann::ordered_json record_to_json(const PredictionRecord& record);

/// Single-line JSON with no trailing newline.
std::string serialize_record(const PredictionRecord& record);

}  // namespace uqzoo
