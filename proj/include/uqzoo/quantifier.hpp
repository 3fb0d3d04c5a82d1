#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "uqzoo/dataset.hpp"
#include "uqzoo/error.hpp"
#include "uqzoo/record.hpp"
#include "uqzoo/registry.hpp"
#include "uqzoo/score.hpp"

namespace uqzoo {

using MethodParams = std::map<std::string, ParamValue, std::less<>>;

/// Engine configuration. Stored as JSON on disk:
///
///   {
///     "methods": ["pred_entropy", "bald"],     // or "all"
///     "sample_seed": 7,                        // reserved, accepted and ignored
///     "logit_lens_entropy": {"layer": 3},
///     "cot_uq": {"orientation": "uncertainty"}
///   }
///
/// Every key is checked eagerly: an unknown top-level key or parameter is
/// InvalidParam, an unknown method id is UnknownMethod.
struct Config {
  std::optional<std::vector<std::string>> methods;
  std::optional<std::int64_t> sample_seed;
  std::map<std::string, MethodParams, std::less<>> params;

  static Config from_json(const nlohmann::json& object);
  /// Throws IoError when unreadable, MalformedJson when not JSON.
  static Config load(const std::filesystem::path& path);

  /// Values set in `overrides` win; everything else comes from *this.
  Config layered(const Config& overrides) const;

  bool operator==(const Config&) const = default;
};

/// Expands "all" and sorts/deduplicates into registry order.
/// Throws Error(UnknownMethod) on an unrecognised id.
std::vector<std::string> normalize_methods(std::span<const std::string> ids);

struct QuantifyResult {
  std::string record_id;
  std::map<std::string, MethodScore, std::less<>> scores;
  /// method id -> reason it could not be scored on this record
  std::map<std::string, std::string, std::less<>> skipped;

  bool operator==(const QuantifyResult&) const = default;
};

/// Outcome for one dataset line: a result, or the error that kept the
/// line from being scored.
struct DatasetResult {
  std::size_t line_number = 0;
  std::variant<QuantifyResult, Error> content;

  bool ok() const noexcept { return std::holds_alternative<QuantifyResult>(content); }
  const QuantifyResult& result() const { return std::get<QuantifyResult>(content); }
  const Error& error() const { return std::get<Error>(content); }
};

/// Dispatches records to the requested metric implementations.
///
/// A method whose evidence is missing from a record is reported in
/// QuantifyResult::skipped rather than failing the record. The instance is
/// immutable after construction and safe to share between threads.
class Quantifier {
 public:
  /// Throws Error(UnknownMethod) or Error(InvalidParam).
  explicit Quantifier(std::span<const std::string> methods, const Config& config = {});

  QuantifyResult quantify(const PredictionRecord& record) const;

  /// Scores every line with up to `parallelism` worker threads. Results come
  /// back in input order whatever the thread count; a bad line becomes an
  /// error entry and does not stop the run.
  std::vector<DatasetResult> quantify_dataset(std::span<const DatasetLine> lines,
                                              unsigned parallelism = 1) const;

  std::vector<DatasetResult> quantify_dataset(std::span<const PredictionRecord> records,
                                              unsigned parallelism = 1) const;

  /// Requested methods, in registry order.
  std::span<const MethodDescriptor* const> methods() const noexcept { return methods_; }

 private:
  struct Resolved {
    const MethodDescriptor* descriptor;
    MethodParams params;  // defaults merged with config
  };

  std::vector<const MethodDescriptor*> methods_;
  std::vector<Resolved> resolved_;
};

/// One-shot convenience over Quantifier.
QuantifyResult quantify(const PredictionRecord& record, std::span<const std::string> methods,
                        const Config& config = {});

/// JSONL shape for one result line. Scores and skips are listed in registry
/// order:
///   {"id":..., "scores":{"m":{"value":v,"orientation":"..."}}, "skipped":{"m":"reason"}}
/// Error lines become {"line":N, "error":{"kind":"...","message":"..."}}.
nlohmann::ordered_json result_to_json(const DatasetResult& result);

}  // namespace uqzoo
