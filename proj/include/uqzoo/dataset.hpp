#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <unordered_set>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "uqzoo/error.hpp"
#include "uqzoo/record.hpp"

namespace uqzoo {

/// One non-blank line of a dataset file: either a validated record or the
/// error that line produced. Line numbers are 1-based physical lines.
struct DatasetLine {
  std::size_t line_number = 0;
  std::variant<PredictionRecord, Error> content;

  bool ok() const noexcept { return std::holds_alternative<PredictionRecord>(content); }
  const PredictionRecord& record() const { return std::get<PredictionRecord>(content); }
  const Error& error() const { return std::get<Error>(content); }
};

/// Streams records out of a JSONL source one line at a time.
///
/// Blank lines are ignored. The first non-blank line may be a header
/// object of the form {"header": {...}} (optionally with "schema": 1);
/// collectors use it to describe how the evidence was produced. A repeated
/// id yields a DuplicateId entry for the later line.
class DatasetReader {
 public:
  explicit DatasetReader(std::istream& in) : in_(in) {}

  std::optional<DatasetLine> next();

  const std::optional<nlohmann::json>& header() const noexcept { return header_; }

 private:
  std::istream& in_;
  std::size_t line_number_ = 0;
  bool seen_content_ = false;
  std::unordered_set<std::string> ids_;
  std::optional<nlohmann::json> header_;
};

/// Reads every line, keeping per-line failures as entries.
/// Throws Error(IoError) when the file cannot be opened.
std::vector<DatasetLine> load_dataset(const std::filesystem::path& path);

/// Strict variant: the first bad line aborts with its error, prefixed by
/// "line N: ". Throws IoError, DuplicateId or any parse_record error.
std::vector<PredictionRecord> read_dataset(const std::filesystem::path& path);

}  // namespace uqzoo
