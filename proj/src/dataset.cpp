#include "uqzoo/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

namespace uqzoo {
namespace {

bool is_blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return in;
}

Error at_line(const Error& e, std::size_t line) {
  return Error(e.code(), "line " + std::to_string(line) + ": " + e.what());
}

}  // namespace

std::optional<DatasetLine> DatasetReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_number_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank(line)) continue;

    const bool first = !seen_content_;
    seen_content_ = true;
    try {
      nlohmann::json object;
      try {
        object = nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::MalformedJson, std::string("unparseable JSON: ") + e.what());
      }
      if (first && object.is_object() && object.contains("header") && !object.contains("id")) {
        header_ = object.at("header");
        continue;
      }
      auto record = record_from_json(object);
      if (!ids_.insert(record.id).second) {
        throw Error(ErrorCode::DuplicateId, "duplicate id '" + record.id + "'");
      }
      return DatasetLine{line_number_, std::move(record)};
    } catch (const Error& e) {
      return DatasetLine{line_number_, at_line(e, line_number_)};
    }
  }
  if (in_.bad()) throw Error(ErrorCode::IoError, "read failed at line " + std::to_string(line_number_ + 1));
  return std::nullopt;
}

std::vector<DatasetLine> load_dataset(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  DatasetReader reader(in);
  std::vector<DatasetLine> lines;
  while (auto line = reader.next()) lines.push_back(std::move(*line));
  return lines;
}

std::vector<PredictionRecord> read_dataset(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  DatasetReader reader(in);
  std::vector<PredictionRecord> records;
  while (auto line = reader.next()) {
    if (!line->ok()) throw line->error();
    records.push_back(std::move(std::get<PredictionRecord>(line->content)));
  }
  return records;
}

}  // namespace uqzoo
