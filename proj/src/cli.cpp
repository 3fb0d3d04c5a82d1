#include "uqzoo/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "uqzoo/dataset.hpp"
#include "uqzoo/error.hpp"
#include "uqzoo/evaluation.hpp"
#include "uqzoo/quantifier.hpp"
#include "uqzoo/registry.hpp"

namespace uqzoo::cli {
namespace {

constexpr const char* kConfigEnv = "UQZOO_CONFIG";

struct UsageError {
  std::string message;
};

std::vector<std::string> split_ids(const std::string& text) {
  std::vector<std::string> ids;
  std::stringstream in(text);
  std::string id;
  while (std::getline(in, id, ',')) {
    id.erase(0, id.find_first_not_of(" \t"));
    id.erase(id.find_last_not_of(" \t") + 1);
    if (!id.empty()) ids.push_back(id);
  }
  return ids;
}

Config load_config(const std::string& flag_path) {
  std::string path = flag_path;
  std::string origin = "--config";
  if (path.empty()) {
    if (const char* env = std::getenv(kConfigEnv); env != nullptr && *env != '\0') {
      path = env;
      origin = kConfigEnv;
    }
  }
  if (path.empty()) return {};
  try {
    return Config::load(path);
  } catch (const Error& e) {
    throw UsageError{origin + ": " + e.what()};
  }
}

std::vector<std::string> resolve_methods(const std::string& flag, const Config& config) {
  try {
    if (!flag.empty()) {
      const auto ids = split_ids(flag);
      if (ids.empty()) throw UsageError{"--methods: no method ids given"};
      return normalize_methods(ids);
    }
    if (config.methods) return *config.methods;
    const std::vector<std::string> all{"all"};
    return normalize_methods(all);
  } catch (const Error& e) {
    throw UsageError{std::string("--methods: ") + e.what()};
  }
}

// Writes to --output when given, else to `out`.
void emit(const std::string& text, const std::string& output_path, std::ostream& out) {
  if (output_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(output_path, std::ios::binary);
  if (!file) throw UsageError{"--output: cannot write " + output_path};
  file << text;
}

int list_methods_command(const std::string& category, const std::string& format, std::ostream& out) {
  std::optional<Category> filter;
  if (!category.empty()) {
    filter = parse_category(category);
    if (!filter) throw UsageError{"--category: unknown category '" + category + "'"};
  }
  std::vector<const MethodDescriptor*> selected;
  for (const auto& m : list_methods()) {
    if (!filter || m.category == *filter) selected.push_back(&m);
  }
  auto join = [](const std::vector<std::string>& parts, char sep) {
    std::string s;
    for (const auto& p : parts) s += (s.empty() ? "" : std::string(1, sep)) + p;
    return s;
  };
  if (format == "json") {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto* m : selected) {
      nlohmann::ordered_json j;
      j["id"] = m->id;
      j["name"] = m->name;
      j["category"] = std::string(to_string(m->category));
      j["orientation"] = std::string(to_string(m->orientation));
      j["required_fields"] = m->required_fields;
      j["params"] = nlohmann::ordered_json::array();
      for (const auto& p : m->params) {
        nlohmann::ordered_json pj;
        pj["name"] = p.name;
        pj["type"] = p.type == ParamType::integer ? "integer" : "string";
        if (p.default_value) {
          std::visit([&](const auto& v) { pj["default"] = v; }, *p.default_value);
        }
        pj["description"] = p.description;
        j["params"].push_back(std::move(pj));
      }
      arr.push_back(std::move(j));
    }
    out << arr.dump(2) << "\n";
  } else if (format == "csv") {
    out << "id,category,orientation,name,required_fields\n";
    for (const auto* m : selected) {
      out << fmt::format("{},{},{},{},{}\n", m->id, to_string(m->category), to_string(m->orientation),
                         m->name, join(m->required_fields, ';'));
    }
  } else {
    for (const auto* m : selected) {
      out << fmt::format("{:<20} {:<15} {:<12} {}\n", m->id, to_string(m->category),
                         to_string(m->orientation), m->name);
    }
  }
  return kExitOk;
}

struct QuantifyFlags {
  std::string input;
  std::string methods;
  std::string config;
  std::string output;
  unsigned jobs = 1;
};

int quantify_command(const QuantifyFlags& flags, std::ostream& out, std::ostream& err) {
  const auto config = load_config(flags.config);
  const auto methods = resolve_methods(flags.methods, config);
  std::optional<Quantifier> quantifier;
  try {
    quantifier.emplace(methods, config);
  } catch (const Error& e) {
    throw UsageError{std::string("--config: ") + e.what()};
  }

  std::vector<DatasetLine> lines;
  try {
    lines = load_dataset(flags.input);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitDataError;
  }
  const auto results = quantifier->quantify_dataset(lines, flags.jobs);

  std::string text;
  std::size_t failures = 0;
  for (const auto& r : results) {
    text += result_to_json(r).dump() + "\n";
    if (!r.ok()) {
      ++failures;
      err << r.error().what() << "\n";
    }
  }
  emit(text, flags.output, out);
  if (failures > 0) {
    err << fmt::format("{} of {} records failed\n", failures, results.size());
    return kExitDataError;
  }
  return kExitOk;
}

struct EvaluateFlags {
  std::vector<std::string> inputs;
  std::string methods;
  std::string format = "table";
  std::string output;
};

int evaluate_command(const EvaluateFlags& flags, std::ostream& out, std::ostream& err) {
  const auto config = load_config("");
  const auto methods = resolve_methods(flags.methods, config);
  std::optional<Quantifier> quantifier;
  try {
    quantifier.emplace(methods, config);
  } catch (const Error& e) {
    throw UsageError{std::string(kConfigEnv) + ": " + e.what()};
  }

  std::vector<std::vector<DatasetLine>> runs;
  try {
    for (const auto& path : flags.inputs) runs.push_back(load_dataset(path));
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitDataError;
  }
  for (const auto& run : runs) {
    for (const auto& line : run) {
      if (!line.ok()) err << "skipping " << line.error().what() << "\n";
    }
  }

  std::vector<CorrelationRow> rows;
  try {
    rows = evaluate(runs, *quantifier);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitDataError;
  }
  ReportFormat format = ReportFormat::table;
  if (flags.format == "csv") format = ReportFormat::csv;
  if (flags.format == "json") format = ReportFormat::json;
  emit(render_report(rows, format), flags.output, out);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Uncertainty scores and correctness correlation from recorded model evidence", "uqzoo"};
  app.require_subcommand(1);

  std::string category;
  std::string list_format = "table";
  auto* list_cmd = app.add_subcommand("list-methods", "Print the method registry");
  list_cmd->add_option("--category", category,
                       "predictive, ensemble, input_level, reasoning or representation");
  list_cmd->add_option("--format", list_format, "table, csv or json")
      ->check(CLI::IsMember({"table", "csv", "json"}));

  QuantifyFlags qflags;
  auto* quantify_cmd = app.add_subcommand("quantify", "Score every record of a JSONL dataset");
  quantify_cmd->add_option("--input", qflags.input, "JSONL dataset")->required()->check(CLI::ExistingFile);
  quantify_cmd->add_option("--methods", qflags.methods, "comma-separated method ids, or 'all'");
  quantify_cmd->add_option("--config", qflags.config, "JSON config file (falls back to $UQZOO_CONFIG)")
      ->check(CLI::ExistingFile);
  quantify_cmd->add_option("--output", qflags.output, "write results here instead of stdout");
  quantify_cmd->add_option("--jobs", qflags.jobs, "scoring threads")->check(CLI::PositiveNumber);

  EvaluateFlags eflags;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Correlate scores with prediction correctness");
  evaluate_cmd->add_option("--input", eflags.inputs, "JSONL dataset; repeat for repeated runs")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--methods", eflags.methods, "comma-separated method ids, or 'all'");
  evaluate_cmd->add_option("--format", eflags.format, "table, csv or json")
      ->check(CLI::IsMember({"table", "csv", "json"}));
  evaluate_cmd->add_option("--output", eflags.output, "write the report here instead of stdout");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (list_cmd->parsed()) return list_methods_command(category, list_format, out);
    if (quantify_cmd->parsed()) return quantify_command(qflags, out, err);
    return evaluate_command(eflags, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.message << "\n";
    return kExitUsage;
  }
}

}  // namespace uqzoo::cli
