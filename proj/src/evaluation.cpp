#include "uqzoo/evaluation.hpp"

#include <fmt/format.h>

#include <nlohmann/json.hpp>

#include "uqzoo/error.hpp"
#include "uqzoo/stats.hpp"

namespace uqzoo {
namespace {

struct RunStats {
  std::size_t n = 0;
  std::optional<double> r;
  std::optional<double> p;
};

RunStats correlate(const std::vector<double>& scores, const std::vector<double>& correct) {
  RunStats s;
  s.n = scores.size();
  try {
    const double r = stats::pearson(scores, correct);
    s.r = r;
    s.p = stats::p_value(r, s.n);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateInput) throw;
  }
  return s;
}

std::string fixed_or_dash(const std::optional<double>& v, int digits) {
  return v ? fmt::format("{:.{}f}", *v, digits) : std::string("-");
}

constexpr int kNameWidth = 28;

std::string table_header() {
  std::string out = fmt::format("{:<{}} {:>8} {:>14} {:>9} {:>8}\n", "Method", kNameWidth, "n",
                                "Pearson Corr.", "p-value", "skipped");
  out += std::string(kNameWidth + 1 + 8 + 1 + 14 + 1 + 9 + 1 + 8, '-') + "\n";
  return out;
}

std::string render_table(std::span<const CorrelationRow> rows) {
  std::string out = table_header();
  std::optional<Category> current;
  for (const auto& row : rows) {
    if (!current || *current != row.category) {
      current = row.category;
      out += fmt::format("*{}*\n", category_title(row.category));
    }
    const auto* method = find_method(row.method_id);
    const std::string label = method ? method->short_name : row.method_id;
    out += fmt::format("{:<{}} {:>8} {:>14} {:>9} {:>8}\n", label, kNameWidth, row.n,
                       fixed_or_dash(row.pearson_r, 3), fixed_or_dash(row.p_value, 4), row.skipped);
  }
  return out;
}

std::string render_csv(std::span<const CorrelationRow> rows) {
  std::string out = "method,category,n,pearson_r,p_value,skipped\n";
  auto cell = [](const std::optional<double>& v) { return v ? fmt::format("{}", *v) : std::string(); };
  for (const auto& row : rows) {
    out += fmt::format("{},{},{},{},{},{}\n", row.method_id, to_string(row.category), row.n,
                       cell(row.pearson_r), cell(row.p_value), row.skipped);
  }
  return out;
}

std::string render_json(std::span<const CorrelationRow> rows) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    nlohmann::ordered_json j;
    j["method"] = row.method_id;
    j["category"] = std::string(to_string(row.category));
    j["n"] = row.n;
    j["pearson_r"] = row.pearson_r ? nlohmann::ordered_json(*row.pearson_r) : nlohmann::ordered_json();
    j["p_value"] = row.p_value ? nlohmann::ordered_json(*row.p_value) : nlohmann::ordered_json();
    j["skipped"] = row.skipped;
    out.push_back(std::move(j));
  }
  return out.dump(2) + "\n";
}

}  // namespace

int correctness(const PredictionRecord& record) {
  if (!record.ground_truth) throw Error(ErrorCode::MissingField, "missing ground_truth");
  if (!record.predicted_label) throw Error(ErrorCode::MissingField, "missing predicted_label");
  return *record.ground_truth == *record.predicted_label ? 1 : 0;
}

std::vector<CorrelationRow> evaluate(std::span<const std::vector<DatasetLine>> runs,
                                     const Quantifier& quantifier, unsigned parallelism) {
  const auto methods = quantifier.methods();
  std::vector<CorrelationRow> rows;
  rows.reserve(methods.size());
  for (const auto* m : methods) rows.push_back(CorrelationRow{m->id, m->category, 0, {}, {}, 0});
  std::vector<std::vector<double>> r_values(methods.size());
  std::vector<std::vector<double>> p_values(methods.size());

  bool any_evaluable = false;
  for (const auto& lines : runs) {
    const auto results = quantifier.quantify_dataset(lines, parallelism);
    std::vector<std::optional<double>> correct(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (!lines[i].ok()) continue;
      const auto& record = lines[i].record();
      if (record.ground_truth && record.predicted_label) {
        correct[i] = correctness(record);
        any_evaluable = true;
      }
    }
    for (std::size_t m = 0; m < methods.size(); ++m) {
      std::vector<double> scores;
      std::vector<double> labels;
      for (std::size_t i = 0; i < results.size(); ++i) {
        if (!results[i].ok() || !correct[i]) continue;
        const auto& scored = results[i].result().scores;
        const auto it = scored.find(methods[m]->id);
        if (it == scored.end()) continue;
        scores.push_back(it->second.value);
        labels.push_back(*correct[i]);
      }
      const auto s = correlate(scores, labels);
      rows[m].n += s.n;
      rows[m].skipped += lines.size() - s.n;
      if (s.r) {
        r_values[m].push_back(*s.r);
        p_values[m].push_back(*s.p);
      }
    }
  }
  if (!any_evaluable) {
    throw Error(ErrorCode::EmptyDataset, "no record carries both ground_truth and predicted_label");
  }
  for (std::size_t m = 0; m < rows.size(); ++m) {
    if (r_values[m].empty()) continue;
    double r_sum = 0.0;
    double p_sum = 0.0;
    for (std::size_t k = 0; k < r_values[m].size(); ++k) {
      r_sum += r_values[m][k];
      p_sum += p_values[m][k];
    }
    const auto runs_defined = static_cast<double>(r_values[m].size());
    rows[m].pearson_r = r_sum / runs_defined;
    rows[m].p_value = p_sum / runs_defined;
  }
  return rows;
}

std::string render_report(std::span<const CorrelationRow> rows, ReportFormat format) {
  switch (format) {
    case ReportFormat::table: return render_table(rows);
    case ReportFormat::csv: return render_csv(rows);
    case ReportFormat::json: return render_json(rows);
  }
  return {};
}

}  // namespace uqzoo
