#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uqzoo/dataset.hpp"
#include "uqzoo/quantifier.hpp"
#include "uqzoo/registry.hpp"

namespace uqzoo {

/// 1 when predicted_label equals ground_truth, else 0.
/// Throws Error(MissingField) if either label is absent.
int correctness(const PredictionRecord& record);

/// One line of a correlation report. pearson_r and p_value are empty when
/// the correlation is undefined (fewer than 3 pairs or a constant side).
struct CorrelationRow {
  std::string method_id;
  Category category = Category::predictive;
  std::size_t n = 0;
  std::optional<double> pearson_r;
  std::optional<double> p_value;
  std::size_t skipped = 0;

  bool operator==(const CorrelationRow&) const = default;
};

/// Correlates each method's scores with binary correctness.
///
/// Each element of `runs` is one dataset file from a repeated experiment.
/// Per method, r and p are averaged over the runs where they are defined;
/// n and skipped are summed, so n + skipped equals the total line count.
/// Records a method skipped, and records without both labels, are left out
/// of that method's correlation. Rows follow registry order.
///
/// Throws Error(EmptyDataset) when no record in any run has both labels.
std::vector<CorrelationRow> evaluate(std::span<const std::vector<DatasetLine>> runs,
                                     const Quantifier& quantifier, unsigned parallelism = 1);

enum class ReportFormat { table, csv, json };

/// Deterministic text rendering. `table` groups rows under category
/// headings and prints "-" for undefined cells; `csv` has the header
/// method,category,n,pearson_r,p_value,skipped; `json` is an array of rows.
std::string render_report(std::span<const CorrelationRow> rows, ReportFormat format);

}  // namespace uqzoo
