#include "uqzoo/reasoning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "uqzoo/error.hpp"
#include "uqzoo/input_sensitivity.hpp"
#include "uqzoo/numeric.hpp"

namespace uqzoo::reasoning {
namespace {

void require_traces(std::span<const ReasoningTrace> traces) {
  if (traces.empty()) throw Error(ErrorCode::MissingField, "traces is empty");
}

void require_pairs(std::span<const ReasoningTrace> traces, const char* method) {
  require_traces(traces);
  if (traces.size() < 2) {
    throw Error(ErrorCode::DegenerateInput, std::string(method) + " needs at least 2 traces");
  }
}

}  // namespace

MethodScore uag(std::span<const ReasoningTrace> traces) {
  require_pairs(traces, "uag");
  const auto& shape = traces.front().attention;
  if (shape.empty() || shape.cols == 0) throw Error(ErrorCode::MissingField, "traces carry no attention grid");
  for (const auto& t : traces) {
    if (t.attention.rows != shape.rows || t.attention.cols != shape.cols) {
      throw Error(ErrorCode::ShapeMismatch, "attention grids differ in shape across traces");
    }
  }
  std::vector<double> cell(traces.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < shape.values.size(); ++i) {
    for (std::size_t k = 0; k < traces.size(); ++k) cell[k] = traces[k].attention.values[i];
    sum += population_variance(cell);
  }
  return {"uag", sum / static_cast<double>(shape.values.size()), Orientation::uncertainty};
}

MethodScore cot_uq(std::span<const ReasoningTrace> traces, Orientation orientation) {
  require_traces(traces);
  double total = 0.0;
  for (const auto& t : traces) {
    for (const auto& k : t.keywords) total += k.frequency * k.weight;
  }
  return {"cot_uq", total / static_cast<double>(traces.size()), orientation};
}

MethodScore tout(std::span<const ReasoningTrace> traces) {
  require_traces(traces);
  std::vector<double> pooled;
  for (const auto& t : traces) pooled.insert(pooled.end(), t.branch_scores.begin(), t.branch_scores.end());
  if (pooled.empty()) throw Error(ErrorCode::MissingField, "no trace has branch_scores");
  return {"tout", population_variance(pooled), Orientation::uncertainty};
}

PersistenceDiagram persistence_diagram(std::span<const std::string> steps) {
  if (steps.empty()) throw Error(ErrorCode::MissingField, "trace has no steps");
  const std::size_t n = steps.size();
  std::vector<input_sensitivity::TokenizedText> tokens;
  tokens.reserve(n);
  for (const auto& s : steps) tokens.push_back(input_sensitivity::tokenize(s));

  auto distance = [&](std::size_t i, std::size_t j) {
    return std::max(0.0, 1.0 - input_sensitivity::rouge_l(tokens[i], tokens[j]));
  };

  // Prim's algorithm on the complete graph.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<bool> in_tree(n, false);
  std::vector<double> best(n, kInf);
  PersistenceDiagram diagram;
  diagram.deaths.reserve(n - 1);
  in_tree[0] = true;
  for (std::size_t j = 1; j < n; ++j) best[j] = distance(0, j);
  for (std::size_t added = 1; added < n; ++added) {
    std::size_t next = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (!in_tree[j] && (next == n || best[j] < best[next])) next = j;
    }
    in_tree[next] = true;
    diagram.deaths.push_back(best[next]);
    for (std::size_t j = 0; j < n; ++j) {
      if (!in_tree[j]) best[j] = std::min(best[j], distance(next, j));
    }
  }
  std::sort(diagram.deaths.begin(), diagram.deaths.end());
  return diagram;
}

PersistenceDiagram persistence_diagram(const ReasoningTrace& trace) {
  return persistence_diagram(std::span<const std::string>(trace.steps));
}

double wasserstein_0d(const PersistenceDiagram& a, const PersistenceDiagram& b) {
  std::vector<double> x = a.deaths;
  std::vector<double> y = b.deaths;
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  // cost[i][j]: optimal cost for the first i deaths of x against the first j of y.
  std::vector<double> prev(y.size() + 1, 0.0);
  std::vector<double> curr(y.size() + 1, 0.0);
  for (std::size_t j = 1; j <= y.size(); ++j) prev[j] = prev[j - 1] + y[j - 1] / 2.0;
  for (std::size_t i = 1; i <= x.size(); ++i) {
    curr[0] = prev[0] + x[i - 1] / 2.0;
    for (std::size_t j = 1; j <= y.size(); ++j) {
      curr[j] = std::min({prev[j - 1] + std::abs(x[i - 1] - y[j - 1]),
                          prev[j] + x[i - 1] / 2.0,
                          curr[j - 1] + y[j - 1] / 2.0});
    }
    std::swap(prev, curr);
  }
  return prev[y.size()];
}

MethodScore topology_uq(std::span<const ReasoningTrace> traces) {
  require_pairs(traces, "topology_uq");
  std::vector<PersistenceDiagram> diagrams;
  diagrams.reserve(traces.size());
  for (const auto& t : traces) diagrams.push_back(persistence_diagram(t));
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < diagrams.size(); ++i) {
    for (std::size_t j = i + 1; j < diagrams.size(); ++j) {
      sum += wasserstein_0d(diagrams[i], diagrams[j]);
      ++pairs;
    }
  }
  return {"topology_uq", sum / static_cast<double>(pairs), Orientation::uncertainty};
}

MethodScore stable_explanation_confidence(std::span<const ReasoningTrace> traces) {
  double sum = 0.0;
  std::size_t qualifying = 0;
  for (const auto& t : traces) {
    if (!t.answer_prob || !t.entailment_scores || t.entailment_scores->empty()) continue;
    sum += *t.answer_prob * mean(*t.entailment_scores);
    ++qualifying;
  }
  if (qualifying == 0) {
    throw Error(ErrorCode::MissingField, "no trace carries answer_prob with entailment_scores");
  }
  return {"stable_explanation", std::clamp(sum / static_cast<double>(qualifying), 0.0, 1.0),
          Orientation::confidence};
}

}  // namespace uqzoo::reasoning
