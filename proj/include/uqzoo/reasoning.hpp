#pragma once

#include <span>
#include <string>
#include <vector>

#include "uqzoo/record.hpp"
#include "uqzoo/score.hpp"

namespace uqzoo::reasoning {

/// 0-dimensional persistence diagram. Every feature is born at 0, so only
/// the death scales are kept, sorted ascending.
struct PersistenceDiagram {
  std::vector<double> deaths;

  bool operator==(const PersistenceDiagram&) const = default;
};

/// Mean over attention cells (layer, token) of the variance across the K
/// paths. Needs K >= 2 traces whose grids share one non-empty shape.
MethodScore uag(std::span<const ReasoningTrace> traces);

/// Mean over paths of sum_j frequency_j * weight_j. A path without keywords
/// contributes 0. The orientation tag is configurable.
MethodScore cot_uq(std::span<const ReasoningTrace> traces,
                   Orientation orientation = Orientation::confidence);

/// Variance of all branch scores pooled across traces.
MethodScore tout(std::span<const ReasoningTrace> traces);

/// Connectivity diagram of the reasoning steps. Steps are points at
/// distance 1 - ROUGE-L(step_i, step_j); deaths are the edge weights of a
/// minimum spanning tree, i.e. the single-linkage merge heights. n steps give
/// n - 1 deaths.
PersistenceDiagram persistence_diagram(std::span<const std::string> steps);
PersistenceDiagram persistence_diagram(const ReasoningTrace& trace);

/// 1-Wasserstein distance between two 0-dimensional diagrams under the L-inf
/// ground metric. Two deaths a, b cost |a - b| to match; an unmatched death d
/// costs d / 2 (its distance to the diagonal). Solved exactly: an optimal
/// matching never crosses in sorted order, so an edit-distance style
/// recurrence over the sorted deaths finds it.
double wasserstein_0d(const PersistenceDiagram& a, const PersistenceDiagram& b);

/// Mean pairwise wasserstein_0d over the trace diagrams. Needs K >= 2.
MethodScore topology_uq(std::span<const ReasoningTrace> traces);

/// Mean over traces carrying both answer_prob and entailment scores of
/// answer_prob * mean(entailment_scores); [0, 1].
MethodScore stable_explanation_confidence(std::span<const ReasoningTrace> traces);

}  // namespace uqzoo::reasoning
