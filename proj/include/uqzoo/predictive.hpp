#pragma once

#include <span>

#include "uqzoo/record.hpp"
#include "uqzoo/score.hpp"

// Scores read directly off the model's output distribution, either the
// final class distribution or the per-token distributions of a generated
// sequence.

namespace uqzoo::predictive {

// Output level, over the final class distribution.
MethodScore max_probability(const Distribution& class_dist);   // [1/C, 1]
MethodScore least_confidence(const Distribution& class_dist);  // 1 - max p
MethodScore margin(const Distribution& class_dist);            // top-1 minus top-2
MethodScore predictive_entropy(const Distribution& class_dist);  // [0, ln C]
MethodScore deep_gini(const Distribution& class_dist);          // [0, 1 - 1/C]

// Token level, over the realized sequence. All throw Error(MissingField)
// on an empty sequence.

/// -(1/N) sum ln p_t over chosen-token probabilities. Throws
/// Error(ZeroProbability) if a realized token had probability 0.
MethodScore avg_neg_log_likelihood(std::span<const TokenStep> steps);
MethodScore avg_probability(std::span<const TokenStep> steps);
/// exp of the average negative log-likelihood; >= 1.
MethodScore perplexity(std::span<const TokenStep> steps);
MethodScore max_token_entropy(std::span<const TokenStep> steps);
MethodScore avg_prediction_entropy(std::span<const TokenStep> steps);
/// 1 - min_t p_t, so that a single improbable token raises the score.
MethodScore token_impossibility(std::span<const TokenStep> steps);

}  // namespace uqzoo::predictive
