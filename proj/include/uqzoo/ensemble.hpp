#pragma once

#include <span>

#include "uqzoo/record.hpp"
#include "uqzoo/score.hpp"

// Disagreement across S stochastic forward passes (MC dropout draws or
// ensemble members). Variances are population variances over the samples.
//
// Every function throws Error(MissingField) on an empty ensemble and
// Error(ShapeMismatch) when samples disagree on the class count.

namespace uqzoo::ensemble {

/// Mean per-sample entropy; [0, ln C].
MethodScore expected_entropy(std::span<const EnsembleSample> samples);

/// Entropy of the mean distribution minus expected_entropy, clamped at 0.
/// Needs S >= 2, else Error(DegenerateInput).
MethodScore bald(std::span<const EnsembleSample> samples);

/// Mean over classes of the per-class variance across samples.
MethodScore mc_dropout_variance(std::span<const EnsembleSample> samples);

/// Gini impurity of the predicted-label histogram; 0 iff unanimous.
MethodScore class_prediction_variance(std::span<const EnsembleSample> samples);

/// Variance of the probability of the mean distribution's argmax class.
MethodScore class_probability_variance(std::span<const EnsembleSample> samples);

/// Variance of each sample's own top probability.
MethodScore sample_variance(std::span<const EnsembleSample> samples);

/// Largest per-class range (max minus min over samples).
MethodScore max_diff_variance(std::span<const EnsembleSample> samples);

/// Smallest per-class variance.
MethodScore min_variance(std::span<const EnsembleSample> samples);

/// Mean pairwise cosine of the sample embeddings; [-1, 1].
/// Needs S >= 2 (DegenerateInput), an embedding on every sample
/// (MissingField) and no zero vectors (ZeroNormEmbedding).
MethodScore embedding_cosine(std::span<const EnsembleSample> samples);

}  // namespace uqzoo::ensemble
