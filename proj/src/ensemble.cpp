#include "uqzoo/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "uqzoo/error.hpp"
#include "uqzoo/numeric.hpp"

namespace uqzoo::ensemble {
namespace {

MethodScore uncertainty(const char* id, double value) {
  return {id, value, Orientation::uncertainty};
}

std::size_t class_count(std::span<const EnsembleSample> samples) {
  if (samples.empty()) throw Error(ErrorCode::MissingField, "ensemble is empty");
  const auto classes = samples.front().class_dist.size();
  for (const auto& s : samples) {
    if (s.class_dist.size() != classes) {
      throw Error(ErrorCode::ShapeMismatch, "ensemble samples disagree on the class count");
    }
  }
  return classes;
}

// Probabilities of class c across the samples.
std::vector<double> column(std::span<const EnsembleSample> samples, std::size_t c) {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.class_dist[c]);
  return out;
}

std::vector<double> per_class_variances(std::span<const EnsembleSample> samples) {
  const auto classes = class_count(samples);
  std::vector<double> out;
  out.reserve(classes);
  for (std::size_t c = 0; c < classes; ++c) out.push_back(population_variance(column(samples, c)));
  return out;
}

std::vector<double> mean_distribution(std::span<const EnsembleSample> samples) {
  std::vector<std::span<const double>> rows;
  rows.reserve(samples.size());
  for (const auto& s : samples) rows.push_back(s.class_dist.probs());
  return mean_rows(rows);
}

}  // namespace

MethodScore expected_entropy(std::span<const EnsembleSample> samples) {
  class_count(samples);
  std::vector<double> entropies;
  entropies.reserve(samples.size());
  for (const auto& s : samples) entropies.push_back(entropy(s.class_dist.probs()));
  return uncertainty("expected_entropy", mean(entropies));
}

MethodScore bald(std::span<const EnsembleSample> samples) {
  class_count(samples);
  if (samples.size() < 2) throw Error(ErrorCode::DegenerateInput, "bald needs at least 2 samples");
  const double total = entropy(mean_distribution(samples));
  const double expected = expected_entropy(samples).value;
  return uncertainty("bald", std::max(0.0, total - expected));
}

MethodScore mc_dropout_variance(std::span<const EnsembleSample> samples) {
  return uncertainty("mc_dropout_var", mean(per_class_variances(samples)));
}

MethodScore class_prediction_variance(std::span<const EnsembleSample> samples) {
  const auto classes = class_count(samples);
  std::vector<double> counts(classes, 0.0);
  for (const auto& s : samples) counts[s.predicted_label] += 1.0;
  const double n = static_cast<double>(samples.size());
  double sum_sq = 0.0;
  for (double c : counts) sum_sq += (c / n) * (c / n);
  return uncertainty("class_pred_var", std::max(0.0, 1.0 - sum_sq));
}

MethodScore class_probability_variance(std::span<const EnsembleSample> samples) {
  class_count(samples);
  const auto top = argmax(mean_distribution(samples));
  return uncertainty("class_prob_var", population_variance(column(samples, top)));
}

MethodScore sample_variance(std::span<const EnsembleSample> samples) {
  class_count(samples);
  std::vector<double> tops;
  tops.reserve(samples.size());
  for (const auto& s : samples) {
    const auto probs = s.class_dist.probs();
    tops.push_back(*std::max_element(probs.begin(), probs.end()));
  }
  return uncertainty("sample_var", population_variance(tops));
}

MethodScore max_diff_variance(std::span<const EnsembleSample> samples) {
  const auto classes = class_count(samples);
  double widest = 0.0;
  for (std::size_t c = 0; c < classes; ++c) {
    const auto col = column(samples, c);
    const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
    widest = std::max(widest, *hi - *lo);
  }
  return uncertainty("max_diff_var", widest);
}

MethodScore min_variance(std::span<const EnsembleSample> samples) {
  const auto variances = per_class_variances(samples);
  return uncertainty("min_var", *std::min_element(variances.begin(), variances.end()));
}

MethodScore embedding_cosine(std::span<const EnsembleSample> samples) {
  if (samples.empty()) throw Error(ErrorCode::MissingField, "ensemble is empty");
  if (samples.size() < 2) throw Error(ErrorCode::DegenerateInput, "embed_cosine needs at least 2 samples");
  std::vector<double> norms;
  norms.reserve(samples.size());
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto& e = samples[s].embedding;
    if (!e) throw Error(ErrorCode::MissingField, "ensemble[" + std::to_string(s) + "] has no embedding");
    if (e->size() != samples.front().embedding->size()) {
      throw Error(ErrorCode::ShapeMismatch, "embedding dimensions differ");
    }
    double sq = 0.0;
    for (double x : *e) sq += x * x;
    if (!(sq > 0.0)) {
      throw Error(ErrorCode::ZeroNormEmbedding, "ensemble[" + std::to_string(s) + "] embedding has zero norm");
    }
    norms.push_back(std::sqrt(sq));
  }
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = i + 1; j < samples.size(); ++j) {
      const auto& a = *samples[i].embedding;
      const auto& b = *samples[j].embedding;
      double dot = 0.0;
      for (std::size_t d = 0; d < a.size(); ++d) dot += a[d] * b[d];
      sum += std::clamp(dot / (norms[i] * norms[j]), -1.0, 1.0);
      ++pairs;
    }
  }
  return {"embed_cosine", sum / static_cast<double>(pairs), Orientation::confidence};
}

}  // namespace uqzoo::ensemble
