#include "uqzoo/predictive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "uqzoo/error.hpp"
#include "uqzoo/numeric.hpp"

namespace uqzoo::predictive {
namespace {

MethodScore uncertainty(const char* id, double value) {
  return {id, value, Orientation::uncertainty};
}

MethodScore confidence(const char* id, double value) {
  return {id, value, Orientation::confidence};
}

void require_steps(std::span<const TokenStep> steps) {
  if (steps.empty()) throw Error(ErrorCode::MissingField, "token_steps is empty");
}

double mean_neg_log(std::span<const TokenStep> steps) {
  require_steps(steps);
  double sum = 0.0;
  for (std::size_t t = 0; t < steps.size(); ++t) {
    if (!(steps[t].chosen_prob > 0.0)) {
      throw Error(ErrorCode::ZeroProbability,
                  "token_steps[" + std::to_string(t) + "] realized a zero-probability token");
    }
    sum -= std::log(steps[t].chosen_prob);
  }
  return sum / static_cast<double>(steps.size());
}

}  // namespace

MethodScore max_probability(const Distribution& class_dist) {
  const auto probs = class_dist.probs();
  return confidence("max_prob", *std::max_element(probs.begin(), probs.end()));
}

MethodScore least_confidence(const Distribution& class_dist) {
  return uncertainty("least_confidence", 1.0 - max_probability(class_dist).value);
}

MethodScore margin(const Distribution& class_dist) {
  double first = -1.0;
  double second = -1.0;
  for (double p : class_dist.probs()) {
    if (p > first) {
      second = first;
      first = p;
    } else if (p > second) {
      second = p;
    }
  }
  return confidence("margin", first - second);
}

MethodScore predictive_entropy(const Distribution& class_dist) {
  return uncertainty("pred_entropy", entropy(class_dist.probs()));
}

MethodScore deep_gini(const Distribution& class_dist) {
  double sum_sq = 0.0;
  for (double p : class_dist.probs()) sum_sq += p * p;
  const double upper = 1.0 - 1.0 / static_cast<double>(class_dist.size());
  return uncertainty("deep_gini", std::clamp(1.0 - sum_sq, 0.0, upper));
}

MethodScore avg_neg_log_likelihood(std::span<const TokenStep> steps) {
  return uncertainty("avg_nll", mean_neg_log(steps));
}

MethodScore avg_probability(std::span<const TokenStep> steps) {
  require_steps(steps);
  double sum = 0.0;
  for (const auto& step : steps) sum += step.chosen_prob;
  return confidence("avg_prob", sum / static_cast<double>(steps.size()));
}

MethodScore perplexity(std::span<const TokenStep> steps) {
  return uncertainty("perplexity", std::exp(mean_neg_log(steps)));
}

MethodScore max_token_entropy(std::span<const TokenStep> steps) {
  require_steps(steps);
  double worst = 0.0;
  for (const auto& step : steps) worst = std::max(worst, entropy(step.dist.probs()));
  return uncertainty("max_token_entropy", worst);
}

MethodScore avg_prediction_entropy(std::span<const TokenStep> steps) {
  require_steps(steps);
  double sum = 0.0;
  for (const auto& step : steps) sum += entropy(step.dist.probs());
  return uncertainty("avg_pred_entropy", sum / static_cast<double>(steps.size()));
}

MethodScore token_impossibility(std::span<const TokenStep> steps) {
  require_steps(steps);
  double lowest = std::numeric_limits<double>::infinity();
  for (const auto& step : steps) lowest = std::min(lowest, step.chosen_prob);
  return uncertainty("token_impossibility", 1.0 - lowest);
}

}  // namespace uqzoo::predictive
