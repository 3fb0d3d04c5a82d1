#include "uqzoo/representation.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "uqzoo/error.hpp"
#include "uqzoo/numeric.hpp"

namespace uqzoo::representation {

MethodScore logit_lens_entropy(const Grid& layer_logits, std::optional<std::size_t> layer) {
  if (layer_logits.empty() || layer_logits.cols == 0) {
    throw Error(ErrorCode::MissingField, "layer_logits is empty");
  }
  const std::size_t chosen = layer.value_or(layer_logits.rows / 2);
  if (chosen >= layer_logits.rows) {
    throw Error(ErrorCode::LayerOutOfRange, "layer " + std::to_string(chosen) + " out of range (" +
                                                std::to_string(layer_logits.rows) + " layers)");
  }
  const auto logits = layer_logits.row(chosen);
  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> probs;
  probs.reserve(logits.size());
  double z = 0.0;
  for (double v : logits) {
    probs.push_back(std::exp(v - top));
    z += probs.back();
  }
  for (double& p : probs) p /= z;
  return {"logit_lens_entropy", entropy(probs), Orientation::uncertainty};
}

}  // namespace uqzoo::representation
