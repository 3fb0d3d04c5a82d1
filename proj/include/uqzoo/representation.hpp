#pragma once

#include <cstddef>
#include <optional>

#include "uqzoo/record.hpp"
#include "uqzoo/score.hpp"

namespace uqzoo::representation {

/// Entropy of softmax(z) for one intermediate layer of raw logits. The row
/// maximum is subtracted before exponentiating. `layer` is 0-based and
/// defaults to the middle layer floor(L / 2).
///
/// Throws Error(MissingField) on an empty grid and Error(LayerOutOfRange)
/// when `layer` >= L.
MethodScore logit_lens_entropy(const Grid& layer_logits,
                               std::optional<std::size_t> layer = std::nullopt);

}  // namespace uqzoo::representation
