#pragma once

#include <string>
#include <string_view>

namespace uqzoo {

/// uncertainty: higher means less confident. confidence: the reverse.
enum class Orientation { uncertainty, confidence };

std::string_view to_string(Orientation orientation) noexcept;

struct MethodScore {
  std::string method_id;
  double value = 0.0;
  Orientation orientation = Orientation::uncertainty;

  bool operator==(const MethodScore&) const = default;
};

}  // namespace uqzoo
