#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "uqzoo/score.hpp"

namespace uqzoo {

enum class Category { predictive, ensemble, input_level, reasoning, representation };

std::string_view to_string(Category category) noexcept;
std::optional<Category> parse_category(std::string_view text) noexcept;

/// Section title used when grouping report rows.
std::string_view category_title(Category category) noexcept;

using ParamValue = std::variant<std::int64_t, std::string>;

enum class ParamType { integer, string };

struct ParamSpec {
  std::string name;
  ParamType type = ParamType::integer;
  /// Absent means the method derives a value from the record.
  std::optional<ParamValue> default_value;
  /// Allowed values for string parameters; empty means unrestricted.
  std::vector<std::string> choices;
  /// Lower bound for integer parameters.
  std::int64_t minimum = 0;
  std::string description;
};

struct MethodDescriptor {
  std::string id;
  std::string name;        // full method name
  std::string short_name;  // label used in correlation reports
  Category category = Category::predictive;
  Orientation orientation = Orientation::uncertainty;
  /// Record fields that must be present for the method to run.
  std::vector<std::string> required_fields;
  std::vector<ParamSpec> params;

  const ParamSpec* find_param(std::string_view param) const noexcept;
};

/// All 29 methods, grouped by category in a fixed order.
std::span<const MethodDescriptor> list_methods() noexcept;

const MethodDescriptor* find_method(std::string_view id) noexcept;

/// Position of `id` in list_methods(); used to sort method sets.
std::optional<std::size_t> method_rank(std::string_view id) noexcept;

}  // namespace uqzoo
