#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uqzoo/record.hpp"
#include "uqzoo/score.hpp"

namespace uqzoo::input_sensitivity {

/// Lowercased, whitespace-split tokens. Splits on every Unicode White_Space
/// code point; lowercasing covers ASCII, Latin-1, Latin Extended-A, Greek and
/// Cyrillic. No stemming. Empty text gives no tokens.
struct TokenizedText {
  std::vector<std::string> tokens;

  bool operator==(const TokenizedText&) const = default;
};

TokenizedText tokenize(std::string_view text);

/// Length of the longest common subsequence, in O(min(|a|,|b|)) memory.
std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

/// LCS F1: with P = LCS/|b| and R = LCS/|a|, F = 2PR/(P+R), which reduces to
/// 2 LCS / (|a| + |b|). Zero if either side is empty or nothing matches.
double rouge_l(const TokenizedText& a, const TokenizedText& b);

/// Mean over paraphrase samples of ROUGE-L(y0, yi) * ROUGE-L(P0, Pi).
/// Throws Error(MissingField) when no paraphrase sample exists.
MethodScore spuq(std::string_view base_prompt, std::string_view base_output,
                 std::span<const PerturbationSample> perturbations);

/// Mean entropy of the clarification-sample output distributions.
MethodScore ice(std::span<const PerturbationSample> perturbations);

/// Entropy of the mean icl_context output distribution.
MethodScore icl_sample(std::span<const PerturbationSample> perturbations);

}  // namespace uqzoo::input_sensitivity
