#include "uqzoo/input_sensitivity.hpp"

#include <algorithm>

#include "uqzoo/error.hpp"
#include "uqzoo/numeric.hpp"

namespace uqzoo::input_sensitivity {
namespace {

constexpr char32_t kInvalid = 0xFFFFFFFF;

// Decodes one UTF-8 sequence at `pos`, advancing it. Malformed bytes come
// back as kInvalid and are copied through verbatim by the caller.
char32_t decode(std::string_view text, std::size_t& pos) {
  const auto lead = static_cast<unsigned char>(text[pos]);
  std::size_t extra = 0;
  char32_t cp = 0;
  if (lead < 0x80) {
    ++pos;
    return lead;
  } else if ((lead & 0xE0) == 0xC0) {
    extra = 1;
    cp = lead & 0x1F;
  } else if ((lead & 0xF0) == 0xE0) {
    extra = 2;
    cp = lead & 0x0F;
  } else if ((lead & 0xF8) == 0xF0) {
    extra = 3;
    cp = lead & 0x07;
  } else {
    ++pos;
    return kInvalid;
  }
  if (pos + extra >= text.size()) {
    ++pos;
    return kInvalid;
  }
  for (std::size_t i = 1; i <= extra; ++i) {
    const auto c = static_cast<unsigned char>(text[pos + i]);
    if ((c & 0xC0) != 0x80) {
      ++pos;
      return kInvalid;
    }
    cp = (cp << 6) | (c & 0x3F);
  }
  pos += extra + 1;
  return cp;
}

void encode(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool is_white_space(char32_t cp) {
  switch (cp) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
    case 0x85: case 0xA0: case 0x1680:
    case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

char32_t to_lower(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
  if (cp >= 0x100 && cp <= 0x137 && cp % 2 == 0 && cp != 0x130) return cp + 1;
  if (cp >= 0x139 && cp <= 0x148 && cp % 2 == 1) return cp + 1;
  if (cp >= 0x14A && cp <= 0x177 && cp % 2 == 0) return cp + 1;
  if (cp == 0x178) return 0xFF;
  if (cp >= 0x179 && cp <= 0x17E && cp % 2 == 1) return cp + 1;
  if (cp >= 0x391 && cp <= 0x3A9 && cp != 0x3A2) return cp + 0x20;
  if (cp >= 0x410 && cp <= 0x42F) return cp + 0x20;
  if (cp >= 0x400 && cp <= 0x40F) return cp + 0x50;
  return cp;
}

const Distribution& output_dist_of(const PerturbationSample& sample) {
  // parse_record guarantees this for clarification/icl_context samples
  if (!sample.output_dist) throw Error(ErrorCode::MissingField, "perturbation sample has no output_dist");
  return *sample.output_dist;
}

std::vector<const PerturbationSample*> of_kind(std::span<const PerturbationSample> samples,
                                               PerturbationKind kind) {
  std::vector<const PerturbationSample*> out;
  for (const auto& s : samples) {
    if (s.kind == kind) out.push_back(&s);
  }
  if (out.empty()) {
    throw Error(ErrorCode::MissingField, "no " + std::string(to_string(kind)) + " samples");
  }
  return out;
}

}  // namespace

TokenizedText tokenize(std::string_view text) {
  TokenizedText out;
  std::string current;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t start = pos;
    const char32_t cp = decode(text, pos);
    if (cp == kInvalid) {
      current.append(text.substr(start, pos - start));
    } else if (is_white_space(cp)) {
      if (!current.empty()) out.tokens.push_back(std::move(current));
      current.clear();
    } else {
      encode(to_lower(cp), current);
    }
  }
  if (!current.empty()) out.tokens.push_back(std::move(current));
  return out;
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> curr(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      curr[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], curr[j - 1]);
    }
    std::swap(prev, curr);
  }
  return prev[b.size()];
}

double rouge_l(const TokenizedText& a, const TokenizedText& b) {
  if (a.tokens.empty() || b.tokens.empty()) return 0.0;
  const auto lcs = lcs_length(a.tokens, b.tokens);
  if (lcs == 0) return 0.0;
  return 2.0 * static_cast<double>(lcs) / static_cast<double>(a.tokens.size() + b.tokens.size());
}

MethodScore spuq(std::string_view base_prompt, std::string_view base_output,
                 std::span<const PerturbationSample> perturbations) {
  const auto paraphrases = of_kind(perturbations, PerturbationKind::paraphrase);
  const auto prompt0 = tokenize(base_prompt);
  const auto output0 = tokenize(base_output);
  double sum = 0.0;
  for (const auto* p : paraphrases) {
    sum += rouge_l(output0, tokenize(p->output_text)) * rouge_l(prompt0, tokenize(p->prompt_text));
  }
  const double value = sum / static_cast<double>(paraphrases.size());
  return {"spuq", std::clamp(value, 0.0, 1.0), Orientation::confidence};
}

MethodScore ice(std::span<const PerturbationSample> perturbations) {
  const auto clarified = of_kind(perturbations, PerturbationKind::clarification);
  double sum = 0.0;
  for (const auto* p : clarified) sum += entropy(output_dist_of(*p).probs());
  return {"ice", sum / static_cast<double>(clarified.size()), Orientation::uncertainty};
}

MethodScore icl_sample(std::span<const PerturbationSample> perturbations) {
  const auto contexts = of_kind(perturbations, PerturbationKind::icl_context);
  std::vector<std::span<const double>> rows;
  for (const auto* p : contexts) {
    const auto probs = output_dist_of(*p).probs();
    if (!rows.empty() && probs.size() != rows.front().size()) {
      throw Error(ErrorCode::ShapeMismatch, "icl_context distributions disagree on the class count");
    }
    rows.push_back(probs);
  }
  return {"icl_sample", entropy(mean_rows(rows)), Orientation::uncertainty};
}

}  // namespace uqzoo::input_sensitivity
