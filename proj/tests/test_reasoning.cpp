#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <doctest.h>

#include "expect_error.hpp"
#include "generators.hpp"
#include "oracle.hpp"
#include "uqzoo/input_sensitivity.hpp"
#include "uqzoo/reasoning.hpp"

using namespace uqzoo;
using namespace uqzoo::reasoning;

namespace {

ReasoningTrace attention(std::vector<std::vector<double>> rows) {
  ReasoningTrace t;
  t.attention = Grid::from_rows(rows);
  return t;
}

ReasoningTrace keywords(std::vector<Keyword> k) {
  ReasoningTrace t;
  t.keywords = std::move(k);
  return t;
}

ReasoningTrace branches(std::vector<double> b) {
  ReasoningTrace t;
  t.branch_scores = std::move(b);
  return t;
}

ReasoningTrace steps(std::vector<std::string> s) {
  ReasoningTrace t;
  t.steps = std::move(s);
  return t;
}

ReasoningTrace explained(double p, std::vector<double> entailments) {
  ReasoningTrace t;
  t.answer_prob = p;
  t.entailment_scores = std::move(entailments);
  return t;
}

PersistenceDiagram diagram(std::vector<double> deaths) { return {std::move(deaths)}; }

double step_distance(const std::string& a, const std::string& b) {
  return 1.0 - input_sensitivity::rouge_l(input_sensitivity::tokenize(a), input_sensitivity::tokenize(b));
}

std::vector<double> random_deaths(gen::Rng& rng) {
  auto d = gen::reals(rng, gen::uniform_size(rng, 0, 6), 0.0, 1.0);
  std::sort(d.begin(), d.end());
  return d;
}

}  // namespace

TEST_CASE("uag") {
  CHECK(uag(std::vector{attention({{0.1, 0.2}}), attention({{0.1, 0.2}})}).value == 0.0);
  CHECK(uag(std::vector{attention({{0.0}}), attention({{1.0}})}).value == 0.25);
  CHECK(uag(std::vector{attention({{0.0, 0.5}}), attention({{1.0, 0.5}})}).value == 0.125);
  CHECK_UQ_ERROR(uag(std::vector{attention({{0.0}})}), ErrorCode::DegenerateInput);
  CHECK_UQ_ERROR(uag(std::vector{attention({{0.0}}), attention({{0.0, 1.0}})}), ErrorCode::ShapeMismatch);
  CHECK_UQ_ERROR(uag(std::vector{ReasoningTrace{}, ReasoningTrace{}}), ErrorCode::MissingField);
}

TEST_CASE("cot_uq") {
  CHECK(cot_uq(std::vector{ReasoningTrace{}, ReasoningTrace{}}).value == 0.0);
  CHECK(cot_uq(std::vector{keywords({{"x", 2.0, 0.5}})}).value == 1.0);
  CHECK(cot_uq(std::vector{keywords({{"x", 2.0, 0.5}}), keywords({{"y", 1.0, 1.0}, {"z", 4.0, 0.5}})}).value == 2.0);
  CHECK(cot_uq(std::vector{keywords({{"x", 1.0, 1.0}})}).orientation == Orientation::confidence);
  CHECK(cot_uq(std::vector{keywords({{"x", 1.0, 1.0}})}, Orientation::uncertainty).orientation ==
        Orientation::uncertainty);
  CHECK_UQ_ERROR(cot_uq(std::vector<ReasoningTrace>{}), ErrorCode::MissingField);
}

TEST_CASE("tout") {
  CHECK(tout(std::vector{branches({0.3, 0.3}), branches({0.3})}).value == 0.0);
  CHECK(tout(std::vector{branches({0.0}), branches({1.0})}).value == 0.25);
  CHECK(tout(std::vector{branches({0.7})}).value == 0.0);
  CHECK(tout(std::vector{branches({0.0, 1.0}), ReasoningTrace{}}).value == 0.25);
  CHECK_UQ_ERROR(tout(std::vector{ReasoningTrace{}}), ErrorCode::MissingField);
}

TEST_CASE("persistence_diagram") {
  CHECK(persistence_diagram(steps({"only one step"})).deaths.empty());
  CHECK(persistence_diagram(steps({"same step", "Same  step"})).deaths == std::vector<double>{0.0});
  CHECK_UQ_ERROR(persistence_diagram(ReasoningTrace{}), ErrorCode::MissingField);

  // A triangle keeps its two lightest edges.
  const std::vector<std::string> s{"a b c d e", "a b c d x", "a b y z w"};
  std::vector<double> edges{step_distance(s[0], s[1]), step_distance(s[0], s[2]), step_distance(s[1], s[2])};
  std::sort(edges.begin(), edges.end());
  const auto d = persistence_diagram(std::span<const std::string>(s)).deaths;
  REQUIRE(d.size() == 2);
  CHECK(d[0] == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(d[0] == edges[0]);
  CHECK(d[1] == edges[1]);
}

TEST_CASE("diagram deaths are single-linkage merge heights") {
  gen::Rng rng(41);
  for (int i = 0; i < 500; ++i) {
    std::vector<std::string> s;
    for (std::size_t n = gen::uniform_size(rng, 1, 6); s.size() < n;) s.push_back(gen::sentence(rng, 5));
    oracle::Mat dist(s.size(), oracle::Vec(s.size(), 0.0));
    for (std::size_t a = 0; a < s.size(); ++a) {
      for (std::size_t b = 0; b < s.size(); ++b) {
        const auto ta = input_sensitivity::tokenize(s[a]).tokens;
        const auto tb = input_sensitivity::tokenize(s[b]).tokens;
        dist[a][b] = 1.0 - oracle::rouge_l(ta, tb);
      }
    }
    const auto deaths = persistence_diagram(std::span<const std::string>(s)).deaths;
    CHECK(deaths.size() == s.size() - 1);
    CHECK(std::is_sorted(deaths.begin(), deaths.end()));
    CHECK(deaths == oracle::single_linkage_heights(dist));
  }
}

TEST_CASE("wasserstein_0d examples") {
  CHECK(wasserstein_0d(diagram({0.1, 0.4}), diagram({0.1, 0.4})) == 0.0);
  CHECK(wasserstein_0d(diagram({0.4}), diagram({})) == 0.2);
  CHECK(wasserstein_0d(diagram({}), diagram({})) == 0.0);
  CHECK(wasserstein_0d(diagram({0.2, 0.5}), diagram({0.2, 0.9})) == doctest::Approx(0.4).epsilon(1e-15));
  // Matching the small death with the large one costs more than sending both
  // to the diagonal.
  CHECK(wasserstein_0d(diagram({0.1}), diagram({0.9})) == doctest::Approx(0.5).epsilon(1e-15));
  // The lone small death goes to the diagonal, not onto 0.95.
  CHECK(wasserstein_0d(diagram({0.02, 0.95}), diagram({0.9})) == doctest::Approx(0.06).epsilon(1e-12));
}

TEST_CASE("wasserstein_0d matches exhaustive matching") {
  gen::Rng rng(42);
  for (int i = 0; i < 500; ++i) {
    const auto a = random_deaths(rng);
    const auto b = random_deaths(rng);
    CHECK(std::abs(wasserstein_0d(diagram(a), diagram(b)) - oracle::wasserstein_brute_force(a, b)) <= 1e-12);
  }
}

TEST_CASE("wasserstein_0d is a metric") {
  gen::Rng rng(43);
  for (int i = 0; i < 200; ++i) {
    const auto a = diagram(random_deaths(rng));
    const auto b = diagram(random_deaths(rng));
    const auto c = diagram(random_deaths(rng));
    CHECK(wasserstein_0d(a, b) == wasserstein_0d(b, a));
    CHECK(wasserstein_0d(a, c) <= wasserstein_0d(a, b) + wasserstein_0d(b, c) + 1e-9);
    CHECK(wasserstein_0d(a, a) == 0.0);
    CHECK(wasserstein_0d(a, b) >= 0.0);
  }
}

TEST_CASE("topology_uq") {
  const auto one = steps({"a b c d e", "a b c d x", "a b y z w"});
  const auto other = steps({"p q r", "p q s"});
  CHECK(topology_uq(std::vector{one, one, one}).value == 0.0);
  const double w = wasserstein_0d(persistence_diagram(one), persistence_diagram(other));
  CHECK(w > 0.0);
  CHECK(topology_uq(std::vector{one, other}).value == w);
  CHECK(topology_uq(std::vector{one, one, other}).value == doctest::Approx(2.0 * w / 3.0).epsilon(1e-15));
  CHECK_UQ_ERROR(topology_uq(std::vector{one}), ErrorCode::DegenerateInput);
  CHECK_UQ_ERROR(topology_uq(std::vector{one, ReasoningTrace{}}), ErrorCode::MissingField);
}

TEST_CASE("stable_explanation_confidence") {
  CHECK(stable_explanation_confidence(std::vector{explained(1.0, {1.0, 1.0})}).value == 1.0);
  CHECK(stable_explanation_confidence(std::vector{explained(0.0, {0.7})}).value == 0.0);
  CHECK(stable_explanation_confidence(std::vector{explained(0.8, {0.5, 1.0})}).value ==
        doctest::Approx(0.6).epsilon(1e-15));
  CHECK(stable_explanation_confidence(std::vector{explained(0.8, {0.5, 1.0}), ReasoningTrace{}}).value ==
        doctest::Approx(0.6).epsilon(1e-15));
  CHECK_UQ_ERROR(stable_explanation_confidence(std::vector{ReasoningTrace{}}), ErrorCode::MissingField);
  CHECK_UQ_ERROR(stable_explanation_confidence(std::vector{explained(0.5, {})}), ErrorCode::MissingField);
}

TEST_CASE("reasoning methods are invariant under trace permutation") {
  gen::Rng rng(44);
  for (int i = 0; i < 300; ++i) {
    auto traces = *gen::record(rng, "r").traces;
    auto shuffled = traces;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(std::abs(uag(traces).value - uag(shuffled).value) <= 1e-12);
    CHECK(std::abs(topology_uq(traces).value - topology_uq(shuffled).value) <= 1e-12);
    CHECK(std::abs(cot_uq(traces).value - cot_uq(shuffled).value) <= 1e-12);
    CHECK(std::abs(tout(traces).value - tout(shuffled).value) <= 1e-12);

    const std::vector<ReasoningTrace> same(traces.size(), traces.front());
    CHECK(uag(same).value == 0.0);
    CHECK(topology_uq(same).value == 0.0);
  }
}

TEST_CASE("uag is zero only for identical grids") {
  gen::Rng rng(45);
  for (int i = 0; i < 300; ++i) {
    auto traces = *gen::record(rng, "r").traces;
    auto& g = traces.back().attention;
    g.values[gen::uniform_size(rng, 0, g.values.size() - 1)] += 0.5;
    CHECK(uag(traces).value > 1e-12);
  }
}

TEST_CASE("closed-form reasoning methods match the high-precision oracle") {
  gen::Rng rng(46);
  using oracle::to_double;
  for (int i = 0; i < 1000; ++i) {
    const auto traces = *gen::record(rng, "r").traces;
    std::vector<oracle::Mat> grids;
    std::vector<std::vector<std::pair<double, double>>> kw;
    oracle::Mat bs;
    std::vector<std::pair<double, oracle::Vec>> ex;
    for (const auto& t : traces) {
      oracle::Mat rows;
      for (std::size_t r = 0; r < t.attention.rows; ++r) rows.emplace_back(t.attention.row(r).begin(), t.attention.row(r).end());
      grids.push_back(rows);
      kw.emplace_back();
      for (const auto& k : t.keywords) kw.back().emplace_back(k.frequency, k.weight);
      bs.push_back(t.branch_scores);
      if (t.answer_prob && t.entailment_scores) ex.emplace_back(*t.answer_prob, *t.entailment_scores);
    }
    CHECK(std::abs(uag(traces).value - to_double(oracle::uag(grids))) <= 1e-9);
    CHECK(std::abs(cot_uq(traces).value - to_double(oracle::cot_uq(kw))) <= 1e-9);
    CHECK(std::abs(tout(traces).value - to_double(oracle::tout(bs))) <= 1e-9);
    CHECK(std::abs(stable_explanation_confidence(traces).value - to_double(oracle::stable_explanation(ex))) <= 1e-9);
  }
}
