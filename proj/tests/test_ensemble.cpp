#include <algorithm>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "expect_error.hpp"
#include "generators.hpp"
#include "oracle.hpp"
#include "uqzoo/ensemble.hpp"
#include "uqzoo/numeric.hpp"
#include "uqzoo/predictive.hpp"

using namespace uqzoo;
using namespace uqzoo::ensemble;

namespace {

EnsembleSample sample(std::vector<double> p) {
  auto d = Distribution::from_probs(std::move(p));
  const auto label = argmax(d.probs());
  return {std::move(d), label, std::nullopt};
}

EnsembleSample embedded(std::vector<double> embedding) {
  auto s = sample({0.5, 0.5});
  s.embedding = std::move(embedding);
  return s;
}

std::vector<EnsembleSample> samples(std::initializer_list<std::vector<double>> dists) {
  std::vector<EnsembleSample> out;
  for (const auto& d : dists) out.push_back(sample(d));
  return out;
}

double max_class_variance(std::span<const EnsembleSample> s) {
  double best = 0.0;
  for (std::size_t c = 0; c < s[0].class_dist.size(); ++c) {
    std::vector<double> column;
    for (const auto& x : s) column.push_back(x.class_dist[c]);
    best = std::max(best, population_variance(column));
  }
  return best;
}

}  // namespace

TEST_CASE("expected_entropy") {
  CHECK(expected_entropy(samples({{1, 0, 0}, {0, 0, 1}})).value == 0.0);
  CHECK(expected_entropy(samples({{0.25, 0.25, 0.25, 0.25}, {0.25, 0.25, 0.25, 0.25}})).value ==
        doctest::Approx(std::log(4.0)).epsilon(1e-15));
  CHECK(std::abs(expected_entropy(samples({{0.9, 0.1}, {0.5, 0.5}})).value - 0.50911507697569677) < 1e-12);
  CHECK(expected_entropy(samples({{0.9, 0.1}})).value > 0.0);
}

TEST_CASE("bald") {
  CHECK(bald(samples({{0.3, 0.7}, {0.3, 0.7}, {0.3, 0.7}})).value == 0.0);
  CHECK(bald(samples({{1, 0}, {0, 1}})).value == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(std::abs(bald(samples({{0.8, 0.2}, {0.2, 0.8}})).value - 0.19274475702175743) < 1e-12);
  CHECK_UQ_ERROR(bald(samples({{0.8, 0.2}})), ErrorCode::DegenerateInput);
}

TEST_CASE("mc_dropout_variance") {
  CHECK(mc_dropout_variance(samples({{0.3, 0.7}, {0.3, 0.7}})).value == 0.0);
  CHECK(mc_dropout_variance(samples({{1, 0}, {0, 1}})).value == 0.25);
  CHECK(mc_dropout_variance(samples({{0.6, 0.4}, {0.6, 0.4}, {0.6, 0.4}})).value == 0.0);
}

TEST_CASE("class_prediction_variance") {
  CHECK(class_prediction_variance(samples({{0.9, 0.1}, {0.6, 0.4}})).value == 0.0);
  CHECK(class_prediction_variance(samples({{0.9, 0.1}, {0.1, 0.9}})).value == 0.5);
  CHECK(class_prediction_variance(samples({{0.9, 0.1}, {0.8, 0.2}, {0.1, 0.9}})).value ==
        doctest::Approx(4.0 / 9.0).epsilon(1e-15));
}

TEST_CASE("class_probability_variance") {
  CHECK(class_probability_variance(samples({{0.8, 0.2}, {0.8, 0.2}})).value == 0.0);
  CHECK(class_probability_variance(samples({{0.8, 0.2}, {0.6, 0.4}})).value == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(class_probability_variance(samples({{1, 0}, {0, 1}})).value == 0.25);
}

TEST_CASE("sample_variance") {
  CHECK(sample_variance(samples({{0.8, 0.2}, {0.8, 0.2}})).value == 0.0);
  CHECK(sample_variance(samples({{1, 0}, {0.5, 0.5}})).value == 0.0625);
  CHECK(sample_variance(samples({{0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}})).value == 0.0);
}

TEST_CASE("max_diff_variance") {
  CHECK(max_diff_variance(samples({{0.8, 0.2}, {0.8, 0.2}})).value == 0.0);
  CHECK(max_diff_variance(samples({{1, 0}, {0, 1}})).value == 1.0);
  CHECK(max_diff_variance(samples({{0.2, 0.8}, {0.5, 0.5}, {0.9, 0.1}})).value == doctest::Approx(0.7).epsilon(1e-15));
}

TEST_CASE("min_variance") {
  CHECK(min_variance(samples({{0.8, 0.2}, {0.8, 0.2}})).value == 0.0);
  const auto binary = samples({{0.9, 0.1}, {0.4, 0.6}, {0.7, 0.3}});
  CHECK(min_variance(binary).value == doctest::Approx(mc_dropout_variance(binary).value).epsilon(1e-12));
  CHECK(min_variance(samples({{0.5, 0.2, 0.3}, {0.1, 0.6, 0.3}})).value == 0.0);
}

TEST_CASE("embedding_cosine") {
  CHECK(embedding_cosine(std::vector{embedded({1, 2, 3}), embedded({1, 2, 3})}).value ==
        doctest::Approx(1.0).epsilon(1e-15));
  CHECK(embedding_cosine(std::vector{embedded({1, 0}), embedded({0, 1})}).value == 0.0);
  const double r = 1.0 / std::sqrt(2.0);
  const auto three = std::vector{embedded({1, 0}), embedded({0, 1}), embedded({r, r})};
  CHECK(std::abs(embedding_cosine(three).value - 0.47140452079103168) < 1e-12);
  CHECK(embedding_cosine(three).orientation == Orientation::confidence);

  CHECK_UQ_ERROR(embedding_cosine(std::vector{embedded({1, 0})}), ErrorCode::DegenerateInput);
  CHECK_UQ_ERROR(embedding_cosine(std::vector{embedded({1, 0}), sample({0.5, 0.5})}), ErrorCode::MissingField);
  CHECK_UQ_ERROR(embedding_cosine(std::vector{embedded({1, 0}), embedded({0, 0})}), ErrorCode::ZeroNormEmbedding);
}

TEST_CASE("empty or ragged ensembles are rejected") {
  const std::vector<EnsembleSample> none;
  for (auto fn : {expected_entropy, bald, mc_dropout_variance, class_prediction_variance, class_probability_variance,
                  sample_variance, max_diff_variance, min_variance, embedding_cosine}) {
    CHECK_UQ_ERROR(fn(none), ErrorCode::MissingField);
  }
  const auto ragged = samples({{0.5, 0.5}, {0.2, 0.3, 0.5}});
  for (auto fn : {expected_entropy, bald, mc_dropout_variance, class_probability_variance, max_diff_variance,
                  min_variance}) {
    CHECK_UQ_ERROR(fn(ragged), ErrorCode::ShapeMismatch);
  }
}

TEST_CASE("bald identity, ordering and permutation invariance on random ensembles") {
  gen::Rng rng(21);
  for (int i = 0; i < 1000; ++i) {
    auto s = *gen::record(rng, "e").ensemble;

    std::vector<std::span<const double>> rows;
    for (const auto& x : s) rows.push_back(x.class_dist.probs());
    const auto mean = Distribution::from_probs(mean_rows(rows));
    const double identity = predictive::predictive_entropy(mean).value - expected_entropy(s).value;
    CHECK(std::abs(bald(s).value - std::max(0.0, identity)) <= 1e-12);

    const double lo = min_variance(s).value;
    const double mid = mc_dropout_variance(s).value;
    CHECK(lo <= mid + 1e-15);
    CHECK(mid <= max_class_variance(s) + 1e-15);

    auto shuffled = s;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    for (auto fn : {expected_entropy, bald, mc_dropout_variance, class_prediction_variance,
                    class_probability_variance, sample_variance, max_diff_variance, min_variance, embedding_cosine}) {
      CHECK(std::abs(fn(s).value - fn(shuffled).value) <= 1e-12);
    }

    auto identical = std::vector<EnsembleSample>(s.size(), s.front());
    CHECK(std::abs(bald(identical).value) <= 1e-9);
  }
}

TEST_CASE("all ensemble methods match the high-precision oracle") {
  gen::Rng rng(22);
  using oracle::to_double;
  for (int i = 0; i < 1000; ++i) {
    const auto s = *gen::record(rng, "e").ensemble;
    oracle::Mat probs, embeddings;
    std::vector<std::size_t> labels;
    for (const auto& x : s) {
      probs.emplace_back(x.class_dist.probs().begin(), x.class_dist.probs().end());
      labels.push_back(x.predicted_label);
      embeddings.push_back(*x.embedding);
    }
    CHECK(std::abs(expected_entropy(s).value - to_double(oracle::expected_entropy(probs))) <= 1e-9);
    CHECK(std::abs(bald(s).value - to_double(oracle::bald(probs))) <= 1e-9);
    CHECK(std::abs(mc_dropout_variance(s).value - to_double(oracle::mc_dropout_var(probs))) <= 1e-9);
    CHECK(std::abs(class_prediction_variance(s).value - to_double(oracle::class_pred_var(labels))) <= 1e-9);
    CHECK(std::abs(class_probability_variance(s).value - to_double(oracle::class_prob_var(probs))) <= 1e-9);
    CHECK(std::abs(sample_variance(s).value - to_double(oracle::sample_var(probs))) <= 1e-9);
    CHECK(std::abs(max_diff_variance(s).value - to_double(oracle::max_diff_var(probs))) <= 1e-9);
    CHECK(std::abs(min_variance(s).value - to_double(oracle::min_var(probs))) <= 1e-9);
    CHECK(std::abs(embedding_cosine(s).value - to_double(oracle::embed_cosine(embeddings))) <= 1e-9);
  }
}
