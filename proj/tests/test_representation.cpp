#include <cmath>
#include <vector>

#include <doctest.h>

#include "expect_error.hpp"
#include "generators.hpp"
#include "oracle.hpp"
#include "uqzoo/representation.hpp"

using namespace uqzoo;
using uqzoo::representation::logit_lens_entropy;

namespace {

Grid layers(std::vector<std::vector<double>> rows) { return Grid::from_rows(rows); }

}  // namespace

TEST_CASE("logit_lens_entropy examples") {
  CHECK(logit_lens_entropy(layers({{3, 3, 3, 3, 3}})).value == doctest::Approx(std::log(5.0)).epsilon(1e-15));
  CHECK(logit_lens_entropy(layers({{1000, 0}})).value <= 1e-9);
  CHECK(logit_lens_entropy(layers({{-1000, 1000, 0}})).value <= 1e-9);
  CHECK(std::abs(logit_lens_entropy(layers({{1, 0}})).value - 0.58220310888821795) < 1e-12);
}

TEST_CASE("default layer is the middle one") {
  const auto g = layers({{1000, 0}, {1000, 0}, {0, 0}, {1000, 0}});
  CHECK(logit_lens_entropy(g).value == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(logit_lens_entropy(g, 0).value <= 1e-9);
  CHECK(logit_lens_entropy(g, 2).value == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(logit_lens_entropy(layers({{0, 0}})).value == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(logit_lens_entropy(layers({{0, 0}, {1000, 0}})).value <= 1e-9);
}

TEST_CASE("logit_lens_entropy errors") {
  CHECK_UQ_ERROR(logit_lens_entropy(Grid{}), ErrorCode::MissingField);
  CHECK_UQ_ERROR(logit_lens_entropy(layers({{0, 1}, {1, 0}}), 2), ErrorCode::LayerOutOfRange);
  CHECK_NOTHROW(logit_lens_entropy(layers({{0, 1}, {1, 0}}), 1));
}

TEST_CASE("shift invariance and monotone saturation") {
  gen::Rng rng(51);
  for (int i = 0; i < 1000; ++i) {
    auto z = gen::reals(rng, gen::uniform_size(rng, 2, 16), -10.0, 10.0);
    const double base = logit_lens_entropy(layers({z})).value;

    const double shift = gen::uniform_real(rng, -100.0, 100.0);
    auto shifted = z;
    for (auto& v : shifted) v += shift;
    CHECK(std::abs(logit_lens_entropy(layers({shifted})).value - base) < 1e-12);

    double previous = base;
    for (double t : {2.0, 4.0, 8.0}) {
      auto scaled = z;
      for (auto& v : scaled) v *= t;
      const double h = logit_lens_entropy(layers({scaled})).value;
      CHECK(h <= previous + 1e-12);
      previous = h;
    }
  }
}

TEST_CASE("logit_lens_entropy matches the high-precision oracle") {
  gen::Rng rng(52);
  for (int i = 0; i < 1000; ++i) {
    const auto g = *gen::record(rng, "l").layer_logits;
    const auto layer = gen::uniform_size(rng, 0, g.rows - 1);
    const oracle::Vec row(g.row(layer).begin(), g.row(layer).end());
    CHECK(std::abs(logit_lens_entropy(g, layer).value - oracle::to_double(oracle::logit_lens_entropy(row))) <= 1e-9);
  }
}
