#include "proso/metrics.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

#include "generators.hpp"
#include "oracles.hpp"

using namespace proso;

namespace {

std::vector<std::string> words(std::initializer_list<const char*> list) {
  return {list.begin(), list.end()};
}

CepstraSequence seq(std::string id, std::size_t coeffs,
                    std::initializer_list<double> values) {
  CepstraSequence s;
  s.utterance_id = std::move(id);
  s.num_coeffs = coeffs;
  s.values = values;
  return s;
}

std::vector<std::string> random_tokens(std::mt19937_64& rng, std::size_t max_len) {
  static const char* vocab[] = {"a", "b", "c", "d"};
  std::vector<std::string> out;
  const std::size_t n = gen::uniform_index(rng, 0, max_len);
  for (std::size_t i = 0; i < n; ++i) out.push_back(vocab[gen::uniform_index(rng, 0, 3)]);
  return out;
}

std::size_t ed(std::initializer_list<const char*> a,
               std::initializer_list<const char*> b) {
  const auto va = words(a);
  const auto vb = words(b);
  return edit_distance(std::span<const std::string>(va),
                       std::span<const std::string>(vb));
}

}  // namespace

TEST_CASE("edit distance on the documented cases") {
  CHECK(ed({"a", "b", "c"}, {"a", "b", "c"}) == 0);
  CHECK(ed({"a", "b", "c"}, {"a", "x", "c"}) == 1);
  CHECK(ed({"a"}, {}) == 1);
}

TEST_CASE("property: edit distance matches the DP oracle and is a metric") {
  std::mt19937_64 rng(51);
  std::vector<std::vector<std::string>> samples;
  for (int i = 0; i < 60; ++i) samples.push_back(random_tokens(rng, 8));

  for (int i = 0; i < 400; ++i) {
    const auto& x = samples[gen::uniform_index(rng, 0, samples.size() - 1)];
    const auto& y = samples[gen::uniform_index(rng, 0, samples.size() - 1)];
    const auto& z = samples[gen::uniform_index(rng, 0, samples.size() - 1)];
    const auto sx = std::span<const std::string>(x);
    const auto sy = std::span<const std::string>(y);
    const auto sz = std::span<const std::string>(z);

    const std::size_t dxy = edit_distance(sx, sy);
    CHECK(dxy == oracle::edit_distance(sx, sy));
    CHECK(dxy == edit_distance(sy, sx));                       // symmetry
    CHECK((dxy == 0) == (x == y));                             // identity
    CHECK(dxy <= edit_distance(sx, sz) + edit_distance(sz, sy));  // triangle
  }
}

TEST_CASE("wer and cer on pinned tokenizations") {
  CHECK(wer("Hello, World!", "hello world") == 0.0);
  CHECK(wer("the quick brown", "the quick brawn") == doctest::Approx(1.0 / 3.0));
  CHECK(cer("abc", "abc") == 0.0);
  CHECK(cer("ab c", "abc") == 0.0);  // spaces excluded
  CHECK(cer("abcd", "abxd") == doctest::Approx(0.25));
  CHECK_THROWS_AS(wer("", "something"), EmptyReferenceError);
  CHECK_THROWS_AS(wer("...", "x"), EmptyReferenceError);  // punctuation-only ref
}

TEST_CASE("wer can exceed 1 when the hypothesis is much longer") {
  const double r = wer("one two", "aa bb cc dd ee");
  CHECK(r > 1.0);
  // oracle: every ref word substituted + 3 insertions = 5 edits over 2 words
  CHECK(r == doctest::Approx(2.5));
}

TEST_CASE("property: duplicating disjoint-vocabulary pairs leaves WER unchanged") {
  std::mt19937_64 rng(52);
  for (int i = 0; i < 50; ++i) {
    // hypothesis uses a vocabulary disjoint from the reference so each copy
    // aligns independently
    std::vector<std::string> ref, hyp;
    const std::size_t n = gen::uniform_index(rng, 1, 4);
    const std::size_t m = gen::uniform_index(rng, 1, 4);
    for (std::size_t k = 0; k < n; ++k) ref.push_back("r" + std::to_string(k));
    for (std::size_t k = 0; k < m; ++k) hyp.push_back("h" + std::to_string(k));
    const double once = wer(std::span<const std::string>(ref),
                            std::span<const std::string>(hyp));
    std::vector<std::string> ref2 = ref, hyp2 = hyp;
    for (std::size_t rep = 1; rep < 3; ++rep) {
      ref2.insert(ref2.end(), ref.begin(), ref.end());
      hyp2.insert(hyp2.end(), hyp.begin(), hyp.end());
    }
    CHECK(wer(std::span<const std::string>(ref2), std::span<const std::string>(hyp2)) ==
          doctest::Approx(once));
  }
}

TEST_CASE("unicode text decodes to scalar values for CER") {
  const auto tokens = char_tokens("caf\xC3\xA9");  // é as two UTF-8 bytes
  REQUIRE(tokens.size() == 4);
  CHECK(tokens[3] == 0xE9);
}

TEST_CASE("mcd: identical sequences give zero") {
  const auto a = seq("a", 3, {1.0, 2.0, 3.0, 4.0, 5.0, 6.0});
  CHECK(mcd(a, a) == 0.0);
  CHECK(mcd(a, a, {false, true}) == 0.0);
  CHECK(mcd(a, a, {true, false}) == 0.0);
}

TEST_CASE("mcd: single-frame closed form") {
  const double delta = 0.37;
  const auto a = seq("a", 2, {9.0, 1.0});
  const auto b = seq("b", 2, {4.0, 1.0 + delta});  // c0 differs too but is excluded
  CHECK(mcd(a, b, {true, true}) ==
        doctest::Approx((10.0 / std::log(10.0)) * std::sqrt(2.0) * delta).epsilon(1e-12));
  // with c0 included both coefficients contribute
  const double both = std::sqrt(25.0 + delta * delta);
  CHECK(mcd(a, b, {false, true}) ==
        doctest::Approx((10.0 / std::log(10.0)) * std::sqrt(2.0) * both).epsilon(1e-12));
}

TEST_CASE("mcd: DTW absorbs a duplicated frame") {
  const auto a = seq("a", 2, {0.0, 1.0, 0.0, 2.0, 0.0, 3.0});
  const auto b = seq("b", 2, {0.0, 1.0, 0.0, 2.0, 0.0, 2.0, 0.0, 3.0});
  CHECK(mcd(a, b) == 0.0);
}

TEST_CASE("dtw path is monotone and boundary-anchored") {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t ta = gen::uniform_index(rng, 1, 6);
    const std::size_t tb = gen::uniform_index(rng, 1, 6);
    CepstraSequence a, b;
    a.num_coeffs = b.num_coeffs = 3;
    for (std::size_t i = 0; i < ta * 3; ++i) a.values.push_back(gen::uniform(rng, -1, 1));
    for (std::size_t i = 0; i < tb * 3; ++i) b.values.push_back(gen::uniform(rng, -1, 1));
    const auto alignment = dtw_align(a, b, true);
    REQUIRE(!alignment.path.empty());
    CHECK(alignment.path.front() == std::pair<std::size_t, std::size_t>{0, 0});
    CHECK(alignment.path.back() == std::pair<std::size_t, std::size_t>{ta - 1, tb - 1});
    for (std::size_t s = 1; s < alignment.path.size(); ++s) {
      const auto [pi, pj] = alignment.path[s - 1];
      const auto [ci, cj] = alignment.path[s];
      const std::size_t di = ci - pi, dj = cj - pj;
      CHECK(di <= 1);
      CHECK(dj <= 1);
      CHECK(di + dj >= 1);
    }
  }
}

TEST_CASE("property: DTW equals exhaustive path enumeration on small instances") {
  std::mt19937_64 rng(54);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t ta = gen::uniform_index(rng, 1, 5);
    const std::size_t tb = gen::uniform_index(rng, 1, 5);
    const std::size_t coeffs = gen::uniform_index(rng, 2, 3);
    CepstraSequence a, b;
    a.num_coeffs = b.num_coeffs = coeffs;
    for (std::size_t i = 0; i < ta * coeffs; ++i)
      a.values.push_back(gen::uniform(rng, -2, 2));
    for (std::size_t i = 0; i < tb * coeffs; ++i)
      b.values.push_back(gen::uniform(rng, -2, 2));

    std::vector<double> cost(ta * tb);
    for (std::size_t i = 0; i < ta; ++i)
      for (std::size_t j = 0; j < tb; ++j) {
        double s = 0.0;
        for (std::size_t k = 1; k < coeffs; ++k) {
          const double d = a.at(i, k) - b.at(j, k);
          s += d * d;
        }
        cost[i * tb + j] = std::sqrt(s);
      }
    const auto expected = oracle::enumerate_dtw(cost, ta, tb);
    const auto got = dtw_align(a, b, true);
    CHECK(got.total_cost == doctest::Approx(expected.min_total).epsilon(1e-12));

    const double mean = got.total_cost / double(got.path.size());
    bool mean_is_optimal = false;
    for (double m : expected.optimal_means)
      if (std::abs(m - mean) <= 1e-9) mean_is_optimal = true;
    CHECK(mean_is_optimal);
  }
}

TEST_CASE("mcd input validation") {
  const auto a = seq("a", 2, {1.0, 2.0});
  const auto b = seq("b", 3, {1.0, 2.0, 3.0});
  CHECK_THROWS_AS(mcd(a, b), DimensionError);
  CepstraSequence empty;
  empty.num_coeffs = 2;
  CHECK_THROWS_AS(mcd(a, empty), FormatError);
  const auto c = seq("c", 2, {1.0, 2.0, 3.0, 4.0});
  CHECK_THROWS_AS(mcd(a, c, {true, false}), DimensionError);  // unequal frame-sync
}

TEST_CASE("classification accuracy") {
  const auto p = words({"Angry", "Happy", "Sad"});
  CHECK(classification_accuracy(p, p) == 1.0);
  const auto q = words({"Angry", "Sad", "Sad"});
  CHECK(classification_accuracy(p, q) == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(classification_accuracy({}, {}), DimensionError);
  const auto r = words({"Angry"});
  CHECK_THROWS_AS(classification_accuracy(p, r), DimensionError);
}

TEST_CASE("classification accuracy reproduces a 797/1000 corpus") {
  std::vector<std::string> pred, truth;
  for (int i = 0; i < 1000; ++i) {
    truth.push_back("Angry");
    pred.push_back(i < 797 ? "Angry" : "Happy");
  }
  CHECK(classification_accuracy(pred, truth) == doctest::Approx(0.797));
}

TEST_CASE("pir confusion matrix bookkeeping") {
  SUBCASE("all correct is the identity-structured matrix") {
    std::vector<PirResponse> responses;
    for (auto level : {IntensityBucket::Low, IntensityBucket::Medium, IntensityBucket::High})
      for (int i = 0; i < 4; ++i) responses.push_back({"r", "u", level, level});
    const auto report = pir_confusion(responses);
    CHECK(report.accuracy == 1.0);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        CHECK(report.confusion[i][j] == (i == j ? 4 : 0));
  }

  SUBCASE("single off-diagonal response") {
    std::vector<PirResponse> one = {{"r", "u", IntensityBucket::Low, IntensityBucket::High}};
    const auto report = pir_confusion(one);
    CHECK(report.confusion[0][2] == 1);
    CHECK(report.accuracy == 0.0);
    CHECK(report.total == 1);
  }

  SUBCASE("48 responses with 35 correct lands near 72%") {
    std::vector<PirResponse> responses;
    for (int i = 0; i < 48; ++i) {
      const auto annotated = static_cast<IntensityBucket>(i % 3);
      const bool hit = i < 35;
      const auto perceived =
          hit ? annotated : static_cast<IntensityBucket>((i + 1) % 3);
      responses.push_back({"r" + std::to_string(i % 6), "u" + std::to_string(i / 3),
                           annotated, perceived});
    }
    const auto report = pir_confusion(responses);
    CHECK(report.accuracy == doctest::Approx(35.0 / 48.0));
    CHECK(report.total == 48);
    std::size_t sum = 0;
    for (const auto& row : report.confusion) sum += row[0] + row[1] + row[2];
    CHECK(sum == 48);
  }

  SUBCASE("empty input rejected") {
    CHECK_THROWS_AS(pir_confusion({}), FormatError);
  }
}

TEST_CASE("mos aggregation") {
  SUBCASE("constant ratings have zero CI width") {
    std::vector<MosRating> ratings(10, {"r", "u", "gl", 4.0});
    const auto groups = mos_aggregate(ratings);
    REQUIRE(groups.size() == 1);
    CHECK(groups[0].mean == 4.0);
    CHECK(groups[0].ci95_halfwidth == 0.0);
  }

  SUBCASE("simple mean") {
    std::vector<MosRating> ratings = {{"a", "u", "x", 3.0}, {"b", "u", "x", 4.0}};
    const auto groups = mos_aggregate(ratings);
    CHECK(groups[0].mean == doctest::Approx(3.5));
    CHECK(groups[0].count == 2);
  }

  SUBCASE("integer mix hits exact per-condition means") {
    std::vector<MosRating> ratings;
    auto add = [&](const std::string& condition, int fours, int threes) {
      for (int i = 0; i < fours; ++i) ratings.push_back({"r", "u", condition, 4.0});
      for (int i = 0; i < threes; ++i) ratings.push_back({"r", "u", condition, 3.0});
    };
    add("none", 194, 806);
    add("gl", 728, 272);
    add("local", 408, 592);
    const auto groups = mos_aggregate(ratings);
    REQUIRE(groups.size() == 3);
    // lexicographic condition order: gl, local, none
    CHECK(groups[0].mean == doctest::Approx(3.728));
    CHECK(groups[1].mean == doctest::Approx(3.408));
    CHECK(groups[2].mean == doctest::Approx(3.194));
  }

  SUBCASE("score outside the scale is rejected") {
    std::vector<MosRating> bad = {{"r", "u", "x", 5.5}};
    CHECK_THROWS_AS(mos_aggregate(bad), FormatError);
  }
}
