#include <benchmark/benchmark.h>

#include <random>

#include "proso/metrics.hpp"
#include "proso/prompt.hpp"
#include "proso/prosody.hpp"
#include "proso/rank.hpp"

using namespace proso;

namespace {

ProsodyTrack make_track(std::size_t words, std::size_t phonemes_per_word) {
  ProsodyTrack track;
  track.utterance_id = "bench";
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> dur(0.5, 20.0), en(0.1, 5.0), pit(-2.5, 2.5);
  std::size_t p = 0;
  for (std::size_t w = 0; w < words; ++w) {
    WordSpan span;
    span.word = "w" + std::to_string(w);
    span.first = p;
    for (std::size_t i = 0; i < phonemes_per_word; ++i, ++p)
      track.phonemes.push_back({"PH", dur(rng), en(rng), pit(rng)});
    span.last = p - 1;
    track.words.push_back(span);
    track.text += (w ? " " : "") + span.word;
  }
  track.pitch_range = {-3.0, 3.0};
  return track;
}

CepstraSequence make_cepstra(std::size_t frames, std::size_t coeffs, std::uint64_t seed) {
  CepstraSequence s;
  s.num_coeffs = coeffs;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> v(-4.0, 4.0);
  for (std::size_t i = 0; i < frames * coeffs; ++i) s.values.push_back(v(rng));
  return s;
}

void BM_QuadraticMap(benchmark::State& state) {
  const auto map = QuadraticMap::solve({-5.0, 5.0}, {0.5, 2.0});
  double v = -5.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(map(v));
    v += 0.001;
    if (v > 5.0) v = -5.0;
  }
}
BENCHMARK(BM_QuadraticMap);

void BM_MapAndApply(benchmark::State& state) {
  const auto track = make_track(std::size_t(state.range(0)), 4);
  const auto maps = ScalingMaps::defaults();
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> raw(-5.0, 5.0);
  RawScalingPlan plan = RawScalingPlan::neutral(track.words.size());
  plan.global = {raw(rng), raw(rng), raw(rng) / 2.5};
  for (auto& w : plan.words) w = {raw(rng), raw(rng), raw(rng) / 2.5};
  for (auto _ : state) {
    const auto mapped = map_plan(plan, track.pitch_range, maps, track.words.size());
    benchmark::DoNotOptimize(apply_scaling(track, mapped, track.pitch_range));
  }
}
BENCHMARK(BM_MapAndApply)->Arg(8)->Arg(32);

void BM_EditDistance(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::vector<std::string> a, b;
  for (int i = 0; i < state.range(0); ++i) {
    a.push_back("w" + std::to_string(rng() % 50));
    b.push_back("w" + std::to_string(rng() % 50));
  }
  for (auto _ : state)
    benchmark::DoNotOptimize(edit_distance(std::span<const std::string>(a),
                                           std::span<const std::string>(b)));
}
BENCHMARK(BM_EditDistance)->Arg(16)->Arg(128);

void BM_DtwMcd(benchmark::State& state) {
  const auto a = make_cepstra(std::size_t(state.range(0)), 13, 4);
  const auto b = make_cepstra(std::size_t(state.range(0)) + 17, 13, 5);
  for (auto _ : state) benchmark::DoNotOptimize(mcd(a, b));
}
BENCHMARK(BM_DtwMcd)->Arg(100)->Arg(400);

void BM_TrainRank(benchmark::State& state) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> noise(-1.0, 1.0);
  const std::size_t dim = std::size_t(state.range(0));
  std::vector<AcousticFeatureVector> corpus;
  for (int i = 0; i < 16; ++i) {
    AcousticFeatureVector e{"e" + std::to_string(i), "s", Emotion::Angry, {}};
    AcousticFeatureVector n{"n" + std::to_string(i), "s", Emotion::Neutral, {}};
    for (std::size_t k = 0; k < dim; ++k) {
      e.features.push_back(noise(rng) + 1.0);
      n.features.push_back(noise(rng));
    }
    corpus.push_back(std::move(e));
    corpus.push_back(std::move(n));
  }
  const auto pairs = build_pairs(corpus, "s", Emotion::Angry, 10000, 9);
  for (auto _ : state)
    benchmark::DoNotOptimize(train_rank(corpus, pairs, "s", Emotion::Angry, {}));
}
BENCHMARK(BM_TrainRank)->Arg(32)->Arg(384)->Unit(benchmark::kMillisecond);

void BM_ParseResponse(benchmark::State& state) {
  std::vector<std::string> words;
  for (int i = 0; i < 12; ++i) words.push_back("word" + std::to_string(i));
  RawScalingPlan plan = RawScalingPlan::neutral(words.size());
  plan.global = {3.0, -2.0, 1.0};
  const std::string text =
      "Step 1: set the tone.\nStep 2: refine.\n```json\n" +
      plan_to_contract_json(plan, words) + "\n```";
  for (auto _ : state)
    benchmark::DoNotOptimize(parse_response(text, words, {}));
}
BENCHMARK(BM_ParseResponse);

}  // namespace

BENCHMARK_MAIN();
