// Acceptance suite: runs every release criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exits nonzero if any fail.
//
// Usage: proso_acceptance --cli <path-to-prosoctl>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "generators.hpp"
#include "oracles.hpp"
#include "proso/formats.hpp"
#include "proso/metrics.hpp"
#include "proso/prompt.hpp"
#include "proso/prosody.hpp"
#include "proso/rank.hpp"
#include "subprocess.hpp"

namespace fs = std::filesystem;
using namespace proso;

namespace {

std::string g_cli;
int g_failures = 0;

struct Criterion {
  int number;
  std::string name;
  double time_limit_s;
  std::function<void(std::ostringstream&)> body;  // throws on failure
};

void check(bool condition, const std::string& message) {
  if (!condition) throw std::runtime_error(message);
}

void run_criterion(const Criterion& c) {
  std::ostringstream detail;
  const auto start = std::chrono::steady_clock::now();
  std::string failure;
  try {
    c.body(detail);
  } catch (const std::exception& e) {
    failure = e.what();
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (failure.empty() && elapsed >= c.time_limit_s)
    failure = "took " + std::to_string(elapsed) + " s, limit " +
              std::to_string(c.time_limit_s) + " s";

  const bool pass = failure.empty();
  if (!pass) ++g_failures;
  std::printf("%s  %d. %s (%.2fs)%s%s\n", pass ? "PASS" : "FAIL", c.number,
              c.name.c_str(), elapsed, detail.str().empty() ? "" : " ",
              detail.str().c_str());
  if (!pass) std::printf("      %s\n", failure.c_str());
  std::fflush(stdout);
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("proso_accept_" + tag + "_" +
                                        std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

int run_cli(const std::vector<std::string>& args, const fs::path& scratch,
            std::string* stderr_text = nullptr) {
  std::vector<std::string> argv = {g_cli};
  argv.insert(argv.end(), args.begin(), args.end());
  const auto result = subprocess::run(argv, scratch);
  if (stderr_text) *stderr_text = result.stderr_text;
  return result.exit_code;
}

// ---------------------------------------------------------------------------
// 1. Quadratic map endpoints and coefficients vs a direct 3x3 solve.
// ---------------------------------------------------------------------------

void criterion_quadratic(std::ostringstream&) {
  struct Case {
    Interval raw, target;
  } cases[] = {{{-5.0, 5.0}, {0.5, 2.0}}, {{-2.0, 2.0}, {0.74, 1.34}}};
  for (const auto& c : cases) {
    const auto m = QuadraticMap::solve(c.raw, c.target);
    check(std::abs(m(c.raw.lo) - c.target.lo) < 1e-9, "f(lo) != target.lo");
    check(std::abs(m(0.0) - 1.0) < 1e-9, "f(0) != 1");
    check(std::abs(m(c.raw.hi) - c.target.hi) < 1e-9, "f(hi) != target.hi");

    const auto abc = oracle::solve3({{{c.raw.lo * c.raw.lo, c.raw.lo, 1.0},
                                      {0.0, 0.0, 1.0},
                                      {c.raw.hi * c.raw.hi, c.raw.hi, 1.0}}},
                                    {c.target.lo, 1.0, c.target.hi});
    check(std::abs(m.a() - abc[0]) < 1e-9, "a mismatch vs 3x3 oracle");
    check(std::abs(m.b() - abc[1]) < 1e-9, "b mismatch vs 3x3 oracle");
    check(std::abs(m.c() - abc[2]) < 1e-9, "c mismatch vs 3x3 oracle");
    check(std::abs(m.a() - 0.01) < 1e-9 && std::abs(m.b() - 0.15) < 1e-9 &&
              std::abs(m.c() - 1.0) < 1e-9,
          "coefficients are not 0.01/0.15/1");
  }
}

// ---------------------------------------------------------------------------
// 2. Scaling identity and interval preservation over 1,000 random tracks.
// ---------------------------------------------------------------------------

void criterion_scaling(std::ostringstream& detail) {
  std::mt19937_64 rng(2024);
  const auto maps = ScalingMaps::defaults();
  std::size_t identity_ok = 0, bounds_ok = 0;
  const std::size_t n = 1000;
  for (std::size_t i = 0; i < n; ++i) {
    const auto track = gen::random_track(rng, i);
    const std::size_t words = track.words.size();

    const auto neutral = map_plan(RawScalingPlan::neutral(words), track.pitch_range,
                                  maps, words);
    if (apply_scaling(track, neutral, track.pitch_range) == track) ++identity_ok;

    const auto raw = gen::random_plan(rng, words, i % 3 == 0);
    const auto mapped = map_plan(raw, track.pitch_range, maps, words);
    bool ok = mapped.duration_gain >= 0.74 && mapped.duration_gain <= 1.34 &&
              mapped.energy_gain >= 0.5 && mapped.energy_gain <= 2.0;
    for (const auto& w : mapped.words) {
      ok = ok && w.duration_gain >= 0.74 && w.duration_gain <= 1.34 &&
           w.energy_gain >= 0.5 && w.energy_gain <= 2.0;
      const double combined = mapped.pitch_offset + w.pitch_offset;
      ok = ok && combined >= track.pitch_range.min && combined <= track.pitch_range.max;
    }
    if (ok) ++bounds_ok;
  }
  detail << "identity " << identity_ok << "/" << n << ", bounds " << bounds_ok << "/" << n;
  check(identity_ok == n, "neutral plan failed to reproduce some track exactly");
  check(bounds_ok == n, "a mapped factor left its interval");
}

// ---------------------------------------------------------------------------
// 3. Rank training vs dense grid search; ordering; byte determinism.
// ---------------------------------------------------------------------------

double reference_objective(std::span<const AcousticFeatureVector> corpus,
                           const PairSet& pairs, const std::string& speaker,
                           Emotion emotion, double C, std::span<const double> w) {
  std::vector<std::size_t> training;
  for (std::size_t i = 0; i < corpus.size(); ++i)
    if (corpus[i].speaker_id == speaker &&
        (corpus[i].emotion == emotion || corpus[i].emotion == Emotion::Neutral))
      training.push_back(i);
  const std::size_t dim = corpus[training.front()].features.size();
  std::vector<double> mean(dim, 0.0), sd(dim, 0.0);
  for (std::size_t i : training)
    for (std::size_t k = 0; k < dim; ++k) mean[k] += corpus[i].features[k];
  for (auto& m : mean) m /= double(training.size());
  for (std::size_t i : training)
    for (std::size_t k = 0; k < dim; ++k) {
      const double d = corpus[i].features[k] - mean[k];
      sd[k] += d * d;
    }
  for (auto& s : sd) {
    s = std::sqrt(s / double(training.size()));
    if (s <= 0.0) s = 1.0;
  }
  auto z = [&](std::size_t idx, std::size_t k) {
    return (corpus[idx].features[k] - mean[k]) / sd[k];
  };
  double f = 0.0;
  for (std::size_t k = 0; k < dim; ++k) f += 0.5 * w[k] * w[k];
  for (const auto& [hi, lo] : pairs.ordered) {
    double margin = 1.0;
    for (std::size_t k = 0; k < dim; ++k) margin -= w[k] * (z(hi, k) - z(lo, k));
    if (margin > 0.0) f += C * margin * margin;
  }
  for (const auto& [i, j] : pairs.similar) {
    double s = 0.0;
    for (std::size_t k = 0; k < dim; ++k) s += w[k] * (z(i, k) - z(j, k));
    f += C * s * s;
  }
  return f;
}

void criterion_rank(std::ostringstream& detail) {
  // 1-D toy
  {
    std::vector<AcousticFeatureVector> corpus = {
        {"e0", "spk", Emotion::Angry, {2.0}},
        {"n0", "spk", Emotion::Neutral, {1.0}},
    };
    const auto pairs = build_pairs(corpus, "spk", Emotion::Angry, 100, 0);
    RankHyperparams hp;
    hp.C = 1.0;
    const auto model = train_rank(corpus, pairs, "spk", Emotion::Angry, hp);
    const auto grid =
        oracle::grid_search(1, -2.0, 2.0, 8001, [&](std::span<const double> w) {
          return reference_objective(corpus, pairs, "spk", Emotion::Angry, hp.C, w);
        });
    const double rel =
        std::abs(model.final_objective - grid.min_value) / std::abs(grid.min_value);
    check(rel < 1e-3, "1-D objective differs from grid search by " + std::to_string(rel));
  }

  // 2-D toy: dim 0 is intensity, dim 1 noise
  std::mt19937_64 rng(3003);
  std::vector<AcousticFeatureVector> corpus;
  for (int i = 0; i < 10; ++i) {
    corpus.push_back({"e" + std::to_string(i), "spk", Emotion::Happy,
                      {2.5 + gen::uniform(rng, -0.3, 0.3), gen::uniform(rng, -1.0, 1.0)}});
    corpus.push_back({"n" + std::to_string(i), "spk", Emotion::Neutral,
                      {1.0 + gen::uniform(rng, -0.3, 0.3), gen::uniform(rng, -1.0, 1.0)}});
  }
  const auto pairs = build_pairs(corpus, "spk", Emotion::Happy, 100000, 1);
  RankHyperparams hp;
  const auto model = train_rank(corpus, pairs, "spk", Emotion::Happy, hp);
  const auto grid = oracle::grid_search(2, -1.5, 1.5, 401, [&](std::span<const double> w) {
    return reference_objective(corpus, pairs, "spk", Emotion::Happy, hp.C, w);
  });
  check(model.final_objective <= grid.min_value * (1.0 + 1e-3),
        "2-D objective above the grid-search minimum");

  std::size_t satisfied = 0;
  for (const auto& [hi, lo] : pairs.ordered) {
    double margin = 0.0;
    for (std::size_t k = 0; k < 2; ++k)
      margin += model.weights[k] *
                ((corpus[hi].features[k] - model.feature_mean[k]) / model.feature_std[k] -
                 (corpus[lo].features[k] - model.feature_mean[k]) / model.feature_std[k]);
    if (margin > 0.0) ++satisfied;
  }
  check(satisfied == pairs.ordered.size(),
        "ordered-pair satisfaction below 100% on separable data");

  // byte determinism across reruns
  const auto once = model_to_json(train_rank(corpus, pairs, "spk", Emotion::Happy, hp));
  const auto pairs_again = build_pairs(corpus, "spk", Emotion::Happy, 100000, 1);
  const auto twice =
      model_to_json(train_rank(corpus, pairs_again, "spk", Emotion::Happy, hp));
  check(once == twice, "serialized model bytes differ across reruns");
  detail << "ordering " << satisfied << "/" << pairs.ordered.size();
}

// ---------------------------------------------------------------------------
// 4. Metric oracles: edit-distance axioms, MCD closed form, DTW enumeration.
// ---------------------------------------------------------------------------

void criterion_metrics(std::ostringstream& detail) {
  std::mt19937_64 rng(4004);
  static const char* vocab[] = {"a", "b", "c", "d"};
  auto random_tokens = [&](std::size_t max_len) {
    std::vector<std::string> out;
    const std::size_t n = gen::uniform_index(rng, 0, max_len);
    for (std::size_t i = 0; i < n; ++i)
      out.push_back(vocab[gen::uniform_index(rng, 0, 3)]);
    return out;
  };

  std::vector<std::vector<std::string>> samples;
  for (int i = 0; i < 120; ++i) samples.push_back(random_tokens(9));
  for (int i = 0; i < 10000; ++i) {
    const auto& x = samples[gen::uniform_index(rng, 0, samples.size() - 1)];
    const auto& y = samples[gen::uniform_index(rng, 0, samples.size() - 1)];
    const auto& z = samples[gen::uniform_index(rng, 0, samples.size() - 1)];
    const auto sx = std::span<const std::string>(x);
    const auto sy = std::span<const std::string>(y);
    const auto sz = std::span<const std::string>(z);
    const std::size_t dxy = edit_distance(sx, sy);
    check(dxy == oracle::edit_distance(sx, sy), "edit distance disagrees with DP oracle");
    check(dxy == edit_distance(sy, sx), "edit distance asymmetric");
    check((dxy == 0) == (x == y), "identity of indiscernibles violated");
    check(dxy <= edit_distance(sx, sz) + edit_distance(sz, sy),
          "triangle inequality violated");
  }

  // closed-form single-frame MCD
  const double delta = 0.73125;
  CepstraSequence a, b;
  a.num_coeffs = b.num_coeffs = 3;
  a.values = {5.0, 1.0, 2.0};
  b.values = {9.0, 1.0 + delta, 2.0};
  const double expected = (10.0 / std::log(10.0)) * std::sqrt(2.0) * delta;
  check(std::abs(mcd(a, b, {true, true}) - expected) < 1e-9,
        "single-frame MCD misses the closed form");

  // DTW vs exhaustive enumeration, 200 random instances
  std::size_t agreements = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t ta = gen::uniform_index(rng, 1, 5);
    const std::size_t tb = gen::uniform_index(rng, 1, 5);
    const std::size_t coeffs = gen::uniform_index(rng, 2, 3);
    CepstraSequence s1, s2;
    s1.num_coeffs = s2.num_coeffs = coeffs;
    for (std::size_t i = 0; i < ta * coeffs; ++i)
      s1.values.push_back(gen::uniform(rng, -2, 2));
    for (std::size_t i = 0; i < tb * coeffs; ++i)
      s2.values.push_back(gen::uniform(rng, -2, 2));

    std::vector<double> cost(ta * tb);
    for (std::size_t i = 0; i < ta; ++i)
      for (std::size_t j = 0; j < tb; ++j) {
        double s = 0.0;
        for (std::size_t k = 1; k < coeffs; ++k) {
          const double d = s1.at(i, k) - s2.at(j, k);
          s += d * d;
        }
        cost[i * tb + j] = std::sqrt(s);
      }
    const auto enumerated = oracle::enumerate_dtw(cost, ta, tb);
    const auto got = dtw_align(s1, s2, true);
    check(std::abs(got.total_cost - enumerated.min_total) < 1e-9,
          "DTW total differs from exhaustive enumeration");
    const double mean = got.total_cost / double(got.path.size());
    bool mean_ok = false;
    for (double m : enumerated.optimal_means)
      if (std::abs(m - mean) < 1e-9) mean_ok = true;
    check(mean_ok, "DTW mean not achieved by any optimal enumerated path");
    ++agreements;
  }
  detail << "dtw " << agreements << "/200";
}

// ---------------------------------------------------------------------------
// 5. Aggregation reproduction from constructed files, via the CLI.
// ---------------------------------------------------------------------------

double round3(double v) { return std::round(v * 1000.0) / 1000.0; }

void criterion_aggregation(std::ostringstream& detail) {
  TempDir dir("agg");

  // ECA: 797 of 1000 correct
  std::string labels = "utterance_id,pred,truth\n";
  for (int i = 0; i < 1000; ++i)
    labels += "u" + std::to_string(i) + "," + (i < 797 ? "Angry" : "Happy") + ",Angry\n";
  write_text(dir.path / "labels.csv", labels);
  check(run_cli({"eval", "eca", "--labels", (dir.path / "labels.csv").string(), "--out",
                 (dir.path / "eca.json").string()},
                dir.path / "log1") == 0,
        "eval eca failed");
  const auto eca =
      nlohmann::json::parse(subprocess::slurp(dir.path / "eca.json"));
  check(round3(eca["aggregate"]["accuracy"].get<double>()) == 0.797,
        "ECA != 0.797");

  // MOS: integer ratings whose means are 3.194 / 3.728 / 3.408
  std::string ratings = "rater_id,utterance_id,condition,score\n";
  auto add_ratings = [&](const std::string& condition, int fours, int threes) {
    int r = 0;
    for (int i = 0; i < fours; ++i)
      ratings += "r" + std::to_string(r++ % 20) + ",u" + std::to_string(i) + "," +
                 condition + ",4\n";
    for (int i = 0; i < threes; ++i)
      ratings += "r" + std::to_string(r++ % 20) + ",v" + std::to_string(i) + "," +
                 condition + ",3\n";
  };
  add_ratings("none", 194, 806);
  add_ratings("gl", 728, 272);
  add_ratings("local", 408, 592);
  write_text(dir.path / "mos.csv", ratings);
  check(run_cli({"eval", "mos", "--ratings", (dir.path / "mos.csv").string(), "--out",
                 (dir.path / "mos.json").string()},
                dir.path / "log2") == 0,
        "eval mos failed");
  const auto mos = nlohmann::json::parse(subprocess::slurp(dir.path / "mos.json"));
  double gl_mean = 0.0, none_mean = 0.0, local_mean = 0.0;
  for (const auto& g : mos["conditions"]) {
    if (g["condition"] == "gl") gl_mean = g["mean"].get<double>();
    if (g["condition"] == "none") none_mean = g["mean"].get<double>();
    if (g["condition"] == "local") local_mean = g["mean"].get<double>();
  }
  check(round3(gl_mean) == 3.728, "MOS gl mean != 3.728");
  check(round3(none_mean) == 3.194, "MOS none mean != 3.194");
  check(round3(local_mean) == 3.408, "MOS local mean != 3.408");

  // PIR: 48 responses, 35 correct -> 0.729
  std::string responses = "rater_id,utterance_id,annotated,perceived\n";
  static const char* levels[3] = {"Low", "Medium", "High"};
  for (int i = 0; i < 48; ++i) {
    const char* annotated = levels[i % 3];
    const char* perceived = i < 35 ? annotated : levels[(i + 1) % 3];
    responses += "r" + std::to_string(i % 12) + ",u" + std::to_string(i / 3) + "," +
                 annotated + "," + perceived + "\n";
  }
  write_text(dir.path / "pir.csv", responses);
  check(run_cli({"eval", "pir", "--responses", (dir.path / "pir.csv").string(), "--out",
                 (dir.path / "pir.json").string()},
                dir.path / "log3") == 0,
        "eval pir failed");
  const auto pir = nlohmann::json::parse(subprocess::slurp(dir.path / "pir.json"));
  check(round3(pir["aggregate"]["accuracy"].get<double>()) == 0.729,
        "PIR accuracy != 0.729");
  detail << "eca 0.797, mos 3.728/3.194/3.408, pir 0.729";
}

// ---------------------------------------------------------------------------
// 6. Prompt robustness fuzz and neutral fallback.
// ---------------------------------------------------------------------------

struct FailingProvider final : PlanProvider {
  std::mt19937_64 rng{606};
  std::string complete(const PromptRequest&, const std::vector<ChatMessage>&) override {
    static const char alphabet[] = "{}[]\",:0123456789.eE+- abcdef\\";
    std::string s = "err ";
    const std::size_t n = gen::uniform_index(rng, 0, 40);
    for (std::size_t i = 0; i < n; ++i)
      s += alphabet[gen::uniform_index(rng, 0, sizeof(alphabet) - 2)];
    // ensure it never contains a parseable object
    std::string filtered;
    int depth = 0;
    for (char c : s) {
      if (c == '{') ++depth;
      if (c == '}' && depth == 0) continue;
      if (c == '}') --depth;
      filtered += c;
    }
    return filtered + " {unclosed";
  }
  const char* name() const override { return "failing"; }
};

void criterion_fuzz(std::ostringstream& detail) {
  std::mt19937_64 rng(6006);
  const std::vector<std::string> expected = {"alpha", "beta", "gamma"};
  const RawRanges ranges;
  static const char alphabet[] =
      "{}[]\",:0123456789.eE+- \n\r\tabcdefghijklmnop\\\"globalwordspitchenergyduration";

  // Half the corpus is raw character soup; the other half starts from a
  // valid contract reply and garbles it (huge numbers, dropped tails,
  // truncation, quoted values) so the clamp/pad paths actually run.
  auto garbled_valid = [&]() {
    auto plan = gen::random_plan(rng, gen::uniform_index(rng, 0, 5));
    const int mutation = int(gen::uniform_index(rng, 0, 4));
    if (mutation == 0) {
      plan.global.energy *= 1e3;
      plan.global.pitch += 40.0;
      for (auto& w : plan.words) w.duration = gen::uniform(rng, -50.0, 50.0);
    }
    std::string text = "reasoning first.\n" + plan_to_contract_json(plan, expected);
    switch (mutation) {
      case 1: text = text.substr(0, gen::uniform_index(rng, 1, text.size())); break;
      case 2: text.insert(gen::uniform_index(rng, 0, text.size()), "\"]}"); break;
      case 3: {
        const auto pos = text.find("\"energy\":");
        if (pos != std::string::npos) text.replace(pos, 9, "\"energy\": \"9e9\", \"x\":");
        break;
      }
      default: break;
    }
    return text;
  };

  std::size_t survived = 0, parsed = 0;
  const std::size_t n = 10000;
  for (std::size_t i = 0; i < n; ++i) {
    std::string text;
    if (i % 2 == 0) {
      const std::size_t len = gen::uniform_index(rng, 0, 200);
      for (std::size_t k = 0; k < len; ++k)
        text += alphabet[gen::uniform_index(rng, 0, sizeof(alphabet) - 2)];
    } else {
      text = garbled_valid();
    }
    try {
      const auto plan = parse_response(text, expected, ranges);
      ++parsed;
      bool ok = ranges.pitch.contains(plan.global.pitch) &&
                ranges.energy.contains(plan.global.energy) &&
                ranges.duration.contains(plan.global.duration) &&
                plan.words.size() == expected.size();
      for (const auto& w : plan.words)
        ok = ok && ranges.pitch.contains(w.pitch) && ranges.energy.contains(w.energy) &&
             ranges.duration.contains(w.duration);
      check(ok, "parsed plan carries out-of-range factors");
      ++survived;
    } catch (const ParseError&) {
      ++survived;
    } catch (const SchemaError&) {
      ++survived;
    }
    // anything else escapes and fails the criterion
  }
  check(survived == n, "parse_response raised an unexpected error");
  check(parsed > 1000, "mutation corpus exercised the parse path too rarely");

  FailingProvider failing;
  ProviderConfig config;
  config.max_retries = 2;
  PromptRequest req;
  req.utterance_id = "fz";
  req.text = "alpha beta gamma";
  req.words = expected;
  req.target_emotion = Emotion::Angry;
  std::size_t fallbacks = 0;
  const std::size_t trials = 200;
  for (std::size_t i = 0; i < trials; ++i) {
    const auto result = request_plan(req, failing, config);
    if (result.plan.degraded && result.plan.global == ScaleTriple{} &&
        result.plan.words == std::vector<ScaleTriple>(3, ScaleTriple{}) &&
        result.attempts == 3)
      ++fallbacks;
  }
  check(fallbacks == trials, "neutral fallback missed in some trials");
  detail << "fuzz " << survived << "/" << n << " (parsed " << parsed << "), fallback "
         << fallbacks << "/" << trials;
}

// ---------------------------------------------------------------------------
// 7. End-to-end offline pipeline, byte-identical across two runs.
// ---------------------------------------------------------------------------

void criterion_pipeline(std::ostringstream& detail) {
  TempDir dir("e2e");

  // fixture corpus: 3 speakers x 2 emotions (+ neutral), 384-dim features
  std::mt19937_64 rng(7007);
  std::vector<AcousticFeatureVector> corpus;
  std::vector<ProsodyTrack> tracks;
  const Emotion emotions[] = {Emotion::Angry, Emotion::Happy, Emotion::Neutral};
  std::size_t track_index = 0;
  for (int s = 0; s < 3; ++s) {
    const std::string speaker = "spk" + std::to_string(s);
    for (Emotion e : emotions)
      for (int u = 0; u < 4; ++u) {
        const std::string id =
            speaker + "_" + to_string(e) + "_" + std::to_string(u);
        const double shift = e == Emotion::Neutral ? 0.0 : 1.0 + 0.2 * u;
        corpus.push_back(gen::feature_row(rng, id, speaker, e, kDefaultFeatureDim, shift));
        auto track = gen::random_track(rng, track_index++);
        track.utterance_id = id;
        tracks.push_back(std::move(track));
      }
  }
  const auto features_csv = dir.path / "features.csv";
  write_features(features_csv, corpus);
  const auto tracks_path = dir.path / "tracks.jsonl";
  write_tracks(tracks_path, tracks);

  // replay plans: deterministic pseudo-LLM output for every utterance
  std::vector<PlanRecord> replay;
  for (const auto& track : tracks) {
    PlanRecord record;
    record.utterance_id = track.utterance_id;
    record.plan = gen::random_plan(rng, track.words.size());
    replay.push_back(std::move(record));
  }
  const auto replay_path = dir.path / "replay.jsonl";
  write_plans(replay_path, replay);

  // eca labels for the eval stage
  std::string labels = "utterance_id,pred,truth\n";
  for (std::size_t i = 0; i < tracks.size(); ++i)
    labels += tracks[i].utterance_id + "," + (i % 5 == 4 ? "Sad" : "Angry") + ",Angry\n";
  const auto labels_csv = dir.path / "labels.csv";
  write_text(labels_csv, labels);

  auto run_pipeline = [&](const fs::path& out_dir) {
    fs::create_directories(out_dir);
    const auto models = out_dir / "models";
    const auto annotations = out_dir / "annotations.csv";
    const auto plans = out_dir / "plans.jsonl";
    const auto scaled = out_dir / "scaled.jsonl";
    const auto report = out_dir / "eca.json";
    const auto report_csv = out_dir / "eca.csv";

    check(run_cli({"train-rank", features_csv.string(), models.string(), "--seed", "11"},
                  out_dir / "log1") == 0,
          "train-rank failed");
    check(run_cli({"annotate", features_csv.string(), models.string(),
                   annotations.string()},
                  out_dir / "log2") == 0,
          "annotate failed");
    check(run_cli({"prompt", tracks_path.string(), plans.string(), "--provider",
                   "replay:" + replay_path.string(), "--annotations",
                   annotations.string(), "--emotion", "Angry"},
                  out_dir / "log3") == 0,
          "prompt failed");
    check(run_cli({"scale", tracks_path.string(), plans.string(), scaled.string()},
                  out_dir / "log4") == 0,
          "scale failed");
    check(run_cli({"eval", "eca", "--labels", labels_csv.string(), "--out",
                   report.string(), "--csv", report_csv.string()},
                  out_dir / "log5") == 0,
          "eval failed");
  };

  run_pipeline(dir.path / "run1");
  run_pipeline(dir.path / "run2");

  std::size_t compared = 0;
  const fs::path run1 = dir.path / "run1";
  const fs::path run2 = dir.path / "run2";
  for (const auto& entry : fs::recursive_directory_iterator(run1)) {
    if (!entry.is_regular_file()) continue;
    const auto relative = fs::relative(entry.path(), run1);
    if (relative.string().rfind("log", 0) == 0) continue;  // scratch logs
    const auto twin = run2 / relative;
    check(fs::exists(twin), "missing output in second run: " + relative.string());
    check(subprocess::slurp(entry.path()) == subprocess::slurp(twin),
          "output differs between runs: " + relative.string());
    ++compared;
  }
  check(compared >= 10, "suspiciously few outputs compared");

  // the scaled tracks must differ from the inputs (plans are non-neutral)
  check(subprocess::slurp(run1 / "scaled.jsonl") != subprocess::slurp(tracks_path),
        "scaling was a no-op under non-neutral plans");
  detail << compared << " outputs byte-identical";
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--cli") g_cli = argv[i + 1];
  if (g_cli.empty()) {
    std::cerr << "usage: proso_acceptance --cli <path-to-prosoctl>\n";
    return 2;
  }

  const std::vector<Criterion> criteria = {
      {1, "quadratic map endpoints and 3x3-solve coefficients", 1.0, criterion_quadratic},
      {2, "scaling identity and interval preservation (1000 tracks)", 10.0,
       criterion_scaling},
      {3, "rank-SVM grid-search equivalence, ordering, determinism", 30.0, criterion_rank},
      {4, "metric oracles: edit distance, MCD closed form, DTW enumeration", 60.0,
       criterion_metrics},
      {5, "aggregation reproduction: ECA 0.797, MOS 3.728, PIR 0.729", 60.0,
       criterion_aggregation},
      {6, "prompt robustness fuzz and neutral fallback", 60.0, criterion_fuzz},
      {7, "end-to-end offline pipeline, byte-identical reruns", 120.0,
       criterion_pipeline},
  };

  for (const auto& c : criteria) run_criterion(c);

  if (g_failures == 0) {
    std::printf("all %zu criteria passed\n", criteria.size());
    return 0;
  }
  std::printf("%d criteria FAILED\n", g_failures);
  return 1;
}
