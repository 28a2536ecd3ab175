#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "proso/emotion.hpp"
#include "proso/errors.hpp"

namespace proso {

inline constexpr std::size_t kDefaultFeatureDim = 384;

// Utterance-level acoustic statistics (openSMILE-style) with metadata.
struct AcousticFeatureVector {
  std::string utterance_id;
  std::string speaker_id;
  Emotion emotion = Emotion::Neutral;
  std::vector<double> features;

  friend bool operator==(const AcousticFeatureVector&,
                         const AcousticFeatureVector&) = default;
};

// Training constraints over corpus indices: `ordered` pairs (hi, lo) rank hi
// strictly above lo; `similar` pairs share the same perceived intensity.
struct PairSet {
  std::vector<std::pair<std::size_t, std::size_t>> ordered;
  std::vector<std::pair<std::size_t, std::size_t>> similar;

  friend bool operator==(const PairSet&, const PairSet&) = default;
};

struct RankHyperparams {
  double C = 0.1;
  double tol = 1e-6;        // on the gradient norm
  int max_iter = 200;
  std::size_t pair_limit = 10000;

  friend bool operator==(const RankHyperparams&, const RankHyperparams&) = default;
};

// Linear ranking function r(x) = W . standardize(x) for one (speaker,
// emotion), with the normalization stats needed to score new utterances.
struct RankModel {
  std::string speaker_id;
  Emotion emotion = Emotion::Neutral;
  std::vector<double> weights;
  std::vector<double> feature_mean;
  std::vector<double> feature_std;  // entries > 0; zero-variance dims use 1
  double score_min = 0.0;
  double score_max = 1.0;
  RankHyperparams hyperparams;

  // training metadata
  std::size_t ordered_pairs = 0;
  std::size_t similar_pairs = 0;
  double final_objective = 0.0;
  int iterations = 0;
  bool converged = false;
  // Tertiles of the normalized training-score distribution; the default
  // Low/Medium/High cut points.
  double bucket_low = 1.0 / 3.0;
  double bucket_high = 2.0 / 3.0;

  friend bool operator==(const RankModel&, const RankModel&) = default;
};

// Builds the pair set for (speaker, emotion): ordered = every
// (emotional, neutral) cross pair, similar = within-category pairs
// (neutral-neutral and emotional-emotional). Each list is independently
// subsampled to `limit` with a generator seeded by `seed`; identical inputs
// and seed give identical output. Throws TrainingError when the speaker has
// no neutral or no target-emotion utterance.
PairSet build_pairs(std::span<const AcousticFeatureVector> corpus,
                    std::string_view speaker, Emotion emotion, std::size_t limit,
                    std::uint64_t seed);

// Trains W by minimizing
//   0.5*|W|^2 + C * [ sum_ordered max(0, 1 - W.(x_hi - x_lo))^2
//                     + sum_similar (W.(x_i - x_j))^2 ]
// over features standardized against the speaker's {emotion, neutral}
// utterances (damped Newton, gradient-descent fallback). score_min/score_max
// are the extreme raw scores over those training utterances. Throws
// TrainingError on an empty ordered set and NumericalError if the objective
// goes non-finite.
RankModel train_rank(std::span<const AcousticFeatureVector> corpus,
                     const PairSet& pairs, std::string_view speaker,
                     Emotion emotion, const RankHyperparams& hp);

// Normalized intensity in [0, 1]. Throws DimensionError on length mismatch.
double score(const RankModel& model, std::span<const double> features);
double score(const RankModel& model, const AcousticFeatureVector& x);

// Low if s < t_low, Medium if t_low <= s < t_high, else High.
IntensityBucket bucket(double intensity, double t_low, double t_high);
// Same, with the model's training tertiles.
IntensityBucket bucket(const RankModel& model, double intensity);

// Linear-interpolation quantile of an ascending-sorted sample (the numpy
// default definition). p in [0, 1].
double quantile_sorted(std::span<const double> sorted_values, double p);

struct AnnotationRow {
  std::string utterance_id;
  std::string speaker_id;
  Emotion emotion = Emotion::Neutral;
  double intensity = 0.0;
  IntensityBucket bucket = IntensityBucket::Low;

  friend bool operator==(const AnnotationRow&, const AnnotationRow&) = default;
};

struct AnnotationFailure {
  std::string utterance_id;
  std::string message;
};

struct Annotations {
  std::vector<AnnotationRow> rows;       // corpus order
  std::vector<AnnotationFailure> errors;
};

// Scores every emotional utterance with its (speaker, emotion) model.
// Neutral utterances are scored only when `score_neutral_under` names the
// emotion model to apply. A missing model adds an error entry and processing
// continues.
Annotations annotate_corpus(std::span<const AcousticFeatureVector> corpus,
                            std::span<const RankModel> models,
                            std::optional<Emotion> score_neutral_under = std::nullopt);

}  // namespace proso
