#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "proso/errors.hpp"

namespace proso {

// Per-phoneme prosody predicted by an upstream variance adaptor. Durations
// are linear-domain frame counts (positive reals); energy is the predictor's
// normalized unit (positive); pitch is in predictor units and may be negative.
struct PhonemeProsody {
  std::string symbol;
  double duration = 0.0;
  double energy = 0.0;
  double pitch = 0.0;

  friend bool operator==(const PhonemeProsody&, const PhonemeProsody&) = default;
};

// Inclusive phoneme index range covered by one word.
struct WordSpan {
  std::string word;
  std::size_t first = 0;
  std::size_t last = 0;

  friend bool operator==(const WordSpan&, const WordSpan&) = default;
};

// Span of pitch values the upstream predictor can produce.
struct PitchRange {
  double min = 0.0;
  double max = 0.0;

  friend bool operator==(const PitchRange&, const PitchRange&) = default;
};

struct ProsodyTrack {
  std::string utterance_id;
  std::string text;
  std::vector<PhonemeProsody> phonemes;
  std::vector<WordSpan> words;
  PitchRange pitch_range;

  friend bool operator==(const ProsodyTrack&, const ProsodyTrack&) = default;
};

// Throws FormatError unless the word spans partition [0, phonemes.size())
// contiguously, every duration/energy is positive, all values are finite and
// pitch_range.min < pitch_range.max.
void validate_track(const ProsodyTrack& track);

// Closed interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double v) const { return v >= lo && v <= hi; }
  double clamp(double v) const { return v < lo ? lo : (v > hi ? hi : v); }

  friend bool operator==(const Interval&, const Interval&) = default;
};

// Monotone quadratic f(v) = a*v^2 + b*v + c mapping a symmetric raw interval
// onto a multiplicative factor interval, with f(raw.lo) = target.lo,
// f(0) = 1 and f(raw.hi) = target.hi.
class QuadraticMap {
 public:
  // Throws ConfigError when raw is not symmetric about 0, target does not
  // strictly contain 1, or the resulting quadratic is not strictly
  // increasing over the raw interval.
  static QuadraticMap solve(Interval raw, Interval target);

  // Evaluates f(v) for v inside the raw interval; the result is clamped into
  // the target interval to keep the closed-interval guarantee exact.
  double operator()(double v) const;

  // Clamps v into the raw interval first (warning), then evaluates.
  double map_clamped(double v, std::string_view field, Warnings* warnings) const;

  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }
  const Interval& raw() const { return raw_; }
  const Interval& target() const { return target_; }

 private:
  QuadraticMap(double a, double b, double c, Interval raw, Interval target)
      : a_(a), b_(b), c_(c), raw_(raw), target_(target) {}

  double a_, b_, c_;
  Interval raw_, target_;
};

// One pitch/energy/duration triple in raw model units.
struct ScaleTriple {
  double pitch = 0.0;
  double energy = 0.0;
  double duration = 0.0;

  bool is_zero() const { return pitch == 0.0 && energy == 0.0 && duration == 0.0; }

  friend bool operator==(const ScaleTriple&, const ScaleTriple&) = default;
};

// Scaling factors as returned by the language model, before range mapping.
// `degraded` marks the neutral fallback a request collapses to after
// exhausting retries.
struct RawScalingPlan {
  ScaleTriple global;
  std::vector<ScaleTriple> words;
  std::string rationale;
  bool degraded = false;

  static RawScalingPlan neutral(std::size_t word_count);

  friend bool operator==(const RawScalingPlan&, const RawScalingPlan&) = default;
};

// Multiplicative duration/energy gains and an additive pitch offset for one
// word.
struct WordFactors {
  double duration_gain = 1.0;
  double energy_gain = 1.0;
  double pitch_offset = 0.0;

  friend bool operator==(const WordFactors&, const WordFactors&) = default;
};

// Mapped plan: global factors plus one factor triple per word span. Duration
// gains live in the configured duration target interval, energy gains in the
// energy target interval, and every combined pitch offset
// (pitch_offset + words[i].pitch_offset) lies inside the track's pitch range.
struct MappedScalingPlan {
  double duration_gain = 1.0;
  double energy_gain = 1.0;
  double pitch_offset = 0.0;
  std::vector<WordFactors> words;

  static MappedScalingPlan neutral(std::size_t word_count);

  friend bool operator==(const MappedScalingPlan&, const MappedScalingPlan&) = default;
};

// Range maps shared by every utterance of a run; built once from RunConfig.
struct ScalingMaps {
  QuadraticMap duration;
  QuadraticMap energy;
  Interval pitch_raw{-5.0, 5.0};
  double pitch_gain = 1.0;

  static ScalingMaps defaults();
};

// Maps a raw plan onto multiplicative/additive factors. Raw values outside
// their intervals are clamped (warning). Pitch maps linearly with full scale
// pitch_gain * (max - min) / 2; each word's offset is then clamped so the
// combined offset stays inside [min, max]. Throws AlignmentError when the
// plan's word count differs from track_word_count.
MappedScalingPlan map_plan(const RawScalingPlan& raw, const PitchRange& pitch_range,
                           const ScalingMaps& maps, std::size_t track_word_count,
                           Warnings* warnings = nullptr);

// Applies the plan and returns a fresh track: for every phoneme of word i,
// duration and energy are multiplied by global*local gains and pitch is
// shifted by the combined offset. Emits a warning (never an error) when a
// shifted pitch leaves the pitch range. Throws AlignmentError on word-count
// mismatch.
ProsodyTrack apply_scaling(const ProsodyTrack& track, const MappedScalingPlan& plan,
                           const PitchRange& pitch_range, Warnings* warnings = nullptr);

// Integer frame counts for a length regulator: round half to even, floored
// at one frame.
struct DurationFrames {
  std::vector<std::int64_t> frames;
  std::int64_t total = 0;
};

DurationFrames export_durations(const ProsodyTrack& track);

// Round-half-even helper, exposed for tests.
std::int64_t round_half_even(double v);

}  // namespace proso
