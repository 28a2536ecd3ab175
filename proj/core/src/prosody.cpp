#include "proso/prosody.hpp"

#include <cmath>
#include <sstream>

namespace proso {

namespace {

bool all_finite(const PhonemeProsody& p) {
  return std::isfinite(p.duration) && std::isfinite(p.energy) &&
         std::isfinite(p.pitch);
}

std::string describe(const ProsodyTrack& track, const std::string& what) {
  std::ostringstream os;
  os << "track '" << track.utterance_id << "': " << what;
  return os.str();
}

}  // namespace

void validate_track(const ProsodyTrack& track) {
  for (std::size_t i = 0; i < track.phonemes.size(); ++i) {
    const auto& p = track.phonemes[i];
    if (!all_finite(p))
      throw FormatError(describe(track, "non-finite prosody at phoneme " + std::to_string(i)));
    if (p.duration <= 0.0)
      throw FormatError(describe(track, "non-positive duration at phoneme " + std::to_string(i)));
    if (p.energy <= 0.0)
      throw FormatError(describe(track, "non-positive energy at phoneme " + std::to_string(i)));
  }
  if (!std::isfinite(track.pitch_range.min) || !std::isfinite(track.pitch_range.max) ||
      !(track.pitch_range.min < track.pitch_range.max))
    throw FormatError(describe(track, "pitch_range must satisfy min < max"));

  // Word spans must tile [0, phonemes.size()) exactly.
  std::size_t expected_first = 0;
  for (std::size_t w = 0; w < track.words.size(); ++w) {
    const auto& span = track.words[w];
    if (span.first != expected_first)
      throw FormatError(describe(track, "word " + std::to_string(w) +
                                            " does not start at phoneme " +
                                            std::to_string(expected_first)));
    if (span.last < span.first || span.last >= track.phonemes.size())
      throw FormatError(describe(track, "word " + std::to_string(w) + " has invalid span"));
    expected_first = span.last + 1;
  }
  if (expected_first != track.phonemes.size())
    throw FormatError(describe(track, "word spans do not cover every phoneme"));
}

QuadraticMap QuadraticMap::solve(Interval raw, Interval target) {
  if (!(raw.lo < 0.0 && 0.0 < raw.hi) || raw.lo != -raw.hi)
    throw ConfigError("raw range must be symmetric about 0, got [" +
                      std::to_string(raw.lo) + ", " + std::to_string(raw.hi) + "]");
  if (!(target.lo < 1.0 && 1.0 < target.hi))
    throw ConfigError("target range must strictly contain 1, got [" +
                      std::to_string(target.lo) + ", " + std::to_string(target.hi) + "]");

  // f(0) = 1 fixes c; the symmetric endpoints split into sum/difference
  // equations for a and b.
  const double c = 1.0;
  const double a = (target.lo + target.hi - 2.0) / (2.0 * raw.hi * raw.hi);
  const double b = (target.hi - target.lo) / (2.0 * raw.hi);

  // f'(v) = 2av + b is linear, so positivity at both endpoints gives strict
  // monotonicity on the whole interval.
  if (2.0 * a * raw.lo + b <= 0.0 || 2.0 * a * raw.hi + b <= 0.0)
    throw ConfigError("quadratic map is not strictly increasing over its raw range");

  return QuadraticMap(a, b, c, raw, target);
}

double QuadraticMap::operator()(double v) const {
  const double f = (a_ * v + b_) * v + c_;
  return target_.clamp(f);
}

double QuadraticMap::map_clamped(double v, std::string_view field,
                                 Warnings* warnings) const {
  if (!raw_.contains(v)) {
    warn(warnings, std::string(field) + " value " + std::to_string(v) +
                       " outside [" + std::to_string(raw_.lo) + ", " +
                       std::to_string(raw_.hi) + "], clamped");
    v = raw_.clamp(v);
  }
  return (*this)(v);
}

RawScalingPlan RawScalingPlan::neutral(std::size_t word_count) {
  RawScalingPlan plan;
  plan.words.assign(word_count, ScaleTriple{});
  return plan;
}

MappedScalingPlan MappedScalingPlan::neutral(std::size_t word_count) {
  MappedScalingPlan plan;
  plan.words.assign(word_count, WordFactors{});
  return plan;
}

ScalingMaps ScalingMaps::defaults() {
  return ScalingMaps{QuadraticMap::solve({-2.0, 2.0}, {0.74, 1.34}),
                     QuadraticMap::solve({-5.0, 5.0}, {0.5, 2.0}),
                     Interval{-5.0, 5.0},
                     1.0};
}

MappedScalingPlan map_plan(const RawScalingPlan& raw, const PitchRange& pitch_range,
                           const ScalingMaps& maps, std::size_t track_word_count,
                           Warnings* warnings) {
  if (raw.words.size() != track_word_count)
    throw AlignmentError("plan has " + std::to_string(raw.words.size()) +
                         " word entries, track has " + std::to_string(track_word_count));

  const double half_span = maps.pitch_gain * (pitch_range.max - pitch_range.min) / 2.0;
  auto map_pitch = [&](double v, std::string_view field) {
    if (!maps.pitch_raw.contains(v)) {
      warn(warnings, std::string(field) + " value " + std::to_string(v) + " outside [" +
                         std::to_string(maps.pitch_raw.lo) + ", " +
                         std::to_string(maps.pitch_raw.hi) + "], clamped");
      v = maps.pitch_raw.clamp(v);
    }
    return (v / maps.pitch_raw.hi) * half_span;
  };

  MappedScalingPlan mapped;
  mapped.duration_gain = maps.duration.map_clamped(raw.global.duration, "global duration", warnings);
  mapped.energy_gain = maps.energy.map_clamped(raw.global.energy, "global energy", warnings);
  mapped.pitch_offset = map_pitch(raw.global.pitch, "global pitch");

  mapped.words.reserve(raw.words.size());
  for (std::size_t i = 0; i < raw.words.size(); ++i) {
    const auto& triple = raw.words[i];
    const std::string tag = "word " + std::to_string(i);
    WordFactors factors;
    factors.duration_gain = maps.duration.map_clamped(triple.duration, tag + " duration", warnings);
    factors.energy_gain = maps.energy.map_clamped(triple.energy, tag + " energy", warnings);
    // The combined offset is what the constraint binds, so the local part is
    // clamped against the range left over after the global offset.
    const double local = map_pitch(triple.pitch, tag + " pitch");
    const Interval feasible{pitch_range.min - mapped.pitch_offset,
                            pitch_range.max - mapped.pitch_offset};
    factors.pitch_offset = feasible.clamp(local);
    if (factors.pitch_offset != local)
      warn(warnings, tag + " pitch offset clamped so the combined offset stays in [" +
                         std::to_string(pitch_range.min) + ", " +
                         std::to_string(pitch_range.max) + "]");
    mapped.words.push_back(factors);
  }
  return mapped;
}

ProsodyTrack apply_scaling(const ProsodyTrack& track, const MappedScalingPlan& plan,
                           const PitchRange& pitch_range, Warnings* warnings) {
  if (plan.words.size() != track.words.size())
    throw AlignmentError("plan has " + std::to_string(plan.words.size()) +
                         " word entries, track has " + std::to_string(track.words.size()));

  ProsodyTrack out = track;
  for (std::size_t w = 0; w < track.words.size(); ++w) {
    const auto& span = track.words[w];
    const auto& factors = plan.words[w];
    const double offset = plan.pitch_offset + factors.pitch_offset;
    for (std::size_t i = span.first; i <= span.last && i < out.phonemes.size(); ++i) {
      auto& p = out.phonemes[i];
      p.duration *= plan.duration_gain * factors.duration_gain;
      p.energy *= plan.energy_gain * factors.energy_gain;
      p.pitch += offset;
      if (p.pitch < pitch_range.min || p.pitch > pitch_range.max)
        warn(warnings, "track '" + track.utterance_id + "': shifted pitch " +
                           std::to_string(p.pitch) + " at phoneme " + std::to_string(i) +
                           " leaves [" + std::to_string(pitch_range.min) + ", " +
                           std::to_string(pitch_range.max) + "]");
    }
  }
  return out;
}

std::int64_t round_half_even(double v) {
  const double floor_v = std::floor(v);
  const double frac = v - floor_v;
  const auto low = static_cast<std::int64_t>(floor_v);
  if (frac > 0.5) return low + 1;
  if (frac < 0.5) return low;
  return (low % 2 == 0) ? low : low + 1;
}

DurationFrames export_durations(const ProsodyTrack& track) {
  DurationFrames out;
  out.frames.reserve(track.phonemes.size());
  for (const auto& p : track.phonemes) {
    std::int64_t frames = round_half_even(p.duration);
    if (frames < 1) frames = 1;
    out.frames.push_back(frames);
    out.total += frames;
  }
  return out;
}

}  // namespace proso
