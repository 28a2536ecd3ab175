#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace proso {

// Emotion categories of the ESD-style corpora this toolkit consumes.
enum class Emotion { Angry, Happy, Neutral, Sad, Surprise };

inline constexpr std::array<Emotion, 5> kAllEmotions = {
    Emotion::Angry, Emotion::Happy, Emotion::Neutral, Emotion::Sad,
    Emotion::Surprise};

const char* to_string(Emotion e);
std::optional<Emotion> parse_emotion(std::string_view name);  // case-insensitive

enum class IntensityBucket { Low, Medium, High };

const char* to_string(IntensityBucket b);
std::optional<IntensityBucket> parse_bucket(std::string_view name);

}  // namespace proso
