#include "proso/emotion.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace proso {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

const char* to_string(Emotion e) {
  switch (e) {
    case Emotion::Angry: return "Angry";
    case Emotion::Happy: return "Happy";
    case Emotion::Neutral: return "Neutral";
    case Emotion::Sad: return "Sad";
    case Emotion::Surprise: return "Surprise";
  }
  return "Neutral";
}

std::optional<Emotion> parse_emotion(std::string_view name) {
  const std::string n = lower(name);
  for (Emotion e : kAllEmotions)
    if (n == lower(to_string(e))) return e;
  return std::nullopt;
}

const char* to_string(IntensityBucket b) {
  switch (b) {
    case IntensityBucket::Low: return "Low";
    case IntensityBucket::Medium: return "Medium";
    case IntensityBucket::High: return "High";
  }
  return "Low";
}

std::optional<IntensityBucket> parse_bucket(std::string_view name) {
  const std::string n = lower(name);
  if (n == "low") return IntensityBucket::Low;
  if (n == "medium") return IntensityBucket::Medium;
  if (n == "high") return IntensityBucket::High;
  return std::nullopt;
}

}  // namespace proso
