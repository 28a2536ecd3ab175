#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "proso/emotion.hpp"
#include "proso/errors.hpp"
#include "proso/prosody.hpp"

namespace proso {

enum class PromptMode { GlobalAndLocal, LocalOnly, None };

const char* to_string(PromptMode mode);

struct PromptRequest {
  std::string utterance_id;
  std::string text;
  std::vector<std::string> words;  // the track's word list, passed through verbatim
  Emotion target_emotion = Emotion::Neutral;
  std::optional<IntensityBucket> intensity_bucket;
  PromptMode mode = PromptMode::GlobalAndLocal;
};

// Raw-unit intervals the model is asked to stay within.
struct RawRanges {
  Interval pitch{-5.0, 5.0};
  Interval energy{-5.0, 5.0};
  Interval duration{-2.0, 2.0};
};

// Bumped whenever the frozen template text changes; reported by --version.
extern const int kPromptTemplateVersion;

// Deterministic prompt: task description, target emotion (and bucket when
// set), indexed word list, the allowed ranges, a stepwise-reasoning
// instruction and the strict JSON output contract. In LocalOnly mode the
// global triple is required to be all zeros.
std::string build_prompt(const PromptRequest& request, const RawRanges& ranges);

// Serializes a plan exactly per the output contract, suitable for replay
// providers and round-trip tests.
std::string plan_to_contract_json(const RawScalingPlan& plan,
                                  std::span<const std::string> words);

// Extracts the first syntactically complete JSON object from arbitrary text
// (code fences and surrounding prose tolerated), validates the contract
// shape, clamps out-of-range numbers into the raw ranges and aligns the word
// entries to expected_words by position (zero-padding missing tails,
// truncating extras; mismatched word strings warn). Throws ParseError when
// no JSON object parses, SchemaError when `global` or `words` is missing.
RawScalingPlan parse_response(std::string_view raw_text,
                              std::span<const std::string> expected_words,
                              const RawRanges& ranges,
                              Warnings* warnings = nullptr);

struct ChatMessage {
  std::string role;
  std::string content;
};

// One raw-text completion source. Implementations: chat-completions HTTP
// endpoint, deterministic stub, recorded replay.
class PlanProvider {
 public:
  virtual ~PlanProvider() = default;
  virtual std::string complete(const PromptRequest& request,
                               const std::vector<ChatMessage>& messages) = 0;
  virtual const char* name() const = 0;
};

struct ProviderConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string model_name = "gpt-4";
  std::string api_key_env = "OPENAI_API_KEY";
  double timeout_s = 30.0;
  int max_retries = 2;
  int max_concurrent_requests = 4;
  double temperature = 0.7;

  friend bool operator==(const ProviderConfig&, const ProviderConfig&) = default;
};

// Selector is one of "http", "stub", "replay:<path>". Throws ConfigError on
// anything else; the replay file is loaded eagerly (FormatError on a bad
// file).
std::unique_ptr<PlanProvider> make_provider(std::string_view selector,
                                            const ProviderConfig& config);

struct PlanResult {
  RawScalingPlan plan;
  int attempts = 0;
  Warnings warnings;
};

// Requests factors for one utterance. Parse/schema failures are retried up
// to config.max_retries with the error appended to the conversation; after
// exhaustion the neutral plan is returned with plan.degraded = true (a
// success, not an error). Mode None short-circuits to the neutral plan; mode
// LocalOnly zeroes the global triple after parsing regardless of provider
// output. Transport failures propagate as TransportError.
PlanResult request_plan(const PromptRequest& request, PlanProvider& provider,
                        const ProviderConfig& config,
                        const RawRanges& ranges = {});

}  // namespace proso
