#include "proso/prompt.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <random>
#include <semaphore>
#include <sstream>
#include <thread>
#include <unordered_map>

#ifndef PROSO_NO_TLS
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>
#include <json.hpp>

#include "proso/formats.hpp"

namespace proso {

using nlohmann::json;

const char* to_string(PromptMode mode) {
  switch (mode) {
    case PromptMode::GlobalAndLocal: return "gl";
    case PromptMode::LocalOnly: return "local";
    case PromptMode::None: return "none";
  }
  return "none";
}

const int kPromptTemplateVersion = 1;

std::string build_prompt(const PromptRequest& request, const RawRanges& ranges) {
  std::ostringstream os;
  os << "You are a prosody director for a speech synthesizer. The synthesizer has\n"
        "predicted duration, energy and pitch for every phoneme of the utterance\n"
        "below; you choose scaling factors that make the delivery sound "
     << to_string(request.target_emotion);
  if (request.intensity_bucket)
    os << " at " << to_string(*request.intensity_bucket) << " intensity";
  os << ".\n\n";
  os << "Utterance: \"" << request.text << "\"\n\n";
  os << "Words:\n";
  for (std::size_t i = 0; i < request.words.size(); ++i)
    os << "  " << i << ": " << request.words[i] << "\n";
  os << "\n";
  os << "Choose factors on these scales (0 means leave unchanged):\n";
  os << "- pitch: real number in [" << format_double(ranges.pitch.lo) << ", "
     << format_double(ranges.pitch.hi) << "]\n";
  os << "- energy: real number in [" << format_double(ranges.energy.lo) << ", "
     << format_double(ranges.energy.hi) << "]\n";
  os << "- duration: real number in [" << format_double(ranges.duration.lo) << ", "
     << format_double(ranges.duration.hi) << "]\n\n";
  if (request.mode == PromptMode::LocalOnly) {
    os << "This request is local-only: the global triple MUST be exactly\n"
          "{\"pitch\": 0, \"energy\": 0, \"duration\": 0}. Express every adjustment\n"
          "through the per-word entries.\n\n";
  } else {
    os << "Set the global triple first to establish the overall emotional tone of\n"
          "the whole utterance, then refine individual words with one local triple\n"
          "per word.\n\n";
  }
  os << "Reason step by step before answering: for each level and word, state\n"
        "what you are adjusting and why, then commit to a number.\n\n";
  os << "After your reasoning, output exactly one JSON object and nothing after\n"
        "it, of this exact shape:\n\n";
  os << "{\"global\": {\"pitch\": 0.0, \"energy\": 0.0, \"duration\": 0.0},\n"
        " \"words\": [{\"word\": \"...\", \"pitch\": 0.0, \"energy\": 0.0, \"duration\": 0.0}]}\n\n";
  os << "The \"words\" array must contain exactly " << request.words.size()
     << " entries, one per word, in the order listed above.\n";
  return os.str();
}

std::string plan_to_contract_json(const RawScalingPlan& plan,
                                  std::span<const std::string> words) {
  json doc;
  doc["global"] = {{"pitch", plan.global.pitch},
                   {"energy", plan.global.energy},
                   {"duration", plan.global.duration}};
  json entries = json::array();
  for (std::size_t i = 0; i < plan.words.size(); ++i) {
    const auto& t = plan.words[i];
    entries.push_back({{"word", i < words.size() ? words[i] : std::string()},
                       {"pitch", t.pitch},
                       {"energy", t.energy},
                       {"duration", t.duration}});
  }
  doc["words"] = std::move(entries);
  return doc.dump();
}

namespace {

// Locates the first balanced {...} region that parses as JSON; returns the
// parsed object and the region's offsets.
bool extract_json_object(std::string_view text, json& out, std::size_t& begin,
                         std::size_t& end) {
  for (std::size_t start = text.find('{'); start != std::string_view::npos;
       start = text.find('{', start + 1)) {
    int depth = 0;
    bool in_string = false, escaped = false;
    std::size_t close = std::string_view::npos;
    for (std::size_t i = start; i < text.size(); ++i) {
      const char ch = text[i];
      if (in_string) {
        if (escaped) escaped = false;
        else if (ch == '\\') escaped = true;
        else if (ch == '"') in_string = false;
      } else if (ch == '"') {
        in_string = true;
      } else if (ch == '{') {
        ++depth;
      } else if (ch == '}') {
        if (--depth == 0) {
          close = i + 1;
          break;
        }
      }
    }
    if (close == std::string_view::npos) continue;
    json parsed = json::parse(text.substr(start, close - start), nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object()) continue;
    out = std::move(parsed);
    begin = start;
    end = close;
    return true;
  }
  return false;
}

double clamped_number(const json& entry, const char* key, const Interval& range,
                      const std::string& where, Warnings* warnings) {
  double v = 0.0;
  if (!entry.is_object() || !entry.contains(key)) {
    warn(warnings, where + " is missing '" + key + "', using 0");
    return 0.0;
  }
  const json& field = entry.at(key);
  if (field.is_number()) {
    v = field.get<double>();
  } else if (field.is_string()) {
    try {
      v = std::stod(field.get<std::string>());
      warn(warnings, where + " '" + key + "' was quoted, parsed as number");
    } catch (...) {
      warn(warnings, where + " '" + key + "' is not numeric, using 0");
      return 0.0;
    }
  } else {
    warn(warnings, where + " '" + key + "' is not numeric, using 0");
    return 0.0;
  }
  if (!std::isfinite(v)) {
    warn(warnings, where + " '" + key + "' is not finite, using 0");
    return 0.0;
  }
  if (!range.contains(v)) {
    warn(warnings, where + " '" + key + "' value " + format_double(v) + " outside [" +
                       format_double(range.lo) + ", " + format_double(range.hi) +
                       "], clamped");
    v = range.clamp(v);
  }
  return v;
}

ScaleTriple read_triple(const json& entry, const RawRanges& ranges,
                        const std::string& where, Warnings* warnings) {
  ScaleTriple t;
  t.pitch = clamped_number(entry, "pitch", ranges.pitch, where, warnings);
  t.energy = clamped_number(entry, "energy", ranges.energy, where, warnings);
  t.duration = clamped_number(entry, "duration", ranges.duration, where, warnings);
  return t;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

RawScalingPlan parse_response(std::string_view raw_text,
                              std::span<const std::string> expected_words,
                              const RawRanges& ranges, Warnings* warnings) {
  json doc;
  std::size_t begin = 0, end = 0;
  if (!extract_json_object(raw_text, doc, begin, end))
    throw ParseError("no parseable JSON object in response");
  if (!doc.contains("global")) throw SchemaError("response JSON is missing 'global'");
  if (!doc.contains("words")) throw SchemaError("response JSON is missing 'words'");

  RawScalingPlan plan;
  plan.rationale = trim(raw_text.substr(0, begin));
  plan.global = read_triple(doc.at("global"), ranges, "global", warnings);

  const json& entries = doc.at("words");
  if (!entries.is_array()) throw SchemaError("'words' is not an array");
  if (entries.size() > expected_words.size())
    warn(warnings, "response has " + std::to_string(entries.size()) + " word entries for " +
                       std::to_string(expected_words.size()) + " words, extras dropped");
  if (entries.size() < expected_words.size())
    warn(warnings, "response has " + std::to_string(entries.size()) + " word entries for " +
                       std::to_string(expected_words.size()) + " words, tail padded with zeros");

  plan.words.reserve(expected_words.size());
  for (std::size_t i = 0; i < expected_words.size(); ++i) {
    if (i >= entries.size()) {
      plan.words.push_back(ScaleTriple{});
      continue;
    }
    const json& entry = entries.at(i);
    const std::string where = "word " + std::to_string(i);
    if (entry.is_object() && entry.contains("word") && entry.at("word").is_string()) {
      const auto got = entry.at("word").get<std::string>();
      if (got != expected_words[i])
        warn(warnings, where + " says '" + got + "', expected '" + expected_words[i] + "'");
    }
    plan.words.push_back(read_triple(entry, ranges, where, warnings));
  }
  return plan;
}

// ---------------------------------------------------------------------------
// Providers
// ---------------------------------------------------------------------------

namespace {

struct StubProvider final : PlanProvider {
  std::string complete(const PromptRequest& request,
                       const std::vector<ChatMessage>&) override {
    ScaleTriple canned;
    switch (request.target_emotion) {
      case Emotion::Angry: canned = {2.5, 3.0, -0.5}; break;
      case Emotion::Happy: canned = {3.0, 2.0, 0.5}; break;
      case Emotion::Sad: canned = {-2.0, -1.5, 1.0}; break;
      case Emotion::Surprise: canned = {4.0, 3.0, -1.0}; break;
      case Emotion::Neutral: canned = {0.0, 0.0, 0.0}; break;
    }
    RawScalingPlan plan;
    plan.words.assign(request.words.size(), ScaleTriple{});
    if (request.mode == PromptMode::LocalOnly) {
      for (auto& w : plan.words) w = canned;
    } else {
      plan.global = canned;
      if (!plan.words.empty() && !canned.is_zero())
        plan.words.front() = ScaleTriple{1.0, 1.0, 0.0};
    }
    return "Canned factors for " + std::string(to_string(request.target_emotion)) +
           ".\n" + plan_to_contract_json(plan, request.words);
  }
  const char* name() const override { return "stub"; }
};

struct ReplayProvider final : PlanProvider {
  explicit ReplayProvider(const std::filesystem::path& path) {
    PlanBatch batch = read_plans(path);
    if (!batch.errors.empty())
      throw FormatError("replay file '" + path.string() + "': line " +
                        std::to_string(batch.errors.front().line) + ": " +
                        batch.errors.front().message);
    for (auto& record : batch.records)
      plans_.emplace(record.utterance_id, std::move(record.plan));
  }

  std::string complete(const PromptRequest& request,
                       const std::vector<ChatMessage>&) override {
    const auto it = plans_.find(request.utterance_id);
    if (it == plans_.end())
      throw TransportError("replay file has no plan for utterance '" +
                           request.utterance_id + "'");
    std::string text = plan_to_contract_json(it->second, request.words);
    if (!it->second.rationale.empty()) text = it->second.rationale + "\n" + text;
    return text;
  }
  const char* name() const override { return "replay"; }

 private:
  std::unordered_map<std::string, RawScalingPlan> plans_;
};

struct HttpProvider final : PlanProvider {
  explicit HttpProvider(const ProviderConfig& config)
      : config_(config),
        slots_(std::max(1, config.max_concurrent_requests)),
        jitter_rng_(std::random_device{}()) {
    const auto scheme_end = config_.base_url.find("://");
    std::size_t host_begin = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    const auto path_begin = config_.base_url.find('/', host_begin);
    if (path_begin == std::string::npos) {
      origin_ = config_.base_url;
      path_prefix_.clear();
    } else {
      origin_ = config_.base_url.substr(0, path_begin);
      path_prefix_ = config_.base_url.substr(path_begin);
    }
  }

  std::string complete(const PromptRequest&,
                       const std::vector<ChatMessage>& messages) override {
    const char* key = std::getenv(config_.api_key_env.c_str());
    if (key == nullptr || *key == '\0')
      throw TransportError("environment variable " + config_.api_key_env +
                           " is not set (required by the http provider)");

    json body;
    body["model"] = config_.model_name;
    body["temperature"] = config_.temperature;
    json msgs = json::array();
    for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
    body["messages"] = std::move(msgs);
    const std::string payload = body.dump();

    slots_.acquire();
    struct Release {
      std::counting_semaphore<>& s;
      ~Release() { s.release(); }
    } release{slots_};

    std::string last_error = "request not attempted";
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
      if (attempt > 0) backoff(attempt);
      httplib::Client client(origin_);
      client.set_connection_timeout(std::chrono::duration<double>(config_.timeout_s));
      client.set_read_timeout(std::chrono::duration<double>(config_.timeout_s));
      client.set_bearer_token_auth(key);
      auto res = client.Post(path_prefix_ + "/chat/completions", payload, "application/json");
      if (!res) {
        last_error = "transport failure: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status == 429 || res->status >= 500) {
        last_error = "HTTP " + std::to_string(res->status);
        continue;
      }
      if (res->status != 200)
        throw TransportError("HTTP " + std::to_string(res->status) + " from " + origin_ +
                             ": " + res->body.substr(0, 200));
      json reply = json::parse(res->body, nullptr, false);
      if (reply.is_discarded() || !reply.contains("choices") || reply["choices"].empty())
        throw TransportError("malformed completion response from " + origin_);
      return reply["choices"][0].value("message", json::object()).value("content", "");
    }
    throw TransportError("giving up after " + std::to_string(config_.max_retries + 1) +
                         " attempts: " + last_error);
  }
  const char* name() const override { return "http"; }

 private:
  void backoff(int attempt) {
    const double base = 0.5 * double(1 << (attempt - 1));
    double jitter;
    {
      std::lock_guard<std::mutex> lock(rng_mutex_);
      jitter = std::uniform_real_distribution<double>(0.0, base / 2.0)(jitter_rng_);
    }
    std::this_thread::sleep_for(std::chrono::duration<double>(base + jitter));
  }

  ProviderConfig config_;
  std::string origin_;
  std::string path_prefix_;
  std::counting_semaphore<> slots_;
  std::mt19937 jitter_rng_;
  std::mutex rng_mutex_;
};

}  // namespace

std::unique_ptr<PlanProvider> make_provider(std::string_view selector,
                                            const ProviderConfig& config) {
  if (selector == "http") return std::make_unique<HttpProvider>(config);
  if (selector == "stub") return std::make_unique<StubProvider>();
  constexpr std::string_view kReplay = "replay:";
  if (selector.substr(0, kReplay.size()) == kReplay)
    return std::make_unique<ReplayProvider>(
        std::filesystem::path(std::string(selector.substr(kReplay.size()))));
  throw ConfigError("unknown provider '" + std::string(selector) +
                    "' (expected http, stub, or replay:<path>)");
}

PlanResult request_plan(const PromptRequest& request, PlanProvider& provider,
                        const ProviderConfig& config, const RawRanges& ranges) {
  PlanResult result;
  if (request.mode == PromptMode::None) {
    result.plan = RawScalingPlan::neutral(request.words.size());
    return result;
  }

  std::vector<ChatMessage> messages;
  messages.push_back({"user", build_prompt(request, ranges)});

  for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
    ++result.attempts;
    const std::string text = provider.complete(request, messages);
    try {
      RawScalingPlan plan = parse_response(text, request.words, ranges, &result.warnings);
      if (request.mode == PromptMode::LocalOnly && !plan.global.is_zero()) {
        warn(&result.warnings, "non-zero global triple zeroed in local-only mode");
        plan.global = ScaleTriple{};
      }
      result.plan = std::move(plan);
      return result;
    } catch (const ParseError& e) {
      warn(&result.warnings, "attempt " + std::to_string(result.attempts) + ": " + e.what());
      messages.push_back({"assistant", text});
      messages.push_back({"user", std::string("Your previous reply could not be used: ") +
                                      e.what() +
                                      ". Reply again with exactly one JSON object of the "
                                      "required shape and nothing after it."});
    } catch (const SchemaError& e) {
      warn(&result.warnings, "attempt " + std::to_string(result.attempts) + ": " + e.what());
      messages.push_back({"assistant", text});
      messages.push_back({"user", std::string("Your previous reply could not be used: ") +
                                      e.what() +
                                      ". Reply again with exactly one JSON object of the "
                                      "required shape and nothing after it."});
    }
  }

  result.plan = RawScalingPlan::neutral(request.words.size());
  result.plan.degraded = true;
  warn(&result.warnings, "falling back to the neutral plan after " +
                             std::to_string(result.attempts) + " attempts");
  return result;
}

}  // namespace proso
