#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "proso/metrics.hpp"
#include "proso/prosody.hpp"
#include "proso/rank.hpp"

namespace proso {

// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

// One unreadable row of a batch file; processing continues past it.
struct BatchIssue {
  std::size_t line = 0;  // 1-based
  std::string message;
};

// ---------------------------------------------------------------------------
// Prosody tracks. Single-utterance files hold one JSON object; batch files
// are JSON-Lines, one utterance per line.
// ---------------------------------------------------------------------------

std::string track_to_json(const ProsodyTrack& track);
ProsodyTrack track_from_json(std::string_view json_text);

ProsodyTrack read_track(const std::filesystem::path& path);
void write_track(const std::filesystem::path& path, const ProsodyTrack& track);

struct TrackBatch {
  std::vector<ProsodyTrack> tracks;
  std::vector<BatchIssue> errors;
};

// Accepts both layouts: a file whose first line parses as a full track is
// read as JSON-Lines; otherwise the whole file is one object.
TrackBatch read_tracks(const std::filesystem::path& path);
void write_tracks(const std::filesystem::path& path,
                  std::span<const ProsodyTrack> tracks);

// ---------------------------------------------------------------------------
// Acoustic features: CSV with header utterance_id,speaker_id,emotion,f0..fN.
// column_offset skips extra non-feature columns between the metadata and the
// features (openSMILE-style exports); trailing columns beyond the feature
// count are rejected unless they are covered by the offset.
// ---------------------------------------------------------------------------

struct FeatureCsvOptions {
  std::size_t dim = kDefaultFeatureDim;
  std::size_t column_offset = 0;
};

struct FeatureBatch {
  std::vector<AcousticFeatureVector> rows;
  std::vector<BatchIssue> errors;
};

FeatureBatch read_features(const std::filesystem::path& path,
                           const FeatureCsvOptions& options = {});
void write_features(const std::filesystem::path& path,
                    std::span<const AcousticFeatureVector> rows);

// ---------------------------------------------------------------------------
// Scaling plans: JSON-Lines, one {utterance_id, plan fields} object per line.
// ---------------------------------------------------------------------------

struct PlanRecord {
  std::string utterance_id;
  RawScalingPlan plan;

  friend bool operator==(const PlanRecord&, const PlanRecord&) = default;
};

struct PlanBatch {
  std::vector<PlanRecord> records;
  std::vector<BatchIssue> errors;
};

std::string plan_record_to_json(const PlanRecord& record);
PlanRecord plan_record_from_json(std::string_view json_text);

PlanBatch read_plans(const std::filesystem::path& path);
void write_plans(const std::filesystem::path& path,
                 std::span<const PlanRecord> records);

// ---------------------------------------------------------------------------
// Rank models: versioned JSON, one model per file.
// ---------------------------------------------------------------------------

std::string model_to_json(const RankModel& model);
RankModel model_from_json(std::string_view json_text);

RankModel read_model(const std::filesystem::path& path);
void write_model(const std::filesystem::path& path, const RankModel& model);

// ---------------------------------------------------------------------------
// Annotations CSV: utterance_id,speaker,emotion,intensity,bucket.
// ---------------------------------------------------------------------------

void write_annotations(const std::filesystem::path& path,
                       const Annotations& annotations);
std::vector<AnnotationRow> read_annotations(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Cepstra: raw little-endian binary with a JSON sidecar {T, K, dtype} at
// <path>.json, or CSV (one frame per line) when no sidecar exists.
// ---------------------------------------------------------------------------

CepstraSequence read_cepstra(const std::filesystem::path& path);
void write_cepstra_binary(const std::filesystem::path& path,
                          const CepstraSequence& sequence,
                          std::string_view dtype = "float64");
void write_cepstra_csv(const std::filesystem::path& path,
                       const CepstraSequence& sequence);

// ---------------------------------------------------------------------------
// Evaluation inputs.
// ---------------------------------------------------------------------------

struct TranscriptRow {
  std::string utterance_id;
  std::string text;
};

std::vector<TranscriptRow> read_transcripts(const std::filesystem::path& path);

struct LabelRow {
  std::string utterance_id;
  std::string pred;
  std::string truth;
};

std::vector<LabelRow> read_labels(const std::filesystem::path& path);
std::vector<PirResponse> read_pir_responses(const std::filesystem::path& path);
std::vector<MosRating> read_mos_ratings(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Minimal RFC-4180 CSV: quoted fields, embedded commas/quotes/newlines.
// ---------------------------------------------------------------------------

std::string csv_field(std::string_view raw);

struct CsvRecord {
  std::size_t line = 0;  // 1-based line the record starts on
  std::vector<std::string> fields;
};

std::vector<CsvRecord> read_csv(const std::filesystem::path& path);

}  // namespace proso
