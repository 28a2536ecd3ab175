#include "proso/formats.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "proso/version.hpp"

namespace proso {

using nlohmann::json;

std::string format_double(double v) { return json(v).dump(); }

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write '" + path.string() + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw FormatError("short write to '" + path.string() + "'");
}

json parse_json(std::string_view text, const std::string& what) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw FormatError(what + ": malformed JSON");
  return doc;
}

// Absent versions are treated as current; a different number is rejected.
void check_schema_version(const json& doc, int expected, const std::string& what) {
  if (!doc.contains("schema_version")) return;
  const json& v = doc.at("schema_version");
  if (!v.is_number_integer() || v.get<int>() != expected)
    throw FormatError(what + ": unsupported schema_version " + v.dump() + " (expected " +
                      std::to_string(expected) + ")");
}

double require_number(const json& doc, const char* key, const std::string& what) {
  if (!doc.contains(key) || !doc.at(key).is_number())
    throw FormatError(what + ": missing numeric field '" + std::string(key) + "'");
  return doc.at(key).get<double>();
}

std::string require_string(const json& doc, const char* key, const std::string& what) {
  if (!doc.contains(key) || !doc.at(key).is_string())
    throw FormatError(what + ": missing string field '" + std::string(key) + "'");
  return doc.at(key).get<std::string>();
}

// Runs `parse` on every non-empty line, collecting failures into `errors`.
template <class Parse, class Out>
void for_each_jsonl(const std::string& text, std::vector<BatchIssue>& errors,
                    Parse parse, Out out) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::size_t end = nl == std::string::npos ? text.size() : nl;
    std::string_view line(text.data() + pos, end - pos);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) {
      try {
        out(parse(line));
      } catch (const Error& e) {
        errors.push_back({line_no, e.what()});
      }
    }
    if (nl == std::string::npos) break;
    pos = nl + 1;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Prosody tracks
// ---------------------------------------------------------------------------

std::string track_to_json(const ProsodyTrack& track) {
  json doc;
  doc["schema_version"] = kTrackSchemaVersion;
  doc["utterance_id"] = track.utterance_id;
  doc["text"] = track.text;
  json phonemes = json::array();
  for (const auto& p : track.phonemes)
    phonemes.push_back({{"symbol", p.symbol},
                        {"duration", p.duration},
                        {"energy", p.energy},
                        {"pitch", p.pitch}});
  doc["phonemes"] = std::move(phonemes);
  json words = json::array();
  for (const auto& w : track.words)
    words.push_back({{"word", w.word}, {"first", w.first}, {"last", w.last}});
  doc["words"] = std::move(words);
  doc["pitch_range"] = {{"min", track.pitch_range.min}, {"max", track.pitch_range.max}};
  return doc.dump();
}

ProsodyTrack track_from_json(std::string_view json_text) {
  const json doc = parse_json(json_text, "track");
  check_schema_version(doc, kTrackSchemaVersion, "track");

  ProsodyTrack track;
  track.utterance_id = require_string(doc, "utterance_id", "track");
  track.text = require_string(doc, "text", "track");
  if (!doc.contains("phonemes") || !doc.at("phonemes").is_array())
    throw FormatError("track '" + track.utterance_id + "': missing 'phonemes' array");
  for (const json& p : doc.at("phonemes")) {
    PhonemeProsody phoneme;
    phoneme.symbol = require_string(p, "symbol", "phoneme");
    phoneme.duration = require_number(p, "duration", "phoneme");
    phoneme.energy = require_number(p, "energy", "phoneme");
    phoneme.pitch = require_number(p, "pitch", "phoneme");
    track.phonemes.push_back(std::move(phoneme));
  }
  if (!doc.contains("words") || !doc.at("words").is_array())
    throw FormatError("track '" + track.utterance_id + "': missing 'words' array");
  for (const json& w : doc.at("words")) {
    WordSpan span;
    span.word = require_string(w, "word", "word span");
    span.first = static_cast<std::size_t>(require_number(w, "first", "word span"));
    span.last = static_cast<std::size_t>(require_number(w, "last", "word span"));
    track.words.push_back(std::move(span));
  }
  if (!doc.contains("pitch_range") || !doc.at("pitch_range").is_object())
    throw FormatError("track '" + track.utterance_id + "': missing 'pitch_range'");
  track.pitch_range.min = require_number(doc.at("pitch_range"), "min", "pitch_range");
  track.pitch_range.max = require_number(doc.at("pitch_range"), "max", "pitch_range");

  validate_track(track);
  return track;
}

ProsodyTrack read_track(const std::filesystem::path& path) {
  return track_from_json(read_file(path));
}

void write_track(const std::filesystem::path& path, const ProsodyTrack& track) {
  write_file(path, track_to_json(track) + "\n");
}

TrackBatch read_tracks(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  TrackBatch batch;

  // A file that parses whole is a single-utterance file; otherwise JSON-Lines.
  json whole = json::parse(text, nullptr, false);
  if (!whole.is_discarded() && whole.is_object()) {
    try {
      batch.tracks.push_back(track_from_json(text));
    } catch (const Error& e) {
      batch.errors.push_back({1, e.what()});
    }
    return batch;
  }

  for_each_jsonl(
      text, batch.errors, [](std::string_view line) { return track_from_json(line); },
      [&](ProsodyTrack&& t) { batch.tracks.push_back(std::move(t)); });
  return batch;
}

void write_tracks(const std::filesystem::path& path,
                  std::span<const ProsodyTrack> tracks) {
  std::string out;
  for (const auto& t : tracks) {
    out += track_to_json(t);
    out += '\n';
  }
  write_file(path, out);
}

// ---------------------------------------------------------------------------
// CSV primitives
// ---------------------------------------------------------------------------

std::string csv_field(std::string_view raw) {
  const bool needs_quotes = raw.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!needs_quotes) return std::string(raw);
  std::string out = "\"";
  for (char c : raw) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<CsvRecord> read_csv(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::vector<CsvRecord> records;
  CsvRecord current;
  current.line = 1;
  std::string field;
  bool in_quotes = false;
  bool record_has_content = false;
  std::size_t line_no = 1;

  auto end_field = [&] {
    current.fields.push_back(std::move(field));
    field.clear();
  };
  auto end_record = [&] {
    if (record_has_content || !current.fields.empty() || !field.empty()) {
      end_field();
      records.push_back(std::move(current));
    }
    current = CsvRecord{};
    current.line = line_no;
    record_has_content = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line_no;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        record_has_content = true;
        break;
      case ',':
        end_field();
        record_has_content = true;
        break;
      case '\r':
        break;
      case '\n':
        ++line_no;
        end_record();
        break;
      default:
        field += c;
        record_has_content = true;
        break;
    }
  }
  if (in_quotes) throw FormatError("'" + path.string() + "': unterminated quoted field");
  end_record();
  return records;
}

// ---------------------------------------------------------------------------
// Acoustic features
// ---------------------------------------------------------------------------

FeatureBatch read_features(const std::filesystem::path& path,
                           const FeatureCsvOptions& options) {
  const auto records = read_csv(path);
  if (records.empty()) throw FormatError("'" + path.string() + "': empty feature file");

  const auto& header = records.front().fields;
  if (header.size() < 3 || header[0] != "utterance_id" || header[1] != "speaker_id" ||
      header[2] != "emotion")
    throw FormatError("'" + path.string() +
                      "': header must start with utterance_id,speaker_id,emotion");
  const std::size_t expected_cols = 3 + options.column_offset + options.dim;
  if (header.size() != expected_cols)
    throw FormatError("'" + path.string() + "': header has " +
                      std::to_string(header.size()) + " columns, expected " +
                      std::to_string(expected_cols) + " (dim " + std::to_string(options.dim) +
                      ", offset " + std::to_string(options.column_offset) + ")");

  FeatureBatch batch;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& record = records[r];
    try {
      if (record.fields.size() != expected_cols)
        throw FormatError("row has " + std::to_string(record.fields.size()) +
                          " columns, expected " + std::to_string(expected_cols));
      AcousticFeatureVector row;
      row.utterance_id = record.fields[0];
      row.speaker_id = record.fields[1];
      const auto emotion = parse_emotion(record.fields[2]);
      if (!emotion) throw FormatError("unknown emotion '" + record.fields[2] + "'");
      row.emotion = *emotion;
      row.features.reserve(options.dim);
      for (std::size_t k = 0; k < options.dim; ++k) {
        const std::string& cell = record.fields[3 + options.column_offset + k];
        std::size_t used = 0;
        double v = 0.0;
        try {
          v = std::stod(cell, &used);
        } catch (...) {
          throw FormatError("feature f" + std::to_string(k) + " is not a number: '" + cell + "'");
        }
        if (used != cell.size() || !std::isfinite(v))
          throw FormatError("feature f" + std::to_string(k) + " is not a finite number: '" +
                            cell + "'");
        row.features.push_back(v);
      }
      batch.rows.push_back(std::move(row));
    } catch (const Error& e) {
      batch.errors.push_back({record.line, e.what()});
    }
  }
  return batch;
}

void write_features(const std::filesystem::path& path,
                    std::span<const AcousticFeatureVector> rows) {
  std::ostringstream out;
  const std::size_t dim = rows.empty() ? kDefaultFeatureDim : rows.front().features.size();
  out << "utterance_id,speaker_id,emotion";
  for (std::size_t k = 0; k < dim; ++k) out << ",f" << k;
  out << "\n";
  for (const auto& row : rows) {
    out << csv_field(row.utterance_id) << ',' << csv_field(row.speaker_id) << ','
        << to_string(row.emotion);
    for (double v : row.features) out << ',' << format_double(v);
    out << "\n";
  }
  write_file(path, out.str());
}

// ---------------------------------------------------------------------------
// Scaling plans
// ---------------------------------------------------------------------------

namespace {

json triple_to_json(const ScaleTriple& t) {
  return {{"pitch", t.pitch}, {"energy", t.energy}, {"duration", t.duration}};
}

ScaleTriple triple_from_json(const json& doc, const std::string& what) {
  ScaleTriple t;
  t.pitch = require_number(doc, "pitch", what);
  t.energy = require_number(doc, "energy", what);
  t.duration = require_number(doc, "duration", what);
  return t;
}

}  // namespace

std::string plan_record_to_json(const PlanRecord& record) {
  json doc;
  doc["schema_version"] = kPlanSchemaVersion;
  doc["utterance_id"] = record.utterance_id;
  doc["degraded"] = record.plan.degraded;
  doc["global"] = triple_to_json(record.plan.global);
  json words = json::array();
  for (const auto& t : record.plan.words) words.push_back(triple_to_json(t));
  doc["words"] = std::move(words);
  if (!record.plan.rationale.empty()) doc["rationale"] = record.plan.rationale;
  return doc.dump();
}

PlanRecord plan_record_from_json(std::string_view json_text) {
  const json doc = parse_json(json_text, "plan");
  check_schema_version(doc, kPlanSchemaVersion, "plan");
  PlanRecord record;
  record.utterance_id = require_string(doc, "utterance_id", "plan");
  record.plan.degraded = doc.value("degraded", false);
  record.plan.rationale = doc.value("rationale", std::string());
  if (!doc.contains("global"))
    throw FormatError("plan '" + record.utterance_id + "': missing 'global'");
  record.plan.global = triple_from_json(doc.at("global"), "plan global");
  if (!doc.contains("words") || !doc.at("words").is_array())
    throw FormatError("plan '" + record.utterance_id + "': missing 'words' array");
  for (const json& w : doc.at("words"))
    record.plan.words.push_back(triple_from_json(w, "plan word"));
  return record;
}

PlanBatch read_plans(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  PlanBatch batch;
  for_each_jsonl(
      text, batch.errors,
      [](std::string_view line) { return plan_record_from_json(line); },
      [&](PlanRecord&& r) { batch.records.push_back(std::move(r)); });
  return batch;
}

void write_plans(const std::filesystem::path& path,
                 std::span<const PlanRecord> records) {
  std::string out;
  for (const auto& r : records) {
    out += plan_record_to_json(r);
    out += '\n';
  }
  write_file(path, out);
}

// ---------------------------------------------------------------------------
// Rank models
// ---------------------------------------------------------------------------

std::string model_to_json(const RankModel& model) {
  json doc;
  doc["schema_version"] = kModelSchemaVersion;
  doc["speaker"] = model.speaker_id;
  doc["emotion"] = to_string(model.emotion);
  doc["W"] = model.weights;
  doc["mean"] = model.feature_mean;
  doc["std"] = model.feature_std;
  doc["score_min"] = model.score_min;
  doc["score_max"] = model.score_max;
  doc["hyperparams"] = {{"C", model.hyperparams.C},
                        {"tol", model.hyperparams.tol},
                        {"max_iter", model.hyperparams.max_iter},
                        {"pair_limit", model.hyperparams.pair_limit}};
  doc["metadata"] = {{"ordered_pairs", model.ordered_pairs},
                     {"similar_pairs", model.similar_pairs},
                     {"final_objective", model.final_objective},
                     {"iterations", model.iterations},
                     {"converged", model.converged},
                     {"bucket_low", model.bucket_low},
                     {"bucket_high", model.bucket_high}};
  return doc.dump();
}

RankModel model_from_json(std::string_view json_text) {
  const json doc = parse_json(json_text, "model");
  check_schema_version(doc, kModelSchemaVersion, "model");

  RankModel model;
  model.speaker_id = require_string(doc, "speaker", "model");
  const auto emotion = parse_emotion(require_string(doc, "emotion", "model"));
  if (!emotion) throw FormatError("model: unknown emotion");
  model.emotion = *emotion;

  auto read_vector = [&](const char* key) {
    if (!doc.contains(key) || !doc.at(key).is_array())
      throw FormatError("model: missing array field '" + std::string(key) + "'");
    return doc.at(key).get<std::vector<double>>();
  };
  model.weights = read_vector("W");
  model.feature_mean = read_vector("mean");
  model.feature_std = read_vector("std");
  if (model.feature_mean.size() != model.weights.size() ||
      model.feature_std.size() != model.weights.size())
    throw FormatError("model: W/mean/std lengths differ");
  for (double s : model.feature_std)
    if (!(s > 0.0)) throw FormatError("model: std entries must be positive");

  model.score_min = require_number(doc, "score_min", "model");
  model.score_max = require_number(doc, "score_max", "model");
  if (!(model.score_min < model.score_max))
    throw FormatError("model: score_min must be below score_max");

  const json hp = doc.value("hyperparams", json::object());
  model.hyperparams.C = hp.value("C", model.hyperparams.C);
  model.hyperparams.tol = hp.value("tol", model.hyperparams.tol);
  model.hyperparams.max_iter = hp.value("max_iter", model.hyperparams.max_iter);
  model.hyperparams.pair_limit = hp.value("pair_limit", model.hyperparams.pair_limit);

  const json meta = doc.value("metadata", json::object());
  model.ordered_pairs = meta.value("ordered_pairs", std::size_t{0});
  model.similar_pairs = meta.value("similar_pairs", std::size_t{0});
  model.final_objective = meta.value("final_objective", 0.0);
  model.iterations = meta.value("iterations", 0);
  model.converged = meta.value("converged", false);
  model.bucket_low = meta.value("bucket_low", 1.0 / 3.0);
  model.bucket_high = meta.value("bucket_high", 2.0 / 3.0);
  return model;
}

RankModel read_model(const std::filesystem::path& path) {
  try {
    return model_from_json(read_file(path));
  } catch (const FormatError& e) {
    throw FormatError("'" + path.string() + "': " + e.what());
  }
}

void write_model(const std::filesystem::path& path, const RankModel& model) {
  write_file(path, model_to_json(model) + "\n");
}

// ---------------------------------------------------------------------------
// Annotations
// ---------------------------------------------------------------------------

void write_annotations(const std::filesystem::path& path,
                       const Annotations& annotations) {
  std::ostringstream out;
  out << "utterance_id,speaker,emotion,intensity,bucket\n";
  for (const auto& row : annotations.rows)
    out << csv_field(row.utterance_id) << ',' << csv_field(row.speaker_id) << ','
        << to_string(row.emotion) << ',' << format_double(row.intensity) << ','
        << to_string(row.bucket) << "\n";
  write_file(path, out.str());
}

std::vector<AnnotationRow> read_annotations(const std::filesystem::path& path) {
  const auto records = read_csv(path);
  if (records.empty()) throw FormatError("'" + path.string() + "': empty annotation file");
  std::vector<AnnotationRow> rows;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& fields = records[r].fields;
    if (fields.size() != 5)
      throw FormatError("'" + path.string() + "' line " + std::to_string(records[r].line) +
                        ": expected 5 columns");
    AnnotationRow row;
    row.utterance_id = fields[0];
    row.speaker_id = fields[1];
    const auto emotion = parse_emotion(fields[2]);
    const auto b = parse_bucket(fields[4]);
    if (!emotion || !b)
      throw FormatError("'" + path.string() + "' line " + std::to_string(records[r].line) +
                        ": bad emotion or bucket");
    row.emotion = *emotion;
    row.bucket = *b;
    row.intensity = std::stod(fields[3]);
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Cepstra
// ---------------------------------------------------------------------------

CepstraSequence read_cepstra(const std::filesystem::path& path) {
  CepstraSequence seq;
  seq.utterance_id = path.stem().string();

  const std::filesystem::path sidecar = path.string() + ".json";
  if (std::filesystem::exists(sidecar)) {
    const json meta = parse_json(read_file(sidecar), "cepstra sidecar");
    const auto frames = static_cast<std::size_t>(require_number(meta, "T", "cepstra sidecar"));
    const auto coeffs = static_cast<std::size_t>(require_number(meta, "K", "cepstra sidecar"));
    const std::string dtype = meta.value("dtype", "float64");
    const std::string raw = read_file(path);
    seq.num_coeffs = coeffs;
    seq.values.resize(frames * coeffs);
    if (dtype == "float64") {
      if (raw.size() != frames * coeffs * sizeof(double))
        throw FormatError("'" + path.string() + "': size does not match sidecar");
      std::memcpy(seq.values.data(), raw.data(), raw.size());
    } else if (dtype == "float32") {
      if (raw.size() != frames * coeffs * sizeof(float))
        throw FormatError("'" + path.string() + "': size does not match sidecar");
      std::vector<float> tmp(frames * coeffs);
      std::memcpy(tmp.data(), raw.data(), raw.size());
      for (std::size_t i = 0; i < tmp.size(); ++i) seq.values[i] = double(tmp[i]);
    } else {
      throw FormatError("cepstra sidecar: unsupported dtype '" + dtype + "'");
    }
    return seq;
  }

  // CSV: one frame per line.
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> frame;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      try {
        frame.push_back(std::stod(cell));
      } catch (...) {
        throw FormatError("'" + path.string() + "' line " + std::to_string(line_no) +
                          ": bad number '" + cell + "'");
      }
    }
    if (seq.num_coeffs == 0) seq.num_coeffs = frame.size();
    if (frame.size() != seq.num_coeffs)
      throw FormatError("'" + path.string() + "' line " + std::to_string(line_no) +
                        ": ragged row");
    seq.values.insert(seq.values.end(), frame.begin(), frame.end());
  }
  return seq;
}

void write_cepstra_binary(const std::filesystem::path& path,
                          const CepstraSequence& sequence, std::string_view dtype) {
  json meta;
  meta["T"] = sequence.num_frames();
  meta["K"] = sequence.num_coeffs;
  meta["dtype"] = std::string(dtype);
  if (dtype == "float64") {
    write_file(path, std::string(reinterpret_cast<const char*>(sequence.values.data()),
                                 sequence.values.size() * sizeof(double)));
  } else if (dtype == "float32") {
    std::vector<float> tmp(sequence.values.begin(), sequence.values.end());
    write_file(path, std::string(reinterpret_cast<const char*>(tmp.data()),
                                 tmp.size() * sizeof(float)));
  } else {
    throw FormatError("unsupported cepstra dtype '" + std::string(dtype) + "'");
  }
  write_file(std::filesystem::path(path.string() + ".json"), meta.dump() + "\n");
}

void write_cepstra_csv(const std::filesystem::path& path,
                       const CepstraSequence& sequence) {
  std::ostringstream out;
  for (std::size_t t = 0; t < sequence.num_frames(); ++t) {
    for (std::size_t k = 0; k < sequence.num_coeffs; ++k) {
      if (k) out << ',';
      out << format_double(sequence.at(t, k));
    }
    out << "\n";
  }
  write_file(path, out.str());
}

// ---------------------------------------------------------------------------
// Evaluation inputs
// ---------------------------------------------------------------------------

namespace {

std::vector<CsvRecord> read_table(const std::filesystem::path& path,
                                  std::size_t columns, const char* expected_header) {
  auto records = read_csv(path);
  if (records.empty()) throw FormatError("'" + path.string() + "': empty file");
  for (const auto& record : records)
    if (record.fields.size() != columns)
      throw FormatError("'" + path.string() + "' line " + std::to_string(record.line) +
                        ": expected " + std::to_string(columns) + " columns (header: " +
                        expected_header + ")");
  return records;
}

}  // namespace

std::vector<TranscriptRow> read_transcripts(const std::filesystem::path& path) {
  const auto records = read_table(path, 2, "utterance_id,text");
  std::vector<TranscriptRow> rows;
  for (std::size_t r = 1; r < records.size(); ++r)
    rows.push_back({records[r].fields[0], records[r].fields[1]});
  return rows;
}

std::vector<LabelRow> read_labels(const std::filesystem::path& path) {
  const auto records = read_table(path, 3, "utterance_id,pred,truth");
  std::vector<LabelRow> rows;
  for (std::size_t r = 1; r < records.size(); ++r)
    rows.push_back({records[r].fields[0], records[r].fields[1], records[r].fields[2]});
  return rows;
}

std::vector<PirResponse> read_pir_responses(const std::filesystem::path& path) {
  const auto records = read_table(path, 4, "rater_id,utterance_id,annotated,perceived");
  std::vector<PirResponse> rows;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& f = records[r].fields;
    const auto annotated = parse_bucket(f[2]);
    const auto perceived = parse_bucket(f[3]);
    if (!annotated || !perceived)
      throw FormatError("'" + path.string() + "' line " + std::to_string(records[r].line) +
                        ": bad intensity level");
    rows.push_back({f[0], f[1], *annotated, *perceived});
  }
  return rows;
}

std::vector<MosRating> read_mos_ratings(const std::filesystem::path& path) {
  const auto records = read_table(path, 4, "rater_id,utterance_id,condition,score");
  std::vector<MosRating> rows;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& f = records[r].fields;
    double v = 0.0;
    try {
      v = std::stod(f[3]);
    } catch (...) {
      throw FormatError("'" + path.string() + "' line " + std::to_string(records[r].line) +
                        ": bad score '" + f[3] + "'");
    }
    rows.push_back({f[0], f[1], f[2], v});
  }
  return rows;
}

}  // namespace proso
