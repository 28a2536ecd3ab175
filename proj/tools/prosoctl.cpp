// prosoctl: command-line front end for the prosody-control toolkit.
//
// Subcommands: train-rank, annotate, prompt, scale, eval. Logs go to stderr;
// data goes to the named output files only.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <thread>

#include "proso/config.hpp"
#include "proso/formats.hpp"
#include "proso/metrics.hpp"
#include "proso/parallel.hpp"
#include "proso/prompt.hpp"
#include "proso/prosody.hpp"
#include "proso/rank.hpp"
#include "proso/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace proso;

namespace {

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  std::string provider = "stub";
  std::string prompt_control = "gl";
};

RunConfig effective_config(const GlobalOptions& opts) {
  RunConfig cfg = opts.config_path.empty() ? RunConfig{} : load_config(opts.config_path);
  if (opts.seed) cfg.rank.seed = *opts.seed;
  return cfg;
}

PromptMode parse_mode(const std::string& value) {
  if (value == "none") return PromptMode::None;
  if (value == "gl") return PromptMode::GlobalAndLocal;
  if (value == "local") return PromptMode::LocalOnly;
  throw ConfigError("--prompt-control must be one of none, gl, local (got '" + value + "')");
}

void log_issues(const std::string& what, const std::vector<BatchIssue>& issues) {
  for (const auto& issue : issues)
    std::cerr << "warning: " << what << " line " << issue.line << ": " << issue.message
              << "\n";
}

void log_warnings(const Warnings& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

std::string sanitize_filename(std::string name) {
  for (char& c : name)
    if (c == '/' || c == '\\' || c == ':' || c == ' ') c = '_';
  return name;
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write '" + path.string() + "'");
  out << text;
}

// ---------------------------------------------------------------------------
// train-rank
// ---------------------------------------------------------------------------

int cmd_train_rank(const GlobalOptions& opts, const std::string& features_csv,
                   const std::string& out_dir, std::optional<std::size_t> dim_flag,
                   std::size_t column_offset) {
  const RunConfig cfg = effective_config(opts);
  FeatureCsvOptions csv_options;
  csv_options.dim = dim_flag.value_or(cfg.rank.feature_dim);
  csv_options.column_offset = column_offset;

  const FeatureBatch batch = read_features(features_csv, csv_options);
  log_issues(features_csv, batch.errors);
  const auto& corpus = batch.rows;

  struct Candidate {
    std::string speaker;
    Emotion emotion;
  };
  std::set<std::pair<std::string, Emotion>> seen;
  for (const auto& row : corpus)
    if (row.emotion != Emotion::Neutral) seen.insert({row.speaker_id, row.emotion});
  std::vector<Candidate> candidates;
  for (const auto& [speaker, emotion] : seen) candidates.push_back({speaker, emotion});

  if (candidates.empty()) {
    std::cerr << "error: no emotional utterances in '" << features_csv << "'\n";
    return 1;
  }

  fs::create_directories(out_dir);

  struct Outcome {
    bool trained = false;
    std::string message;
    RankModel model;
  };
  std::vector<Outcome> outcomes(candidates.size());

  parallel_for(candidates.size(), opts.jobs, [&](std::size_t i) {
    const auto& c = candidates[i];
    try {
      const PairSet pairs =
          build_pairs(corpus, c.speaker, c.emotion, cfg.rank.hp.pair_limit, cfg.rank.seed);
      outcomes[i].model = train_rank(corpus, pairs, c.speaker, c.emotion, cfg.rank.hp);
      outcomes[i].trained = true;
    } catch (const TrainingError& e) {
      outcomes[i].message = e.what();
    }
  });

  std::ostringstream summary;
  summary << "speaker,emotion,ordered_pairs,similar_pairs,final_objective,iterations,"
             "converged,model_file\n";
  std::size_t trained = 0, skipped = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& c = candidates[i];
    auto& outcome = outcomes[i];
    if (!outcome.trained) {
      ++skipped;
      std::cerr << "warning: skipping (" << c.speaker << ", " << to_string(c.emotion)
                << "): " << outcome.message << "\n";
      continue;
    }
    ++trained;
    const std::string file =
        sanitize_filename(c.speaker) + "_" + to_string(c.emotion) + ".json";
    write_model(fs::path(out_dir) / file, outcome.model);
    summary << csv_field(c.speaker) << ',' << to_string(c.emotion) << ','
            << outcome.model.ordered_pairs << ',' << outcome.model.similar_pairs << ','
            << format_double(outcome.model.final_objective) << ','
            << outcome.model.iterations << ','
            << (outcome.model.converged ? "true" : "false") << ',' << file << "\n";
  }
  write_text_file(fs::path(out_dir) / "summary.csv", summary.str());

  std::cerr << "trained " << trained << " model(s), skipped " << skipped << "\n";
  if (trained == 0) {
    std::cerr << "error: no trainable (speaker, emotion) pairs\n";
    return 1;
  }
  return skipped > 0 ? 2 : 0;
}

// ---------------------------------------------------------------------------
// annotate
// ---------------------------------------------------------------------------

std::vector<RankModel> load_models(const std::string& models_dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(models_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<RankModel> models;
  for (const auto& file : files) {
    if (file.filename() == "summary.csv") continue;
    models.push_back(read_model(file));
  }
  return models;
}

int cmd_annotate(const GlobalOptions& opts, const std::string& features_csv,
                 const std::string& models_dir, const std::string& out_csv,
                 const std::string& neutral_under, std::optional<std::size_t> dim_flag,
                 std::size_t column_offset) {
  const RunConfig cfg = effective_config(opts);
  FeatureCsvOptions csv_options;
  csv_options.dim = dim_flag.value_or(cfg.rank.feature_dim);
  csv_options.column_offset = column_offset;

  const FeatureBatch batch = read_features(features_csv, csv_options);
  log_issues(features_csv, batch.errors);

  std::optional<Emotion> score_neutral;
  if (!neutral_under.empty()) {
    score_neutral = parse_emotion(neutral_under);
    if (!score_neutral) {
      std::cerr << "error: unknown emotion '" << neutral_under << "'\n";
      return 1;
    }
  }

  const auto models = load_models(models_dir);
  if (models.empty()) {
    std::cerr << "error: no model files in '" << models_dir << "'\n";
    return 1;
  }

  Annotations annotations = annotate_corpus(batch.rows, models, score_neutral);
  if (cfg.bucket.mode == "explicit")
    for (auto& row : annotations.rows)
      row.bucket = bucket(row.intensity, cfg.bucket.t_low, cfg.bucket.t_high);

  for (const auto& failure : annotations.errors)
    std::cerr << "warning: " << failure.utterance_id << ": " << failure.message << "\n";
  write_annotations(out_csv, annotations);
  std::cerr << "annotated " << annotations.rows.size() << " utterance(s), "
            << annotations.errors.size() << " error(s)\n";
  return 0;
}

// ---------------------------------------------------------------------------
// prompt
// ---------------------------------------------------------------------------

int cmd_prompt(const GlobalOptions& opts, const std::string& tracks_path,
               const std::string& out_plans, const std::string& emotion_flag,
               const std::string& annotations_path) {
  const RunConfig cfg = effective_config(opts);
  const PromptMode mode = parse_mode(opts.prompt_control);

  const TrackBatch batch = read_tracks(tracks_path);
  log_issues(tracks_path, batch.errors);
  const auto& tracks = batch.tracks;

  std::map<std::string, AnnotationRow> annotation_index;
  if (!annotations_path.empty())
    for (auto& row : read_annotations(annotations_path))
      annotation_index.emplace(row.utterance_id, row);

  std::optional<Emotion> default_emotion;
  if (!emotion_flag.empty()) {
    default_emotion = parse_emotion(emotion_flag);
    if (!default_emotion) {
      std::cerr << "error: unknown emotion '" << emotion_flag << "'\n";
      return 1;
    }
  }

  std::vector<PromptRequest> requests(tracks.size());
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    auto& req = requests[i];
    req.utterance_id = tracks[i].utterance_id;
    req.text = tracks[i].text;
    for (const auto& span : tracks[i].words) req.words.push_back(span.word);
    req.mode = mode;
    const auto ann = annotation_index.find(req.utterance_id);
    if (ann != annotation_index.end()) {
      req.target_emotion = ann->second.emotion;
      req.intensity_bucket = ann->second.bucket;
    } else if (default_emotion) {
      req.target_emotion = *default_emotion;
    } else if (mode != PromptMode::None) {
      std::cerr << "error: no target emotion for '" << req.utterance_id
                << "' (pass --emotion or --annotations)\n";
      return 1;
    }
  }

  const auto provider = make_provider(opts.provider, cfg.provider);
  const RawRanges ranges = cfg.raw_ranges();

  std::vector<PlanRecord> records(tracks.size());
  std::vector<Warnings> all_warnings(tracks.size());
  parallel_for(tracks.size(), opts.jobs, [&](std::size_t i) {
    PlanResult result = request_plan(requests[i], *provider, cfg.provider, ranges);
    records[i].utterance_id = requests[i].utterance_id;
    records[i].plan = std::move(result.plan);
    all_warnings[i] = std::move(result.warnings);
  });

  std::size_t degraded = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    log_warnings(all_warnings[i]);
    if (records[i].plan.degraded) {
      ++degraded;
      std::cerr << "warning: '" << records[i].utterance_id
                << "' fell back to the neutral plan\n";
    }
  }
  write_plans(out_plans, records);
  std::cerr << "wrote " << records.size() << " plan(s), " << degraded << " degraded\n";
  return 0;
}

// ---------------------------------------------------------------------------
// scale
// ---------------------------------------------------------------------------

int cmd_scale(const GlobalOptions& opts, const std::string& tracks_path,
              const std::string& plans_path, const std::string& out_tracks) {
  const RunConfig cfg = effective_config(opts);
  const PromptMode mode = parse_mode(opts.prompt_control);

  const TrackBatch batch = read_tracks(tracks_path);
  log_issues(tracks_path, batch.errors);
  const auto& tracks = batch.tracks;

  if (mode == PromptMode::None) {
    write_tracks(out_tracks, tracks);
    std::cerr << "copied " << tracks.size() << " track(s) unchanged\n";
    return 0;
  }

  const PlanBatch plans = read_plans(plans_path);
  log_issues(plans_path, plans.errors);
  std::map<std::string, const RawScalingPlan*> plan_index;
  for (const auto& record : plans.records)
    plan_index[record.utterance_id] = &record.plan;

  const ScalingMaps maps = cfg.scaling_maps();
  std::vector<ProsodyTrack> out(tracks.size());
  std::vector<Warnings> all_warnings(tracks.size());
  parallel_for(tracks.size(), opts.jobs, [&](std::size_t i) {
    const auto& track = tracks[i];
    const auto it = plan_index.find(track.utterance_id);
    if (it == plan_index.end())
      throw FormatError("no plan for utterance '" + track.utterance_id + "'");
    RawScalingPlan plan = *it->second;
    if (mode == PromptMode::LocalOnly) plan.global = ScaleTriple{};
    const MappedScalingPlan mapped = map_plan(plan, track.pitch_range, maps,
                                              track.words.size(), &all_warnings[i]);
    out[i] = apply_scaling(track, mapped, track.pitch_range, &all_warnings[i]);
  });

  for (const auto& warnings : all_warnings) log_warnings(warnings);
  write_tracks(out_tracks, out);
  std::cerr << "scaled " << out.size() << " track(s)\n";
  return 0;
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

json report_skeleton(const std::string& metric) {
  json report;
  report["schema_version"] = kReportSchemaVersion;
  report["metric"] = metric;
  return report;
}

void write_report(const std::string& out_json, const json& report) {
  write_text_file(out_json, report.dump(2) + "\n");
}

int eval_rates(const std::string& kind, const std::string& ref_path,
               const std::string& hyp_path, const std::string& out_json,
               const std::string& out_csv) {
  const auto refs = read_transcripts(ref_path);
  const auto hyps = read_transcripts(hyp_path);
  std::map<std::string, std::string> hyp_index;
  for (const auto& row : hyps) hyp_index[row.utterance_id] = row.text;

  json per_utterance = json::array();
  std::ostringstream csv;
  csv << "utterance_id,value\n";
  double sum = 0.0;
  std::size_t pooled_edits = 0, pooled_tokens = 0;
  for (const auto& ref : refs) {
    const auto it = hyp_index.find(ref.utterance_id);
    if (it == hyp_index.end())
      throw FormatError("no hypothesis for utterance '" + ref.utterance_id + "'");
    double value = 0.0;
    if (kind == "wer") {
      const auto r = word_tokens(ref.text);
      const auto h = word_tokens(it->second);
      value = wer(std::span<const std::string>(r), std::span<const std::string>(h));
      pooled_edits += edit_distance(std::span<const std::string>(r),
                                    std::span<const std::string>(h));
      pooled_tokens += r.size();
    } else {
      const auto r = char_tokens(ref.text);
      const auto h = char_tokens(it->second);
      value = cer(std::span<const std::uint32_t>(r), std::span<const std::uint32_t>(h));
      pooled_edits += edit_distance(std::span<const std::uint32_t>(r),
                                    std::span<const std::uint32_t>(h));
      pooled_tokens += r.size();
    }
    sum += value;
    per_utterance.push_back({{"utterance_id", ref.utterance_id}, {"value", value}});
    csv << csv_field(ref.utterance_id) << ',' << format_double(value) << "\n";
  }
  if (refs.empty()) throw FormatError("no reference transcripts");

  json report = report_skeleton(kind);
  report["per_utterance"] = std::move(per_utterance);
  report["aggregate"] = {{"mean", sum / double(refs.size())}, {"count", refs.size()}};
  report["pooled"] = {{"edits", pooled_edits},
                      {"reference_tokens", pooled_tokens},
                      {"rate", pooled_tokens ? double(pooled_edits) / double(pooled_tokens)
                                             : 0.0}};
  write_report(out_json, report);
  if (!out_csv.empty()) write_text_file(out_csv, csv.str());
  return 0;
}

int eval_mcd(const GlobalOptions& opts, const std::string& pairs_path,
             const std::string& out_json, const std::string& out_csv,
             std::optional<bool> include_c0, std::optional<bool> frame_sync) {
  const RunConfig cfg = effective_config(opts);
  McdOptions options;
  options.exclude_c0 = include_c0 ? !*include_c0 : cfg.metrics.mcd_exclude_c0;
  options.use_dtw = frame_sync ? !*frame_sync : cfg.metrics.mcd_dtw;

  const auto records = read_csv(pairs_path);
  if (records.size() < 2 || records.front().fields.size() != 3)
    throw FormatError("'" + pairs_path + "': expected header utterance_id,ref_path,hyp_path");
  const fs::path base = fs::path(pairs_path).parent_path();
  auto resolve = [&](const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path : base / path;
  };

  json per_utterance = json::array();
  std::ostringstream csv;
  csv << "utterance_id,value\n";
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& fields = records[r].fields;
    if (fields.size() != 3)
      throw FormatError("'" + pairs_path + "' line " + std::to_string(records[r].line) +
                        ": expected 3 columns");
    const auto ref = read_cepstra(resolve(fields[1]));
    const auto hyp = read_cepstra(resolve(fields[2]));
    const double value = mcd(ref, hyp, options);
    sum += value;
    ++count;
    per_utterance.push_back({{"utterance_id", fields[0]}, {"value", value}});
    csv << csv_field(fields[0]) << ',' << format_double(value) << "\n";
  }

  json report = report_skeleton("mcd");
  report["options"] = {{"exclude_c0", options.exclude_c0}, {"dtw", options.use_dtw}};
  report["per_utterance"] = std::move(per_utterance);
  report["aggregate"] = {{"mean", count ? sum / double(count) : 0.0}, {"count", count}};
  write_report(out_json, report);
  if (!out_csv.empty()) write_text_file(out_csv, csv.str());
  return 0;
}

int eval_eca(const std::string& labels_path, const std::string& out_json,
             const std::string& out_csv) {
  const auto labels = read_labels(labels_path);
  std::vector<std::string> pred, truth;
  for (const auto& row : labels) {
    pred.push_back(row.pred);
    truth.push_back(row.truth);
  }
  const double accuracy = classification_accuracy(pred, truth);

  json per_utterance = json::array();
  std::ostringstream csv;
  csv << "utterance_id,correct\n";
  for (const auto& row : labels) {
    const bool correct = row.pred == row.truth;
    per_utterance.push_back({{"utterance_id", row.utterance_id}, {"correct", correct}});
    csv << csv_field(row.utterance_id) << ',' << (correct ? 1 : 0) << "\n";
  }

  json report = report_skeleton("eca");
  report["per_utterance"] = std::move(per_utterance);
  report["aggregate"] = {{"accuracy", accuracy}, {"count", labels.size()}};
  write_report(out_json, report);
  if (!out_csv.empty()) write_text_file(out_csv, csv.str());
  return 0;
}

int eval_pir(const std::string& responses_path, const std::string& out_json,
             const std::string& out_csv) {
  const auto responses = read_pir_responses(responses_path);
  const PirReport pir = pir_confusion(responses);

  static const char* kLevels[3] = {"Low", "Medium", "High"};
  json confusion = json::array();
  std::ostringstream csv;
  csv << "annotated,perceived,count\n";
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      confusion.push_back({{"annotated", kLevels[i]},
                           {"perceived", kLevels[j]},
                           {"count", pir.confusion[i][j]}});
      csv << kLevels[i] << ',' << kLevels[j] << ',' << pir.confusion[i][j] << "\n";
    }

  json report = report_skeleton("pir");
  report["confusion"] = std::move(confusion);
  report["recall"] = {{"Low", pir.recall[0]},
                      {"Medium", pir.recall[1]},
                      {"High", pir.recall[2]}};
  report["aggregate"] = {{"accuracy", pir.accuracy}, {"count", pir.total}};
  write_report(out_json, report);
  if (!out_csv.empty()) write_text_file(out_csv, csv.str());
  return 0;
}

int eval_mos(const std::string& ratings_path, const std::string& out_json,
             const std::string& out_csv) {
  const auto ratings = read_mos_ratings(ratings_path);
  const auto groups = mos_aggregate(ratings);

  json conditions = json::array();
  std::ostringstream csv;
  csv << "condition,mean,ci95_halfwidth,count\n";
  for (const auto& g : groups) {
    conditions.push_back({{"condition", g.condition},
                          {"mean", g.mean},
                          {"ci95_halfwidth", g.ci95_halfwidth},
                          {"count", g.count}});
    csv << csv_field(g.condition) << ',' << format_double(g.mean) << ','
        << format_double(g.ci95_halfwidth) << ',' << g.count << "\n";
  }

  json report = report_skeleton("mos");
  report["conditions"] = std::move(conditions);
  report["aggregate"] = {{"count", ratings.size()}};
  write_report(out_json, report);
  if (!out_csv.empty()) write_text_file(out_csv, csv.str());
  return 0;
}

void print_version() {
  std::cout << "prosoctl " << kToolVersion << "\n"
            << "track schema " << kTrackSchemaVersion << ", model schema "
            << kModelSchemaVersion << ", plan schema " << kPlanSchemaVersion
            << ", report schema " << kReportSchemaVersion << ", prompt template "
            << kPromptTemplateVersion << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"prosody control toolkit: intensity rankers, LLM scaling plans, "
               "prosody scaling and evaluation"};
  app.fallthrough();
  app.require_subcommand(0, 1);

  GlobalOptions opts;
  app.add_option("--config", opts.config_path, "run configuration file");
  app.add_option("--seed", opts.seed, "override the configured RNG seed");
  app.add_option("--jobs", opts.jobs, "worker threads (default: logical CPUs)");
  app.add_option("--provider", opts.provider, "plan provider: http, stub, replay:<path>");
  app.add_option("--prompt-control", opts.prompt_control,
                 "prompt-control setting: none, gl, local");
  bool version = false;
  app.add_flag("--version", version, "print tool and schema versions");

  // train-rank
  auto* train = app.add_subcommand("train-rank", "train per-(speaker, emotion) intensity rankers");
  std::string features_csv, out_dir;
  std::optional<std::size_t> dim_flag;
  std::size_t column_offset = 0;
  train->add_option("features", features_csv, "feature CSV")->required();
  train->add_option("out_dir", out_dir, "output directory for model files")->required();
  train->add_option("--dim", dim_flag, "feature dimension (default from config)");
  train->add_option("--offset", column_offset, "non-feature columns between emotion and f0");

  // annotate
  auto* annotate = app.add_subcommand("annotate", "score a corpus with trained rankers");
  std::string ann_features, models_dir, ann_out, neutral_under;
  std::optional<std::size_t> ann_dim;
  std::size_t ann_offset = 0;
  annotate->add_option("features", ann_features, "feature CSV")->required();
  annotate->add_option("models", models_dir, "directory of model files")->required();
  annotate->add_option("out", ann_out, "output annotation CSV")->required();
  annotate->add_option("--neutral-under", neutral_under,
                       "also score neutral utterances with this emotion's model");
  annotate->add_option("--dim", ann_dim, "feature dimension (default from config)");
  annotate->add_option("--offset", ann_offset, "non-feature columns between emotion and f0");

  // prompt
  auto* prompt = app.add_subcommand("prompt", "request scaling plans for a track batch");
  std::string prompt_tracks, prompt_out, emotion_flag, annotations_path;
  prompt->add_option("tracks", prompt_tracks, "prosody track file (JSON or JSON-Lines)")
      ->required();
  prompt->add_option("out", prompt_out, "output plans (JSON-Lines)")->required();
  prompt->add_option("--emotion", emotion_flag, "target emotion for every utterance");
  prompt->add_option("--annotations", annotations_path,
                     "annotation CSV supplying per-utterance emotion and bucket");

  // scale
  auto* scale = app.add_subcommand("scale", "apply scaling plans to prosody tracks");
  std::string scale_tracks, scale_plans, scale_out;
  scale->add_option("tracks", scale_tracks, "prosody track file")->required();
  scale->add_option("plans", scale_plans, "plans JSON-Lines")->required();
  scale->add_option("out", scale_out, "output track file (JSON-Lines)")->required();

  // eval
  auto* eval = app.add_subcommand("eval", "compute evaluation metrics");
  std::string kind, ref_path, hyp_path, labels_path, responses_path, ratings_path;
  std::string pairs_path, out_json, out_csv;
  std::optional<bool> include_c0, frame_sync;
  eval->add_option("kind", kind, "metric: wer, cer, mcd, eca, pir, mos")->required();
  eval->add_option("--ref", ref_path, "reference transcripts CSV (wer/cer)");
  eval->add_option("--hyp", hyp_path, "hypothesis transcripts CSV (wer/cer)");
  eval->add_option("--pairs", pairs_path, "cepstra pair manifest CSV (mcd)");
  eval->add_option("--labels", labels_path, "label CSV utterance_id,pred,truth (eca)");
  eval->add_option("--responses", responses_path, "PIR response CSV (pir)");
  eval->add_option("--ratings", ratings_path, "MOS rating CSV (mos)");
  eval->add_option("--out", out_json, "output report JSON")->required();
  eval->add_option("--csv", out_csv, "optional plot-ready CSV");
  eval->add_flag("--include-c0,!--exclude-c0", include_c0, "include coefficient 0 in MCD");
  eval->add_flag("--frame-sync,!--dtw", frame_sync, "frame-synchronous MCD instead of DTW");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (version) {
    print_version();
    return 0;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return 1;
  }

  try {
    if (train->parsed())
      return cmd_train_rank(opts, features_csv, out_dir, dim_flag, column_offset);
    if (annotate->parsed())
      return cmd_annotate(opts, ann_features, models_dir, ann_out, neutral_under, ann_dim,
                          ann_offset);
    if (prompt->parsed())
      return cmd_prompt(opts, prompt_tracks, prompt_out, emotion_flag, annotations_path);
    if (scale->parsed()) return cmd_scale(opts, scale_tracks, scale_plans, scale_out);
    if (eval->parsed()) {
      if (kind == "wer" || kind == "cer") {
        if (ref_path.empty() || hyp_path.empty()) {
          std::cerr << "error: eval " << kind << " needs --ref and --hyp\n";
          return 1;
        }
        return eval_rates(kind, ref_path, hyp_path, out_json, out_csv);
      }
      if (kind == "mcd") {
        if (pairs_path.empty()) {
          std::cerr << "error: eval mcd needs --pairs\n";
          return 1;
        }
        return eval_mcd(opts, pairs_path, out_json, out_csv, include_c0, frame_sync);
      }
      if (kind == "eca") {
        if (labels_path.empty()) {
          std::cerr << "error: eval eca needs --labels\n";
          return 1;
        }
        return eval_eca(labels_path, out_json, out_csv);
      }
      if (kind == "pir") {
        if (responses_path.empty()) {
          std::cerr << "error: eval pir needs --responses\n";
          return 1;
        }
        return eval_pir(responses_path, out_json, out_csv);
      }
      if (kind == "mos") {
        if (ratings_path.empty()) {
          std::cerr << "error: eval mos needs --ratings\n";
          return 1;
        }
        return eval_mos(ratings_path, out_json, out_csv);
      }
      std::cerr << "error: unknown metric '" << kind << "'\n";
      return 1;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
