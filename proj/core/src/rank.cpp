#include "proso/rank.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

namespace proso {

namespace {

std::string pair_key(std::string_view speaker, Emotion emotion) {
  std::ostringstream os;
  os << "(" << speaker << ", " << to_string(emotion) << ")";
  return os.str();
}

// Deterministic Fisher-Yates; std::shuffle's draw pattern is not pinned by
// the standard, this one is.
template <class T>
void shuffle_deterministic(std::vector<T>& items, std::mt19937_64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(items[i - 1], items[j]);
  }
}

template <class T>
void subsample(std::vector<T>& items, std::size_t limit, std::mt19937_64& rng) {
  if (items.size() <= limit) return;
  shuffle_deterministic(items, rng);
  items.resize(limit);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Solves A x = rhs for symmetric positive definite A (row-major n x n).
// Returns false when a pivot collapses.
bool cholesky_solve(std::vector<double>& a, std::vector<double>& rhs, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j * n + j];
    for (std::size_t k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
    if (!(d > 0.0) || !std::isfinite(d)) return false;
    const double l = std::sqrt(d);
    a[j * n + j] = l;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = s / l;
    }
  }
  // forward: L y = rhs
  for (std::size_t i = 0; i < n; ++i) {
    double s = rhs[i];
    for (std::size_t k = 0; k < i; ++k) s -= a[i * n + k] * rhs[k];
    rhs[i] = s / a[i * n + i];
  }
  // backward: L^T x = y
  for (std::size_t ii = n; ii > 0; --ii) {
    const std::size_t i = ii - 1;
    double s = rhs[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[k * n + i] * rhs[k];
    rhs[i] = s / a[i * n + i];
  }
  return true;
}

struct DiffSet {
  std::size_t dim = 0;
  std::vector<double> ordered;  // row-major, one standardized difference per ordered pair
  std::vector<double> similar;

  std::span<const double> ordered_row(std::size_t r) const {
    return {ordered.data() + r * dim, dim};
  }
  std::span<const double> similar_row(std::size_t r) const {
    return {similar.data() + r * dim, dim};
  }
  std::size_t ordered_count() const { return dim == 0 ? 0 : ordered.size() / dim; }
  std::size_t similar_count() const { return dim == 0 ? 0 : similar.size() / dim; }
};

// 0.5|W|^2 + C [ sum max(0, 1 - W.d_o)^2 + sum (W.d_s)^2 ]
double objective(const DiffSet& d, double C, std::span<const double> w) {
  double f = 0.5 * dot(w, w);
  for (std::size_t r = 0; r < d.ordered_count(); ++r) {
    const double m = 1.0 - dot(w, d.ordered_row(r));
    if (m > 0.0) f += C * m * m;
  }
  for (std::size_t r = 0; r < d.similar_count(); ++r) {
    const double s = dot(w, d.similar_row(r));
    f += C * s * s;
  }
  return f;
}

void gradient(const DiffSet& d, double C, std::span<const double> w,
              std::vector<double>& g) {
  g.assign(w.begin(), w.end());
  for (std::size_t r = 0; r < d.ordered_count(); ++r) {
    const auto row = d.ordered_row(r);
    const double m = 1.0 - dot(w, row);
    if (m > 0.0)
      for (std::size_t k = 0; k < row.size(); ++k) g[k] -= 2.0 * C * m * row[k];
  }
  for (std::size_t r = 0; r < d.similar_count(); ++r) {
    const auto row = d.similar_row(r);
    const double s = dot(w, row);
    for (std::size_t k = 0; k < row.size(); ++k) g[k] += 2.0 * C * s * row[k];
  }
}

// Generalized Hessian: I + 2C (sum_active d d^T + sum_similar d d^T).
void hessian(const DiffSet& d, double C, std::span<const double> w,
             std::vector<double>& h) {
  const std::size_t n = d.dim;
  h.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) h[i * n + i] = 1.0;
  auto accumulate = [&](std::span<const double> row) {
    for (std::size_t i = 0; i < n; ++i) {
      const double ri = 2.0 * C * row[i];
      for (std::size_t j = 0; j <= i; ++j) h[i * n + j] += ri * row[j];
    }
  };
  for (std::size_t r = 0; r < d.ordered_count(); ++r) {
    const auto row = d.ordered_row(r);
    if (1.0 - dot(w, row) > 0.0) accumulate(row);
  }
  for (std::size_t r = 0; r < d.similar_count(); ++r) accumulate(d.similar_row(r));
  // mirror the lower triangle
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) h[i * n + j] = h[j * n + i];
}

double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

}  // namespace

PairSet build_pairs(std::span<const AcousticFeatureVector> corpus,
                    std::string_view speaker, Emotion emotion, std::size_t limit,
                    std::uint64_t seed) {
  std::vector<std::size_t> emotional;
  std::vector<std::size_t> neutral;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (corpus[i].speaker_id != speaker) continue;
    if (corpus[i].emotion == emotion) emotional.push_back(i);
    else if (corpus[i].emotion == Emotion::Neutral) neutral.push_back(i);
  }
  if (emotional.empty() || neutral.empty())
    throw TrainingError("no " + std::string(emotional.empty() ? "emotional" : "neutral") +
                        " utterances for " + pair_key(speaker, emotion));

  PairSet pairs;
  pairs.ordered.reserve(emotional.size() * neutral.size());
  for (std::size_t e : emotional)
    for (std::size_t n : neutral) pairs.ordered.emplace_back(e, n);
  for (std::size_t i = 0; i < neutral.size(); ++i)
    for (std::size_t j = i + 1; j < neutral.size(); ++j)
      pairs.similar.emplace_back(neutral[i], neutral[j]);
  for (std::size_t i = 0; i < emotional.size(); ++i)
    for (std::size_t j = i + 1; j < emotional.size(); ++j)
      pairs.similar.emplace_back(emotional[i], emotional[j]);

  std::mt19937_64 rng(seed);
  subsample(pairs.ordered, limit, rng);
  subsample(pairs.similar, limit, rng);
  return pairs;
}

RankModel train_rank(std::span<const AcousticFeatureVector> corpus,
                     const PairSet& pairs, std::string_view speaker,
                     Emotion emotion, const RankHyperparams& hp) {
  if (pairs.ordered.empty())
    throw TrainingError("empty ordered pair set for " + pair_key(speaker, emotion));

  // Standardization statistics come from the model's own training
  // utterances: this speaker's target-emotion and neutral recordings.
  std::vector<std::size_t> training;
  for (std::size_t i = 0; i < corpus.size(); ++i)
    if (corpus[i].speaker_id == speaker &&
        (corpus[i].emotion == emotion || corpus[i].emotion == Emotion::Neutral))
      training.push_back(i);
  if (training.empty())
    throw TrainingError("no training utterances for " + pair_key(speaker, emotion));

  const std::size_t dim = corpus[training.front()].features.size();
  for (std::size_t i : training)
    if (corpus[i].features.size() != dim)
      throw DimensionError("feature length mismatch at utterance '" +
                           corpus[i].utterance_id + "'");

  RankModel model;
  model.speaker_id = std::string(speaker);
  model.emotion = emotion;
  model.hyperparams = hp;
  model.feature_mean.assign(dim, 0.0);
  model.feature_std.assign(dim, 0.0);

  for (std::size_t i : training)
    for (std::size_t k = 0; k < dim; ++k) model.feature_mean[k] += corpus[i].features[k];
  for (std::size_t k = 0; k < dim; ++k) model.feature_mean[k] /= double(training.size());
  for (std::size_t i : training)
    for (std::size_t k = 0; k < dim; ++k) {
      const double d = corpus[i].features[k] - model.feature_mean[k];
      model.feature_std[k] += d * d;
    }
  for (std::size_t k = 0; k < dim; ++k) {
    model.feature_std[k] = std::sqrt(model.feature_std[k] / double(training.size()));
    if (model.feature_std[k] <= 0.0) model.feature_std[k] = 1.0;
  }

  auto standardized = [&](std::size_t idx, std::vector<double>& out) {
    const auto& f = corpus[idx].features;
    if (f.size() != dim)
      throw DimensionError("feature length mismatch at utterance '" +
                           corpus[idx].utterance_id + "'");
    out.resize(dim);
    for (std::size_t k = 0; k < dim; ++k)
      out[k] = (f[k] - model.feature_mean[k]) / model.feature_std[k];
  };

  DiffSet diffs;
  diffs.dim = dim;
  std::vector<double> hi, lo;
  diffs.ordered.reserve(pairs.ordered.size() * dim);
  for (const auto& [h, l] : pairs.ordered) {
    standardized(h, hi);
    standardized(l, lo);
    for (std::size_t k = 0; k < dim; ++k) diffs.ordered.push_back(hi[k] - lo[k]);
  }
  diffs.similar.reserve(pairs.similar.size() * dim);
  for (const auto& [i, j] : pairs.similar) {
    standardized(i, hi);
    standardized(j, lo);
    for (std::size_t k = 0; k < dim; ++k) diffs.similar.push_back(hi[k] - lo[k]);
  }

  // Damped Newton on the convex piecewise-quadratic objective; the Newton
  // system falls back to a plain gradient step when the factorization or the
  // line search gives out.
  std::vector<double> w(dim, 0.0);
  std::vector<double> g, h, step, trial(dim);
  double f = objective(diffs, hp.C, w);
  if (!std::isfinite(f)) throw NumericalError("objective is not finite at W = 0");

  int iter = 0;
  bool converged = false;
  constexpr double kArmijo = 1e-4;
  while (iter < hp.max_iter) {
    gradient(diffs, hp.C, w, g);
    const double gnorm = norm2(g);
    if (!std::isfinite(gnorm))
      throw NumericalError("gradient is not finite for " + pair_key(speaker, emotion));
    if (gnorm <= hp.tol) {
      converged = true;
      break;
    }
    ++iter;

    hessian(diffs, hp.C, w, h);
    step.assign(g.begin(), g.end());
    for (auto& v : step) v = -v;
    std::vector<double> h_factor = h;
    bool have_newton = cholesky_solve(h_factor, step, dim);

    auto line_search = [&](const std::vector<double>& direction) {
      const double slope = dot(g, direction);
      if (slope >= 0.0) return false;
      double t = 1.0;
      for (int back = 0; back < 60; ++back) {
        for (std::size_t k = 0; k < dim; ++k) trial[k] = w[k] + t * direction[k];
        const double ft = objective(diffs, hp.C, trial);
        if (std::isfinite(ft) && ft <= f + kArmijo * t * slope) {
          w = trial;
          f = ft;
          return true;
        }
        t *= 0.5;
      }
      return false;
    };

    bool moved = have_newton && line_search(step);
    if (!moved) {
      step.assign(g.begin(), g.end());
      for (auto& v : step) v = -v;
      moved = line_search(step);
    }
    if (!moved) break;  // stalled: no descent along Newton or gradient
  }

  if (!std::isfinite(f))
    throw NumericalError("final objective is not finite for " + pair_key(speaker, emotion));

  model.weights = w;
  model.ordered_pairs = pairs.ordered.size();
  model.similar_pairs = pairs.similar.size();
  model.final_objective = f;
  model.iterations = iter;
  model.converged = converged;

  // Raw-score span over the training utterances, then tertiles of the
  // normalized scores for the default intensity buckets.
  std::vector<double> raw_scores;
  raw_scores.reserve(training.size());
  std::vector<double> z;
  for (std::size_t i : training) {
    standardized(i, z);
    raw_scores.push_back(dot(w, z));
  }
  model.score_min = *std::min_element(raw_scores.begin(), raw_scores.end());
  model.score_max = *std::max_element(raw_scores.begin(), raw_scores.end());
  if (!(model.score_min < model.score_max)) model.score_max = model.score_min + 1.0;

  std::vector<double> normalized;
  normalized.reserve(raw_scores.size());
  const double span = model.score_max - model.score_min;
  for (double s : raw_scores)
    normalized.push_back(std::clamp((s - model.score_min) / span, 0.0, 1.0));
  std::sort(normalized.begin(), normalized.end());
  model.bucket_low = quantile_sorted(normalized, 1.0 / 3.0);
  model.bucket_high = quantile_sorted(normalized, 2.0 / 3.0);

  return model;
}

double quantile_sorted(std::span<const double> sorted_values, double p) {
  if (sorted_values.empty()) return 0.0;
  if (sorted_values.size() == 1) return sorted_values[0];
  const double pos = p * double(sorted_values.size() - 1);
  const auto lower = static_cast<std::size_t>(std::floor(pos));
  const auto upper = static_cast<std::size_t>(std::ceil(pos));
  const double frac = pos - double(lower);
  return sorted_values[lower] * (1.0 - frac) + sorted_values[upper] * frac;
}

double score(const RankModel& model, std::span<const double> features) {
  if (features.size() != model.weights.size())
    throw DimensionError("feature length " + std::to_string(features.size()) +
                         " does not match model dimension " +
                         std::to_string(model.weights.size()));
  double raw = 0.0;
  for (std::size_t k = 0; k < features.size(); ++k)
    raw += model.weights[k] * (features[k] - model.feature_mean[k]) / model.feature_std[k];
  const double normalized = (raw - model.score_min) / (model.score_max - model.score_min);
  return std::clamp(normalized, 0.0, 1.0);
}

double score(const RankModel& model, const AcousticFeatureVector& x) {
  return score(model, std::span<const double>(x.features));
}

IntensityBucket bucket(double intensity, double t_low, double t_high) {
  if (intensity < t_low) return IntensityBucket::Low;
  if (intensity < t_high) return IntensityBucket::Medium;
  return IntensityBucket::High;
}

IntensityBucket bucket(const RankModel& model, double intensity) {
  return bucket(intensity, model.bucket_low, model.bucket_high);
}

Annotations annotate_corpus(std::span<const AcousticFeatureVector> corpus,
                            std::span<const RankModel> models,
                            std::optional<Emotion> score_neutral_under) {
  std::map<std::pair<std::string, Emotion>, const RankModel*> by_key;
  for (const auto& m : models) by_key[{m.speaker_id, m.emotion}] = &m;

  Annotations out;
  for (const auto& x : corpus) {
    Emotion model_emotion = x.emotion;
    if (x.emotion == Emotion::Neutral) {
      if (!score_neutral_under) continue;
      model_emotion = *score_neutral_under;
    }
    const auto it = by_key.find({x.speaker_id, model_emotion});
    if (it == by_key.end()) {
      out.errors.push_back({x.utterance_id,
                            "no model for " + pair_key(x.speaker_id, model_emotion)});
      continue;
    }
    AnnotationRow row;
    row.utterance_id = x.utterance_id;
    row.speaker_id = x.speaker_id;
    row.emotion = x.emotion;
    try {
      row.intensity = score(*it->second, x);
    } catch (const Error& e) {
      out.errors.push_back({x.utterance_id, e.what()});
      continue;
    }
    row.bucket = bucket(*it->second, row.intensity);
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace proso
