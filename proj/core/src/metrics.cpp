#include "proso/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace proso {

const double kMcdScale = (10.0 / std::log(10.0)) * std::sqrt(2.0);

std::vector<std::string> word_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      if (!current.empty()) {
        tokens.push_back(std::move(current));
        current.clear();
      }
    } else if (c < 0x80 && std::ispunct(c)) {
      // stripped
    } else {
      current.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::vector<std::uint32_t> char_tokens(std::string_view text) {
  std::vector<std::uint32_t> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto b0 = static_cast<unsigned char>(text[i]);
    std::uint32_t cp = 0xFFFD;
    std::size_t len = 1;
    if (b0 < 0x80) {
      cp = b0;
    } else if ((b0 >> 5) == 0x6 && i + 1 < text.size()) {
      cp = (std::uint32_t(b0 & 0x1F) << 6) | (text[i + 1] & 0x3F);
      len = 2;
    } else if ((b0 >> 4) == 0xE && i + 2 < text.size()) {
      cp = (std::uint32_t(b0 & 0x0F) << 12) | (std::uint32_t(text[i + 1] & 0x3F) << 6) |
           (text[i + 2] & 0x3F);
      len = 3;
    } else if ((b0 >> 3) == 0x1E && i + 3 < text.size()) {
      cp = (std::uint32_t(b0 & 0x07) << 18) | (std::uint32_t(text[i + 1] & 0x3F) << 12) |
           (std::uint32_t(text[i + 2] & 0x3F) << 6) | (text[i + 3] & 0x3F);
      len = 4;
    }
    i += len;
    if (cp < 0x80 && std::isspace(static_cast<unsigned char>(cp))) continue;
    out.push_back(cp);
  }
  return out;
}

namespace {

// Two-row DP; unit costs.
template <class T>
std::size_t levenshtein(std::span<const T> ref, std::span<const T> hyp) {
  const std::size_t n = ref.size(), m = hyp.size();
  if (n == 0) return m;
  if (m == 0) return n;
  std::vector<std::size_t> prev(m + 1), curr(m + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= n; ++i) {
    curr[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t sub = prev[j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      curr[j] = std::min({sub, prev[j] + 1, curr[j - 1] + 1});
    }
    std::swap(prev, curr);
  }
  return prev[m];
}

template <class T>
double error_rate(std::span<const T> ref, std::span<const T> hyp) {
  if (ref.empty())
    throw EmptyReferenceError("error rate undefined for an empty reference");
  return double(levenshtein(ref, hyp)) / double(ref.size());
}

}  // namespace

std::size_t edit_distance(std::span<const std::string> ref,
                          std::span<const std::string> hyp) {
  return levenshtein(ref, hyp);
}

std::size_t edit_distance(std::span<const std::uint32_t> ref,
                          std::span<const std::uint32_t> hyp) {
  return levenshtein(ref, hyp);
}

double wer(std::span<const std::string> ref, std::span<const std::string> hyp) {
  return error_rate(ref, hyp);
}

double cer(std::span<const std::uint32_t> ref, std::span<const std::uint32_t> hyp) {
  return error_rate(ref, hyp);
}

double wer(std::string_view ref_text, std::string_view hyp_text) {
  const auto r = word_tokens(ref_text), h = word_tokens(hyp_text);
  return wer(std::span<const std::string>(r), std::span<const std::string>(h));
}

double cer(std::string_view ref_text, std::string_view hyp_text) {
  const auto r = char_tokens(ref_text), h = char_tokens(hyp_text);
  return cer(std::span<const std::uint32_t>(r), std::span<const std::uint32_t>(h));
}

namespace {

void check_cepstra(const CepstraSequence& a, const CepstraSequence& b) {
  if (a.num_coeffs != b.num_coeffs)
    throw DimensionError("coefficient counts differ: " + std::to_string(a.num_coeffs) +
                         " vs " + std::to_string(b.num_coeffs));
  if (a.num_coeffs < 2) throw FormatError("cepstra need at least 2 coefficients");
  if (a.num_frames() == 0 || b.num_frames() == 0)
    throw FormatError("empty cepstra sequence");
}

double frame_cost(const CepstraSequence& a, std::size_t i, const CepstraSequence& b,
                  std::size_t j, std::size_t k0) {
  double s = 0.0;
  for (std::size_t k = k0; k < a.num_coeffs; ++k) {
    const double d = a.at(i, k) - b.at(j, k);
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

DtwAlignment dtw_align(const CepstraSequence& a, const CepstraSequence& b,
                       bool exclude_c0) {
  check_cepstra(a, b);
  const std::size_t k0 = exclude_c0 ? 1 : 0;
  const std::size_t ta = a.num_frames(), tb = b.num_frames();

  std::vector<double> acc(ta * tb);
  std::vector<std::uint8_t> from(ta * tb);  // 0 diag, 1 up (i-1), 2 left (j-1)
  auto idx = [tb](std::size_t i, std::size_t j) { return i * tb + j; };

  for (std::size_t i = 0; i < ta; ++i) {
    for (std::size_t j = 0; j < tb; ++j) {
      const double c = frame_cost(a, i, b, j, k0);
      if (i == 0 && j == 0) {
        acc[0] = c;
        from[0] = 0;
        continue;
      }
      double best = std::numeric_limits<double>::infinity();
      std::uint8_t move = 0;
      if (i > 0 && j > 0 && acc[idx(i - 1, j - 1)] < best) {
        best = acc[idx(i - 1, j - 1)];
        move = 0;
      }
      if (i > 0 && acc[idx(i - 1, j)] < best) {
        best = acc[idx(i - 1, j)];
        move = 1;
      }
      if (j > 0 && acc[idx(i, j - 1)] < best) {
        best = acc[idx(i, j - 1)];
        move = 2;
      }
      acc[idx(i, j)] = best + c;
      from[idx(i, j)] = move;
    }
  }

  DtwAlignment result;
  result.total_cost = acc[idx(ta - 1, tb - 1)];
  std::size_t i = ta - 1, j = tb - 1;
  result.path.emplace_back(i, j);
  while (i != 0 || j != 0) {
    switch (from[idx(i, j)]) {
      case 0: --i; --j; break;
      case 1: --i; break;
      default: --j; break;
    }
    result.path.emplace_back(i, j);
  }
  std::reverse(result.path.begin(), result.path.end());
  return result;
}

double mcd(const CepstraSequence& a, const CepstraSequence& b,
           const McdOptions& options) {
  check_cepstra(a, b);
  const std::size_t k0 = options.exclude_c0 ? 1 : 0;
  if (options.use_dtw) {
    const DtwAlignment alignment = dtw_align(a, b, options.exclude_c0);
    return kMcdScale * alignment.total_cost / double(alignment.path.size());
  }
  if (a.num_frames() != b.num_frames())
    throw DimensionError("frame-synchronous MCD needs equal lengths: " +
                         std::to_string(a.num_frames()) + " vs " +
                         std::to_string(b.num_frames()));
  double total = 0.0;
  for (std::size_t t = 0; t < a.num_frames(); ++t) total += frame_cost(a, t, b, t, k0);
  return kMcdScale * total / double(a.num_frames());
}

double classification_accuracy(std::span<const std::string> pred,
                               std::span<const std::string> truth) {
  if (pred.size() != truth.size())
    throw DimensionError("label lists differ in length: " + std::to_string(pred.size()) +
                         " vs " + std::to_string(truth.size()));
  if (pred.empty()) throw DimensionError("empty label lists");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i)
    if (pred[i] == truth[i]) ++hits;
  return double(hits) / double(pred.size());
}

PirReport pir_confusion(std::span<const PirResponse> responses) {
  if (responses.empty()) throw FormatError("no PIR responses");
  PirReport report;
  report.total = responses.size();
  for (const auto& r : responses) {
    const auto row = static_cast<std::size_t>(r.annotated);
    const auto col = static_cast<std::size_t>(r.perceived);
    ++report.confusion[row][col];
  }
  std::size_t trace = 0;
  for (std::size_t level = 0; level < 3; ++level) {
    const auto& row = report.confusion[level];
    const std::size_t row_total = row[0] + row[1] + row[2];
    trace += row[level];
    report.recall[level] = row_total == 0 ? 0.0 : double(row[level]) / double(row_total);
  }
  report.accuracy = double(trace) / double(report.total);
  return report;
}

std::vector<MosGroup> mos_aggregate(std::span<const MosRating> ratings) {
  for (const auto& r : ratings)
    if (!(r.score >= 0.0 && r.score <= 5.0))
      throw FormatError("MOS score " + std::to_string(r.score) + " outside [0, 5] (rater '" +
                        r.rater_id + "', utterance '" + r.utterance_id + "')");

  std::map<std::string, std::vector<double>> groups;
  for (const auto& r : ratings) groups[r.condition].push_back(r.score);

  std::vector<MosGroup> out;
  out.reserve(groups.size());
  for (const auto& [condition, scores] : groups) {
    MosGroup g;
    g.condition = condition;
    g.count = scores.size();
    g.mean = std::accumulate(scores.begin(), scores.end(), 0.0) / double(scores.size());
    if (scores.size() >= 2) {
      double ss = 0.0;
      for (double s : scores) ss += (s - g.mean) * (s - g.mean);
      const double sd = std::sqrt(ss / double(scores.size() - 1));
      g.ci95_halfwidth = 1.96 * sd / std::sqrt(double(scores.size()));
    }
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace proso
