#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "proso/emotion.hpp"
#include "proso/errors.hpp"

namespace proso {

// Tokenization pinned for reproducibility: lowercase, punctuation stripped,
// whitespace split for words; Unicode scalar values excluding spaces for
// characters.
std::vector<std::string> word_tokens(std::string_view text);
std::vector<std::uint32_t> char_tokens(std::string_view text);

// Levenshtein distance with unit substitution/insertion/deletion costs.
std::size_t edit_distance(std::span<const std::string> ref,
                          std::span<const std::string> hyp);
std::size_t edit_distance(std::span<const std::uint32_t> ref,
                          std::span<const std::uint32_t> hyp);

// edit_distance / len(ref); may exceed 1. Throws EmptyReferenceError when the
// reference has no tokens.
double wer(std::span<const std::string> ref, std::span<const std::string> hyp);
double cer(std::span<const std::uint32_t> ref, std::span<const std::uint32_t> hyp);
double wer(std::string_view ref_text, std::string_view hyp_text);
double cer(std::string_view ref_text, std::string_view hyp_text);

// Mel-cepstral frames, row-major T x K; coefficient 0 is the energy term.
struct CepstraSequence {
  std::string utterance_id;
  std::size_t num_coeffs = 0;
  std::vector<double> values;

  std::size_t num_frames() const {
    return num_coeffs == 0 ? 0 : values.size() / num_coeffs;
  }
  double at(std::size_t frame, std::size_t coeff) const {
    return values[frame * num_coeffs + coeff];
  }
};

// Boundary-anchored monotone alignment with steps {(1,0), (0,1), (1,1)},
// minimizing the accumulated per-pair cost
// sqrt(sum_{k=k0}^{K-1} (a_k - b_k)^2), k0 = 1 when c0 is excluded.
struct DtwAlignment {
  double total_cost = 0.0;
  std::vector<std::pair<std::size_t, std::size_t>> path;
};

DtwAlignment dtw_align(const CepstraSequence& a, const CepstraSequence& b,
                       bool exclude_c0);

struct McdOptions {
  bool exclude_c0 = true;
  bool use_dtw = true;
};

// (10 / ln 10) * sqrt(2); multiplies the mean aligned-pair cost.
extern const double kMcdScale;

// Mel cepstral distortion in dB. With use_dtw=false the sequences must have
// equal length and frames pair up index-wise. Throws DimensionError on a
// coefficient-count mismatch, FormatError on an empty sequence.
double mcd(const CepstraSequence& a, const CepstraSequence& b,
           const McdOptions& options = {});

// Fraction of positions where pred equals truth. Throws DimensionError on
// length mismatch or empty input.
double classification_accuracy(std::span<const std::string> pred,
                               std::span<const std::string> truth);

struct PirResponse {
  std::string rater_id;
  std::string utterance_id;
  IntensityBucket annotated = IntensityBucket::Low;   // rank-function label
  IntensityBucket perceived = IntensityBucket::Low;   // rater's label
};

// rows = annotated level, cols = perceived level, indexed Low=0, Medium=1,
// High=2.
struct PirReport {
  std::array<std::array<std::size_t, 3>, 3> confusion{};
  std::array<double, 3> recall{};  // per annotated level; 0 when the row is empty
  double accuracy = 0.0;           // trace / total
  std::size_t total = 0;
};

PirReport pir_confusion(std::span<const PirResponse> responses);

struct MosRating {
  std::string rater_id;
  std::string utterance_id;
  std::string condition;  // grouping key, e.g. model x prompt-control setting
  double score = 0.0;     // in [0, 5]
};

struct MosGroup {
  std::string condition;
  double mean = 0.0;
  double ci95_halfwidth = 0.0;  // normal approximation; 0 for n < 2
  std::size_t count = 0;
};

// Per-condition mean and 95% CI, conditions sorted lexicographically.
// Throws FormatError on a score outside [0, 5].
std::vector<MosGroup> mos_aggregate(std::span<const MosRating> ratings);

}  // namespace proso
