#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "proso/prompt.hpp"
#include "proso/prosody.hpp"
#include "proso/rank.hpp"

namespace proso {

struct RankConfig {
  RankHyperparams hp;
  std::uint64_t seed = 0;
  std::size_t feature_dim = kDefaultFeatureDim;

  friend bool operator==(const RankConfig&, const RankConfig&) = default;
};

struct BucketConfig {
  std::string mode = "tertile";  // "tertile" | "explicit"
  double t_low = 1.0 / 3.0;      // used in explicit mode
  double t_high = 2.0 / 3.0;

  friend bool operator==(const BucketConfig&, const BucketConfig&) = default;
};

struct MetricFlags {
  bool mcd_exclude_c0 = true;
  bool mcd_dtw = true;

  friend bool operator==(const MetricFlags&, const MetricFlags&) = default;
};

// Run configuration; defaults are the standard control intervals
// (duration [-2,2] -> [0.74,1.34], energy/pitch raw [-5,5], energy target
// [0.5,2]).
struct RunConfig {
  ProviderConfig provider;

  Interval duration_raw{-2.0, 2.0};
  Interval duration_target{0.74, 1.34};
  Interval energy_raw{-5.0, 5.0};
  Interval energy_target{0.5, 2.0};
  Interval pitch_raw{-5.0, 5.0};
  double pitch_gain = 1.0;

  RankConfig rank;
  BucketConfig bucket;
  MetricFlags metrics;

  // Validates the ranges and builds the quadratic maps (ConfigError on a
  // non-monotone or degenerate configuration).
  ScalingMaps scaling_maps() const;
  RawRanges raw_ranges() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// Flat-section key/value file (TOML-style). Absent keys take defaults;
// unknown sections or keys are rejected naming the offender; parse errors
// carry line and column.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const RunConfig& config);

}  // namespace proso
