#pragma once

namespace proso {

inline constexpr char kToolVersion[] = "0.1.0";

// Persisted-format schema versions. Bump on any incompatible change.
inline constexpr int kTrackSchemaVersion = 1;
inline constexpr int kModelSchemaVersion = 1;
inline constexpr int kPlanSchemaVersion = 1;
inline constexpr int kReportSchemaVersion = 1;

}  // namespace proso
