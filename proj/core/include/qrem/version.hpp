#pragma once

namespace qrem {

inline constexpr const char* kVersion = "0.1.0";

// Bumped whenever the layout of emitted artifacts (JSON/JSONL/CSV headers,
// binary table format) changes incompatibly. Readers reject unknown majors.
inline constexpr int kSchemaVersion = 1;

}  // namespace qrem
