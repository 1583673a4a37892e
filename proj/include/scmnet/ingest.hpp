#pragma once

// Readers and writers for the on-disk count formats:
//
//   edge-count CSV   header `src,dst,count`, one record per line
//   event JSONL      one object per line: {"ts": <seconds>, "src": "...", "dst": "..."}
//   matrix CSV       header row of component labels, then n rows of n integers
//
// Ids are interned to dense indices by first appearance. Ids listed in
// `preset_ids` are interned first, in the given order.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "scmnet/count_matrix.hpp"

namespace scmnet {

struct TimeWindow {
  double begin = 0.0;  // inclusive
  double end = 0.0;    // exclusive
};

CountMatrix parse_counts(std::istream& in, const std::vector<std::string>& preset_ids = {});

CountMatrix parse_events(std::istream& in, std::optional<TimeWindow> window = std::nullopt,
                         const std::vector<std::string>& preset_ids = {});

CountMatrix read_matrix_csv(std::istream& in);
void write_matrix_csv(std::ostream& out, const CountMatrix& counts);

void write_event_jsonl(std::ostream& out, double ts, const std::string& src, const std::string& dst);

nlohmann::json meta_json(const CountMatrix& counts);

enum class CountFormat { EdgeCsv, EventJsonl, MatrixCsv };

/// Sniffs the first non-empty line.
CountFormat detect_format(const std::filesystem::path& path);

CountMatrix load_counts(const std::filesystem::path& path,
                        std::optional<TimeWindow> window = std::nullopt);

}  // namespace scmnet
