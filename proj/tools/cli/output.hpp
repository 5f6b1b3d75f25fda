#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "ghzperc/experiments.hpp"
#include "ghzperc/percolation.hpp"

namespace ghzperc::cli {

/// `%.10g`, with `inf`/`nan` spelled out. Locale independent.
std::string format_double(double v);

std::string rate_csv(const RateTable& table);

/// One row per boundary point; `trials` is the per-evaluation count.
std::string boundary_csv(const std::vector<CriticalBoundary>& curves, int width, int height,
                         std::uint64_t trials);

nlohmann::ordered_json rate_row_json(const RateRow& row);
nlohmann::ordered_json optimal_k_json(const OptimalK& result);

/// Writes `content` next to `path` and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Current UTC time as `YYYY-MM-DDTHH:MM:SSZ`.
std::string utc_timestamp();

}  // namespace ghzperc::cli
