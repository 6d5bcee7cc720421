#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "urbankg/geometry.hpp"

namespace urbankg::ingest {

enum class Source { Aoi, Road, Poi, Review, WebPage };

std::string_view source_name(Source s);
std::optional<Source> source_from_name(std::string_view);

struct RawRecord {
    Source source = Source::Poi;
    std::optional<std::string> name;
    std::optional<std::string> geometry_wkt;
    std::map<std::string, std::string> extra; // type, rating, ...
    std::optional<std::string> description;
};

// Strips URL tokens (scheme- or www-prefixed), non-ASCII and control
// characters, collapses whitespace runs, trims. Idempotent.
std::string clean_text(std::string_view s);

struct FilterDecision {
    bool kept = false;
    std::string reason; // "null_description" | "too_short" | "repeats_name"
};

// Drops records whose description is absent, shorter than ten words after
// cleaning, or that merely repeats the record name (case-folded).
FilterDecision filter_record(const RawRecord& r);

inline constexpr size_t kMinDescriptionWords = 10;

struct LineError {
    size_t line = 0;
    std::string message;
};

struct LoadResult {
    std::vector<RawRecord> records; // input order preserved
    std::vector<LineError> errors;  // malformed lines, not fatal
};

// One JSON object per line: {"name","geometry","description",...}; any other
// string field lands in `extra`. swap_latlon handles files whose WKT is
// written latitude-first. File-level I/O errors throw; line errors collect.
LoadResult load_records(const std::filesystem::path& path, Source source,
                        bool swap_latlon = false);

void write_error_report(const std::filesystem::path& input_path,
                        std::span<const LineError> errors);

struct RteRecord {
    std::string id;
    std::string text;
};

struct KgcRecord {
    std::string id;
    std::string head_name;
    geo::Geometry head_geometry;
    std::string tail_name;
    geo::Geometry tail_geometry;
};

struct TaskRecords {
    std::vector<RteRecord> rte;
    std::vector<KgcRecord> kgc;
};

// Kept records with a description become RTE records; KGC records are
// head/tail pairs sampled without replacement among records carrying valid
// geometry, reproducible under the seed. The pair count is capped at the
// RTE count.
TaskRecords to_task_records(std::span<const RawRecord> records, uint64_t seed,
                            std::optional<size_t> kgc_count = std::nullopt);

// KGC task files: {"id","head_name","head_geometry","tail_name","tail_geometry"}.
std::vector<KgcRecord> load_kgc_records(const std::filesystem::path& path);
void write_kgc_records(const std::filesystem::path& path, std::span<const KgcRecord> records);
std::vector<RteRecord> load_rte_records(const std::filesystem::path& path);
void write_rte_records(const std::filesystem::path& path, std::span<const RteRecord> records);

} // namespace urbankg::ingest
