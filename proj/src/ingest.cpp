#include "urbankg/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <random>
#include <set>

#include <json.hpp>

#include "urbankg/text_util.hpp"

namespace urbankg::ingest {

using nlohmann::json;

std::string_view source_name(Source s) {
    switch (s) {
        case Source::Aoi: return "aoi";
        case Source::Road: return "road";
        case Source::Poi: return "poi";
        case Source::Review: return "review";
        case Source::WebPage: return "webpage";
    }
    return "?";
}

std::optional<Source> source_from_name(std::string_view s) {
    std::string f = text::fold(s);
    for (Source src : {Source::Aoi, Source::Road, Source::Poi, Source::Review, Source::WebPage})
        if (f == source_name(src)) return src;
    return std::nullopt;
}

namespace {

bool is_url_token(std::string_view tok) {
    std::string f = text::fold(tok);
    if (f.starts_with("www.")) return true;
    // scheme://rest with an alphabetic scheme
    size_t pos = f.find("://");
    if (pos == std::string::npos || pos == 0) return false;
    return std::all_of(f.begin(), f.begin() + static_cast<long>(pos), [](unsigned char c) {
        return std::isalpha(c) != 0;
    });
}

} // namespace

std::string clean_text(std::string_view s) {
    // Pass 1: whitespace becomes a separator, other control bytes and
    // non-ASCII bytes are deleted in place.
    std::string ascii;
    ascii.reserve(s.size());
    for (unsigned char c : s) {
        if (std::isspace(c)) ascii.push_back(' ');
        else if (c >= 33 && c <= 126) ascii.push_back(static_cast<char>(c));
    }
    // Pass 2: drop URL tokens, collapse separators. URL detection runs on
    // the stripped text so a second application is a no-op.
    std::string out;
    out.reserve(ascii.size());
    size_t i = 0;
    while (i < ascii.size()) {
        while (i < ascii.size() && ascii[i] == ' ') ++i;
        size_t start = i;
        while (i < ascii.size() && ascii[i] != ' ') ++i;
        if (i == start) break;
        std::string_view tok = std::string_view(ascii).substr(start, i - start);
        if (is_url_token(tok)) continue;
        if (!out.empty()) out.push_back(' ');
        out.append(tok);
    }
    return out;
}

FilterDecision filter_record(const RawRecord& r) {
    if (!r.description) return {false, "null_description"};
    std::string cleaned = clean_text(*r.description);
    if (text::word_count(cleaned) < kMinDescriptionWords) return {false, "too_short"};
    if (r.name && text::fold(cleaned) == text::fold(clean_text(*r.name)))
        return {false, "repeats_name"};
    return {true, ""};
}

LoadResult load_records(const std::filesystem::path& path, Source source, bool swap_latlon) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
    LoadResult result;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            result.errors.push_back({line_no, e.what()});
            continue;
        }
        if (!j.is_object()) {
            result.errors.push_back({line_no, "record is not a JSON object"});
            continue;
        }
        RawRecord rec;
        rec.source = source;
        bool ok = true;
        for (auto& [key, value] : j.items()) {
            if (!value.is_string() && !value.is_number()) continue;
            std::string str = value.is_string() ? value.get<std::string>() : value.dump();
            if (key == "name") rec.name = str;
            else if (key == "geometry") rec.geometry_wkt = str;
            else if (key == "description" || key == "text") rec.description = str;
            else rec.extra[key] = str;
        }
        if (rec.geometry_wkt) {
            try {
                geo::Geometry g = geo::parse_wkt(*rec.geometry_wkt, {.swap_axes = swap_latlon});
                rec.geometry_wkt = geo::serialize_wkt(g); // canonical lon-lat order
            } catch (const geo::GeometryError& e) {
                result.errors.push_back({line_no, std::string("geometry: ") + e.what()});
                ok = false;
            }
        }
        if (ok) result.records.push_back(std::move(rec));
    }
    return result;
}

void write_error_report(const std::filesystem::path& input_path,
                        std::span<const LineError> errors) {
    std::filesystem::path report = input_path;
    report += ".errors.jsonl";
    std::ofstream out(report);
    if (!out) throw std::runtime_error("cannot open for writing: " + report.string());
    for (const LineError& e : errors)
        out << json{{"line", e.line}, {"message", e.message}}.dump() << '\n';
}

TaskRecords to_task_records(std::span<const RawRecord> records, uint64_t seed,
                            std::optional<size_t> kgc_count) {
    TaskRecords out;
    struct GeoEntry {
        size_t index;
        std::string name;
        geo::Geometry geometry;
    };
    std::vector<GeoEntry> with_geometry;

    for (size_t i = 0; i < records.size(); ++i) {
        const RawRecord& r = records[i];
        std::string id = std::string(source_name(r.source)) + "-" + std::to_string(i);
        if (r.description) {
            std::string cleaned = clean_text(*r.description);
            if (!cleaned.empty()) out.rte.push_back({id, cleaned});
        }
        if (r.geometry_wkt && r.name) {
            try {
                with_geometry.push_back({i, *r.name, geo::parse_wkt(*r.geometry_wkt)});
            } catch (const geo::GeometryError&) {
                // invalid geometry simply disqualifies the record from KGC
            }
        }
    }

    size_t n = with_geometry.size();
    if (n < 2) return out;
    size_t max_pairs = n * (n - 1) / 2;
    size_t want = std::min({kgc_count.value_or(out.rte.size()), out.rte.size(), max_pairs});

    std::mt19937_64 rng(seed);
    std::set<std::pair<size_t, size_t>> seen;
    size_t k = 0;
    while (out.kgc.size() < want) {
        size_t i = rng() % n;
        size_t j = rng() % n;
        if (i == j) continue;
        auto key = std::minmax(i, j);
        if (!seen.insert({key.first, key.second}).second) continue;
        const GeoEntry& head = with_geometry[i];
        const GeoEntry& tail = with_geometry[j];
        out.kgc.push_back({"kgc-" + std::to_string(k++), head.name, head.geometry, tail.name,
                           tail.geometry});
    }
    return out;
}

std::vector<KgcRecord> load_kgc_records(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
    std::vector<KgcRecord> out;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        try {
            json j = json::parse(line);
            out.push_back({j.at("id").get<std::string>(),
                           j.at("head_name").get<std::string>(),
                           geo::parse_wkt(j.at("head_geometry").get<std::string>()),
                           j.at("tail_name").get<std::string>(),
                           geo::parse_wkt(j.at("tail_geometry").get<std::string>())});
        } catch (const std::exception& e) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " +
                                     e.what());
        }
    }
    return out;
}

void write_kgc_records(const std::filesystem::path& path, std::span<const KgcRecord> records) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    for (const KgcRecord& r : records)
        out << json{{"id", r.id},
                    {"head_name", r.head_name},
                    {"head_geometry", geo::serialize_wkt(r.head_geometry)},
                    {"tail_name", r.tail_name},
                    {"tail_geometry", geo::serialize_wkt(r.tail_geometry)}}
                   .dump()
            << '\n';
}

std::vector<RteRecord> load_rte_records(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
    std::vector<RteRecord> out;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        try {
            json j = json::parse(line);
            out.push_back({j.at("id").get<std::string>(), j.at("text").get<std::string>()});
        } catch (const std::exception& e) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " +
                                     e.what());
        }
    }
    return out;
}

void write_rte_records(const std::filesystem::path& path, std::span<const RteRecord> records) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    for (const RteRecord& r : records)
        out << json{{"id", r.id}, {"text", r.text}}.dump() << '\n';
}

} // namespace urbankg::ingest
