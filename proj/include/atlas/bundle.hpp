#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "atlas/cognostics.hpp"
#include "atlas/embedding.hpp"
#include "atlas/ingest.hpp"
#include "atlas/json_fwd.hpp"
#include "atlas/trends.hpp"
#include "atlas/types.hpp"

namespace atlas {

inline constexpr int kSchemaVersion = 1;

struct EmbeddingSet {
  Layout joint;
  std::map<std::string, Layout> per_drug;

  friend bool operator==(const EmbeddingSet&, const EmbeddingSet&) = default;
};

struct TrendSet {
  TrendParams params;
  std::map<SeriesKey, TrendGrid> grids;

  friend bool operator==(const TrendSet&, const TrendSet&) = default;
};

/// Everything the atlas views need, keyed by SeriesKey. Series values are
/// morphine-equivalent kilograms with missing years kept missing.
struct AtlasBundle {
  int schema_version = kSchemaVersion;
  CountryRegistry countries;
  std::vector<std::string> drugs;
  YearSpan years;
  SeriesMap series;
  std::map<SeriesKey, CognosticVector> cognostics;
  EmbeddingSet embeddings;
  TrendSet trends;

  friend bool operator==(const AtlasBundle&, const AtlasBundle&) = default;
};

/// Assembles a bundle and checks that every key referenced by cognostics,
/// layouts and trends resolves to a series, and every series to a registered
/// country and drug. Throws DanglingKey otherwise.
AtlasBundle build_bundle(const SeriesMap& series, const std::vector<CognosticVector>& cognostics,
                         const EmbeddingSet& embeddings, const std::vector<TrendGrid>& trends,
                         const TrendParams& trend_params, const CountryRegistry& countries,
                         const std::vector<std::string>& drugs, YearSpan years);

/// Re-checks the closure rules of build_bundle on an existing bundle.
void validate_bundle(const AtlasBundle& bundle);

Json to_json(const AtlasBundle& bundle);
/// Throws SchemaViolation on structurally invalid input.
AtlasBundle bundle_from_json(const Json& doc);

/// Canonical text: object keys in byte order, no insignificant whitespace,
/// numbers in shortest round-trip form, trailing newline.
std::string canonical_dump(const Json& doc);

std::string serialize_bundle(const AtlasBundle& bundle);
AtlasBundle parse_bundle(const std::string& text);

void write_bundle(const AtlasBundle& bundle, const std::filesystem::path& path);
AtlasBundle read_bundle(const std::filesystem::path& path);

/// Writes `text` to `path` via a sibling temporary file. Throws IoFailure.
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

// Section codecs, shared with the per-stage cache files.
Json series_to_json(const SeriesMap& series);
SeriesMap series_from_json(const Json& doc, YearSpan years);
Json countries_to_json(const CountryRegistry& countries);
CountryRegistry countries_from_json(const Json& doc);
Json cognostics_to_json(const std::map<SeriesKey, CognosticVector>& cognostics);
std::map<SeriesKey, CognosticVector> cognostics_from_json(const Json& doc);
Json embeddings_to_json(const EmbeddingSet& embeddings);
EmbeddingSet embeddings_from_json(const Json& doc);
Json trends_to_json(const TrendSet& trends);
TrendSet trends_from_json(const Json& doc, YearSpan years);
Json years_to_json(YearSpan years);
YearSpan years_from_json(const Json& doc);

}  // namespace atlas
