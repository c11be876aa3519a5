#pragma once

#include <chrono>
#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "atlas/bundle.hpp"
#include "atlas/config.hpp"

namespace atlas {

/// Plain-text event log. Every line starts with "atlas: " followed by the
/// event name, then space-separated key=value pairs.
class Log {
 public:
  explicit Log(std::ostream* out = nullptr) : out_(out) {}
  void event(std::string_view name, std::string_view details = {}) const;

 private:
  std::ostream* out_;
};

/// Output of the ingest stage: registries plus morphine-equivalent series.
struct SeriesCache {
  YearSpan years;
  CountryRegistry countries;
  std::vector<std::string> drugs;
  SeriesMap series;
  std::vector<std::string> unmatched_countries;

  friend bool operator==(const SeriesCache&, const SeriesCache&) = default;
};

/// On-disk names of the per-stage artifacts inside the output directory.
namespace artifacts {
inline constexpr const char* kSeries = "series.json";
inline constexpr const char* kCognostics = "cognostics.json";
inline constexpr const char* kEmbedding = "embedding.json";
inline constexpr const char* kTrends = "trends.json";
inline constexpr const char* kBundle = "atlas.json";
}  // namespace artifacts

SeriesCache ingest_stage(const PipelineConfig& config, const Log& log = Log{});
std::vector<CognosticVector> cognostics_stage(const SeriesCache& cache, unsigned threads = 1);
EmbeddingSet embedding_stage(const SeriesCache& cache, const SmacofOptions& options, bool per_drug);
std::vector<TrendGrid> trends_stage(const SeriesCache& cache, const TrendParams& params, unsigned threads = 1);

/// Cube-rooted, zero-filled vectors for every series in `cache` (optionally
/// only one drug), in key order.
std::vector<DenseSeries> embedding_inputs(const SeriesCache& cache, const std::string& drug = {});

std::string serialize_series_cache(const SeriesCache& cache);
SeriesCache parse_series_cache(const std::string& text);

enum class ComputeStage { Cognostics, Embedding, Trends, All };

/// Stage drivers that read and write the artifacts in config.output_dir.
void run_ingest(const PipelineConfig& config, const Log& log);
void run_compute(const PipelineConfig& config, ComputeStage stage, const Log& log);
AtlasBundle run_export(const PipelineConfig& config, const Log& log);

/// ingest -> transform -> {cognostics, embedding, trends} -> export. Each step
/// goes through its on-disk artifact, exactly as the individual subcommands do.
AtlasBundle run_pipeline(const PipelineConfig& config, const Log& log = Log{});

}  // namespace atlas
