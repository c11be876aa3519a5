#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "atlas/embedding.hpp"
#include "atlas/ingest.hpp"
#include "atlas/trends.hpp"

namespace atlas {

/// Directory holding the shipped default registries and conversion table.
std::filesystem::path default_data_dir();

struct PipelineConfig {
  std::filesystem::path input_csv;
  std::filesystem::path countries_csv;
  std::filesystem::path aliases_csv;
  std::filesystem::path drugs_file;
  std::filesystem::path conversion_csv;
  std::filesystem::path output_dir = "atlas-out";

  YearSpan years = kDefaultYears;
  DuplicatePolicy duplicate_policy = DuplicatePolicy::Error;
  UnknownCountryMode unknown_countries = UnknownCountryMode::Error;
  CsvSchema schema;
  TrendParams trends;
  SmacofOptions mds;
  bool per_drug_embeddings = true;
  unsigned threads = 1;

  /// Config with every registry path pointing into default_data_dir().
  static PipelineConfig defaults();
};

/// Parses a flat `key = value` document (`#` comments, blank lines ignored).
/// Relative paths are resolved against `base_dir`. All problems are reported
/// together in one Config error, one per line.
PipelineConfig parse_config(const std::string& text, const std::filesystem::path& base_dir,
                            PipelineConfig base = PipelineConfig::defaults());
PipelineConfig load_config(const std::filesystem::path& path);

/// Applies `key=value` overrides on top of `config`; relative paths resolve
/// against the current directory.
void apply_overrides(PipelineConfig& config, const std::vector<std::string>& assignments);

/// Checks that the ingest inputs exist; returns one message per problem.
std::vector<std::string> missing_inputs(const PipelineConfig& config);

/// Every recognized key.
const std::vector<std::string>& config_keys();

}  // namespace atlas
