#include "atlas/pipeline.hpp"

#include <fstream>
#include <nlohmann/json.hpp>

#include "atlas/error.hpp"
#include "atlas/parallel.hpp"
#include "atlas/transform.hpp"

namespace atlas {
namespace {

namespace fs = std::filesystem;

template <class Fn>
auto timed_stage(const Log& log, std::string_view name, Fn&& fn) {
  log.event("stage-start", "name=" + std::string(name));
  const auto start = std::chrono::steady_clock::now();
  try {
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
      log.event("stage-done", "name=" + std::string(name) + " ms=" + std::to_string(ms.count()));
    } else {
      auto result = fn();
      const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
      log.event("stage-done", "name=" + std::string(name) + " ms=" + std::to_string(ms.count()));
      return result;
    }
  } catch (const Error& e) {
    log.event("stage-failed", "name=" + std::string(name) + " kind=" + std::string(to_string(e.kind())));
    throw Error(e.kind(), "stage " + std::string(name) + ": " + e.what());
  }
}

fs::path artifact(const PipelineConfig& config, const char* name) { return config.output_dir / name; }

void ensure_output_dir(const PipelineConfig& config) {
  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (ec || !fs::is_directory(config.output_dir)) {
    throw Error(ErrorKind::IoFailure, "cannot create output directory '" + config.output_dir.string() + "'");
  }
}

void require_inputs(const PipelineConfig& config) {
  const auto missing = missing_inputs(config);
  if (missing.empty()) return;
  std::string message = std::to_string(missing.size()) + " configuration problem(s)";
  for (const auto& m : missing) message += "\n  " + m;
  throw Error(ErrorKind::Config, message);
}

void require_artifact(const fs::path& path) {
  if (!fs::is_regular_file(path)) {
    throw Error(ErrorKind::Config, "required artifact '" + path.string() + "' does not exist; run the earlier stage first");
  }
}

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SchemaViolation, e.what());
  }
}

template <class Fn>
auto decode(const fs::path& path, Fn&& fn) {
  try {
    return fn(parse_json(read_text_file(path)));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SchemaViolation, path.string() + ": " + e.what());
  }
}

}  // namespace

void Log::event(std::string_view name, std::string_view details) const {
  if (!out_) return;
  *out_ << "atlas: " << name;
  if (!details.empty()) *out_ << ' ' << details;
  *out_ << '\n';
  out_->flush();
}

SeriesCache ingest_stage(const PipelineConfig& config, const Log& log) {
  Registries registries;
  registries.countries = CountryRegistry::load(config.countries_csv);
  registries.aliases = AliasTable::load(config.aliases_csv, registries.countries);
  registries.drugs = DrugRegistry::load(config.drugs_file);
  const auto table = ConversionTable::load(config.conversion_csv);

  std::ifstream in(config.input_csv, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open '" + config.input_csv.string() + "'");
  ParseOptions options{config.schema, config.years, config.unknown_countries};
  auto parsed = parse_consumption_csv(in, registries, options);
  for (const auto& name : parsed.unmatched_countries) log.event("unmatched-country", "name=\"" + name + "\"");

  SeriesCache cache;
  cache.years = config.years;
  cache.countries = registries.countries;
  cache.drugs = registries.drugs.names();
  cache.unmatched_countries = std::move(parsed.unmatched_countries);
  const auto raw = build_series(parsed.records, config.duplicate_policy, config.years);
  for (const auto& [key, s] : raw) cache.series.emplace(key, to_morphine_equivalent(s, table));
  log.event("ingested", "records=" + std::to_string(parsed.records.size()) +
                            " series=" + std::to_string(cache.series.size()));
  return cache;
}

std::vector<CognosticVector> cognostics_stage(const SeriesCache& cache, unsigned threads) {
  std::vector<const Series*> list;
  for (const auto& [_, s] : cache.series) list.push_back(&s);
  std::vector<CognosticVector> out(list.size());
  parallel_for(list.size(), threads, [&](std::size_t i) { out[i] = compute_cognostics(*list[i]); });
  return out;
}

std::vector<DenseSeries> embedding_inputs(const SeriesCache& cache, const std::string& drug) {
  std::vector<DenseSeries> out;
  for (const auto& [key, s] : cache.series) {
    if (!drug.empty() && key.drug != drug) continue;
    out.push_back(cube_root(densify(s, cache.years)));
  }
  return out;
}

EmbeddingSet embedding_stage(const SeriesCache& cache, const SmacofOptions& options, bool per_drug) {
  EmbeddingSet set;
  set.joint = compute_layout(embedding_inputs(cache), options);
  if (per_drug) {
    for (const auto& drug : cache.drugs) set.per_drug.emplace(drug, compute_layout(embedding_inputs(cache, drug), options));
  }
  return set;
}

std::vector<TrendGrid> trends_stage(const SeriesCache& cache, const TrendParams& params, unsigned threads) {
  params.validate();
  std::vector<const Series*> list;
  for (const auto& [_, s] : cache.series) list.push_back(&s);
  std::vector<TrendGrid> out(list.size());
  parallel_for(list.size(), threads,
               [&](std::size_t i) { out[i] = trend_grid(densify(*list[i], cache.years), params); });
  return out;
}

std::string serialize_series_cache(const SeriesCache& cache) {
  return canonical_dump(Json{{"years", years_to_json(cache.years)},
                             {"countries", countries_to_json(cache.countries)},
                             {"drugs", cache.drugs},
                             {"series", series_to_json(cache.series)},
                             {"unmatched_countries", cache.unmatched_countries}});
}

SeriesCache parse_series_cache(const std::string& text) {
  const auto doc = parse_json(text);
  try {
    SeriesCache cache;
    cache.years = years_from_json(doc.at("years"));
    cache.countries = countries_from_json(doc.at("countries"));
    cache.drugs = doc.at("drugs").get<std::vector<std::string>>();
    cache.series = series_from_json(doc.at("series"), cache.years);
    cache.unmatched_countries = doc.at("unmatched_countries").get<std::vector<std::string>>();
    return cache;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SchemaViolation, std::string("series cache: ") + e.what());
  }
}

void run_ingest(const PipelineConfig& config, const Log& log) {
  require_inputs(config);
  ensure_output_dir(config);
  const auto cache = timed_stage(log, "ingest", [&] { return ingest_stage(config, log); });
  write_text_file(artifact(config, artifacts::kSeries), serialize_series_cache(cache));
}

void run_compute(const PipelineConfig& config, ComputeStage stage, const Log& log) {
  const auto series_path = artifact(config, artifacts::kSeries);
  require_artifact(series_path);
  const auto cache = parse_series_cache(read_text_file(series_path));
  const auto wants = [&](ComputeStage s) { return stage == ComputeStage::All || stage == s; };

  if (wants(ComputeStage::Cognostics)) {
    const auto cognostics = timed_stage(log, "cognostics", [&] { return cognostics_stage(cache, config.threads); });
    std::map<SeriesKey, CognosticVector> by_key;
    for (const auto& c : cognostics) by_key.emplace(c.key, c);
    write_text_file(artifact(config, artifacts::kCognostics), canonical_dump(cognostics_to_json(by_key)));
  }
  if (wants(ComputeStage::Embedding)) {
    SmacofOptions options = config.mds;
    options.threads = config.threads;
    const auto set = timed_stage(log, "embedding", [&] { return embedding_stage(cache, options, config.per_drug_embeddings); });
    write_text_file(artifact(config, artifacts::kEmbedding), canonical_dump(embeddings_to_json(set)));
  }
  if (wants(ComputeStage::Trends)) {
    const auto grids = timed_stage(log, "trends", [&] { return trends_stage(cache, config.trends, config.threads); });
    TrendSet set{config.trends, {}};
    for (const auto& g : grids) set.grids.emplace(g.key, g);
    write_text_file(artifact(config, artifacts::kTrends), canonical_dump(trends_to_json(set)));
  }
}

AtlasBundle run_export(const PipelineConfig& config, const Log& log) {
  for (const char* name : {artifacts::kSeries, artifacts::kCognostics, artifacts::kEmbedding, artifacts::kTrends}) {
    require_artifact(artifact(config, name));
  }
  return timed_stage(log, "export", [&] {
    const auto cache = parse_series_cache(read_text_file(artifact(config, artifacts::kSeries)));
    const auto cognostics = decode(artifact(config, artifacts::kCognostics), cognostics_from_json);
    const auto embeddings = decode(artifact(config, artifacts::kEmbedding), embeddings_from_json);
    const auto trends =
        decode(artifact(config, artifacts::kTrends), [&](const Json& j) { return trends_from_json(j, cache.years); });

    std::vector<CognosticVector> cognostic_list;
    for (const auto& [_, c] : cognostics) cognostic_list.push_back(c);
    std::vector<TrendGrid> grids;
    for (const auto& [_, g] : trends.grids) grids.push_back(g);
    auto bundle = build_bundle(cache.series, cognostic_list, embeddings, grids, trends.params, cache.countries,
                               cache.drugs, cache.years);
    write_bundle(bundle, artifact(config, artifacts::kBundle));
    return bundle;
  });
}

AtlasBundle run_pipeline(const PipelineConfig& config, const Log& log) {
  run_ingest(config, log);
  run_compute(config, ComputeStage::All, log);
  return run_export(config, log);
}

}  // namespace atlas
