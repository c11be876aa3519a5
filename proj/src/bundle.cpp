#include "atlas/bundle.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "atlas/csv.hpp"
#include "atlas/error.hpp"

namespace atlas {
namespace {

[[noreturn]] void schema_error(const std::string& what) { throw Error(ErrorKind::SchemaViolation, what); }

const Json& member(const Json& obj, const char* name) {
  if (!obj.is_object()) schema_error(std::string("expected an object holding '") + name + "'");
  const auto it = obj.find(name);
  if (it == obj.end()) schema_error(std::string("missing member '") + name + "'");
  return *it;
}

double as_real(const Json& v, const char* what) {
  if (!v.is_number()) schema_error(std::string(what) + " must be a number");
  return v.get<double>();
}

std::optional<double> as_optional_real(const Json& v, const char* what) {
  if (v.is_null()) return std::nullopt;
  return as_real(v, what);
}

Json optional_real(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::vector<double> as_real_array(const Json& v, std::size_t expected, const char* what) {
  if (!v.is_array() || v.size() != expected) {
    schema_error(std::string(what) + " must be an array of " + std::to_string(expected) + " numbers");
  }
  std::vector<double> out;
  out.reserve(expected);
  for (const auto& x : v) out.push_back(as_real(x, what));
  return out;
}

void canonical_dump_into(const Json& v, std::string& out) {
  switch (v.type()) {
    case Json::value_t::object: {
      out.push_back('{');
      bool first = true;
      for (const auto& [key, child] : v.items()) {
        if (!first) out.push_back(',');
        first = false;
        out += Json(key).dump();
        out.push_back(':');
        canonical_dump_into(child, out);
      }
      out.push_back('}');
      break;
    }
    case Json::value_t::array: {
      out.push_back('[');
      bool first = true;
      for (const auto& child : v) {
        if (!first) out.push_back(',');
        first = false;
        canonical_dump_into(child, out);
      }
      out.push_back(']');
      break;
    }
    case Json::value_t::number_float: {
      const double d = v.get<double>();
      if (!std::isfinite(d)) throw Error(ErrorKind::SchemaViolation, "non-finite number in bundle");
      out += csv::format_real(d);
      break;
    }
    default:
      out += v.dump();
  }
}

Json layout_to_json(const Layout& layout) {
  Json keys = Json::array();
  Json coords = Json::array();
  for (const auto& k : layout.embedding.keys) keys.push_back(k.str());
  for (const auto& p : layout.embedding.coords) coords.push_back(Json::array({p[0], p[1]}));
  return Json{{"status", layout.empty ? "empty" : "ok"},
              {"reason", layout.reason},
              {"keys", std::move(keys)},
              {"coords", std::move(coords)},
              {"stress", layout.embedding.stress},
              {"iterations", layout.embedding.iterations}};
}

Layout layout_from_json(const Json& doc) {
  Layout layout;
  const auto& status = member(doc, "status");
  if (status != "ok" && status != "empty") schema_error("layout status must be 'ok' or 'empty'");
  layout.empty = status == "empty";
  layout.reason = member(doc, "reason").get<std::string>();
  const auto& keys = member(doc, "keys");
  const auto& coords = member(doc, "coords");
  if (!keys.is_array() || !coords.is_array() || keys.size() != coords.size()) {
    schema_error("layout keys and coords must be arrays of equal length");
  }
  for (const auto& k : keys) layout.embedding.keys.push_back(SeriesKey::parse(k.get<std::string>()));
  for (const auto& c : coords) {
    const auto xy = as_real_array(c, 2, "layout coordinate");
    layout.embedding.coords.push_back({xy[0], xy[1]});
  }
  layout.embedding.stress = as_real(member(doc, "stress"), "stress");
  const auto& iterations = member(doc, "iterations");
  if (!iterations.is_number_unsigned() && !(iterations.is_number_integer() && iterations.get<long long>() >= 0)) {
    schema_error("iterations must be a non-negative integer");
  }
  layout.embedding.iterations = iterations.get<std::size_t>();
  return layout;
}

Json cognostic_fields() {
  // role: "primary" for the two summaries the views are built around,
  // "supplementary" for the extra conveniences.
  return Json{{"net_change", {{"role", "primary"}, {"unit", "kg"}}},
              {"max_annual_increase", {{"role", "primary"}, {"unit", "kg"}}},
              {"max_annual_decrease", {{"role", "supplementary"}, {"unit", "kg"}}},
              {"mean_level", {{"role", "supplementary"}, {"unit", "kg"}}},
              {"latest_value", {{"role", "supplementary"}, {"unit", "kg"}}}};
}

void dangling(const std::string& where, const SeriesKey& key) {
  throw Error(ErrorKind::DanglingKey, where + " references unknown series " + key.str());
}

}  // namespace

// ---------------------------------------------------------------------------
// Section codecs

Json years_to_json(YearSpan years) { return Json{{"first", years.first}, {"last", years.last}}; }

YearSpan years_from_json(const Json& doc) {
  const auto& first = member(doc, "first");
  const auto& last = member(doc, "last");
  if (!first.is_number_integer() || !last.is_number_integer()) schema_error("years must be integers");
  YearSpan span{first.get<int>(), last.get<int>()};
  if (span.first > span.last) schema_error("years.first exceeds years.last");
  return span;
}

Json series_to_json(const SeriesMap& series) {
  Json out = Json::object();
  for (const auto& [key, s] : series) {
    Json values = Json::array();
    for (const auto& v : s.values) values.push_back(optional_real(v));
    out[key.str()] = std::move(values);
  }
  return out;
}

SeriesMap series_from_json(const Json& doc, YearSpan years) {
  if (!doc.is_object()) schema_error("series must be an object");
  SeriesMap out;
  for (const auto& [name, values] : doc.items()) {
    auto key = SeriesKey::parse(name);
    if (!values.is_array() || values.size() != years.size()) {
      schema_error("series " + name + " must hold one entry per year");
    }
    Series s(key, years);
    for (std::size_t i = 0; i < values.size(); ++i) {
      s.values[i] = as_optional_real(values[i], "series value");
      if (s.values[i] && !(*s.values[i] >= 0.0)) schema_error("series " + name + " has a negative value");
    }
    out.emplace(std::move(key), std::move(s));
  }
  return out;
}

Json countries_to_json(const CountryRegistry& countries) {
  Json out = Json::object();
  for (const auto& [iso3, c] : countries.entries()) {
    out[iso3] = Json{{"name", c.display_name}, {"region", c.region}};
  }
  return out;
}

CountryRegistry countries_from_json(const Json& doc) {
  if (!doc.is_object()) schema_error("countries must be an object");
  CountryRegistry registry;
  for (const auto& [iso3, c] : doc.items()) {
    try {
      registry.add(CountryRef{iso3, member(c, "name").get<std::string>(), member(c, "region").get<std::string>()});
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::SchemaViolation) throw;
      schema_error(e.what());
    }
  }
  return registry;
}

Json cognostics_to_json(const std::map<SeriesKey, CognosticVector>& cognostics) {
  Json out = Json::object();
  for (const auto& [key, c] : cognostics) {
    out[key.str()] = Json{{"net_change", c.net_change},
                          {"max_annual_increase", optional_real(c.max_annual_increase)},
                          {"max_annual_decrease", optional_real(c.max_annual_decrease)},
                          {"mean_level", c.mean_level},
                          {"latest_value", c.latest_value}};
  }
  return out;
}

std::map<SeriesKey, CognosticVector> cognostics_from_json(const Json& doc) {
  if (!doc.is_object()) schema_error("cognostics must be an object");
  std::map<SeriesKey, CognosticVector> out;
  for (const auto& [name, c] : doc.items()) {
    CognosticVector v;
    v.key = SeriesKey::parse(name);
    v.net_change = as_real(member(c, "net_change"), "net_change");
    v.max_annual_increase = as_optional_real(member(c, "max_annual_increase"), "max_annual_increase");
    v.max_annual_decrease = as_optional_real(member(c, "max_annual_decrease"), "max_annual_decrease");
    v.mean_level = as_real(member(c, "mean_level"), "mean_level");
    v.latest_value = as_real(member(c, "latest_value"), "latest_value");
    out.emplace(v.key, std::move(v));
  }
  return out;
}

Json embeddings_to_json(const EmbeddingSet& embeddings) {
  Json per_drug = Json::object();
  for (const auto& [drug, layout] : embeddings.per_drug) per_drug[drug] = layout_to_json(layout);
  return Json{{"joint", layout_to_json(embeddings.joint)}, {"per_drug", std::move(per_drug)}};
}

EmbeddingSet embeddings_from_json(const Json& doc) {
  EmbeddingSet out;
  out.joint = layout_from_json(member(doc, "joint"));
  const auto& per_drug = member(doc, "per_drug");
  if (!per_drug.is_object()) schema_error("per_drug must be an object");
  for (const auto& [drug, layout] : per_drug.items()) out.per_drug.emplace(drug, layout_from_json(layout));
  return out;
}

Json trends_to_json(const TrendSet& trends) {
  Json grids = Json::object();
  for (const auto& [key, g] : trends.grids) grids[key.str()] = Json{{"level", g.level}, {"slope", g.slope}};
  const double h = trends.params.bandwidth_years;
  return Json{{"params",
               {{"kernel", "tricube"},
                {"bandwidth_years", std::isfinite(h) ? Json(h) : Json(nullptr)},
                {"ridge_lambda", trends.params.ridge_lambda}}},
              {"grids", std::move(grids)}};
}

TrendSet trends_from_json(const Json& doc, YearSpan years) {
  TrendSet out;
  const auto& params = member(doc, "params");
  if (member(params, "kernel") != "tricube") schema_error("unsupported trend kernel");
  const auto& h = member(params, "bandwidth_years");
  out.params.bandwidth_years = h.is_null() ? std::numeric_limits<double>::infinity() : as_real(h, "bandwidth_years");
  out.params.ridge_lambda = as_real(member(params, "ridge_lambda"), "ridge_lambda");
  const auto& grids = member(doc, "grids");
  if (!grids.is_object()) schema_error("trend grids must be an object");
  for (const auto& [name, g] : grids.items()) {
    TrendGrid grid;
    grid.key = SeriesKey::parse(name);
    grid.years = years;
    grid.level = as_real_array(member(g, "level"), years.size(), "trend level");
    grid.slope = as_real_array(member(g, "slope"), years.size(), "trend slope");
    grid.params = out.params;
    out.grids.emplace(grid.key, std::move(grid));
  }
  return out;
}

// ---------------------------------------------------------------------------

void validate_bundle(const AtlasBundle& b) {
  const std::set<std::string> drugs(b.drugs.begin(), b.drugs.end());
  for (const auto& [key, s] : b.series) {
    if (!b.countries.find(key.iso3)) {
      throw Error(ErrorKind::DanglingKey, "series " + key.str() + " references unknown country " + key.iso3);
    }
    if (!drugs.contains(key.drug)) {
      throw Error(ErrorKind::DanglingKey, "series " + key.str() + " references unknown drug " + key.drug);
    }
    if (s.span != b.years) throw Error(ErrorKind::SpanMismatch, "series " + key.str() + " is not on the bundle span");
  }
  for (const auto& [key, c] : b.cognostics) {
    if (!b.series.contains(key)) dangling("cognostics", key);
  }
  const auto check_layout = [&](const std::string& where, const Layout& layout) {
    for (const auto& key : layout.embedding.keys) {
      if (!b.series.contains(key)) dangling(where, key);
    }
  };
  check_layout("joint embedding", b.embeddings.joint);
  for (const auto& [drug, layout] : b.embeddings.per_drug) {
    if (!drugs.contains(drug)) throw Error(ErrorKind::DanglingKey, "per-drug embedding for unknown drug " + drug);
    check_layout(drug + " embedding", layout);
  }
  for (const auto& [key, g] : b.trends.grids) {
    if (!b.series.contains(key)) dangling("trends", key);
    if (g.years != b.years) throw Error(ErrorKind::SpanMismatch, "trend grid " + key.str() + " is not on the bundle span");
  }
}

AtlasBundle build_bundle(const SeriesMap& series, const std::vector<CognosticVector>& cognostics,
                         const EmbeddingSet& embeddings, const std::vector<TrendGrid>& trends,
                         const TrendParams& trend_params, const CountryRegistry& countries,
                         const std::vector<std::string>& drugs, YearSpan years) {
  AtlasBundle b;
  b.countries = countries;
  b.drugs = drugs;
  std::sort(b.drugs.begin(), b.drugs.end());
  b.years = years;
  b.series = series;
  for (const auto& c : cognostics) b.cognostics.emplace(c.key, c);
  b.embeddings = embeddings;
  b.trends.params = trend_params;
  for (const auto& g : trends) {
    auto grid = g;
    grid.params = trend_params;
    b.trends.grids.emplace(g.key, std::move(grid));
  }
  validate_bundle(b);
  return b;
}

Json to_json(const AtlasBundle& b) {
  return Json{{"schema_version", b.schema_version},
              {"years", years_to_json(b.years)},
              {"countries", countries_to_json(b.countries)},
              {"drugs", b.drugs},
              {"series", series_to_json(b.series)},
              {"cognostic_fields", cognostic_fields()},
              {"cognostics", cognostics_to_json(b.cognostics)},
              {"embedding", embeddings_to_json(b.embeddings)},
              {"trends", trends_to_json(b.trends)}};
}

AtlasBundle bundle_from_json(const Json& doc) {
  AtlasBundle b;
  try {
    const auto& version = member(doc, "schema_version");
    if (!version.is_number_integer() || version.get<int>() != kSchemaVersion) {
      schema_error("unsupported schema_version");
    }
    b.schema_version = version.get<int>();
    b.years = years_from_json(member(doc, "years"));
    b.countries = countries_from_json(member(doc, "countries"));
    const auto& drugs = member(doc, "drugs");
    if (!drugs.is_array()) schema_error("drugs must be an array");
    for (const auto& d : drugs) b.drugs.push_back(d.get<std::string>());
    b.series = series_from_json(member(doc, "series"), b.years);
    b.cognostics = cognostics_from_json(member(doc, "cognostics"));
    b.embeddings = embeddings_from_json(member(doc, "embedding"));
    b.trends = trends_from_json(member(doc, "trends"), b.years);
  } catch (const nlohmann::json::exception& e) {
    schema_error(e.what());
  }
  validate_bundle(b);
  return b;
}

std::string canonical_dump(const Json& doc) {
  std::string out;
  canonical_dump_into(doc, out);
  out.push_back('\n');
  return out;
}

std::string serialize_bundle(const AtlasBundle& bundle) { return canonical_dump(to_json(bundle)); }

AtlasBundle parse_bundle(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    schema_error(e.what());
  }
  return bundle_from_json(doc);
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoFailure, "cannot write '" + path.string() + "'");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error(ErrorKind::IoFailure, "short write to '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorKind::IoFailure, "cannot replace '" + path.string() + "'");
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_bundle(const AtlasBundle& bundle, const std::filesystem::path& path) {
  write_text_file(path, serialize_bundle(bundle));
}

AtlasBundle read_bundle(const std::filesystem::path& path) { return parse_bundle(read_text_file(path)); }

}  // namespace atlas
