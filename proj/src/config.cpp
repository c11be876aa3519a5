#include "atlas/config.hpp"

#include <cstdlib>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "atlas/bundle.hpp"
#include "atlas/csv.hpp"
#include "atlas/error.hpp"

#ifndef ATLAS_DEFAULT_DATA_DIR
#define ATLAS_DEFAULT_DATA_DIR "data"
#endif

namespace atlas {
namespace {

namespace fs = std::filesystem;
using Errors = std::vector<std::string>;
using Setter = std::function<void(PipelineConfig&, const std::string&, const fs::path&, Errors&)>;

fs::path resolve(const fs::path& base, const std::string& value) {
  const fs::path p(value);
  return p.is_absolute() || base.empty() ? p : base / p;
}

Setter path_field(fs::path PipelineConfig::*field) {
  return [field](PipelineConfig& c, const std::string& v, const fs::path& base, Errors& errors) {
    if (v.empty()) {
      errors.push_back("empty path");
      return;
    }
    c.*field = resolve(base, v);
  };
}

Setter string_field(std::string CsvSchema::*field) {
  return [field](PipelineConfig& c, const std::string& v, const fs::path&, Errors& errors) {
    if (v.empty()) errors.push_back("empty column name");
    c.schema.*field = v;
  };
}

template <class Apply>
Setter real_field(Apply apply) {
  return [apply](PipelineConfig& c, const std::string& v, const fs::path&, Errors& errors) {
    const auto x = csv::parse_real(v);
    if (!x) {
      errors.push_back("'" + v + "' is not a number");
      return;
    }
    apply(c, *x, errors);
  };
}

template <class Apply>
Setter int_field(Apply apply) {
  return [apply](PipelineConfig& c, const std::string& v, const fs::path&, Errors& errors) {
    const auto x = csv::parse_int(v);
    if (!x) {
      errors.push_back("'" + v + "' is not an integer");
      return;
    }
    apply(c, *x, errors);
  };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table{
      {"input_csv", path_field(&PipelineConfig::input_csv)},
      {"countries_csv", path_field(&PipelineConfig::countries_csv)},
      {"aliases_csv", path_field(&PipelineConfig::aliases_csv)},
      {"drugs_file", path_field(&PipelineConfig::drugs_file)},
      {"conversion_csv", path_field(&PipelineConfig::conversion_csv)},
      {"output_dir", path_field(&PipelineConfig::output_dir)},
      {"column_country", string_field(&CsvSchema::country)},
      {"column_drug", string_field(&CsvSchema::drug)},
      {"column_year", string_field(&CsvSchema::year)},
      {"column_quantity", string_field(&CsvSchema::quantity)},
      {"year_first", int_field([](PipelineConfig& c, int y, Errors&) { c.years.first = y; })},
      {"year_last", int_field([](PipelineConfig& c, int y, Errors&) { c.years.last = y; })},
      {"duplicate_policy",
       [](PipelineConfig& c, const std::string& v, const fs::path&, Errors& errors) {
         if (v == "error") c.duplicate_policy = DuplicatePolicy::Error;
         else if (v == "sum") c.duplicate_policy = DuplicatePolicy::Sum;
         else errors.push_back("expected 'error' or 'sum', got '" + v + "'");
       }},
      {"unknown_countries",
       [](PipelineConfig& c, const std::string& v, const fs::path&, Errors& errors) {
         if (v == "error") c.unknown_countries = UnknownCountryMode::Error;
         else if (v == "report") c.unknown_countries = UnknownCountryMode::Report;
         else errors.push_back("expected 'error' or 'report', got '" + v + "'");
       }},
      // "inf" selects uniform weights over the whole span.
      {"bandwidth_years",
       [](PipelineConfig& c, const std::string& v, const fs::path& base, Errors& errors) {
         if (csv::fold(v) == "inf") {
           c.trends.bandwidth_years = std::numeric_limits<double>::infinity();
           return;
         }
         real_field([](PipelineConfig& cc, double x, Errors& e) {
           if (!(x > 0.0)) e.push_back("must be > 0 or 'inf'");
           cc.trends.bandwidth_years = x;
         })(c, v, base, errors);
       }},
      {"ridge_lambda", real_field([](PipelineConfig& c, double x, Errors& errors) {
         if (!(x >= 0.0)) errors.push_back("must be >= 0");
         c.trends.ridge_lambda = x;
       })},
      {"mds_tol", real_field([](PipelineConfig& c, double x, Errors& errors) {
         if (!(x > 0.0)) errors.push_back("must be > 0");
         c.mds.tol = x;
       })},
      {"mds_max_iter", int_field([](PipelineConfig& c, int x, Errors& errors) {
         if (x < 0) errors.push_back("must be >= 0");
         else c.mds.max_iter = static_cast<std::size_t>(x);
       })},
      {"threads", int_field([](PipelineConfig& c, int x, Errors& errors) {
         if (x < 1) errors.push_back("must be >= 1");
         else c.threads = static_cast<unsigned>(x);
       })},
      {"per_drug_embeddings",
       [](PipelineConfig& c, const std::string& v, const fs::path&, Errors& errors) {
         if (v == "true" || v == "on" || v == "1") c.per_drug_embeddings = true;
         else if (v == "false" || v == "off" || v == "0") c.per_drug_embeddings = false;
         else errors.push_back("expected true/false, got '" + v + "'");
       }},
  };
  return table;
}

void assign(PipelineConfig& config, const std::string& key, const std::string& value, const fs::path& base,
            const std::string& where, Errors& errors) {
  const auto it = setters().find(key);
  if (it == setters().end()) {
    errors.push_back(where + ": unknown key '" + key + "'");
    return;
  }
  Errors local;
  it->second(config, value, base, local);
  for (const auto& e : local) errors.push_back(where + ": " + key + ": " + e);
}

void check_consistency(const PipelineConfig& c, Errors& errors) {
  if (c.years.first > c.years.last) errors.push_back("year_first exceeds year_last");
  if (c.years.size() < 2) errors.push_back("the year span must cover at least 2 years");
}

[[noreturn]] void fail(const Errors& errors) {
  std::string message = std::to_string(errors.size()) + " configuration problem(s)";
  for (const auto& e : errors) message += "\n  " + e;
  throw Error(ErrorKind::Config, message);
}

}  // namespace

fs::path default_data_dir() {
  if (const char* env = std::getenv("ATLAS_DATA_DIR"); env && *env) return env;
  return ATLAS_DEFAULT_DATA_DIR;
}

PipelineConfig PipelineConfig::defaults() {
  PipelineConfig c;
  const auto dir = default_data_dir();
  c.countries_csv = dir / "countries.csv";
  c.aliases_csv = dir / "country_aliases.csv";
  c.drugs_file = dir / "drugs.txt";
  c.conversion_csv = dir / "conversion_factors.csv";
  return c;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, _] : setters()) k.push_back(name);
    return k;
  }();
  return keys;
}

PipelineConfig parse_config(const std::string& text, const fs::path& base_dir, PipelineConfig base) {
  Errors errors;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const auto body = csv::trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string where = "line " + std::to_string(line_no);
    if (eq == std::string_view::npos) {
      errors.push_back(where + ": expected 'key = value'");
      continue;
    }
    assign(base, std::string(csv::trim(body.substr(0, eq))), std::string(csv::trim(body.substr(eq + 1))),
           base_dir, where, errors);
  }
  check_consistency(base, errors);
  if (!errors.empty()) fail(errors);
  return base;
}

PipelineConfig load_config(const fs::path& path) {
  if (!fs::is_regular_file(path)) fail({"config file '" + path.string() + "' does not exist"});
  return parse_config(read_text_file(path), path.parent_path());
}

void apply_overrides(PipelineConfig& config, const std::vector<std::string>& assignments) {
  Errors errors;
  for (const auto& a : assignments) {
    const auto eq = a.find('=');
    if (eq == std::string::npos) {
      errors.push_back("override '" + a + "': expected key=value");
      continue;
    }
    assign(config, std::string(csv::trim(a.substr(0, eq))), std::string(csv::trim(a.substr(eq + 1))), {},
           "override", errors);
  }
  check_consistency(config, errors);
  if (!errors.empty()) fail(errors);
}

std::vector<std::string> missing_inputs(const PipelineConfig& c) {
  Errors errors;
  const auto need = [&](const char* key, const fs::path& p) {
    if (p.empty()) errors.push_back(std::string(key) + " is not set");
    else if (!fs::is_regular_file(p)) errors.push_back(std::string(key) + ": '" + p.string() + "' does not exist");
  };
  need("input_csv", c.input_csv);
  need("countries_csv", c.countries_csv);
  need("aliases_csv", c.aliases_csv);
  need("drugs_file", c.drugs_file);
  need("conversion_csv", c.conversion_csv);
  return errors;
}

}  // namespace atlas
