#include "atlas/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>

#include "atlas/csv.hpp"
#include "atlas/error.hpp"

namespace atlas {
namespace {

bool is_iso3(std::string_view code) {
  return code.size() == 3 &&
         std::all_of(code.begin(), code.end(), [](char c) { return c >= 'A' && c <= 'Z'; });
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open '" + path.string() + "'");
  return in;
}

std::string row_label(std::size_t line_no) { return "row " + std::to_string(line_no); }

// Reads the header and returns the index of each requested column.
std::vector<std::size_t> locate_columns(const std::vector<std::string>& header,
                                        const std::vector<std::string>& wanted) {
  std::vector<std::size_t> idx;
  for (const auto& name : wanted) {
    const auto it = std::find_if(header.begin(), header.end(), [&](const std::string& h) {
      return csv::fold(h) == csv::fold(name);
    });
    if (it == header.end()) {
      throw Error(ErrorKind::MalformedRow, "header is missing column '" + name + "'");
    }
    idx.push_back(static_cast<std::size_t>(it - header.begin()));
  }
  return idx;
}

}  // namespace

// ---------------------------------------------------------------------------
// CountryRegistry

void CountryRegistry::add(CountryRef country) {
  if (!is_iso3(country.iso3)) {
    throw Error(ErrorKind::InvalidRegistry, "iso3 code '" + country.iso3 + "' is not [A-Z]{3}");
  }
  const auto& regions = region_set();
  if (std::find(regions.begin(), regions.end(), country.region) == regions.end()) {
    throw Error(ErrorKind::InvalidRegistry,
                "region '" + country.region + "' of " + country.iso3 + " is not a known region");
  }
  if (by_iso3_.contains(country.iso3)) {
    throw Error(ErrorKind::InvalidRegistry, "duplicate iso3 code " + country.iso3);
  }
  auto folded = csv::fold(country.display_name);
  if (folded.empty()) throw Error(ErrorKind::InvalidRegistry, country.iso3 + " has no display name");
  if (by_folded_name_.contains(folded)) {
    throw Error(ErrorKind::InvalidRegistry, "duplicate display name '" + country.display_name + "'");
  }
  by_folded_name_.emplace(std::move(folded), country.iso3);
  auto iso3 = country.iso3;
  by_iso3_.emplace(std::move(iso3), std::move(country));
}

const CountryRef* CountryRegistry::find(std::string_view iso3) const {
  const auto it = by_iso3_.find(std::string(iso3));
  return it == by_iso3_.end() ? nullptr : &it->second;
}

const CountryRef* CountryRegistry::find_by_name(std::string_view raw_name) const {
  const auto it = by_folded_name_.find(csv::fold(raw_name));
  return it == by_folded_name_.end() ? nullptr : find(it->second);
}

CountryRegistry CountryRegistry::load(std::istream& in) {
  CountryRegistry registry;
  std::string line;
  std::size_t line_no = 0;
  if (!csv::next_line(in, line, line_no)) return registry;
  auto header = csv::split_line(line);
  if (!header) throw Error(ErrorKind::InvalidRegistry, "unreadable country registry header");
  const auto cols = locate_columns(*header, {"iso3", "name", "region"});
  while (csv::next_line(in, line, line_no)) {
    auto fields = csv::split_line(line);
    if (!fields || fields->size() != header->size()) {
      throw Error(ErrorKind::InvalidRegistry, "country registry " + row_label(line_no) + " is malformed");
    }
    registry.add(CountryRef{std::string(csv::trim((*fields)[cols[0]])),
                            std::string(csv::trim((*fields)[cols[1]])),
                            std::string(csv::trim((*fields)[cols[2]]))});
  }
  return registry;
}

CountryRegistry CountryRegistry::load(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return load(in);
}

// ---------------------------------------------------------------------------
// AliasTable

void AliasTable::add(std::string_view raw_name, std::string iso3) {
  auto folded = csv::fold(raw_name);
  const auto [it, inserted] = table_.emplace(folded, iso3);
  if (!inserted && it->second != iso3) {
    throw Error(ErrorKind::InvalidRegistry,
                "alias '" + std::string(raw_name) + "' maps to both " + it->second + " and " + iso3);
  }
}

const std::string* AliasTable::find(std::string_view raw_name) const {
  const auto it = table_.find(csv::fold(raw_name));
  return it == table_.end() ? nullptr : &it->second;
}

AliasTable AliasTable::load(std::istream& in, const CountryRegistry& registry) {
  AliasTable table;
  std::string line;
  std::size_t line_no = 0;
  if (!csv::next_line(in, line, line_no)) return table;
  auto header = csv::split_line(line);
  if (!header) throw Error(ErrorKind::InvalidRegistry, "unreadable alias table header");
  const auto cols = locate_columns(*header, {"raw_name", "iso3"});
  while (csv::next_line(in, line, line_no)) {
    auto fields = csv::split_line(line);
    if (!fields || fields->size() != header->size()) {
      throw Error(ErrorKind::InvalidRegistry, "alias table " + row_label(line_no) + " is malformed");
    }
    std::string iso3(csv::trim((*fields)[cols[1]]));
    if (!registry.find(iso3)) {
      throw Error(ErrorKind::InvalidRegistry,
                  "alias table " + row_label(line_no) + " targets unregistered code " + iso3);
    }
    table.add((*fields)[cols[0]], std::move(iso3));
  }
  return table;
}

AliasTable AliasTable::load(const std::filesystem::path& path, const CountryRegistry& registry) {
  auto in = open_or_throw(path);
  return load(in, registry);
}

// ---------------------------------------------------------------------------
// DrugRegistry

void DrugRegistry::add(std::string canonical, const std::vector<std::string>& aliases) {
  if (canonical.empty() || csv::fold(canonical) != canonical ||
      canonical.find(' ') != std::string::npos) {
    throw Error(ErrorKind::InvalidRegistry,
                "drug name '" + canonical + "' must be lowercase without whitespace");
  }
  if (names_.contains(canonical)) throw Error(ErrorKind::InvalidRegistry, "duplicate drug " + canonical);
  std::vector<std::string> folded_aliases;
  for (const auto& alias : aliases) {
    auto folded = csv::fold(alias);
    if (folded.empty()) continue;
    const auto it = lookup_.find(folded);
    if (it != lookup_.end() && it->second != canonical) {
      throw Error(ErrorKind::InvalidRegistry, "drug alias '" + alias + "' is ambiguous");
    }
    lookup_[folded] = canonical;
    folded_aliases.push_back(std::move(folded));
  }
  lookup_[canonical] = canonical;
  names_.emplace(std::move(canonical), std::move(folded_aliases));
}

std::optional<DrugKind> DrugRegistry::resolve(std::string_view token) const {
  const auto it = lookup_.find(csv::fold(token));
  if (it == lookup_.end()) return std::nullopt;
  return DrugKind{it->second};
}

std::vector<std::string> DrugRegistry::names() const {
  std::vector<std::string> out;
  out.reserve(names_.size());
  for (const auto& [name, _] : names_) out.push_back(name);
  return out;
}

DrugRegistry DrugRegistry::defaults() {
  DrugRegistry r;
  r.add("codeine");
  r.add("fentanyl");
  r.add("hydrocodone");
  r.add("hydromorphone");
  r.add("methadone");
  r.add("morphine");
  r.add("oxycodone");
  r.add("pethidine", {"meperidine"});
  return r;
}

DrugRegistry DrugRegistry::load(std::istream& in) {
  DrugRegistry registry;
  std::string line;
  std::size_t line_no = 0;
  while (csv::next_line(in, line, line_no)) {
    const auto body = csv::trim(std::string_view(line).substr(0, line.find('#')));
    if (body.empty()) continue;
    auto fields = csv::split_line(body);
    if (!fields) throw Error(ErrorKind::InvalidRegistry, "drug registry " + row_label(line_no) + " is malformed");
    std::string canonical(csv::trim(fields->front()));
    std::vector<std::string> aliases(fields->begin() + 1, fields->end());
    registry.add(std::move(canonical), aliases);
  }
  return registry;
}

DrugRegistry DrugRegistry::load(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return load(in);
}

// ---------------------------------------------------------------------------

CountryRef normalize_country(std::string_view raw_name, const AliasTable& aliases,
                             const CountryRegistry& registry) {
  if (const auto* iso3 = aliases.find(raw_name)) {
    if (const auto* c = registry.find(*iso3)) return *c;
  }
  if (const auto* c = registry.find_by_name(raw_name)) return *c;
  std::string code(csv::trim(raw_name));
  std::transform(code.begin(), code.end(), code.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (is_iso3(code)) {
    if (const auto* c = registry.find(code)) return *c;
  }
  throw Error(ErrorKind::UnknownCountry, "\"" + std::string(raw_name) + "\"");
}

ParseResult parse_consumption_csv(std::istream& in, const Registries& registries,
                                  const ParseOptions& options) {
  ParseResult result;
  std::string line;
  std::size_t line_no = 0;
  if (!csv::next_line(in, line, line_no)) return result;

  const auto header = csv::split_line(line);
  if (!header) throw Error(ErrorKind::MalformedRow, "row 1: unterminated quote in header");
  const auto& s = options.schema;
  const auto cols = locate_columns(*header, {s.country, s.drug, s.year, s.quantity});

  std::set<std::string> unmatched_seen;
  while (csv::next_line(in, line, line_no)) {
    const auto fields = csv::split_line(line);
    if (!fields || fields->size() != header->size()) {
      throw Error(ErrorKind::MalformedRow, row_label(line_no) + ": expected " +
                                               std::to_string(header->size()) + " columns");
    }
    const auto& raw_country = (*fields)[cols[0]];
    const auto& raw_drug = (*fields)[cols[1]];
    const auto year = csv::parse_int((*fields)[cols[2]]);
    if (!year) {
      throw Error(ErrorKind::MalformedRow,
                  row_label(line_no) + ": unparsable year '" + (*fields)[cols[2]] + "'");
    }
    const auto quantity = csv::parse_real((*fields)[cols[3]]);
    if (!quantity) {
      throw Error(ErrorKind::MalformedRow,
                  row_label(line_no) + ": unparsable quantity '" + (*fields)[cols[3]] + "'");
    }
    if (*quantity < 0.0) {
      throw Error(ErrorKind::NegativeQuantity,
                  row_label(line_no) + ": quantity " + csv::format_real(*quantity) + " is negative");
    }
    if (!options.years.contains(*year)) {
      throw Error(ErrorKind::YearOutOfBounds,
                  row_label(line_no) + ": year " + std::to_string(*year) + " outside " +
                      std::to_string(options.years.first) + "-" + std::to_string(options.years.last));
    }
    auto drug = registries.drugs.resolve(raw_drug);
    if (!drug) {
      throw Error(ErrorKind::UnknownDrug, row_label(line_no) + ": '" + raw_drug + "'");
    }

    CountryRef country;
    try {
      country = normalize_country(raw_country, registries.aliases, registries.countries);
    } catch (const Error&) {
      if (options.unknown_countries == UnknownCountryMode::Error) {
        throw Error(ErrorKind::UnknownCountry, row_label(line_no) + ": \"" + raw_country + "\"");
      }
      const std::string trimmed(csv::trim(raw_country));
      if (unmatched_seen.insert(trimmed).second) result.unmatched_countries.push_back(trimmed);
      continue;
    }
    result.records.push_back(ConsumptionRecord{std::move(country), std::move(*drug), *year, *quantity});
  }
  return result;
}

SeriesMap build_series(const std::vector<ConsumptionRecord>& records, DuplicatePolicy policy,
                       YearSpan years) {
  SeriesMap out;
  for (const auto& r : records) {
    if (!years.contains(r.year)) {
      throw Error(ErrorKind::YearOutOfBounds, r.country.iso3 + "/" + r.drug.canonical_name + " year " +
                                                  std::to_string(r.year));
    }
    if (!(r.quantity_kg >= 0.0) || !std::isfinite(r.quantity_kg)) {
      throw Error(ErrorKind::NegativeQuantity,
                  r.country.iso3 + "/" + r.drug.canonical_name + " " + std::to_string(r.year));
    }
    SeriesKey key{r.country.iso3, r.drug.canonical_name};
    auto it = out.find(key);
    if (it == out.end()) it = out.emplace(key, Series(key, years)).first;
    auto& cell = it->second.values[years.index(r.year)];
    if (cell) {
      if (policy == DuplicatePolicy::Error) {
        throw Error(ErrorKind::DuplicateCell, "(" + key.iso3 + ", " + key.drug + ", " +
                                                  std::to_string(r.year) + ")");
      }
      *cell += r.quantity_kg;
    } else {
      cell = r.quantity_kg;
    }
  }
  return out;
}

void write_consumption_csv(std::ostream& out, const SeriesMap& series,
                           const CountryRegistry& registry, const CsvSchema& schema) {
  out << csv::escape(schema.country) << ',' << csv::escape(schema.drug) << ','
      << csv::escape(schema.year) << ',' << csv::escape(schema.quantity) << '\n';
  for (const auto& [key, s] : series) {
    const auto* country = registry.find(key.iso3);
    const std::string name = country ? country->display_name : key.iso3;
    for (int year = s.span.first; year <= s.span.last; ++year) {
      const auto v = s.at(year);
      if (!v) continue;
      out << csv::escape(name) << ',' << key.drug << ',' << year << ',' << csv::format_real(*v) << '\n';
    }
  }
}

}  // namespace atlas
