#include <gtest/gtest.h>

#include <nlohmann/json.hpp>
#include <random>

#include "atlas/bundle.hpp"
#include "atlas/error.hpp"
#include "atlas/transform.hpp"
#include "test_support.hpp"

using namespace atlas;

namespace {

const YearSpan kSpan{2000, 2005};

CountryRegistry small_registry() {
  CountryRegistry r;
  r.add(CountryRef{"DNK", "Denmark", "Europe"});
  r.add(CountryRef{"HKG", "Hong Kong", "Asia"});
  r.add(CountryRef{"ZMB", "Zambia", "Africa"});
  return r;
}

Series series_for(const std::string& iso3, const std::string& drug, std::mt19937_64& rng) {
  Series s(SeriesKey{iso3, drug}, kSpan);
  std::uniform_real_distribution<double> u(0.0, 1e4);
  for (auto& v : s.values) {
    if (rng() % 4) v = u(rng);
  }
  if (s.present_count() == 0) s.values[0] = 0.0;
  return s;
}

/// Runs the numeric stages on `series` and assembles a bundle from them.
AtlasBundle assemble(const SeriesMap& series, const TrendParams& params = {}) {
  std::vector<CognosticVector> cog;
  std::vector<DenseSeries> rooted;
  std::vector<TrendGrid> grids;
  for (const auto& [key, s] : series) {
    cog.push_back(compute_cognostics(s));
    rooted.push_back(cube_root(densify(s, kSpan)));
    grids.push_back(trend_grid(densify(s, kSpan), params));
  }
  EmbeddingSet emb;
  emb.joint = compute_layout(rooted);
  return build_bundle(series, cog, emb, grids, params, small_registry(), {"oxycodone", "morphine"}, kSpan);
}

SeriesMap random_series_map(std::mt19937_64& rng) {
  SeriesMap m;
  for (const std::string iso3 : {"DNK", "HKG", "ZMB"}) {
    for (const std::string drug : {"morphine", "oxycodone"}) {
      auto s = series_for(iso3, drug, rng);
      m.emplace(s.key, s);
    }
  }
  return m;
}

}  // namespace

TEST(BuildBundle, OneSeriesHasExplicitEmptyLayout) {
  std::mt19937_64 rng(1);
  SeriesMap m;
  auto s = series_for("DNK", "morphine", rng);
  m.emplace(s.key, s);
  const auto b = assemble(m);
  EXPECT_EQ(b.schema_version, kSchemaVersion);
  EXPECT_EQ(b.series.size(), 1u);
  EXPECT_EQ(b.cognostics.size(), 1u);
  EXPECT_EQ(b.trends.grids.size(), 1u);
  EXPECT_TRUE(b.embeddings.joint.empty);
  EXPECT_FALSE(b.embeddings.joint.reason.empty());
  EXPECT_EQ(b.drugs, (std::vector<std::string>{"morphine", "oxycodone"}));

  const auto doc = to_json(b);
  EXPECT_EQ(doc["embedding"]["joint"]["status"], "empty");
  EXPECT_EQ(doc["embedding"]["joint"]["keys"].size(), 0u);
}

TEST(BuildBundle, DanglingKeys) {
  std::mt19937_64 rng(2);
  const auto m = random_series_map(rng);
  const auto expect_dangling = [](const auto& fn, const std::string& needle) {
    try {
      fn();
      FAIL() << "expected DanglingKey";
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::DanglingKey);
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };

  TrendGrid stray = trend_grid(densify(m.begin()->second, kSpan), TrendParams{});
  stray.key = SeriesKey{"DNK", "fentanyl"};
  expect_dangling([&] { build_bundle(m, {}, {}, {stray}, TrendParams{}, small_registry(), {"morphine", "oxycodone"}, kSpan); },
                  "DNK:fentanyl");

  CognosticVector c = compute_cognostics(m.begin()->second);
  c.key = SeriesKey{"ZMB", "codeine"};
  expect_dangling([&] { build_bundle(m, {c}, {}, {}, TrendParams{}, small_registry(), {"morphine", "oxycodone"}, kSpan); },
                  "ZMB:codeine");

  EmbeddingSet emb;
  emb.per_drug["morphine"].embedding.keys = {SeriesKey{"USA", "morphine"}};
  emb.per_drug["morphine"].embedding.coords = {{0.0, 0.0}};
  expect_dangling([&] { build_bundle(m, {}, emb, {}, TrendParams{}, small_registry(), {"morphine", "oxycodone"}, kSpan); },
                  "USA:morphine");

  // Series whose country or drug is not registered.
  expect_dangling([&] { build_bundle(m, {}, {}, {}, TrendParams{}, CountryRegistry{}, {"morphine", "oxycodone"}, kSpan); },
                  "DNK");
  expect_dangling([&] { build_bundle(m, {}, {}, {}, TrendParams{}, small_registry(), {"morphine"}, kSpan); },
                  "oxycodone");
}

TEST(BuildBundle, EmptyInputsGiveRegistriesOnly) {
  const auto b = build_bundle({}, {}, EmbeddingSet{Layout{{}, true, "fewer than 3 series (0)"}, {}}, {}, TrendParams{},
                              small_registry(), {"morphine"}, kSpan);
  EXPECT_TRUE(b.series.empty());
  EXPECT_EQ(b.countries.size(), 3u);
  const auto text = serialize_bundle(b);
  EXPECT_EQ(parse_bundle(text), b);
}

TEST(WriteBundle, DeterministicBytesAndRoundTrip) {
  std::mt19937_64 rng(3);
  const auto m = random_series_map(rng);
  for (const TrendParams p : {TrendParams{}, TrendParams{std::numeric_limits<double>::infinity(), 0.0}}) {
    const auto b = assemble(m, p);
    ASSERT_FALSE(b.embeddings.joint.empty);
    test::TempDir dir("bundle");
    write_bundle(b, dir.path() / "a.json");
    write_bundle(assemble(m, p), dir.path() / "b.json");
    const auto a_text = read_text_file(dir.path() / "a.json");
    EXPECT_EQ(a_text, read_text_file(dir.path() / "b.json"));
    EXPECT_EQ(a_text.back(), '\n');
    EXPECT_EQ(read_bundle(dir.path() / "a.json"), b);
    EXPECT_FALSE(std::filesystem::exists(dir.path() / "a.json.tmp"));
  }
}

TEST(WriteBundle, MissingValuesAreNullNotZero) {
  std::mt19937_64 rng(4);
  SeriesMap m;
  Series s(SeriesKey{"HKG", "morphine"}, kSpan);
  s.set(2001, 0.0);
  s.set(2003, 2.5);
  m.emplace(s.key, s);
  const auto doc = Json::parse(serialize_bundle(assemble(m)));
  EXPECT_EQ(doc["series"]["HKG:morphine"].dump(), "[null,0,null,2.5,null,null]");
  EXPECT_EQ(doc["cognostics"]["HKG:morphine"]["max_annual_increase"], nullptr);
}

TEST(WriteBundle, UnwritablePath) {
  std::mt19937_64 rng(5);
  const auto b = assemble(random_series_map(rng));
  try {
    write_bundle(b, "/nonexistent-dir/for/sure/atlas.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IoFailure);
    EXPECT_EQ(classify(e.kind()), ErrorClass::Data);
  }
  EXPECT_THROW(read_bundle("/nonexistent-dir/atlas.json"), Error);
}

TEST(CanonicalDump, SortedCompactShortest) {
  const Json doc = Json::parse(R"({"b":[1.0,0.1,-0.0,1e300,5e-324,3],"a":{"z":null,"y":true,"x":"q\"u"}})");
  EXPECT_EQ(canonical_dump(doc), "{\"a\":{\"x\":\"q\\\"u\",\"y\":true,\"z\":null},\"b\":[1,0.1,0,1e+300,5e-324,3]}\n");
  Json bad = Json::array({std::numeric_limits<double>::infinity()});
  EXPECT_THROW(canonical_dump(bad), Error);
}

TEST(CanonicalDump, FloatsRoundTripExactly) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> mag(-300.0, 300.0);
  for (int i = 0; i < 2000; ++i) {
    const double x = (rng() % 2 ? 1 : -1) * std::pow(10.0, mag(rng));
    const auto text = canonical_dump(Json::array({x}));
    EXPECT_EQ(Json::parse(text)[0].get<double>(), x) << text;
  }
}

TEST(ParseBundle, RejectsStructuralErrors) {
  std::mt19937_64 rng(7);
  const auto good = to_json(assemble(random_series_map(rng)));
  const auto expect_schema = [](const Json& doc) {
    try {
      bundle_from_json(doc);
      FAIL() << doc.dump().substr(0, 80);
    } catch (const Error& e) {
      EXPECT_TRUE(e.kind() == ErrorKind::SchemaViolation || e.kind() == ErrorKind::DanglingKey) << e.what();
    }
  };
  auto doc = good;
  doc["schema_version"] = 2;
  expect_schema(doc);
  doc = good;
  doc.erase("trends");
  expect_schema(doc);
  doc = good;
  doc["series"]["DNK:morphine"].erase(0);
  expect_schema(doc);
  doc = good;
  doc["series"]["DNK:morphine"][0] = "12";
  expect_schema(doc);
  doc = good;
  doc["embedding"]["joint"]["status"] = "maybe";
  expect_schema(doc);
  doc = good;
  doc["embedding"]["joint"]["keys"][0] = "no-colon";
  expect_schema(doc);
  doc = good;
  doc["cognostics"]["USA:morphine"] = doc["cognostics"]["DNK:morphine"];
  expect_schema(doc);
  EXPECT_THROW(parse_bundle("{not json"), Error);
  EXPECT_NO_THROW(bundle_from_json(good));
}
