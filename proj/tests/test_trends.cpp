#include <gtest/gtest.h>

#include <limits>
#include <random>

#include "atlas/error.hpp"
#include "atlas/trends.hpp"
#include "oracles.hpp"

using namespace atlas;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

DenseSeries dense(std::vector<double> values, int first = 2000) {
  return DenseSeries{SeriesKey{"DNK", "oxycodone"}, YearSpan{first, first + static_cast<int>(values.size()) - 1},
                     std::move(values)};
}

std::vector<double> years_of(const DenseSeries& v) {
  std::vector<double> t;
  for (int y = v.span.first; y <= v.span.last; ++y) t.push_back(y);
  return t;
}

DenseSeries random_series(std::mt19937_64& rng, std::size_t n, double scale = 100.0) {
  std::uniform_real_distribution<double> u(0.0, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return dense(std::move(v), 1989);
}

}  // namespace

TEST(Tricube, Examples) {
  EXPECT_EQ(tricube_weight(0.0), 1.0);
  EXPECT_EQ(tricube_weight(1.0), 0.0);
  EXPECT_EQ(tricube_weight(-1.0), 0.0);
  EXPECT_EQ(tricube_weight(0.5), 0.669921875);
  EXPECT_EQ(tricube_weight(-0.5), 0.669921875);
  EXPECT_EQ(tricube_weight(3.0), 0.0);
}

TEST(TrendParams, Validation) {
  EXPECT_NO_THROW((TrendParams{7.0, 0.0}.validate()));
  EXPECT_NO_THROW((TrendParams{kInf, 1.0}.validate()));
  for (const TrendParams bad : {TrendParams{0.0, 0.01}, TrendParams{-1.0, 0.01}, TrendParams{7.0, -0.5},
                                TrendParams{NAN, 0.01}, TrendParams{7.0, NAN}}) {
    try {
      bad.validate();
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::InvalidParams);
    }
  }
}

TEST(LocalRidgeFit, ConstantSeries) {
  const auto v = dense(std::vector<double>(25, 4.0), 1989);
  for (double lambda : {0.0, 0.01, 1.0, 100.0}) {
    for (int t0 : {1989, 1995, 2013}) {
      const auto fit = local_ridge_fit(v, t0, TrendParams{7.0, lambda});
      EXPECT_NEAR(fit.level, 4.0, 1e-9);
      EXPECT_NEAR(fit.slope, 0.0, 1e-9);
    }
  }
}

TEST(LocalRidgeFit, ExactLine) {
  std::vector<double> values;
  for (int t = 2000; t <= 2010; ++t) values.push_back(2.0 * (t - 2000) + 1.0);
  const auto v = dense(values);
  for (double h : {1.5, 3.0, 7.0, kInf}) {
    const auto fit = local_ridge_fit(v, 2005, TrendParams{h, 0.0});
    EXPECT_NEAR(fit.level, 11.0, 1e-9) << "h=" << h;
    EXPECT_NEAR(fit.slope, 2.0, 1e-9) << "h=" << h;
  }
}

TEST(LocalRidgeFit, PenalizedLineMatchesGridOracle) {
  std::vector<double> values;
  for (int t = 2000; t <= 2010; ++t) values.push_back(2.0 * (t - 2000) + 1.0);
  const auto v = dense(values);
  const auto years = years_of(v);
  for (double lambda : {0.5, 5.0, 50.0}) {
    const auto fit = local_ridge_fit(v, 2005, TrendParams{7.0, lambda});
    EXPECT_GT(fit.slope, 0.0);
    EXPECT_LT(fit.slope, 2.0);
    const auto f = [&](double b0, double b1) { return oracle::ridge_objective(years, values, 2005, 7.0, lambda, b0, b1); };
    // Coarse-to-fine search for the grid minimizer, independent of the fit.
    auto best = oracle::grid_search(f, 11.0, 1.0, 0.1, 0.02, 100);
    best = oracle::grid_search(f, best.b0, best.b1, 0.001, 0.0002, 100);
    EXPECT_NEAR(fit.level, best.b0, 0.001);
    EXPECT_NEAR(fit.slope, best.b1, 0.0002);
  }
}

TEST(LocalRidgeFit, EmptyWindow) {
  // A bandwidth under one year leaves only t0 itself with positive weight.
  const auto v = dense({1, 2, 3});
  const auto fit = local_ridge_fit(v, 2001, TrendParams{0.5, 0.0});
  EXPECT_EQ(fit.level, 2.0);
  EXPECT_EQ(fit.slope, 0.0);
  try {
    local_ridge_fit(v, 2010, TrendParams{0.5, 0.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyWindow);
  }
}

TEST(LocalRidgeFit, UniformWeightsMatchOls) {
  std::mt19937_64 rng(25);
  for (int trial = 0; trial < 50; ++trial) {
    const auto v = random_series(rng, 25);
    const auto line = oracle::ols_normal_equations(years_of(v), v.values);
    for (int t0 = v.span.first; t0 <= v.span.last; ++t0) {
      const auto fit = local_ridge_fit(v, t0, TrendParams{kInf, 0.0});
      ASSERT_NEAR(fit.level, line.at(t0), 1e-9);
      ASSERT_NEAR(fit.slope, line.slope, 1e-9);
    }
  }
}

TEST(LocalRidgeFit, ObjectiveBeatsBruteForceGrid) {
  std::mt19937_64 rng(201);
  for (int trial = 0; trial < 20; ++trial) {
    const auto v = random_series(rng, 12, 10.0);
    const auto years = years_of(v);
    const int t0 = v.span.first + static_cast<int>(rng() % 12);
    const double h = std::uniform_real_distribution<double>(2.0, 10.0)(rng);
    const double lambda = std::uniform_real_distribution<double>(0.0, 2.0)(rng);
    const auto fit = local_ridge_fit(v, t0, TrendParams{h, lambda});
    const auto f = [&](double b0, double b1) { return oracle::ridge_objective(years, v.values, t0, h, lambda, b0, b1); };
    const double at_fit = f(fit.level, fit.slope);
    for (double spacing : {0.5, 1e-2, 1e-4}) {
      const auto best = oracle::grid_search(f, fit.level, fit.slope, spacing, spacing / 5, 100);
      ASSERT_LE(at_fit, best.value * (1 + 1e-12) + 1e-12);
    }
  }
}

TEST(LocalRidgeFit, LambdaShrinksSlope) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const auto v = random_series(rng, 25);
    const int t0 = v.span.first + static_cast<int>(rng() % 25);
    double prev = std::abs(local_ridge_fit(v, t0, TrendParams{7.0, 0.0}).slope);
    for (double lambda : {1e-3, 1e-2, 0.1, 1.0, 10.0, 100.0}) {
      const double s = std::abs(local_ridge_fit(v, t0, TrendParams{7.0, lambda}).slope);
      ASSERT_LE(s, prev * (1 + 1e-12));
      prev = s;
    }
  }
}

TEST(TrendGrid, ConstantAndLine) {
  const auto constant = trend_grid(dense(std::vector<double>(25, 3.5), 1989), TrendParams{});
  EXPECT_EQ(constant.years, (YearSpan{1989, 2013}));
  for (std::size_t i = 0; i < 25; ++i) {
    EXPECT_NEAR(constant.level[i], 3.5, 1e-9);
    EXPECT_NEAR(constant.slope[i], 0.0, 1e-9);
  }

  std::vector<double> line;
  for (int t = 0; t < 25; ++t) line.push_back(5.0 + 0.25 * t);
  const auto g = trend_grid(dense(line, 1989), TrendParams{7.0, 0.0});
  for (std::size_t i = 0; i < 25; ++i) {
    EXPECT_NEAR(g.slope[i], 0.25, 1e-9);
    EXPECT_NEAR(g.level[i], line[i], 1e-9);
  }

  const auto zeros = trend_grid(dense(std::vector<double>(10, 0.0)), TrendParams{});
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_EQ(zeros.level[i], 0.0);
    EXPECT_EQ(zeros.slope[i], 0.0);
  }
}

TEST(TrendGrid, UniformWeightsMatchOls) {
  std::mt19937_64 rng(26);
  const auto v = random_series(rng, 25, 5000.0);
  const auto line = oracle::ols_normal_equations(years_of(v), v.values);
  const auto g = trend_grid(v, TrendParams{kInf, 0.0});
  for (std::size_t i = 0; i < 25; ++i) {
    EXPECT_NEAR(g.level[i], line.at(1989.0 + static_cast<double>(i)), 1e-9 * 5000.0);
    EXPECT_NEAR(g.slope[i], line.slope, 1e-9 * 5000.0);
  }
}

TEST(TrendGrid, RequiresTwoYears) {
  EXPECT_THROW(trend_grid(dense({1.0}), TrendParams{}), Error);
}

TEST(TrendProperties, ScaleShiftAndTimeTranslation) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const auto v = random_series(rng, 25);
    const TrendParams p{7.0, 0.0};
    const auto base = trend_grid(v, p);

    const double a = std::uniform_real_distribution<double>(0.01, 1000.0)(rng);
    auto scaled = v;
    for (auto& x : scaled.values) x *= a;
    const auto gs = trend_grid(scaled, p);

    const double c = std::uniform_real_distribution<double>(-50.0, 50.0)(rng);
    auto shifted = v;
    for (auto& x : shifted.values) x += c;
    const auto gc = trend_grid(shifted, p);

    auto moved = v;
    moved.span = YearSpan{v.span.first + 7, v.span.last + 7};
    const auto gm = trend_grid(moved, p);
    EXPECT_EQ(gm.years, moved.span);

    for (std::size_t i = 0; i < 25; ++i) {
      ASSERT_NEAR(gs.level[i], a * base.level[i], 1e-9 * a * 100.0);
      ASSERT_NEAR(gs.slope[i], a * base.slope[i], 1e-9 * a * 100.0);
      ASSERT_NEAR(gc.level[i], base.level[i] + c, 1e-9 * 100.0);
      ASSERT_NEAR(gc.slope[i], base.slope[i], 1e-9 * 100.0);
      ASSERT_EQ(gm.level[i], base.level[i]);
      ASSERT_EQ(gm.slope[i], base.slope[i]);
    }
  }
}

// With lambda > 0 shift equivariance holds for the raw fit; unit-max scaling
// in the grid changes the effective penalty.
TEST(TrendProperties, RawFitShiftEquivarianceWithPenalty) {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 50; ++trial) {
    const auto v = random_series(rng, 25);
    const int t0 = v.span.first + static_cast<int>(rng() % 25);
    const TrendParams p{7.0, 0.3};
    auto shifted = v;
    for (auto& x : shifted.values) x += 17.0;
    const auto a = local_ridge_fit(v, t0, p);
    const auto b = local_ridge_fit(shifted, t0, p);
    ASSERT_NEAR(b.level, a.level + 17.0, 1e-9);
    ASSERT_NEAR(b.slope, a.slope, 1e-9);
  }
}
