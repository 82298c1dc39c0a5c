#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "subseas/error.hpp"
#include "subseas/climatology.hpp"
#include "subseas/synthetic.hpp"

using namespace subseas;

namespace {

const GridSpec kGrid({{40, 250}, {41, 250}, {41, 251}});

std::vector<Date> years_of_days(int first, int last) {
  return fixtures::days_between(make_date(first, 1, 1), make_date(last, 12, 31));
}

bool is_feb29(Date d) {
  const std::chrono::year_month_day ymd{d};
  return ymd.month() == std::chrono::February && ymd.day() == std::chrono::day{29};
}

}  // namespace

TEST(Climatology, ConstantSeriesGivesConstant) {
  const Frame f = fixtures::make_frame("t", kGrid, years_of_days(2001, 2004), [](Date, std::size_t g) {
    return 90.0 + static_cast<double>(g);
  });
  const Climatology c = compute_climatology(f, {2001, 2004});
  for (int v = 1; v <= 365; ++v) {
    ASSERT_TRUE(c.covers(DayOfYear{v}));
    for (std::size_t g = 0; g < kGrid.size(); ++g) EXPECT_EQ(c.at(DayOfYear{v})[g], 90.0 + static_cast<double>(g));
    EXPECT_EQ(c.counts(DayOfYear{v})[0], 4);
  }
}

TEST(Climatology, MeanOfTwoYears) {
  const std::vector<Date> dates{make_date(2001, 1, 1), make_date(2002, 1, 1)};
  const Frame f = fixtures::make_frame("t", kGrid, dates, [](Date d, std::size_t) {
    return year_of(d) == 2001 ? 1.0 : 3.0;
  });
  const Climatology c = compute_climatology(f, {2001, 2002});
  EXPECT_EQ(c.at(make_date(2017, 1, 1))[0], 2.0);
  EXPECT_FALSE(c.covers(DayOfYear{2}));
  try {
    (void)c.at(DayOfYear{2});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UncoveredMonthDay);
  }
}

TEST(Climatology, OnlyBaseYearsContribute) {
  const Frame f = fixtures::make_frame("t", kGrid, years_of_days(2000, 2003), [](Date d, std::size_t) {
    return static_cast<double>(year_of(d));
  });
  EXPECT_EQ(compute_climatology(f, {2001, 2002}).at(DayOfYear{100})[0], 2001.5);
}

TEST(Climatology, LeapDayDoesNotContribute) {
  const std::vector<Date> dates{make_date(2004, 2, 28), make_date(2004, 2, 29), make_date(2005, 2, 28)};
  const Frame f = fixtures::make_frame("t", kGrid, dates, [](Date d, std::size_t) {
    return d == make_date(2004, 2, 29) ? 1000.0 : 10.0;
  });
  const Climatology c = compute_climatology(f, {2004, 2005});
  EXPECT_EQ(c.at(DayOfYear{59})[0], 10.0);
  EXPECT_EQ(c.at(make_date(2016, 2, 29))[0], 10.0);
}

TEST(Climatology, MissingCellsAreSkippedButMustNotCoverWholeDay) {
  const std::vector<Date> dates{make_date(2001, 3, 1), make_date(2002, 3, 1)};
  Frame f = fixtures::make_frame("t", kGrid, dates, [](Date d, std::size_t) { return year_of(d) == 2001 ? 5.0 : 7.0; });
  f.at(0, 1) = kMissing;
  const Climatology c = compute_climatology(f, {2001, 2002});
  EXPECT_EQ(c.at(DayOfYear{60})[0], 6.0);
  EXPECT_EQ(c.at(DayOfYear{60})[1], 7.0);
  EXPECT_EQ(c.counts(DayOfYear{60})[1], 1);
  f.at(1, 1) = kMissing;
  try {
    compute_climatology(f, {2001, 2002});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UncoveredMonthDay);
  }
}

TEST(Climatology, RecoversSeasonalCycleWithinSamplingError) {
  SyntheticSpec spec;
  const int years = 30;
  const auto s = generate_synthetic(4, kGrid, {1981, 1981 + years - 1}, spec);
  const Climatology c = compute_climatology(s.dataset.target, {1981, 1981 + years - 1});
  // Residual sd is bounded by signal plus noise; signal variance is at most
  // 3 * 1.5^2 and the noise is set from the target skill.
  const double residual_sd = std::sqrt(3 * 2.25 + s.truth.noise_sd * s.truth.noise_sd);
  const double bound = 4.0 * residual_sd / std::sqrt(static_cast<double>(years));
  for (int v = 1; v <= 365; ++v) {
    for (std::size_t g = 0; g < kGrid.size(); ++g) {
      EXPECT_NEAR(c.at(DayOfYear{v})[g], s.truth.seasonal.at(DayOfYear{v})[g], bound) << v;
    }
  }
}

TEST(Climatology, AnomalyRoundTripIsExactOnSyntheticRange) {
  const auto s = generate_synthetic(12, kGrid, {1990, 2000});
  const Frame& y = s.dataset.target;
  const Climatology c = compute_climatology(y, {1990, 1999});
  const Frame a = anomalize(y, c);
  EXPECT_TRUE(add_climatology(a, c).identical(y));
  for (std::size_t i = 0; i < y.rows(); ++i) {
    const auto clim = c.at(y.dates()[i]);
    for (std::size_t g = 0; g < y.cols(); ++g) ASSERT_EQ(a.at(i, g) + clim[g], y.at(i, g));
  }
}

TEST(Climatology, LeapDayAnomalyUsesFeb28) {
  const std::vector<Date> base{make_date(2001, 2, 28), make_date(2002, 2, 28)};
  const Frame f = fixtures::make_frame("t", kGrid, base, [](Date, std::size_t) { return 4.0; });
  const Climatology c = compute_climatology(f, {2001, 2002});
  const Frame leap = fixtures::make_frame("t", kGrid, {make_date(2004, 2, 29)}, [](Date, std::size_t) { return 6.5; });
  EXPECT_EQ(anomalize(leap, c).at(0, 0), 2.5);
}

TEST(Climatology, AnomaliesHaveZeroClimatology) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> normal(50.0, 10.0);
  const Frame f = fixtures::make_frame("t", kGrid, years_of_days(2001, 2008), [&](Date, std::size_t) {
    return normal(rng);
  });
  const Climatology c = compute_climatology(f, {2001, 2008});
  const Climatology ca = compute_climatology(anomalize(f, c), {2001, 2008});
  for (int v = 1; v <= 365; ++v) {
    for (double x : ca.at(DayOfYear{v})) EXPECT_LE(std::fabs(x), 1e-12);
  }
}

TEST(Climatology, InvariantToPermutingBaseYears) {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> normal(0.0, 3.0);
  const int first = 2001, last = 2010;
  std::vector<std::vector<double>> by_year(last - first + 1);
  for (auto& v : by_year) v = fixtures::normal_vector(rng, 365 * kGrid.size());
  std::vector<int> perm(by_year.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  auto build = [&](bool permuted) {
    return fixtures::make_frame("t", kGrid, years_of_days(first, last), [&](Date d, std::size_t g) {
      if (is_feb29(d)) return 0.0;
      const int y = year_of(d) - first;
      const auto& v = by_year[static_cast<std::size_t>(permuted ? perm[static_cast<std::size_t>(y)] : y)];
      return v[static_cast<std::size_t>(day_of_year(d).value() - 1) * kGrid.size() + g];
    });
  };
  const Climatology a = compute_climatology(build(false), {first, last});
  const Climatology b = compute_climatology(build(true), {first, last});
  for (int v = 1; v <= 365; ++v) {
    for (std::size_t g = 0; g < kGrid.size(); ++g) {
      EXPECT_NEAR(a.at(DayOfYear{v})[g], b.at(DayOfYear{v})[g], 1e-12);
    }
  }
}

TEST(Climatology, SentinelFileRoundTrip) {
  fixtures::TempDir dir;
  const auto s = generate_synthetic(2, kGrid, {2001, 2003});
  const Climatology c = compute_climatology(s.dataset.target, {2001, 2003});
  write_climatology(c, dir.file("clim_tmp2m.csv"));
  const Frame written = read_frame(dir.file("clim_tmp2m.csv"));
  EXPECT_EQ(written.rows(), 365u);
  EXPECT_EQ(written.dates().front(), make_date(1799, 12, 19));
  EXPECT_EQ(written.dates().back(), make_date(1800, 12, 18));
  const Climatology back = read_climatology(dir.file("clim_tmp2m.csv"));
  for (int v = 1; v <= 365; ++v) {
    for (std::size_t g = 0; g < kGrid.size(); ++g) EXPECT_EQ(back.at(DayOfYear{v})[g], c.at(DayOfYear{v})[g]);
  }
}

TEST(Climatology, ReaderRejectsRepeatedMonthDay) {
  fixtures::TempDir dir;
  fixtures::write_text(dir.file("c.csv"), "lat,lon,start_date,value\n40,250,2001-01-01,1\n40,250,2002-01-01,2\n");
  try {
    read_climatology(dir.file("c.csv"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DuplicateKey);
  }
}
