#include <cmath>
#include <filesystem>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "subseas/error.hpp"
#include "subseas/synthetic.hpp"

using namespace subseas;

namespace {

const GridSpec kGrid = GridSpec::box(40, 41, 250, 251);

std::map<std::string, std::string> directory_contents(const std::filesystem::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    out[entry.path().filename().string()] = fixtures::read_text(entry.path().string());
  }
  return out;
}

}  // namespace

TEST(Synthetic, SameSeedGivesIdenticalFiles) {
  SyntheticSpec spec;
  spec.model_members = 2;
  fixtures::TempDir a, b;
  write_synthetic(generate_synthetic(17, kGrid, {2010, 2011}, spec), a.path().string());
  write_synthetic(generate_synthetic(17, kGrid, {2010, 2011}, spec), b.path().string());
  const auto left = directory_contents(a.path());
  EXPECT_EQ(left, directory_contents(b.path()));
  EXPECT_TRUE(left.count("target_tmp2m.csv"));
  EXPECT_TRUE(left.count("feature_x10.csv"));
  EXPECT_TRUE(left.count("model_member_02.csv"));
  EXPECT_TRUE(left.count("seasonal.csv"));
}

TEST(Synthetic, DifferentSeedsDiffer) {
  const auto a = generate_synthetic(1, kGrid, {2010, 2010});
  const auto b = generate_synthetic(2, kGrid, {2010, 2010});
  EXPECT_FALSE(a.dataset.target.identical(b.dataset.target));
}

TEST(Synthetic, NoiselessTargetIsSeasonalPlusSignal) {
  SyntheticSpec spec;
  spec.noise_sd = 0.0;
  const auto s = generate_synthetic(5, kGrid, {2012, 2012}, spec);
  EXPECT_EQ(s.truth.active.size(), 3u);
  EXPECT_NEAR(s.truth.oracle_skill, 1.0, 1e-12);
  const Frame& y = s.dataset.target;
  for (std::size_t i = 0; i < y.rows(); ++i) {
    const Date d = y.dates()[i];
    for (std::size_t g = 0; g < y.cols(); ++g) {
      double expected = s.truth.seasonal.at(d)[g];
      for (const auto& name : s.truth.active) {
        expected += s.truth.coefficients.at(name)[g] * (*s.dataset.features.at(name).row_at(d - Days{29}))[g];
      }
      ASSERT_NEAR(y.at(i, g), expected, 1e-12) << format_date(d);
    }
  }
}

TEST(Synthetic, ShapesAndRanges) {
  const auto s = generate_synthetic(8, kGrid, {2011, 2012});
  const Frame& y = s.dataset.target;
  EXPECT_EQ(y.dates().front(), make_date(2011, 1, 1));
  EXPECT_EQ(y.dates().back(), make_date(2012, 12, 31));
  for (double v : y.values()) {
    EXPECT_GE(v, 64.0);
    EXPECT_LT(v, 128.0);
  }
  for (const auto& [name, frame] : s.dataset.features) {
    EXPECT_EQ(frame.dates().front(), make_date(2010, 12, 3)) << name;
    EXPECT_EQ(frame.dates().back(), make_date(2012, 12, 31)) << name;
  }
  for (const auto& [name, beta] : s.truth.coefficients) {
    for (double b : beta) {
      EXPECT_GE(std::fabs(b), 0.5);
      EXPECT_LE(std::fabs(b), 1.5);
    }
  }
  EXPECT_THROW(generate_synthetic(1, kGrid, {2012, 2011}), Error);
  SyntheticSpec bad;
  bad.n_active = 11;
  EXPECT_THROW(generate_synthetic(1, kGrid, {2012, 2012}, bad), Error);
}

TEST(Synthetic, OracleSkillTracksRequestedSkill) {
  const auto s = generate_synthetic(21, GridSpec::box(38, 45, 240, 247), {2000, 2009});
  EXPECT_NEAR(s.truth.oracle_skill, 0.8, 0.05);
}

TEST(Synthetic, ManifestRoundTrip) {
  fixtures::TempDir dir;
  const auto s = generate_synthetic(33, kGrid, {2010, 2010});
  write_synthetic(s, dir.path().string());
  const auto m = read_manifest(dir.file("manifest.txt"));
  EXPECT_EQ(m.at("seed"), "33");
  EXPECT_EQ(m.at("grid_points"), "4");
  EXPECT_EQ(m.at("first_date"), "2010-01-01");
  EXPECT_EQ(m.at("feature_lag"), "29");
  EXPECT_EQ(std::stod(m.at("oracle_skill")), s.truth.oracle_skill);
  EXPECT_EQ(std::stod(m.at("noise_sd")), s.truth.noise_sd);

  const Dataset loaded = load_dataset(dir.path().string());
  EXPECT_TRUE(loaded.target.identical(s.dataset.target));
  EXPECT_EQ(loaded.features.size(), 10u);
  EXPECT_TRUE(loaded.features.at("x04").identical(s.dataset.features.at("x04")));
}
