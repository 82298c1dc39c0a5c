#include "subseas/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "subseas/error.hpp"
#include "subseas/skill.hpp"

namespace subseas {

namespace fs = std::filesystem;

namespace {

std::string feature_name(int j) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "x%02d", j + 1);
  return buf;
}

std::vector<Date> date_range(Date first, Date last) {
  std::vector<Date> out;
  for (Date d = first; d <= last; d += Days{1}) out.push_back(d);
  return out;
}

// Two-week means of a unit-variance AR(1) field, rescaled to unit variance.
Frame make_feature(std::mt19937_64& rng, const std::string& name, const GridSpec& grid, Date first, Date last,
                   const SyntheticSpec& spec) {
  const std::vector<Date> days = date_range(first, last + Days{spec.period_days - 1});
  const std::size_t G = grid.size();
  std::normal_distribution<double> normal;
  const double phi = spec.feature_persistence;
  const double innovation = std::sqrt(1.0 - phi * phi);
  Frame daily = Frame::missing(name, grid, days);
  for (std::size_t g = 0; g < G; ++g) {
    double x = normal(rng);
    for (std::size_t i = 0; i < days.size(); ++i) {
      if (i > 0) x = phi * x + innovation * normal(rng);
      daily.at(i, g) = x;
    }
  }
  const Frame agg = aggregate_daily(daily, {AggregationKind::Mean, spec.period_days, true});
  Frame out = agg.until(last);
  const double sd = population_stddev(out.values());
  std::vector<double> scaled(out.values().begin(), out.values().end());
  for (double& v : scaled) v /= sd;
  return Frame(name, grid, out.dates(), std::move(scaled));
}

}  // namespace

SyntheticDataset generate_synthetic(std::uint64_t seed, const GridSpec& grid, YearRange years,
                                    const SyntheticSpec& spec) {
  if (spec.n_active > spec.n_features || spec.n_active < 0) {
    throw Error(ErrorCode::InvalidArgument, "synthetic: n_active must lie in 0..n_features");
  }
  if (grid.empty() || years.last < years.first) throw Error(ErrorCode::InvalidArgument, "synthetic: empty domain");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal;

  const std::size_t G = grid.size();
  const Date first = make_date(years.first, 1, 1);
  const Date last = make_date(years.last, 12, 31);
  const std::vector<Date> dates = date_range(first, last);

  SyntheticDataset out;
  SyntheticTruth& truth = out.truth;
  truth.seed = seed;
  truth.feature_lag = spec.feature_lag;

  Dataset& ds = out.dataset;
  ds.target_variable = spec.target_variable;
  ds.period_days = spec.period_days;
  for (int j = 0; j < spec.n_features; ++j) {
    const std::string name = feature_name(j);
    truth.features.push_back(name);
    ds.features.emplace(name, make_feature(rng, name, grid, first - Days{spec.feature_lag}, last, spec));
  }

  std::vector<int> order(static_cast<std::size_t>(spec.n_features));
  for (int j = 0; j < spec.n_features; ++j) order[static_cast<std::size_t>(j)] = j;
  std::shuffle(order.begin(), order.end(), rng);
  order.resize(static_cast<std::size_t>(spec.n_active));
  std::sort(order.begin(), order.end());
  for (int j : order) {
    const std::string name = feature_name(j);
    truth.active.push_back(name);
    std::vector<double> beta(G);
    for (auto& b : beta) {
      const double magnitude = spec.coefficient_min + (spec.coefficient_max - spec.coefficient_min) * unit(rng);
      b = unit(rng) < 0.5 ? -magnitude : magnitude;
    }
    truth.coefficients.emplace(name, std::move(beta));
  }

  truth.seasonal = Climatology(spec.target_variable, grid);
  {
    std::vector<double> offset(G), phase(G);
    for (std::size_t g = 0; g < G; ++g) {
      offset[g] = spec.spatial_offset * (2.0 * unit(rng) - 1.0);
      phase[g] = 365.0 * unit(rng);
    }
    std::vector<double> row(G);
    for (int v = 1; v <= 365; ++v) {
      for (std::size_t g = 0; g < G; ++g) {
        row[g] = spec.baseline + offset[g] +
                 spec.seasonal_amplitude * std::cos(2.0 * std::numbers::pi * (v - 1 - phase[g]) / 365.0);
      }
      truth.seasonal.set(DayOfYear{v}, row);
    }
  }

  // Signal from lagged active features.
  std::vector<double> signal(dates.size() * G, 0.0);
  for (const auto& name : truth.active) {
    const Frame& x = ds.features.at(name);
    const auto& beta = truth.coefficients.at(name);
    for (std::size_t i = 0; i < dates.size(); ++i) {
      const auto xr = *x.row_at(dates[i] - Days{spec.feature_lag});
      for (std::size_t g = 0; g < G; ++g) signal[i * G + g] += beta[g] * xr[g];
    }
  }

  if (spec.noise_sd) {
    truth.noise_sd = *spec.noise_sd;
  } else {
    const double mean_square = pairwise_dot(signal, signal) / static_cast<double>(signal.size());
    const double rho = spec.target_skill;
    truth.noise_sd = std::sqrt(mean_square * (1.0 / (rho * rho) - 1.0));
  }

  std::vector<double> noise(signal.size());
  for (auto& e : noise) e = truth.noise_sd * normal(rng);

  std::vector<double> values(signal.size());
  double skill_sum = 0.0;
  std::size_t skill_count = 0;
  std::vector<double> realized(G);
  for (std::size_t i = 0; i < dates.size(); ++i) {
    const auto c = truth.seasonal.at(dates[i]);
    for (std::size_t g = 0; g < G; ++g) {
      values[i * G + g] = c[g] + signal[i * G + g] + noise[i * G + g];
      realized[g] = signal[i * G + g] + noise[i * G + g];
    }
    const std::span<const double> s(signal.data() + i * G, G);
    if (norm2(s) > 0.0 && norm2(realized) > 0.0) {
      skill_sum += skill(s, realized);
      ++skill_count;
    }
  }
  truth.oracle_skill = skill_count ? skill_sum / static_cast<double>(skill_count) : kMissing;
  ds.target = Frame(spec.target_variable, grid, dates, std::move(values));

  for (int m = 0; m < spec.model_members; ++m) {
    std::vector<double> bias(G);
    for (auto& b : bias) b = spec.model_bias * (2.0 * unit(rng) - 1.0);
    std::vector<double> member(dates.size() * G);
    for (std::size_t i = 0; i < dates.size(); ++i) {
      const double season = std::sin(2.0 * std::numbers::pi * day_of_year(dates[i]).value() / 365.0);
      for (std::size_t g = 0; g < G; ++g) {
        member[i * G + g] =
            ds.target.at(i, g) + bias[g] * (1.0 + 0.5 * season) + spec.model_noise_sd * normal(rng);
      }
    }
    char name[32];
    std::snprintf(name, sizeof name, "model_member_%02d", m + 1);
    out.model_members.emplace_back(name, grid, dates, std::move(member));
  }
  return out;
}

void write_synthetic(const SyntheticDataset& synthetic, const std::string& directory) {
  write_dataset(synthetic.dataset, directory);
  const SyntheticTruth& truth = synthetic.truth;
  const fs::path dir(directory);

  const auto join = [](const std::vector<std::string>& items) {
    std::string s;
    for (std::size_t i = 0; i < items.size(); ++i) s += (i ? "," : "") + items[i];
    return s;
  };
  {
    std::ofstream out(dir / "manifest.txt", std::ios::binary | std::ios::trunc);
    const auto& target = synthetic.dataset.target;
    out << "generator=subseas-synthetic\n"
        << "seed=" << truth.seed << '\n'
        << "target_variable=" << synthetic.dataset.target_variable << '\n'
        << "first_date=" << format_date(target.dates().front()) << '\n'
        << "last_date=" << format_date(target.dates().back()) << '\n'
        << "period_days=" << synthetic.dataset.period_days << '\n'
        << "grid_points=" << target.cols() << '\n'
        << "feature_lag=" << truth.feature_lag << '\n'
        << "features=" << join(truth.features) << '\n'
        << "active_features=" << join(truth.active) << '\n'
        << "noise_sd=" << format_value(truth.noise_sd) << '\n'
        << "oracle_skill=" << format_value(truth.oracle_skill) << '\n'
        << "model_members=" << synthetic.model_members.size() << '\n';
    if (!out) throw Error(ErrorCode::Io, "cannot write manifest in " + directory);
  }
  {
    std::ofstream out(dir / "coefficients.csv", std::ios::binary | std::ios::trunc);
    out << "feature,lat,lon,coefficient\n";
    const auto& points = synthetic.dataset.grid().points();
    for (const auto& [name, beta] : truth.coefficients) {
      for (std::size_t g = 0; g < points.size(); ++g) {
        out << name << ',' << points[g].lat << ',' << points[g].lon << ',' << format_value(beta[g]) << '\n';
      }
    }
  }
  write_climatology(truth.seasonal, (dir / "seasonal.csv").string());
  for (const auto& member : synthetic.model_members) {
    write_frame(member, (dir / (member.variable() + ".csv")).string());
  }
}

std::map<std::string, std::string> read_manifest(const std::string& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(path, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error(ErrorCode::Parse, e.what());
  }
  std::map<std::string, std::string> out;
  for (const auto& [key, node] : tree) out.emplace(key, node.data());
  return out;
}

}  // namespace subseas
