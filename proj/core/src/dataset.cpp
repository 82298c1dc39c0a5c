#include "subseas/dataset.hpp"

#include <algorithm>
#include <filesystem>
#include <limits>

#include <spdlog/spdlog.h>

#include "subseas/error.hpp"

namespace subseas {

namespace fs = std::filesystem;

namespace {

constexpr long long kNoRead = std::numeric_limits<long long>::min();

}  // namespace

bool Dataset::has_source(std::string_view name) const {
  return name == target_variable || features.find(name) != features.end();
}

const Frame& Dataset::source(std::string_view name) const {
  if (name == target_variable) return target;
  auto it = features.find(name);
  if (it == features.end()) throw Error(ErrorCode::MissingSource, "unknown source '" + std::string(name) + "'");
  return it->second;
}

Dataset load_dataset(const std::string& directory) {
  if (!fs::is_directory(directory)) throw Error(ErrorCode::Io, "dataset directory not found: " + directory);
  std::vector<fs::path> targets;
  std::vector<fs::path> features;
  for (const auto& entry : fs::directory_iterator(directory)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".csv") continue;
    const std::string stem = entry.path().stem().string();
    if (stem.starts_with("target_")) targets.push_back(entry.path());
    if (stem.starts_with("feature_")) features.push_back(entry.path());
  }
  if (targets.size() != 1) {
    throw Error(ErrorCode::MissingSource,
                directory + ": expected exactly one target_<var>.csv, found " + std::to_string(targets.size()));
  }
  std::sort(features.begin(), features.end());

  Dataset ds;
  ds.target = read_frame(targets.front().string());
  ds.target_variable = ds.target.variable();
  ReadOptions options;
  options.grid = ds.target.grid();
  for (const auto& path : features) {
    Frame f = read_frame(path.string(), options);
    if (f.variable() == ds.target_variable) {
      throw Error(ErrorCode::DuplicateKey, "feature name collides with target variable: " + f.variable());
    }
    std::string name = f.variable();
    ds.features.emplace(std::move(name), std::move(f));
  }
  return ds;
}

void write_dataset(const Dataset& dataset, const std::string& directory) {
  fs::create_directories(directory);
  write_frame(dataset.target, (fs::path(directory) / ("target_" + dataset.target_variable + ".csv")).string());
  for (const auto& [name, frame] : dataset.features) {
    write_frame(frame, (fs::path(directory) / ("feature_" + name + ".csv")).string());
  }
}

const Climatology& PreparedDataset::climatology(std::string_view source) const {
  auto it = climatologies.find(source);
  if (it == climatologies.end()) {
    throw Error(ErrorCode::MissingSource, "no climatology for source '" + std::string(source) + "'");
  }
  return it->second;
}

const Frame& PreparedDataset::anomalies_of(std::string_view source) const {
  auto it = anomalies.find(source);
  if (it == anomalies.end()) {
    throw Error(ErrorCode::MissingSource, "no anomalies for source '" + std::string(source) + "'");
  }
  return it->second;
}

PreparedDataset prepare(Dataset dataset, YearRange base_years) {
  PreparedDataset out;
  out.base_years = base_years;
  {
    Climatology clim = compute_climatology(dataset.target, base_years);
    out.anomalies.emplace(dataset.target_variable, anomalize(dataset.target, clim));
    out.climatologies.emplace(dataset.target_variable, std::move(clim));
  }
  for (const auto& [name, frame] : dataset.features) {
    try {
      Climatology clim = compute_climatology(frame, base_years);
      out.anomalies.emplace(name, anomalize(frame, clim));
      out.climatologies.emplace(name, std::move(clim));
    } catch (const Error& e) {
      spdlog::info("feature '{}' has no usable climatology: {}", name, e.what());
    }
  }
  out.data = std::move(dataset);
  return out;
}

DatasetView::DatasetView(const PreparedDataset& data, Date issue)
    : data_(&data), issue_(issue), cutoff_(issue - Days{data.data.period_days}), latest_read_(kNoRead) {}

bool DatasetView::has_anomalies(std::string_view name) const {
  return data_->anomalies.find(name) != data_->anomalies.end();
}

std::span<const Date> DatasetView::dates(std::string_view source) const {
  const auto& all = data_->data.source(source).dates();
  const auto n = std::upper_bound(all.begin(), all.end(), cutoff_) - all.begin();
  return {all.data(), static_cast<std::size_t>(n)};
}

std::optional<std::span<const double>> DatasetView::gated(const Frame& frame, Date date) const {
  if (date > cutoff_) {
    violations_.fetch_add(1);
    return std::nullopt;
  }
  auto row = frame.row_at(date);
  if (row) {
    const long long d = date.time_since_epoch().count();
    long long prev = latest_read_.load();
    while (d > prev && !latest_read_.compare_exchange_weak(prev, d)) {
    }
  }
  return row;
}

std::optional<std::span<const double>> DatasetView::row(std::string_view source, Date date) const {
  return gated(data_->data.source(source), date);
}

std::optional<std::span<const double>> DatasetView::anomaly_row(std::string_view source, Date date) const {
  return gated(data_->anomalies_of(source), date);
}

std::optional<Date> DatasetView::latest_read() const {
  const long long d = latest_read_.load();
  if (d == kNoRead) return std::nullopt;
  return Date{Days{d}};
}

}  // namespace subseas
