#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "subseas/autoknn.hpp"
#include "subseas/geotime.hpp"
#include "subseas/multillr.hpp"
#include "subseas/synthetic.hpp"

namespace subseas {

enum class ModelKind {
  Multillr,
  Autoknn,
  Ensemble,
  /// Returns the observed anomaly; a sanity check for the scoring path.
  Echo,
  /// Reads precomputed forecasts (for example a debiased dynamical model).
  File,
};

std::string_view to_string(ModelKind kind);

struct ModelSpec {
  std::string name;
  ModelKind kind = ModelKind::Multillr;
  /// Multillr catalog; empty means the dataset default.
  std::string catalog;
  MultillrOptions multillr;
  AutoknnConfig autoknn;
  std::vector<std::string> members;
  std::vector<double> weights;  ///< empty means uniform
  std::string path;
  bool file_holds_anomalies = false;
};

/// In-memory synthetic dataset used instead of a dataset directory.
struct SyntheticSource {
  YearRange years;
  GridSpec grid;
  SyntheticSpec spec;
};

/// INI layout:
///
///   [run]        dataset or [synthetic], horizon, first_issue, last_issue,
///                base_years, models, output, seed, threads, variable
///   [synthetic]  years, grid, plus generator overrides
///   [model:NAME] kind and per-kind keys
///
/// Relative paths resolve against the directory of the config file.
struct RunConfig {
  std::string dataset_dir;
  std::optional<SyntheticSource> synthetic;
  std::string variable;
  Horizon horizon;
  Date first_issue{};
  Date last_issue{};
  YearRange base_years;
  std::string output_dir = "out";
  std::uint64_t seed = 0;
  int threads = 1;
  std::vector<ModelSpec> models;
  /// Text the config was parsed from, echoed into the output directory.
  std::string source_text;

  /// Throws Error{Config} with the offending key in the message.
  static RunConfig parse(const std::string& text, const std::string& base_dir = ".");
  static RunConfig load(const std::string& path);

  /// Throws Error{Config}: missing files, bad weights, unknown or forward
  /// ensemble members, base period not ending before the first issue year's
  /// issue date, empty schedule.
  void validate() const;

  const ModelSpec* find_model(std::string_view name) const;
};

/// "1981-2010" or a single year.
YearRange parse_year_range(std::string_view text);
/// "contest", "box:lat_min,lat_max,lon_min,lon_max" or a lat,lon CSV path.
GridSpec parse_grid(std::string_view text, const std::string& base_dir = ".");

}  // namespace subseas
