#pragma once

#include <optional>
#include <string>
#include <vector>

#include "subseas/autoknn.hpp"
#include "subseas/config.hpp"
#include "subseas/dataset.hpp"
#include "subseas/multillr.hpp"
#include "subseas/skill.hpp"

namespace subseas {

/// One model on one issue date. A failed forecast keeps its error and has
/// neither forecast nor skill.
struct ForecastRecord {
  std::optional<ForecastAnomaly> forecast;
  std::optional<double> skill;
  std::string error_code;
  std::string error;
  std::optional<SelectionTrace> trace;
  std::optional<NeighborSet> neighbors;
};

struct IssueAudit {
  Date issue{};
  Date cutoff{};
  std::optional<Date> latest_read;
  std::size_t violations = 0;
};

struct BenefitRecord {
  Date issue{};
  std::string ensemble;
  EnsembleBenefitReport report;
};

struct BacktestResult {
  std::vector<std::string> models;
  std::vector<Date> issues;
  std::vector<Date> targets;
  /// records[model][issue]
  std::vector<std::vector<ForecastRecord>> records;
  std::vector<IssueAudit> audit;
  std::vector<BenefitRecord> benefit;
  GridSpec grid;

  std::size_t total_violations() const;
};

/// Loads (or generates) and prepares the dataset named by the config.
PreparedDataset load_prepared(const RunConfig& config);

/// Runs every model on every scheduled issue date inside a task arena of
/// `config.threads` threads. Output does not depend on the thread count.
BacktestResult run_backtest(const RunConfig& config, const PreparedDataset& data);

}  // namespace subseas
