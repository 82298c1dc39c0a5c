#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "subseas/backtest.hpp"

namespace subseas {

/// Realized skill per (model, issue date); empty where the model failed.
struct SkillTable {
  std::vector<std::string> models;
  std::vector<Date> issues;
  std::vector<Date> targets;
  std::vector<std::vector<std::optional<double>>> skills;  ///< [model][issue]

  static SkillTable from(const BacktestResult& result);
};

/// Wide CSV: `issue_date,target_date,evaluation_year,<model>...`.
void write_skill_table(const SkillTable& table, const std::string& path);
SkillTable read_skill_table(const std::string& path);

inline constexpr std::size_t kHistogramBins = 20;

struct SkillSummary {
  std::size_t count = 0;
  std::optional<double> mean;  ///< arithmetic mean in issue order
};

struct BacktestReport {
  std::vector<std::string> models;
  std::vector<int> years;
  std::vector<std::vector<SkillSummary>> by_year;  ///< [year][model]
  std::vector<SkillSummary> all;                   ///< [model]
  /// Bin b covers [-1 + b/10, -1 + (b+1)/10); the last bin also holds 1.
  std::vector<std::array<std::size_t, kHistogramBins>> histogram;  ///< [model]
};

BacktestReport summarize(const SkillTable& table);
std::size_t histogram_bin(double skill);

/// `year,<model>...` with one row per evaluation year and a final `all` row.
void write_summary_csv(const BacktestReport& report, const std::string& path);
/// Same table as markdown with four decimals and per-model date counts.
void write_summary_markdown(const BacktestReport& report, const std::string& path);
/// `bin_lower,bin_upper,<model>...`
void write_histogram_csv(const BacktestReport& report, const std::string& path);

/// Writes skills, summary, histogram, per-model forecasts, selection traces,
/// feature frequencies, neighbor diagnostics, ensemble checks, errors, the
/// read-gate audit and the echoed config into `directory`. Bytes depend only
/// on the result.
void write_backtest_outputs(const BacktestResult& result, const RunConfig& config, const std::string& directory);

}  // namespace subseas
