// Command-line front end: dataset generation, single forecasts, backtests and
// report post-processing.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>
#include <tbb/task_arena.h>

#include "subseas/autoknn.hpp"
#include "subseas/backtest.hpp"
#include "subseas/cfsdebias.hpp"
#include "subseas/config.hpp"
#include "subseas/dataset.hpp"
#include "subseas/error.hpp"
#include "subseas/multillr.hpp"
#include "subseas/report.hpp"
#include "subseas/synthetic.hpp"

namespace fs = std::filesystem;
using namespace subseas;

namespace {

std::string in_dir(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  return (fs::path(dir) / name).string();
}

Frame forecast_frame(const ForecastAnomaly& f, const GridSpec& grid) {
  return Frame(f.model_name, grid, {f.target_start}, f.values);
}

struct SynthArgs {
  std::string out;
  std::uint64_t seed = 1;
  std::string years = "2005-2014";
  std::string grid = "box:40,42,250,253";
  SyntheticSpec spec;
};

void run_synth(const SynthArgs& a) {
  const auto data = generate_synthetic(a.seed, parse_grid(a.grid), parse_year_range(a.years), a.spec);
  write_synthetic(data, a.out);
  std::cout << "wrote synthetic dataset to " << a.out << " (oracle skill " << format_value(data.truth.oracle_skill)
            << ")\n";
}

struct ClimArgs {
  std::string dataset;
  std::string base;
  std::string source;
  std::string out;
};

void run_climatology(const ClimArgs& a) {
  const Dataset data = load_dataset(a.dataset);
  const std::string source = a.source.empty() ? data.target_variable : a.source;
  const Climatology clim = compute_climatology(data.source(source), parse_year_range(a.base));
  write_climatology(clim, in_dir(a.out, "climatology_" + source + ".csv"));
  write_frame(anomalize(data.source(source), clim), in_dir(a.out, "anomalies_" + source + ".csv"));
}

struct ForecastArgs {
  std::string model;
  std::string issue;
  std::string dataset;
  std::string base;
  std::string horizon = "weeks34";
  std::string catalog;
  double tol = 0.01;
  std::string out;
  int threads = 1;
};

void run_forecast(const ForecastArgs& a) {
  const PreparedDataset data = prepare(load_dataset(a.dataset), parse_year_range(a.base));
  const Horizon horizon = Horizon::parse(a.horizon);
  const Date issue = parse_date(a.issue);
  const Date target = target_start(issue, horizon);
  const DatasetView view(data, issue);
  const std::string stem = a.model + "_" + format_date(issue);
  tbb::task_arena arena(a.threads);
  arena.execute([&] {
    if (a.model == "multillr") {
      const FeatureCatalog catalog =
          a.catalog.empty() ? FeatureCatalog::default_for(data.data, horizon) : FeatureCatalog::parse(a.catalog);
      const auto out = multillr_forecast(target, horizon, catalog, view, MultillrOptions{a.tol, 56});
      write_frame(forecast_frame(out.forecast, data.data.grid()), in_dir(a.out, "forecast_" + stem + ".csv"));
      write_selection_trace(out.trace, in_dir(a.out, "selection_trace_" + stem + ".csv"));
    } else {
      const auto out = autoknn_forecast(target, horizon, AutoknnConfig::for_variable(data.data.target_variable), view);
      write_frame(forecast_frame(out.forecast, data.data.grid()), in_dir(a.out, "forecast_" + stem + ".csv"));
      const NeighborSet sets[] = {out.neighbors};
      write_neighbor_diagnostics(sets, in_dir(a.out, "neighbors_" + stem + ".csv"));
    }
  });
  if (view.violations() != 0) {
    throw Error(ErrorCode::LagViolation, std::to_string(view.violations()) + " reads past the issue cutoff");
  }
}

struct DebiasArgs {
  std::vector<std::string> members;
  std::string reforecast;
  std::string observed;
  std::string out;
};

void run_debias(const DebiasArgs& a) {
  std::vector<Frame> members;
  for (const auto& path : a.members) {
    ReadOptions options;
    if (!members.empty()) options.grid = members.front().grid();
    members.push_back(read_frame(path, options));
  }
  ReadOptions options;
  options.grid = members.front().grid();
  const DebiasClimPair pair{read_climatology(a.reforecast, options), read_climatology(a.observed, options)};
  Frame averaged = average_members(members);
  write_frame(averaged, in_dir(a.out, "averaged.csv"));
  write_frame(debias(averaged, pair), in_dir(a.out, "debiased.csv"));
}

struct EnsembleArgs {
  std::vector<std::string> forecasts;
  std::vector<double> weights;
  std::string out;
};

void run_ensemble(const EnsembleArgs& a) {
  std::vector<Frame> inputs;
  for (const auto& path : a.forecasts) {
    ReadOptions options;
    if (!inputs.empty()) options.grid = inputs.front().grid();
    inputs.push_back(read_frame(path, options));
  }
  if (inputs.size() < 2) throw Error(ErrorCode::InvalidArgument, "ensemble needs at least two forecasts");
  const EnsembleWeights weights = a.weights.empty() ? EnsembleWeights::uniform(inputs.size()) : EnsembleWeights(a.weights);
  if (weights.size() != inputs.size()) throw Error(ErrorCode::InvalidArgument, "one weight per forecast is required");

  std::vector<Date> dates;
  std::vector<double> values;
  for (Date t : inputs.front().dates()) {
    std::vector<std::span<const double>> rows;
    for (const auto& f : inputs) {
      if (auto r = f.row_at(t); r && all_finite(*r)) rows.push_back(*r);
    }
    if (rows.size() != inputs.size()) {
      spdlog::warn("ensemble: skipping {} (not every forecast has a complete row)", format_date(t));
      continue;
    }
    const auto combined = normalized_average(rows, weights);
    dates.push_back(t);
    values.insert(values.end(), combined.begin(), combined.end());
  }
  write_frame(Frame("ensemble", inputs.front().grid(), std::move(dates), std::move(values)),
              in_dir(a.out, "ensemble.csv"));
}

struct BacktestArgs {
  std::string config;
  std::string out;
  int threads = 0;
};

void run_backtest_command(const BacktestArgs& a) {
  RunConfig config = RunConfig::load(a.config);
  if (!a.out.empty()) config.output_dir = a.out;
  if (a.threads > 0) config.threads = a.threads;
  const PreparedDataset data = load_prepared(config);
  const BacktestResult result = run_backtest(config, data);
  write_backtest_outputs(result, config, config.output_dir);
  std::cout << "wrote " << config.output_dir << " (" << result.issues.size() << " issues, "
            << result.total_violations() << " read-gate violations)\n";
  if (result.total_violations() != 0) {
    throw Error(ErrorCode::LagViolation, "forecasts attempted reads past the issue cutoff");
  }
}

struct DiagnoseArgs {
  std::string neighbors;
  std::string out;
};

void run_diagnose_knn(const DiagnoseArgs& a) {
  std::ifstream in(a.neighbors, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + a.neighbors);
  std::string line;
  std::getline(in, line);
  if (line.rfind("target_date,target_month,rank,neighbor_date,neighbor_month,neighbor_year", 0) != 0) {
    throw Error(ErrorCode::Parse, a.neighbors + ":1: not a neighbor diagnostics file");
  }
  // [target month][neighbor month] -> (top-ranked count, all ranks count)
  std::map<std::pair<int, int>, std::pair<std::size_t, std::size_t>> months;
  std::map<int, std::size_t> years;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t start = 0;
    for (std::size_t pos; (pos = line.find(',', start)) != std::string::npos; start = pos + 1) {
      f.push_back(line.substr(start, pos - start));
    }
    f.push_back(line.substr(start));
    if (f.size() != 7) throw Error(ErrorCode::Parse, a.neighbors + ":" + std::to_string(line_no) + ": expected 7 fields");
    const int target_month = std::stoi(f[1]);
    const int rank = std::stoi(f[2]);
    auto& cell = months[{target_month, std::stoi(f[4])}];
    cell.first += rank == 1 ? 1 : 0;
    cell.second += 1;
    ++years[std::stoi(f[5])];
  }
  {
    std::ofstream out(in_dir(a.out, "neighbor_months.csv"), std::ios::binary | std::ios::trunc);
    out << "target_month,neighbor_month,top_neighbor_count,all_rank_count\n";
    for (const auto& [key, counts] : months) {
      out << key.first << ',' << key.second << ',' << counts.first << ',' << counts.second << '\n';
    }
  }
  std::ofstream out(in_dir(a.out, "neighbor_years.csv"), std::ios::binary | std::ios::trunc);
  out << "neighbor_year,count\n";
  for (const auto& [year, count] : years) out << year << ',' << count << '\n';
}

struct ReportArgs {
  std::string skills;
  std::string out;
};

void run_report(const ReportArgs& a) {
  const BacktestReport report = summarize(read_skill_table(a.skills));
  write_summary_csv(report, in_dir(a.out, "summary.csv"));
  write_summary_markdown(report, in_dir(a.out, "summary.md"));
  write_histogram_csv(report, in_dir(a.out, "histogram.csv"));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Subseasonal forecasting: synthetic data, forecasts, ensembles and backtests"};
  app.require_subcommand(1);
  std::string log_level = "warn";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off");

  SynthArgs synth;
  auto* cmd_synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  cmd_synth->add_option("--out", synth.out, "Output directory")->required();
  cmd_synth->add_option("--seed", synth.seed, "Random seed");
  cmd_synth->add_option("--years", synth.years, "Target years, e.g. 2005-2014");
  cmd_synth->add_option("--grid", synth.grid, "contest, box:lat0,lat1,lon0,lon1 or a lat,lon CSV");
  cmd_synth->add_option("--features", synth.spec.n_features, "Candidate features");
  cmd_synth->add_option("--active", synth.spec.n_active, "Features with nonzero coefficients");
  cmd_synth->add_option("--skill", synth.spec.target_skill, "Expected skill of the true signal");
  cmd_synth->add_option("--members", synth.spec.model_members, "Synthetic dynamical-model members");
  cmd_synth->add_option("--variable", synth.spec.target_variable, "Target variable name");

  ClimArgs clim;
  auto* cmd_clim = app.add_subcommand("climatology", "Compute a climatology and anomalies");
  cmd_clim->add_option("--dataset", clim.dataset, "Dataset directory")->required();
  cmd_clim->add_option("--base", clim.base, "Base years, e.g. 1981-2010")->required();
  cmd_clim->add_option("--source", clim.source, "Variable (default: the target)");
  cmd_clim->add_option("--out", clim.out, "Output directory")->required();

  ForecastArgs fc;
  auto* cmd_fc = app.add_subcommand("forecast", "Forecast one issue date");
  cmd_fc->add_option("--model", fc.model, "multillr or autoknn")
      ->required()
      ->check(CLI::IsMember({"multillr", "autoknn"}));
  cmd_fc->add_option("--issue", fc.issue, "Issue date YYYY-MM-DD")->required();
  cmd_fc->add_option("--dataset", fc.dataset, "Dataset directory")->required();
  cmd_fc->add_option("--base", fc.base, "Climatology base years")->required();
  cmd_fc->add_option("--horizon", fc.horizon, "weeks34 or weeks56");
  cmd_fc->add_option("--catalog", fc.catalog, "MultiLLR candidates, e.g. 'ones,tmp2m@29:anom'");
  cmd_fc->add_option("--tol", fc.tol, "Stepwise tolerance");
  cmd_fc->add_option("--threads", fc.threads, "Worker threads")->check(CLI::PositiveNumber);
  cmd_fc->add_option("--out", fc.out, "Output directory")->required();

  DebiasArgs db;
  auto* cmd_db = app.add_subcommand("debias", "Average model members and remove the reforecast bias");
  cmd_db->add_option("--member", db.members, "Member forecast file (repeatable)")->required();
  cmd_db->add_option("--reforecast-clim", db.reforecast, "Model climatology")->required();
  cmd_db->add_option("--observed-clim", db.observed, "Observed climatology")->required();
  cmd_db->add_option("--out", db.out, "Output directory")->required();

  EnsembleArgs ens;
  auto* cmd_ens = app.add_subcommand("ensemble", "Combine forecast anomalies");
  cmd_ens->add_option("--forecast", ens.forecasts, "Anomaly forecast file (repeatable)")->required();
  cmd_ens->add_option("--weights", ens.weights, "One weight per forecast, summing to 1")->delimiter(',');
  cmd_ens->add_option("--out", ens.out, "Output directory")->required();

  BacktestArgs bt;
  auto* cmd_bt = app.add_subcommand("backtest", "Run a configured backtest");
  cmd_bt->add_option("--config", bt.config, "INI run configuration")->required();
  cmd_bt->add_option("--out", bt.out, "Output directory (overrides the config)");
  cmd_bt->add_option("--threads", bt.threads, "Worker threads (overrides the config)")->check(CLI::PositiveNumber);

  DiagnoseArgs dk;
  auto* cmd_dk = app.add_subcommand("diagnose-knn", "Summarize neighbor months and years");
  cmd_dk->add_option("--neighbors", dk.neighbors, "neighbors_<model>.csv from a backtest")->required();
  cmd_dk->add_option("--out", dk.out, "Output directory")->required();

  ReportArgs rp;
  auto* cmd_rp = app.add_subcommand("report", "Rebuild summary tables from skills.csv");
  cmd_rp->add_option("--skills", rp.skills, "skills.csv from a backtest")->required();
  cmd_rp->add_option("--out", rp.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: usage: " << e.what() << '\n';
    return 2;
  }

  try {
    spdlog::set_level(spdlog::level::from_str(log_level));
    spdlog::set_default_logger(spdlog::stderr_color_mt("subseas"));
    spdlog::set_level(spdlog::level::from_str(log_level));
    if (*cmd_synth) run_synth(synth);
    if (*cmd_clim) run_climatology(clim);
    if (*cmd_fc) run_forecast(fc);
    if (*cmd_db) run_debias(db);
    if (*cmd_ens) run_ensemble(ens);
    if (*cmd_bt) run_backtest_command(bt);
    if (*cmd_dk) run_diagnose_knn(dk);
    if (*cmd_rp) run_report(rp);
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
