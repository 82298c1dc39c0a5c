#include "subseas/multillr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

#include <spdlog/spdlog.h>

#include "subseas/error.hpp"
#include "subseas/numeric.hpp"
#include "subseas/parallel.hpp"

namespace subseas {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

FeatureCatalog::FeatureCatalog(std::vector<CatalogEntry> entries) : entries_(std::move(entries)) {
  std::set<std::string> seen;
  for (const auto& e : entries_) {
    if (!seen.insert(e.name).second) throw Error(ErrorCode::InvalidArgument, "duplicate catalog feature " + e.name);
  }
}

CatalogEntry FeatureCatalog::ones() { return CatalogEntry{"ones", "", 0, false}; }

CatalogEntry FeatureCatalog::lagged(std::string source, int lag, bool anomaly) {
  std::string name = source + "_shift" + std::to_string(lag) + (anomaly ? "_anom" : "");
  return CatalogEntry{std::move(name), std::move(source), lag, anomaly};
}

FeatureCatalog FeatureCatalog::parse(std::string_view list) {
  std::vector<CatalogEntry> entries;
  while (!list.empty()) {
    const auto sep = list.find_first_of(",;");
    const std::string_view item = trim(list.substr(0, sep));
    list = sep == std::string_view::npos ? std::string_view{} : list.substr(sep + 1);
    if (item.empty()) continue;
    if (item == "ones") {
      entries.push_back(ones());
      continue;
    }
    const auto at = item.find('@');
    if (at == std::string_view::npos || at == 0) {
      throw Error(ErrorCode::Parse, "catalog item '" + std::string(item) + "': expected <source>@<lag>[:anom]");
    }
    std::string_view lag_text = item.substr(at + 1);
    bool anomaly = false;
    if (const auto colon = lag_text.find(':'); colon != std::string_view::npos) {
      if (lag_text.substr(colon + 1) != "anom") {
        throw Error(ErrorCode::Parse, "catalog item '" + std::string(item) + "': unknown suffix");
      }
      anomaly = true;
      lag_text = lag_text.substr(0, colon);
    }
    int lag = 0;
    auto [ptr, ec] = std::from_chars(lag_text.data(), lag_text.data() + lag_text.size(), lag);
    if (ec != std::errc{} || ptr != lag_text.data() + lag_text.size() || lag < 0) {
      throw Error(ErrorCode::Parse, "catalog item '" + std::string(item) + "': bad lag");
    }
    entries.push_back(lagged(std::string(item.substr(0, at)), lag, anomaly));
  }
  return FeatureCatalog(std::move(entries));
}

FeatureCatalog FeatureCatalog::default_for(const Dataset& dataset, const Horizon& horizon) {
  const int lag = horizon.freshest_lag;
  std::vector<CatalogEntry> entries{ones(), lagged(dataset.target_variable, lag, true),
                                    lagged(dataset.target_variable, 2 * lag, true),
                                    lagged(dataset.target_variable, 365, true)};
  for (const auto& [name, frame] : dataset.features) entries.push_back(lagged(name, lag, false));
  return FeatureCatalog(std::move(entries));
}

std::optional<std::size_t> FeatureCatalog::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].name == name) return i;
  }
  return std::nullopt;
}

std::vector<std::string> FeatureCatalog::names() const {
  std::vector<std::string> out;
  for (const auto& e : entries_) out.push_back(e.name);
  return out;
}

std::string FeatureCatalog::to_string() const {
  std::string out;
  for (const auto& e : entries_) {
    if (!out.empty()) out += ',';
    out += e.is_constant() ? "ones" : e.source + "@" + std::to_string(e.lag) + (e.anomaly ? ":anom" : "");
  }
  return out;
}

bool TrainingData::usable(std::size_t row, std::size_t g) const {
  if (is_missing(outcome(row, g))) return false;
  for (double v : features(row, g)) {
    if (is_missing(v)) return false;
  }
  return true;
}

TrainingData build_design(const FeatureCatalog& catalog, Date target_date, const Horizon& horizon,
                          const DatasetView& view, int span) {
  if (catalog.size() == 0) throw Error(ErrorCode::InvalidArgument, "empty feature catalog");
  if (view.issue() != issue_of_target(target_date, horizon)) {
    throw Error(ErrorCode::InvalidArgument, "view issue date " + format_date(view.issue()) +
                                                " does not match target " + format_date(target_date));
  }
  for (const auto& e : catalog.entries()) {
    if (e.is_constant()) continue;
    if (e.lag < horizon.freshest_lag) {
      throw Error(ErrorCode::LagViolation, "feature " + e.name + " uses lag " + std::to_string(e.lag) +
                                               " below the freshest admissible lag " +
                                               std::to_string(horizon.freshest_lag));
    }
    if (!view.has_source(e.source)) throw Error(ErrorCode::MissingSource, "unknown source '" + e.source + "'");
    if (e.anomaly && !view.has_anomalies(e.source)) {
      throw Error(ErrorCode::MissingSource, "no climatology to form anomalies of '" + e.source + "'");
    }
  }

  TrainingData data;
  data.catalog = catalog;
  data.horizon = horizon;
  data.target_date = target_date;
  data.grid_size = view.grid().size();
  const std::size_t G = data.grid_size;
  const std::size_t d = catalog.size();
  const DayOfYear center = day_of_year(target_date);
  const std::string& target = view.target_variable();
  const Climatology& clim = view.climatology(target);

  for (Date t : view.dates(target)) {
    if (in_circular_window(center, span, t) && clim.covers(t)) data.dates.push_back(t);
  }

  const auto fill_features = [&](Date t, double* out) {
    for (std::size_t j = 0; j < d; ++j) {
      const CatalogEntry& e = catalog.entries()[j];
      if (e.is_constant()) {
        for (std::size_t g = 0; g < G; ++g) out[g * d + j] = 1.0;
        continue;
      }
      const Date source_date = t - Days{e.lag};
      const auto row = e.anomaly ? view.anomaly_row(e.source, source_date) : view.row(e.source, source_date);
      for (std::size_t g = 0; g < G; ++g) out[g * d + j] = row ? (*row)[g] : kMissing;
    }
  };

  const std::size_t n = data.dates.size();
  data.x.assign(n * G * d, kMissing);
  data.y.assign(n * G, kMissing);
  data.clim.assign(n * G, kMissing);
  for (std::size_t i = 0; i < n; ++i) {
    const Date t = data.dates[i];
    const auto y = view.row(target, t);
    const auto c = clim.at(t);
    for (std::size_t g = 0; g < G; ++g) {
      data.y[i * G + g] = (*y)[g];
      data.clim[i * G + g] = c[g];
    }
    fill_features(t, data.x.data() + i * G * d);
  }
  data.target_x.assign(G * d, kMissing);
  fill_features(target_date, data.target_x.data());
  const auto tc = clim.at(target_date);
  data.target_clim.assign(tc.begin(), tc.end());

  std::size_t dropped = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t g = 0; g < G; ++g) dropped += data.usable(i, g) ? 0 : 1;
  }
  if (dropped > 0) {
    spdlog::debug("design for {}: dropped {} of {} (date, grid point) rows with missing values",
                  format_date(target_date), dropped, n * G);
  }
  return data;
}

LoyocvEngine::LoyocvEngine(const TrainingData& data, int span)
    : data_(&data), span_(span), center_(day_of_year(data.target_date)) {
  const std::size_t G = data.grid_size;
  const std::size_t d = data.feature_count();
  for (std::size_t i = 0; i < data.dates.size(); ++i) {
    if (day_of_year(data.dates[i]) != center_) continue;
    bool complete = true;
    for (std::size_t g = 0; g < G && complete; ++g) complete = data.usable(i, g);
    if (!complete) {
      spdlog::debug("loyocv: skipping {} (incomplete data)", format_date(data.dates[i]));
      continue;
    }
    eval_dates_.push_back(data.dates[i]);
    eval_rows_.push_back(i);
  }
  folds_.assign(eval_rows_.size() * G, NormalEquations(static_cast<Eigen::Index>(d)));
  parallel_for_each_index(folds_.size(), [&](std::size_t k) {
    const std::size_t fold = k / G;
    const std::size_t g = k % G;
    NormalEquations& eq = folds_[k];
    for (std::size_t r = 0; r < data.dates.size(); ++r) {
      if (!in_fold(fold, r, g)) continue;
      const auto x = data.features(r, g);
      eq.add(Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(d)), data.outcome(r, g), 1.0);
    }
  });
}

std::pair<Date, Date> LoyocvEngine::holdout(std::size_t fold) const {
  const Date first = eval_dates_[fold] - Days{data_->horizon.freshest_lag};
  return {first, first + Days{364}};
}

bool LoyocvEngine::in_fold(std::size_t fold, std::size_t row, std::size_t g) const {
  const Date t = data_->dates[row];
  const auto [first, last] = holdout(fold);
  if (t >= first && t <= last) return false;
  return in_circular_window(center_, span_, t) && data_->usable(row, g);
}

std::vector<Date> LoyocvEngine::fold_training_dates(std::size_t fold, std::size_t g) const {
  std::vector<Date> out;
  for (std::size_t r = 0; r < data_->dates.size(); ++r) {
    if (in_fold(fold, r, g)) out.push_back(data_->dates[r]);
  }
  return out;
}

LoyocvResult LoyocvEngine::evaluate(std::span<const std::size_t> columns) const {
  if (columns.empty()) throw Error(ErrorCode::InvalidArgument, "loyocv: empty feature set");
  const TrainingData& data = *data_;
  const std::size_t G = data.grid_size;
  const std::size_t folds = eval_rows_.size();
  const auto k = static_cast<Eigen::Index>(columns.size());

  std::vector<double> predicted(folds * G, kMissing);
  parallel_for_each_index(folds * G, [&](std::size_t idx) {
    const std::size_t fold = idx / G;
    const std::size_t g = idx % G;
    const NormalEquations& eq = folds_[idx];
    if (eq.rows == 0) return;
    Eigen::MatrixXd gram(k, k);
    Eigen::VectorXd moment(k);
    Eigen::VectorXd x(k);
    const auto xe = data.features(eval_rows_[fold], g);
    for (Eigen::Index a = 0; a < k; ++a) {
      const auto ca = static_cast<Eigen::Index>(columns[static_cast<std::size_t>(a)]);
      moment(a) = eq.moment(ca);
      x(a) = xe[static_cast<std::size_t>(ca)];
      for (Eigen::Index b = 0; b < k; ++b) {
        gram(a, b) = eq.gram(ca, static_cast<Eigen::Index>(columns[static_cast<std::size_t>(b)]));
      }
    }
    predicted[idx] = solve_min_norm(gram, moment).dot(x);
  });

  LoyocvResult result;
  std::vector<double> forecast(G), observed(G);
  for (std::size_t fold = 0; fold < folds; ++fold) {
    const std::size_t row = eval_rows_[fold];
    bool complete = true;
    for (std::size_t g = 0; g < G; ++g) {
      const double c = data.climatology(row, g);
      forecast[g] = predicted[fold * G + g] - c;
      observed[g] = data.outcome(row, g) - c;
      complete = complete && !is_missing(forecast[g]);
    }
    if (!complete) {
      ++result.skipped;
      continue;
    }
    try {
      result.skills.push_back(skill(forecast, observed));
    } catch (const Error&) {
      ++result.skipped;
      continue;
    }
    result.dates.push_back(eval_dates_[fold]);
    result.predictions.push_back(forecast);
  }
  if (result.skills.empty()) {
    throw Error(ErrorCode::NoEvaluableDates,
                "loyocv: no evaluable dates for day of year " + std::to_string(center_.value()));
  }
  double sum = 0.0;
  for (double s : result.skills) sum += s;
  result.mean_skill = sum / static_cast<double>(result.skills.size());
  return result;
}

LoyocvResult loyocv(const TrainingData& data, std::span<const std::size_t> columns, int span) {
  return LoyocvEngine(data, span).evaluate(columns);
}

SelectionTrace backward_stepwise(const LoyocvEngine& engine, double tol) {
  const FeatureCatalog& catalog = engine.data().catalog;
  std::vector<std::size_t> active(catalog.size());
  for (std::size_t j = 0; j < active.size(); ++j) active[j] = j;

  SelectionTrace trace;
  trace.initial = catalog.names();
  double v = engine.evaluate(active).mean_skill;
  trace.initial_skill = v;

  while (true) {
    if (active.size() == 1) {
      trace.forced_stop = true;
      trace.final_candidates = {catalog.entries()[active.front()].name};
      trace.final_candidate_skills = {kMissing};
      spdlog::debug("stepwise: one feature left, stop forced");
      break;
    }
    std::vector<double> scores(active.size(), kMissing);
    parallel_for_each_index(active.size(), [&](std::size_t i) {
      std::vector<std::size_t> subset;
      subset.reserve(active.size() - 1);
      for (std::size_t m = 0; m < active.size(); ++m) {
        if (m != i) subset.push_back(active[m]);
      }
      try {
        scores[i] = engine.evaluate(subset).mean_skill;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NoEvaluableDates) throw;
      }
    });

    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (is_missing(scores[i])) continue;
      if (!best || scores[i] > scores[*best]) best = i;
    }
    std::vector<std::string> candidates;
    for (std::size_t j : active) candidates.push_back(catalog.entries()[j].name);

    if (best && tol > v - scores[*best]) {
      SelectionStep step;
      step.removed = catalog.entries()[active[*best]].name;
      step.mean_skill = scores[*best];
      step.candidates = std::move(candidates);
      step.candidate_skills = std::move(scores);
      trace.steps.push_back(std::move(step));
      v = trace.steps.back().mean_skill;
      active.erase(active.begin() + static_cast<std::ptrdiff_t>(*best));
    } else {
      trace.final_candidates = std::move(candidates);
      trace.final_candidate_skills = std::move(scores);
      break;
    }
  }
  for (std::size_t j : active) trace.selected.push_back(catalog.entries()[j].name);
  trace.final_skill = v;
  return trace;
}

void write_selection_trace(const SelectionTrace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << "step,removed_feature,mean_skill\n";
  out << "0,," << format_value(trace.initial_skill) << '\n';
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    out << i + 1 << ',' << trace.steps[i].removed << ',' << format_value(trace.steps[i].mean_skill) << '\n';
  }
}

std::vector<std::pair<std::string, std::size_t>> selection_frequencies(const FeatureCatalog& catalog,
                                                                        std::span<const SelectionTrace> traces) {
  std::vector<std::pair<std::string, std::size_t>> out;
  for (const auto& e : catalog.entries()) out.emplace_back(e.name, 0);
  for (const auto& trace : traces) {
    for (const auto& name : trace.selected) {
      if (auto j = catalog.index_of(name)) ++out[*j].second;
    }
  }
  return out;
}

MultillrOutput multillr_forecast(Date target_date, const Horizon& horizon, const FeatureCatalog& catalog,
                                 const DatasetView& view, const MultillrOptions& options) {
  const TrainingData data = build_design(catalog, target_date, horizon, view, options.span);
  const LoyocvEngine engine(data, options.span);
  MultillrOutput out;
  out.trace = backward_stepwise(engine, options.tol);

  std::vector<std::size_t> columns;
  for (const auto& name : out.trace.selected) columns.push_back(*catalog.index_of(name));
  const auto k = static_cast<Eigen::Index>(columns.size());
  const std::size_t G = data.grid_size;
  const DayOfYear center = day_of_year(target_date);

  std::vector<double> anomaly(G, kMissing);
  std::vector<int> status(G, 0);
  parallel_for_each_index(G, [&](std::size_t g) {
    NormalEquations eq(k);
    Eigen::VectorXd x(k);
    for (std::size_t r = 0; r < data.dates.size(); ++r) {
      if (!in_circular_window(center, options.span, data.dates[r]) || !data.usable(r, g)) continue;
      const auto row = data.features(r, g);
      for (Eigen::Index a = 0; a < k; ++a) x(a) = row[columns[static_cast<std::size_t>(a)]];
      eq.add(x, data.outcome(r, g), 1.0);
    }
    const auto target_row = data.target_features(g);
    for (Eigen::Index a = 0; a < k; ++a) x(a) = target_row[columns[static_cast<std::size_t>(a)]];
    if (eq.rows == 0) {
      status[g] = 1;
      return;
    }
    if (!x.allFinite()) {
      status[g] = 2;
      return;
    }
    anomaly[g] = solve_min_norm(eq.gram, eq.moment).dot(x) - data.target_clim[g];
  });
  for (std::size_t g = 0; g < G; ++g) {
    if (status[g] == 1) throw Error(ErrorCode::EmptyWindow, "multillr: no training rows at grid index " + std::to_string(g));
    if (status[g] == 2) {
      throw Error(ErrorCode::MissingSource,
                  "multillr: target-date features missing at grid index " + std::to_string(g));
    }
  }
  out.forecast = ForecastAnomaly{"multillr", target_date, horizon, std::move(anomaly)};
  return out;
}

}  // namespace subseas
