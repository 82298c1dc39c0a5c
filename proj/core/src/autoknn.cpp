#include "subseas/autoknn.hpp"

#include <algorithm>
#include <fstream>

#include <spdlog/spdlog.h>

#include "subseas/error.hpp"
#include "subseas/llr.hpp"
#include "subseas/numeric.hpp"
#include "subseas/parallel.hpp"

namespace subseas {

namespace {

// Anomaly days on a dense calendar starting at `first`, each stored as a unit
// vector. Absent days and days with a missing cell or zero norm are invalid.
class UnitDays {
 public:
  template <typename RowFn>
  UnitDays(Date first, Date last, std::size_t grid_size, RowFn&& row_of)
      : first_(first), grid_size_(grid_size) {
    const auto n = last < first ? 0 : static_cast<std::size_t>((last - first).count() + 1);
    valid_.assign(n, 0);
    units_.assign(n * grid_size, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = row_of(first + Days{static_cast<int>(i)});
      if (!row || !all_finite(*row)) continue;
      const double norm = norm2(*row);
      if (!(norm > 0.0)) continue;
      for (std::size_t g = 0; g < grid_size; ++g) units_[i * grid_size + g] = (*row)[g] / norm;
      valid_[i] = 1;
    }
  }

  Date first() const { return first_; }
  long long index(Date d) const { return (d - first_).count(); }
  bool valid(long long i) const {
    return i >= 0 && i < static_cast<long long>(valid_.size()) && valid_[static_cast<std::size_t>(i)] != 0;
  }
  double term(long long i, long long j) const {
    return pairwise_dot({units_.data() + static_cast<std::size_t>(i) * grid_size_, grid_size_},
                        {units_.data() + static_cast<std::size_t>(j) * grid_size_, grid_size_});
  }

 private:
  Date first_;
  std::size_t grid_size_;
  std::vector<char> valid_;
  std::vector<double> units_;
};

// Mean of the usable terms in h order; nullopt when none is usable.
template <typename TermFn>
std::optional<double> mean_terms(int history, TermFn&& term_at) {
  double sum = 0.0;
  int used = 0;
  for (int h = 0; h < history; ++h) {
    if (auto v = term_at(h)) {
      sum += *v;
      ++used;
    }
  }
  if (used == 0) return std::nullopt;
  return sum / used;
}

bool ranks_before(const Similarity& a, const Similarity& b) {
  if (a.value != b.value) return a.value > b.value;
  return a.date < b.date;
}

NeighborSet rank_neighbors(Date target, std::vector<Similarity> viable, std::size_t k, Date last_viable) {
  NeighborSet set;
  set.target_date = target;
  set.k = k;
  std::erase_if(viable, [&](const Similarity& s) { return s.date > last_viable; });
  const std::size_t keep = std::min(k, viable.size());
  std::partial_sort(viable.begin(), viable.begin() + static_cast<std::ptrdiff_t>(keep), viable.end(), ranks_before);
  viable.resize(keep);
  set.neighbors = std::move(viable);
  return set;
}

}  // namespace

AutoknnConfig AutoknnConfig::temperature() { return AutoknnConfig{}; }

AutoknnConfig AutoknnConfig::precipitation() {
  AutoknnConfig c;
  c.variable = KnnVariable::Precipitation;
  c.neighbors_used = 1;
  c.span = 56;
  return c;
}

AutoknnConfig AutoknnConfig::for_variable(std::string_view name) {
  if (name == "tmp2m" || name == "temperature") return temperature();
  if (name == "precip" || name == "precipitation") return precipitation();
  throw Error(ErrorCode::InvalidArgument, "autoknn: no defaults for variable '" + std::string(name) + "'");
}

std::vector<int> AutoknnConfig::lags(const Horizon& horizon) const {
  return {horizon.freshest_lag, 2 * horizon.freshest_lag, 365};
}

void AutoknnConfig::validate() const {
  if (k == 0 || neighbors_used == 0) throw Error(ErrorCode::InvalidArgument, "autoknn: k and neighbors_used must be positive");
  if (neighbors_used > k) throw Error(ErrorCode::InvalidArgument, "autoknn: neighbors_used exceeds k");
  if (history <= 0 || year_lag <= 0) throw Error(ErrorCode::InvalidArgument, "autoknn: history and year_lag must be positive");
  if (span < 0 || span > 182) throw Error(ErrorCode::InvalidArgument, "autoknn: span must lie in 0..182");
}

std::vector<Similarity> knn_similarities(Date target, const Frame& anomalies, std::span<const Date> candidates,
                                         int year_lag, int history) {
  if (history <= 0) throw Error(ErrorCode::InvalidArgument, "knn_similarities: history must be positive");
  if (anomalies.empty()) throw Error(ErrorCode::InvalidArgument, "knn_similarities: empty anomaly frame");
  const Date first = anomalies.dates().front();
  const Date last = anomalies.dates().back();
  const UnitDays days(first, last, anomalies.cols(), [&](Date d) { return anomalies.row_at(d); });

  const long long target_end = days.index(target) - year_lag;
  if (target_end - history + 1 < 0) {
    throw Error(ErrorCode::InvalidArgument, "knn_similarities: history of " + format_date(target) +
                                                " starts before the first anomaly date");
  }
  std::vector<Similarity> out;
  out.reserve(candidates.size());
  std::size_t skipped = 0;
  for (Date c : candidates) {
    const long long end = days.index(c) - year_lag;
    if (end - history + 1 < 0) {
      ++skipped;
      continue;
    }
    const auto sim = mean_terms(history, [&](int h) -> std::optional<double> {
      const long long i = target_end - h;
      const long long j = end - h;
      if (!days.valid(i) || !days.valid(j)) return std::nullopt;
      return days.term(i, j);
    });
    if (!sim) {
      ++skipped;
      continue;
    }
    out.push_back({c, *sim});
  }
  if (skipped > 0) spdlog::debug("knn_similarities: {} candidates without usable history", skipped);
  return out;
}

NeighborSet top_k_neighbors(Date target, std::span<const Similarity> sims, std::size_t k, Date issue,
                            int period_days) {
  NeighborSet set = rank_neighbors(target, {sims.begin(), sims.end()}, k, issue - Days{period_days});
  if (set.neighbors.size() < k) {
    spdlog::warn("top_k_neighbors: only {} viable candidates for {} (k = {})", set.neighbors.size(),
                 format_date(target), k);
  }
  return set;
}

std::vector<double> unit_spread(std::span<const double> values) {
  if (values.empty() || !all_finite(values)) throw Error(ErrorCode::Degenerate, "unit_spread: missing values");
  const double sd = population_stddev(values);
  if (!(sd > 0.0)) throw Error(ErrorCode::Degenerate, "unit_spread: zero spread");
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i] / sd;
  return out;
}

AutoknnOutput autoknn_forecast(Date target_date, const Horizon& horizon, const AutoknnConfig& config,
                               const DatasetView& view) {
  config.validate();
  if (view.issue() != issue_of_target(target_date, horizon)) {
    throw Error(ErrorCode::InvalidArgument, "view issue date " + format_date(view.issue()) +
                                                " does not match target " + format_date(target_date));
  }
  const std::string& var = view.target_variable();
  if (!view.has_anomalies(var)) throw Error(ErrorCode::MissingSource, "autoknn: no anomalies of " + var);
  const std::span<const Date> admissible = view.dates(var);
  if (admissible.empty()) throw Error(ErrorCode::EmptyWindow, "autoknn: no admissible history");

  const std::size_t G = view.grid().size();
  const Climatology& clim = view.climatology(var);
  const std::vector<int> lags = config.lags(horizon);
  const int gap = horizon.issue_to_target_offset + view.period_days();
  const DayOfYear center = day_of_year(target_date);

  const UnitDays days(admissible.front(), view.cutoff(), G, [&](Date d) { return view.anomaly_row(var, d); });
  const auto history_ok = [&](Date d) { return days.index(d) - config.year_lag - config.history + 1 >= 0; };

  // Candidate neighbors: admissible dates with usable history and a
  // non-degenerate anomaly, stored with unit spread.
  std::vector<Date> cand_dates;
  std::vector<std::vector<double>> cand_scaled;
  for (Date d : admissible) {
    if (!history_ok(d)) continue;
    const auto row = view.anomaly_row(var, d);
    if (!row || !all_finite(*row) || !(population_stddev(*row) > 0.0)) continue;
    cand_dates.push_back(d);
    cand_scaled.push_back(unit_spread(*row));
  }

  struct Row {
    Date date{};
    std::vector<std::span<const double>> lagged;
    std::span<const double> outcome;
    std::span<const double> offset;
    double weight = 0.0;
    NeighborSet neighbors;
  };
  std::vector<Row> rows;
  std::size_t dropped = 0;
  for (Date t : admissible) {
    if (!in_circular_window(center, config.span, t) || !clim.covers(t) || !history_ok(t)) continue;
    const auto y = view.row(var, t);
    const auto a = view.anomaly_row(var, t);
    Row r;
    r.date = t;
    bool ok = y && a && all_finite(*a);
    for (std::size_t l = 0; ok && l < lags.size(); ++l) {
      const auto x = view.anomaly_row(var, t - Days{lags[l]});
      ok = x.has_value();
      if (ok) r.lagged.push_back(*x);
    }
    const double var_t = ok ? population_variance(*a) : 0.0;
    if (!ok || !(var_t > 0.0)) {
      ++dropped;
      continue;
    }
    r.outcome = *y;
    r.offset = clim.at(t);
    r.weight = 1.0 / var_t;
    rows.push_back(std::move(r));
  }

  Row target;
  target.date = target_date;
  if (days.index(target_date) - config.year_lag - config.history + 1 < 0) {
    throw Error(ErrorCode::InvalidArgument, "autoknn: history of " + format_date(target_date) +
                                                " starts before the first admissible date");
  }
  for (int lag : lags) {
    const auto x = view.anomaly_row(var, target_date - Days{lag});
    if (!x) {
      throw Error(ErrorCode::MissingSource, "autoknn: lag-" + std::to_string(lag) + " anomaly of " +
                                                format_date(target_date) + " is unavailable");
    }
    target.lagged.push_back(*x);
  }

  // Neighbor searches, in blocks of consecutive rows. Within a block every
  // diagonal (fixed date difference) shares its per-day skill terms.
  std::vector<long long> cand_of_day(static_cast<std::size_t>(days.index(view.cutoff()) + 1), -1);
  for (std::size_t c = 0; c < cand_dates.size(); ++c) {
    cand_of_day[static_cast<std::size_t>(days.index(cand_dates[c]))] = static_cast<long long>(c);
  }
  std::vector<Row*> searches;
  for (auto& r : rows) searches.push_back(&r);
  searches.push_back(&target);
  constexpr std::size_t kBlock = 64;
  const std::size_t blocks = (searches.size() + kBlock - 1) / kBlock;
  const long long first_cand = cand_dates.empty() ? 0 : days.index(cand_dates.front());
  parallel_for_each_index(blocks, [&](std::size_t b) {
    const std::size_t lo = b * kBlock;
    const std::size_t hi = std::min(searches.size(), lo + kBlock);
    const long long t_min = days.index(searches[lo]->date);
    const long long t_max = days.index(searches[hi - 1]->date);
    const long long base = t_min - config.year_lag - config.history + 1;
    std::vector<std::vector<Similarity>> sims(hi - lo);
    std::vector<double> terms(static_cast<std::size_t>(t_max - t_min + config.history));
    std::vector<char> usable(terms.size());
    for (long long k = gap; k <= t_max - first_cand; ++k) {
      for (std::size_t i = 0; i < terms.size(); ++i) {
        const long long day = base + static_cast<long long>(i);
        usable[i] = days.valid(day) && days.valid(day - k);
        terms[i] = usable[i] ? days.term(day, day - k) : 0.0;
      }
      for (std::size_t r = lo; r < hi; ++r) {
        const long long ti = days.index(searches[r]->date);
        const long long ci = ti - k;
        if (ci < 0 || ci >= static_cast<long long>(cand_of_day.size())) continue;
        const long long c = cand_of_day[static_cast<std::size_t>(ci)];
        if (c < 0) continue;
        const long long end = ti - config.year_lag - base;
        const auto sim = mean_terms(config.history, [&](int h) -> std::optional<double> {
          const auto i = static_cast<std::size_t>(end - h);
          if (!usable[i]) return std::nullopt;
          return terms[i];
        });
        if (sim) sims[r - lo].push_back({cand_dates[static_cast<std::size_t>(c)], *sim});
      }
    }
    for (std::size_t r = lo; r < hi; ++r) {
      Row& row = *searches[r];
      row.neighbors = rank_neighbors(row.date, std::move(sims[r - lo]), config.k,
                                     row.date - Days{gap});
    }
  });

  if (target.neighbors.neighbors.size() < config.neighbors_used) {
    throw Error(ErrorCode::EmptyWindow, "autoknn: " + std::to_string(target.neighbors.neighbors.size()) +
                                            " viable neighbors for " + format_date(target_date) + ", need " +
                                            std::to_string(config.neighbors_used));
  }
  std::vector<Row*> training;
  for (auto& r : rows) {
    if (r.neighbors.neighbors.size() >= config.neighbors_used) {
      training.push_back(&r);
    } else {
      ++dropped;
    }
  }
  if (dropped > 0) {
    spdlog::debug("autoknn {}: {} window dates dropped, {} used", format_date(target_date), dropped,
                  training.size());
  }

  const auto scaled_of = [&](Date d) -> const std::vector<double>& {
    const auto it = std::lower_bound(cand_dates.begin(), cand_dates.end(), d);
    return cand_scaled[static_cast<std::size_t>(it - cand_dates.begin())];
  };
  const std::size_t d = config.feature_count();
  const auto fill = [&](const Row& r, std::size_t g, auto&& out) {
    std::size_t j = 0;
    for (const auto& lagged : r.lagged) out(j++) = lagged[g];
    out(j++) = 1.0;
    for (std::size_t n = 0; n < config.neighbors_used; ++n) out(j++) = scaled_of(r.neighbors.neighbors[n].date)[g];
  };

  std::vector<double> anomaly(G, kMissing);
  std::vector<int> status(G, 0);
  parallel_for_each_index(G, [&](std::size_t g) {
    RegressionDesign design;
    const auto n = static_cast<Eigen::Index>(training.size());
    design.features.resize(n, static_cast<Eigen::Index>(d));
    design.outcomes.resize(n);
    design.offsets.resize(n);
    design.weights.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Row& r = *training[static_cast<std::size_t>(i)];
      design.dates.push_back(r.date);
      fill(r, g, [&](std::size_t j) -> double& { return design.features(i, static_cast<Eigen::Index>(j)); });
      design.outcomes(i) = r.outcome[g];
      design.offsets(i) = r.offset[g];
      design.weights(i) = r.weight;
    }
    const NormalEquations eq = accumulate_window(design, center, config.span);
    if (eq.rows == 0) {
      status[g] = 1;
      return;
    }
    if (!(eq.weight_sum > 0.0)) {
      status[g] = 2;
      return;
    }
    Eigen::VectorXd x(static_cast<Eigen::Index>(d));
    fill(target, g, [&](std::size_t j) -> double& { return x(static_cast<Eigen::Index>(j)); });
    if (!x.allFinite()) {
      status[g] = 3;
      return;
    }
    anomaly[g] = solve_min_norm(eq.gram, eq.moment).dot(x);
  });
  for (std::size_t g = 0; g < G; ++g) {
    if (status[g] == 1) throw Error(ErrorCode::EmptyWindow, "autoknn: no training rows at grid index " + std::to_string(g));
    if (status[g] == 2) throw Error(ErrorCode::ZeroWeights, "autoknn: zero weights at grid index " + std::to_string(g));
    if (status[g] == 3) {
      throw Error(ErrorCode::MissingSource, "autoknn: target features missing at grid index " + std::to_string(g));
    }
  }

  AutoknnOutput out;
  out.forecast = ForecastAnomaly{"autoknn", target_date, horizon, std::move(anomaly)};
  out.neighbors = std::move(target.neighbors);
  out.training_rows = training.size();
  out.dropped_rows = dropped;
  return out;
}

void write_neighbor_diagnostics(std::span<const NeighborSet> sets, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << "target_date,target_month,rank,neighbor_date,neighbor_month,neighbor_year,similarity\n";
  for (const auto& set : sets) {
    for (std::size_t r = 0; r < set.neighbors.size(); ++r) {
      const Date n = set.neighbors[r].date;
      out << format_date(set.target_date) << ',' << month_of(set.target_date) << ',' << r + 1 << ','
          << format_date(n) << ',' << month_of(n) << ',' << year_of(n) << ','
          << format_value(set.neighbors[r].value) << '\n';
    }
  }
}

}  // namespace subseas
