#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oracle {

namespace {

using namespace std::chrono;

bool is_feb29(Date d) {
  const year_month_day ymd{d};
  return ymd.month() == February && ymd.day() == day{29};
}

int circular(int a, int b) {
  const int diff = a > b ? a - b : b - a;
  return std::min(diff, 365 - diff);
}

std::optional<std::vector<double>> usable_row(const subseas::Frame& f, Date d) {
  const auto row = f.row_at(d);
  if (!row) return std::nullopt;
  std::vector<double> v(row->begin(), row->end());
  double sq = 0.0;
  for (double x : v) {
    if (std::isnan(x)) return std::nullopt;
    sq += x * x;
  }
  if (sq == 0.0) return std::nullopt;
  return v;
}

}  // namespace

int day_of_year(Date date) {
  const year_month_day ymd{date};
  Date d = sys_days{ymd.year() / January / 1};
  int count = 1;
  while (d < date) {
    d += days{1};
    if (!is_feb29(d)) ++count;
  }
  return count;
}

std::vector<Date> issue_schedule(Date first, Date last) {
  std::vector<Date> out;
  Date anchor = first;
  const year_month_day f{first};
  int years = 0;
  for (Date d = first; d <= last; d += days{1}) {
    const year_month_day next_ymd{f.year() + std::chrono::years{years + 1}, f.month(), f.day()};
    const Date next = next_ymd.ok() ? sys_days{next_ymd} : sys_days{next_ymd.year() / f.month() / std::chrono::last};
    if (d == next) {
      anchor = d;
      ++years;
    }
    const auto offset = (d - anchor).count();
    if (offset % 14 == 0 && offset < 364) out.push_back(d);
  }
  return out;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double skill(const std::vector<double>& f, const std::vector<double>& o) {
  return dot(f, o) / (std::sqrt(dot(f, f)) * std::sqrt(dot(o, o)));
}

Eigen::VectorXd weighted_least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                       const Eigen::VectorXd& offsets, const Eigen::VectorXd& weights) {
  const auto n = static_cast<std::size_t>(x.rows());
  const auto d = static_cast<std::size_t>(x.cols());
  std::vector<std::vector<long double>> a(d, std::vector<long double>(d + 1, 0.0L));
  for (std::size_t r = 0; r < n; ++r) {
    const long double w = weights(static_cast<Eigen::Index>(r));
    const long double target = static_cast<long double>(y(static_cast<Eigen::Index>(r))) -
                               offsets(static_cast<Eigen::Index>(r));
    for (std::size_t i = 0; i < d; ++i) {
      const long double xi = x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i));
      for (std::size_t j = 0; j < d; ++j) a[i][j] += w * xi * x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j));
      a[i][d] += w * xi * target;
    }
  }
  for (std::size_t col = 0; col < d; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < d; ++r) {
      if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
    }
    if (a[pivot][col] == 0.0L) throw std::runtime_error("oracle: singular system");
    std::swap(a[col], a[pivot]);
    for (std::size_t r = 0; r < d; ++r) {
      if (r == col) continue;
      const long double factor = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= d; ++c) a[r][c] -= factor * a[col][c];
    }
  }
  Eigen::VectorXd beta(static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i) beta(static_cast<Eigen::Index>(i)) = static_cast<double>(a[i][d] / a[i][i]);
  return beta;
}

std::vector<std::pair<Date, double>> similarities(Date target, const subseas::Frame& anomalies,
                                                  const std::vector<Date>& candidates, int lag, int history) {
  const Date first = anomalies.dates().front();
  std::vector<std::pair<Date, double>> out;
  for (Date c : candidates) {
    if (c - days{lag + history - 1} < first) continue;
    double sum = 0.0;
    int used = 0;
    for (int h = 0; h < history; ++h) {
      const auto a = usable_row(anomalies, target - days{lag + h});
      const auto b = usable_row(anomalies, c - days{lag + h});
      if (!a || !b) continue;
      sum += skill(*a, *b);
      ++used;
    }
    if (used > 0) out.emplace_back(c, sum / used);
  }
  return out;
}

std::vector<Date> top_k(std::vector<std::pair<Date, double>> sims, std::size_t k, Date issue, int period_days) {
  std::erase_if(sims, [&](const auto& s) { return s.first + days{period_days - 1} >= issue; });
  std::sort(sims.begin(), sims.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  std::vector<Date> out;
  for (std::size_t i = 0; i < sims.size() && i < k; ++i) out.push_back(sims[i].first);
  return out;
}

LoyocvOutcome loyocv(const subseas::TrainingData& data, const std::vector<std::size_t>& columns, int span) {
  const std::size_t G = data.grid_size;
  const int center = day_of_year(data.target_date);
  const int lag = data.horizon.freshest_lag;
  LoyocvOutcome out;
  for (std::size_t e = 0; e < data.dates.size(); ++e) {
    const Date t = data.dates[e];
    if (day_of_year(t) != center) continue;
    bool complete = true;
    for (std::size_t g = 0; g < G; ++g) complete = complete && data.usable(e, g);
    if (!complete) continue;

    std::vector<double> forecast(G), observed(G);
    for (std::size_t g = 0; g < G; ++g) {
      std::vector<std::size_t> rows;
      for (std::size_t r = 0; r < data.dates.size(); ++r) {
        const Date s = data.dates[r];
        const bool held_out = s >= t - days{lag} && s <= t - days{lag} + days{364};
        if (held_out || circular(day_of_year(s), center) > span || !data.usable(r, g)) continue;
        rows.push_back(r);
      }
      Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(columns.size()));
      Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
      for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < columns.size(); ++j) {
          x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = data.features(rows[i], g)[columns[j]];
        }
        y(static_cast<Eigen::Index>(i)) = data.outcome(rows[i], g);
      }
      const Eigen::VectorXd zeros = Eigen::VectorXd::Zero(y.size());
      const Eigen::VectorXd ones = Eigen::VectorXd::Ones(y.size());
      const Eigen::VectorXd beta = weighted_least_squares(x, y, zeros, ones);
      double pred = 0.0;
      for (std::size_t j = 0; j < columns.size(); ++j) pred += beta(static_cast<Eigen::Index>(j)) * data.features(e, g)[columns[j]];
      forecast[g] = pred - data.climatology(e, g);
      observed[g] = data.outcome(e, g) - data.climatology(e, g);
    }
    out.dates.push_back(t);
    out.skills.push_back(skill(forecast, observed));
  }
  double sum = 0.0;
  for (double s : out.skills) sum += s;
  out.mean_skill = out.skills.empty() ? 0.0 : sum / static_cast<double>(out.skills.size());
  return out;
}

}  // namespace oracle
