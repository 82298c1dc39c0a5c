#include "subseas/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "subseas/error.hpp"

namespace subseas {

namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  return out;
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + '"';
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string fixed4(const std::optional<double>& v) { return v ? fmt::format("{:.4f}", *v) : "n/a"; }

SkillSummary summarize_values(const std::vector<double>& values) {
  SkillSummary s;
  s.count = values.size();
  if (!values.empty()) {
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
  }
  return s;
}

}  // namespace

SkillTable SkillTable::from(const BacktestResult& result) {
  SkillTable t;
  t.models = result.models;
  t.issues = result.issues;
  t.targets = result.targets;
  for (const auto& per_model : result.records) {
    std::vector<std::optional<double>> row;
    for (const auto& rec : per_model) row.push_back(rec.skill);
    t.skills.push_back(std::move(row));
  }
  return t;
}

void write_skill_table(const SkillTable& table, const std::string& path) {
  auto out = open_output(path);
  out << "issue_date,target_date,evaluation_year";
  for (const auto& m : table.models) out << ',' << m;
  out << '\n';
  for (std::size_t n = 0; n < table.issues.size(); ++n) {
    out << format_date(table.issues[n]) << ',' << format_date(table.targets[n]) << ','
        << evaluation_year(table.issues[n]);
    for (const auto& per_model : table.skills) {
      out << ',';
      if (per_model[n]) out << format_value(*per_model[n]);
    }
    out << '\n';
  }
}

SkillTable read_skill_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::Parse, path + ": empty file");
  const auto header = split_csv_line(line);
  if (header.size() < 3 || header[0] != "issue_date" || header[1] != "target_date" || header[2] != "evaluation_year") {
    throw Error(ErrorCode::Parse, path + ":1: expected header issue_date,target_date,evaluation_year,...");
  }
  SkillTable t;
  t.models.assign(header.begin() + 3, header.end());
  t.skills.resize(t.models.size());
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    const std::string where = path + ":" + std::to_string(line_no) + ": ";
    if (fields.size() != header.size()) throw Error(ErrorCode::Parse, where + "wrong number of fields");
    try {
      t.issues.push_back(parse_date(fields[0]));
      t.targets.push_back(parse_date(fields[1]));
    } catch (const Error& e) {
      throw Error(ErrorCode::Parse, where + e.what());
    }
    for (std::size_t m = 0; m < t.models.size(); ++m) {
      const std::string& f = fields[m + 3];
      if (f.empty()) {
        t.skills[m].emplace_back();
        continue;
      }
      char* end = nullptr;
      const double v = std::strtod(f.c_str(), &end);
      if (end != f.c_str() + f.size()) throw Error(ErrorCode::Parse, where + "bad skill '" + f + "'");
      t.skills[m].emplace_back(v);
    }
  }
  return t;
}

std::size_t histogram_bin(double skill) {
  const auto lower = [](std::size_t b) { return -1.0 + 0.1 * static_cast<double>(b); };
  const double scaled = std::floor((skill + 1.0) * 10.0);
  std::size_t b = scaled > 0.0 ? std::min(kHistogramBins - 1, static_cast<std::size_t>(scaled)) : 0;
  // Snap to the printed bin edges.
  while (b + 1 < kHistogramBins && skill >= lower(b + 1)) ++b;
  while (b > 0 && skill < lower(b)) --b;
  return b;
}

BacktestReport summarize(const SkillTable& table) {
  BacktestReport r;
  r.models = table.models;
  std::map<int, std::vector<std::vector<double>>> per_year;
  std::vector<std::vector<double>> all(table.models.size());
  r.histogram.assign(table.models.size(), {});
  for (std::size_t n = 0; n < table.issues.size(); ++n) {
    auto& year = per_year[evaluation_year(table.issues[n])];
    year.resize(table.models.size());
    for (std::size_t m = 0; m < table.models.size(); ++m) {
      if (const auto& s = table.skills[m][n]) {
        year[m].push_back(*s);
        all[m].push_back(*s);
        ++r.histogram[m][histogram_bin(*s)];
      }
    }
  }
  for (const auto& [year, values] : per_year) {
    r.years.push_back(year);
    std::vector<SkillSummary> row;
    for (const auto& v : values) row.push_back(summarize_values(v));
    r.by_year.push_back(std::move(row));
  }
  for (const auto& v : all) r.all.push_back(summarize_values(v));
  return r;
}

void write_summary_csv(const BacktestReport& report, const std::string& path) {
  auto out = open_output(path);
  out << "year";
  for (const auto& m : report.models) out << ',' << m;
  out << '\n';
  const auto row = [&](const std::string& label, const std::vector<SkillSummary>& values) {
    out << label;
    for (const auto& s : values) {
      out << ',';
      if (s.mean) out << format_value(*s.mean);
    }
    out << '\n';
  };
  for (std::size_t y = 0; y < report.years.size(); ++y) row(std::to_string(report.years[y]), report.by_year[y]);
  row("all", report.all);
}

void write_summary_markdown(const BacktestReport& report, const std::string& path) {
  auto out = open_output(path);
  out << "| year |";
  for (const auto& m : report.models) out << ' ' << m << " |";
  out << "\n|---|";
  for (std::size_t m = 0; m < report.models.size(); ++m) out << "---:|";
  out << '\n';
  const auto row = [&](const std::string& label, const std::vector<SkillSummary>& values) {
    out << "| " << label << " |";
    for (const auto& s : values) out << ' ' << fixed4(s.mean) << " (" << s.count << ") |";
    out << '\n';
  };
  for (std::size_t y = 0; y < report.years.size(); ++y) row(std::to_string(report.years[y]), report.by_year[y]);
  row("all", report.all);
  out << "\nMean skill per evaluation year (April 18 to April 17); number of scored dates in parentheses.\n";
}

void write_histogram_csv(const BacktestReport& report, const std::string& path) {
  auto out = open_output(path);
  out << "bin_lower,bin_upper";
  for (const auto& m : report.models) out << ',' << m;
  out << '\n';
  for (std::size_t b = 0; b < kHistogramBins; ++b) {
    out << fmt::format("{:.1f},{:.1f}", -1.0 + 0.1 * static_cast<double>(b), -1.0 + 0.1 * static_cast<double>(b + 1));
    for (const auto& h : report.histogram) out << ',' << h[b];
    out << '\n';
  }
}

void write_backtest_outputs(const BacktestResult& result, const RunConfig& config, const std::string& directory) {
  fs::create_directories(directory);
  const auto path = [&](const std::string& name) { return (fs::path(directory) / name).string(); };

  const SkillTable table = SkillTable::from(result);
  const BacktestReport report = summarize(table);
  write_skill_table(table, path("skills.csv"));
  write_summary_csv(report, path("summary.csv"));
  write_summary_markdown(report, path("summary.md"));
  write_histogram_csv(report, path("histogram.csv"));

  for (std::size_t m = 0; m < result.models.size(); ++m) {
    const std::string& name = result.models[m];
    const auto& records = result.records[m];

    std::vector<Date> dates;
    std::vector<double> values;
    for (const auto& rec : records) {
      if (!rec.forecast) continue;
      dates.push_back(rec.forecast->target_start);
      values.insert(values.end(), rec.forecast->values.begin(), rec.forecast->values.end());
    }
    write_frame(Frame(name, result.grid, std::move(dates), std::move(values)), path("forecasts_" + name + ".csv"));

    const ModelSpec* spec = config.find_model(name);
    if (spec && spec->kind == ModelKind::Multillr) {
      auto out = open_output(path("selection_traces_" + name + ".csv"));
      out << "issue_date,target_date,step,removed_feature,mean_skill\n";
      std::vector<SelectionTrace> traces;
      std::vector<std::string> catalog;
      for (std::size_t n = 0; n < records.size(); ++n) {
        const auto& trace = records[n].trace;
        if (!trace) continue;
        const std::string prefix = format_date(result.issues[n]) + ',' + format_date(result.targets[n]) + ',';
        out << prefix << "0,," << format_value(trace->initial_skill) << '\n';
        for (std::size_t s = 0; s < trace->steps.size(); ++s) {
          out << prefix << s + 1 << ',' << trace->steps[s].removed << ',' << format_value(trace->steps[s].mean_skill)
              << '\n';
        }
        if (catalog.empty()) catalog = trace->initial;
        traces.push_back(*trace);
      }
      auto freq = open_output(path("feature_frequencies_" + name + ".csv"));
      freq << "feature,selected,issues\n";
      std::vector<CatalogEntry> entries;
      for (const auto& c : catalog) entries.push_back(CatalogEntry{c, c, 0, false});
      for (const auto& [feature, count] : selection_frequencies(FeatureCatalog(entries), traces)) {
        freq << feature << ',' << count << ',' << traces.size() << '\n';
      }
    }
    if (spec && spec->kind == ModelKind::Autoknn) {
      std::vector<NeighborSet> sets;
      for (const auto& rec : records) {
        if (rec.neighbors) sets.push_back(*rec.neighbors);
      }
      write_neighbor_diagnostics(sets, path("neighbors_" + name + ".csv"));
    }
  }

  {
    auto out = open_output(path("ensemble_checks.csv"));
    out << "issue_date,ensemble,weighted_member_skill,ensemble_skill,degenerate,sign_match,magnitude_ok,strict\n";
    for (const auto& b : result.benefit) {
      out << format_date(b.issue) << ',' << b.ensemble << ',' << format_value(b.report.lhs) << ','
          << (b.report.rhs ? format_value(*b.report.rhs) : "") << ',' << b.report.degenerate << ','
          << b.report.sign_match << ',' << b.report.magnitude_ok << ',' << b.report.strict << '\n';
    }
  }
  {
    auto out = open_output(path("errors.csv"));
    out << "issue_date,model,code,message\n";
    for (std::size_t n = 0; n < result.issues.size(); ++n) {
      for (std::size_t m = 0; m < result.models.size(); ++m) {
        const auto& rec = result.records[m][n];
        if (rec.error_code.empty()) continue;
        out << format_date(result.issues[n]) << ',' << result.models[m] << ',' << rec.error_code << ','
            << csv_field(rec.error) << '\n';
      }
    }
  }
  {
    auto out = open_output(path("audit.csv"));
    out << "issue_date,cutoff,latest_read,violations\n";
    for (const auto& a : result.audit) {
      out << format_date(a.issue) << ',' << format_date(a.cutoff) << ','
          << (a.latest_read ? format_date(*a.latest_read) : "") << ',' << a.violations << '\n';
    }
  }
  {
    auto out = open_output(path("config.ini"));
    out << config.source_text;
  }
}

}  // namespace subseas
