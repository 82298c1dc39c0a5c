#include "subseas/backtest.hpp"

#include <map>

#include <spdlog/spdlog.h>
#include <tbb/task_arena.h>

#include "subseas/error.hpp"
#include "subseas/parallel.hpp"
#include "subseas/synthetic.hpp"

namespace subseas {

namespace {

struct ModelContext {
  const ModelSpec* spec = nullptr;
  FeatureCatalog catalog;
  std::optional<Frame> file;
  std::vector<std::size_t> member_slots;
  std::optional<EnsembleWeights> weights;
};

void record_error(ForecastRecord& rec, std::string code, std::string message) {
  rec.forecast.reset();
  rec.skill.reset();
  rec.error_code = std::move(code);
  rec.error = std::move(message);
}

}  // namespace

std::size_t BacktestResult::total_violations() const {
  std::size_t total = 0;
  for (const auto& a : audit) total += a.violations;
  return total;
}

PreparedDataset load_prepared(const RunConfig& config) {
  Dataset dataset;
  if (config.synthetic) {
    dataset = generate_synthetic(config.seed, config.synthetic->grid, config.synthetic->years,
                                 config.synthetic->spec)
                  .dataset;
  } else {
    dataset = load_dataset(config.dataset_dir);
  }
  if (!config.variable.empty() && config.variable != dataset.target_variable) {
    throw Error(ErrorCode::Config, "[run] variable '" + config.variable + "' does not match the dataset target '" +
                                       dataset.target_variable + "'");
  }
  return prepare(std::move(dataset), config.base_years);
}

BacktestResult run_backtest(const RunConfig& config, const PreparedDataset& data) {
  config.validate();
  const std::string& var = data.data.target_variable;
  const Frame& observed = data.anomalies_of(var);
  const Climatology& clim = data.climatology(var);

  BacktestResult result;
  result.grid = data.data.grid();
  result.issues = issue_schedule(config.first_issue, config.last_issue);
  if (result.issues.empty()) throw Error(ErrorCode::Config, "issue schedule is empty");
  for (Date i : result.issues) result.targets.push_back(target_start(i, config.horizon));

  std::vector<ModelContext> contexts;
  std::map<std::string, std::size_t> slot_of;
  for (const auto& spec : config.models) {
    ModelContext ctx;
    ctx.spec = &spec;
    switch (spec.kind) {
      case ModelKind::Multillr:
        ctx.catalog = spec.catalog.empty() ? FeatureCatalog::default_for(data.data, config.horizon)
                                           : FeatureCatalog::parse(spec.catalog);
        break;
      case ModelKind::File: {
        ReadOptions options;
        options.grid = data.data.grid();
        ctx.file = read_frame(spec.path, options);
        break;
      }
      case ModelKind::Ensemble:
        for (const auto& m : spec.members) ctx.member_slots.push_back(slot_of.at(m));
        ctx.weights = spec.weights.empty() ? EnsembleWeights::uniform(spec.members.size())
                                           : EnsembleWeights(spec.weights);
        break;
      default:
        break;
    }
    slot_of[spec.name] = contexts.size();
    contexts.push_back(std::move(ctx));
    result.models.push_back(spec.name);
  }

  const std::size_t M = contexts.size();
  const std::size_t N = result.issues.size();
  result.records.assign(M, std::vector<ForecastRecord>(N));
  result.audit.resize(N);
  std::vector<std::vector<BenefitRecord>> benefit(N);

  const auto run_issue = [&](std::size_t n) {
    const Date issue = result.issues[n];
    const Date target = result.targets[n];
    const DatasetView view(data, issue);
    const auto obs_row = observed.row_at(target);
    const bool has_obs = obs_row && all_finite(*obs_row);

    for (std::size_t m = 0; m < M; ++m) {
      const ModelContext& ctx = contexts[m];
      ForecastRecord& rec = result.records[m][n];
      try {
        switch (ctx.spec->kind) {
          case ModelKind::Multillr: {
            auto out = multillr_forecast(target, config.horizon, ctx.catalog, view, ctx.spec->multillr);
            out.forecast.model_name = ctx.spec->name;
            rec.forecast = std::move(out.forecast);
            rec.trace = std::move(out.trace);
            break;
          }
          case ModelKind::Autoknn: {
            auto out = autoknn_forecast(target, config.horizon, ctx.spec->autoknn, view);
            out.forecast.model_name = ctx.spec->name;
            rec.forecast = std::move(out.forecast);
            rec.neighbors = std::move(out.neighbors);
            break;
          }
          case ModelKind::Echo:
            if (!has_obs) throw Error(ErrorCode::MissingSource, "no observation for " + format_date(target));
            rec.forecast = ForecastAnomaly{ctx.spec->name, target, config.horizon, {obs_row->begin(), obs_row->end()}};
            break;
          case ModelKind::File: {
            const auto row = ctx.file->row_at(target);
            if (!row || !all_finite(*row)) {
              throw Error(ErrorCode::MissingSource, "no complete forecast for " + format_date(target) + " in " +
                                                        ctx.spec->path);
            }
            std::vector<double> values(row->begin(), row->end());
            if (!ctx.spec->file_holds_anomalies) {
              const auto c = clim.at(target);
              for (std::size_t g = 0; g < values.size(); ++g) values[g] -= c[g];
            }
            rec.forecast = ForecastAnomaly{ctx.spec->name, target, config.horizon, std::move(values)};
            break;
          }
          case ModelKind::Ensemble: {
            std::vector<ForecastAnomaly> members;
            for (std::size_t slot : ctx.member_slots) {
              const ForecastRecord& member = result.records[slot][n];
              if (!member.forecast) {
                throw Error(ErrorCode::MissingSource, "member '" + contexts[slot].spec->name + "' has no forecast");
              }
              members.push_back(*member.forecast);
            }
            EnsembleOutput out = ensemble(members, *ctx.weights, ctx.spec->name);
            if (has_obs) {
              std::vector<std::span<const double>> spans;
              for (const auto& f : members) spans.emplace_back(f.values);
              try {
                benefit[n].push_back({issue, ctx.spec->name, verify_ensemble_benefit(spans, *ctx.weights, *obs_row)});
              } catch (const Error& e) {
                spdlog::debug("ensemble check skipped on {}: {}", format_date(issue), e.what());
              }
            }
            rec.forecast = std::move(out.forecast);
            if (out.degenerate) throw Error(ErrorCode::Degenerate, "normalized members cancel exactly");
            break;
          }
        }
        if (!has_obs) throw Error(ErrorCode::MissingSource, "no observation for " + format_date(target));
        rec.skill = skill(rec.forecast->values, *obs_row);
      } catch (const Error& e) {
        const bool keep_forecast = e.code() == ErrorCode::UndefinedSkill || e.code() == ErrorCode::Degenerate ||
                                   (rec.forecast && e.code() == ErrorCode::MissingSource && !has_obs);
        auto forecast = std::move(rec.forecast);
        record_error(rec, std::string(to_string(e.code())), e.what());
        if (keep_forecast) rec.forecast = std::move(forecast);
      } catch (const std::exception& e) {
        record_error(rec, "internal", e.what());
      }
    }
    result.audit[n] = IssueAudit{issue, view.cutoff(), view.latest_read(), view.violations()};
  };

  tbb::task_arena arena(config.threads);
  arena.execute([&] { parallel_for_each_index(N, run_issue); });

  for (auto& b : benefit) {
    for (auto& r : b) result.benefit.push_back(std::move(r));
  }
  std::size_t failures = 0;
  for (const auto& per_model : result.records) {
    for (const auto& r : per_model) failures += r.skill ? 0 : 1;
  }
  spdlog::info("backtest: {} issues, {} models, {} missing skills, {} read-gate violations", N, M, failures,
               result.total_violations());
  return result;
}

}  // namespace subseas
