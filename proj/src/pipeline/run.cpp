#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "loadscope/attribution.hpp"
#include "loadscope/causality.hpp"
#include "loadscope/csv.hpp"
#include "loadscope/diagnostics.hpp"
#include "loadscope/evaluation.hpp"
#include "loadscope/pipeline.hpp"

namespace loadscope {

using nlohmann::json;
namespace fs = std::filesystem;

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(jobs, 1)));
  std::vector<std::exception_ptr> errors(count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
        break;
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count && !failed; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
            failed = true;
          }
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string two_digits(int v) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%02d", v);
  return buf;
}

void write_json(const fs::path& path, const json& j, int indent = -1) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(Errc::Internal, "cannot write " + path.string());
  f << j.dump(indent) << "\n";
}

json read_json(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::FileNotFound, path.string());
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw Error(Errc::ModelFormat, path.string() + ": " + e.what());
  }
}

/// Runs `body`, tagging any failure with the task label while keeping its category.
template <typename F>
void tagged(const std::string& label, F&& body) {
  try {
    body();
  } catch (const Error& e) {
    throw Error(e.code(), "task " + label + ": " + std::string(e.what()));
  } catch (const std::exception& e) {
    throw Error(Errc::Internal, "task " + label + ": " + e.what());
  }
}

gbdt::Dataset hour_dataset(const DesignMatrix& dm, int hour) {
  return {dm.features, dm.targets.column(static_cast<std::size_t>(hour))};
}

json range_json(DateRange r) { return {r.first.to_string(), r.last.to_string()}; }
DateRange range_from(const json& j) { return {Date::parse(j.at(0).get<std::string>()), Date::parse(j.at(1).get<std::string>())}; }

json context_json(const FeatureContext& ctx, const SplitSpec& split, const std::map<std::string, std::string>& region_city,
                  int smoothing_window) {
  json clim = json::object();
  for (const auto& [region, c] : ctx.climatology) clim[region] = {{"means", c.means()}, {"counts", c.counts()}};
  json centroids = json::array();
  for (const auto& c : ctx.centroids) centroids.push_back({{"name", c.name}, {"first", c.first.to_string()}, {"values", c.values}});
  return {{"format_version", gbdt::kModelFormatVersion},
          {"kind", "context"},
          {"split", {{"train", range_json(split.train)}, {"val", range_json(split.val)}, {"test", range_json(split.test)}}},
          {"region_city", region_city},
          {"text_smoothing_window", smoothing_window},
          {"holiday_classes", ctx.holidays.names},
          {"climatology", clim},
          {"centroids", centroids}};
}

struct StoredContext {
  FeatureContext context;
  SplitSpec split;
  std::map<std::string, std::string> region_city;
  int smoothing_window = 1;
};

StoredContext context_from(const json& j) {
  try {
    if (j.at("format_version").get<int>() != gbdt::kModelFormatVersion || j.at("kind") != "context") {
      throw Error(Errc::ModelFormat, "unsupported context file");
    }
    StoredContext s;
    const auto& sp = j.at("split");
    s.split = {range_from(sp.at("train")), range_from(sp.at("val")), range_from(sp.at("test"))};
    s.region_city = j.at("region_city").get<std::map<std::string, std::string>>();
    s.smoothing_window = j.at("text_smoothing_window").get<int>();
    s.context.holidays.names = j.at("holiday_classes").get<std::vector<std::string>>();
    for (const auto& [region, c] : j.at("climatology").items()) {
      s.context.climatology.emplace(region, Climatology::from_tables(c.at("means").get<std::array<double, 288>>(),
                                                                     c.at("counts").get<std::array<int, 288>>()));
    }
    for (const auto& c : j.at("centroids")) {
      s.context.centroids.push_back(
          {c.at("name").get<std::string>(), Date::parse(c.at("first").get<std::string>()), c.at("values").get<std::vector<double>>()});
    }
    return s;
  } catch (const json::exception& e) {
    throw Error(Errc::ModelFormat, std::string("context file: ") + e.what());
  }
}

struct Task {
  std::string region;
  int horizon = 1;
  std::string variant;
  FeatureSpec spec;
  std::string label() const { return region + "/h" + two_digits(horizon) + "/" + variant; }
  std::uint64_t seed(std::uint64_t global, std::uint64_t part) const {
    return task_seed(global, {hash_string(region), static_cast<std::uint64_t>(horizon), hash_string(variant), part});
  }
};

struct TaskState {
  SplitResult split;
  gbdt::TuneResult tuning;
  std::vector<gbdt::GaussianEnsemble> models;  // one per hour
  ProbForecastSet test;
};

constexpr std::uint64_t kTunePart = 1000;

Matrix targets_of(const DesignMatrix& dm) { return dm.targets; }

}  // namespace

ClusterOutput cluster_panel(const AlignedPanel& panel, DateRange train, std::optional<int> k) {
  const DailyTable& text = panel.textual;
  if (text.table.cols() == 0) throw Error(Errc::TooFewFeatures, "no textual features to cluster");
  DailyTable train_slice = text.slice(train);
  std::vector<std::size_t> usable;
  for (std::size_t c = 0; c < train_slice.table.cols(); ++c) {
    auto col = train_slice.table.values.column(c);
    if (std::any_of(col.begin(), col.end(), [&](double v) { return v != col.front(); })) usable.push_back(c);
  }
  auto subset = [&](const DailyTable& t) {
    DailyTable out{t.first, {}};
    for (auto c : usable) out.table.names.push_back(t.table.names[c]);
    out.table.values = t.table.values.select_cols(usable);
    return out;
  };
  DailyTable train_used = subset(train_slice);
  Standardizer standardizer = Standardizer::fit(train_used.table);
  ClusterOutput out;
  out.result = cluster_textual_features(standardizer.apply(train_used.table));
  const std::size_t n = out.result.items();
  if (k) {
    out.k = *k;
    out.elbow = false;
  } else {
    out.k = out.result.merges.size() >= 4 ? select_k_elbow(out.result.heights()) : 2;
  }
  if (out.k < 1 || static_cast<std::size_t>(out.k) > n) throw Error(Errc::BadK, "k=" + std::to_string(out.k));
  out.centroids = extract_centroids(out.result, static_cast<std::size_t>(out.k), subset(text));
  return out;
}

void write_cluster_outputs(const ClusterOutput& clusters, const fs::path& out_dir) {
  auto labels = clusters.result.labels(static_cast<std::size_t>(clusters.k));
  {
    csv::FileWriter w(out_dir / "clusters.csv");
    w.row({"feature", "cluster", "medoid"});
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const auto& c = clusters.centroids[static_cast<std::size_t>(labels[i])];
      w.row({clusters.result.names[i], std::to_string(c.cluster), c.medoid_name});
    }
  }
  {
    csv::FileWriter w(out_dir / "cluster_merges.csv");
    w.row({"step", "left", "right", "height", "size"});
    for (std::size_t i = 0; i < clusters.result.merges.size(); ++i) {
      const auto& m = clusters.result.merges[i];
      w.row({std::to_string(i), std::to_string(m.left), std::to_string(m.right), csv::format_double(m.height),
             std::to_string(m.size)});
    }
  }
  auto profile = within_cluster_profile(clusters.result.heights());
  SvgSeries s{"W(k)", {}, {}, false};
  for (std::size_t k = 1; k <= profile.size(); ++k) {
    s.x.push_back(static_cast<double>(k));
    s.y.push_back(profile[k - 1]);
  }
  SvgPlot plot{"Within-cluster sum of squares (selected k = " + std::to_string(clusters.k) + ")", "k", "W(k)", {s}, false};
  plot.save(out_dir / "plots" / "elbow.svg");
}

namespace {

std::vector<std::string> causality_features(const RunConfig& config, const AlignedPanel& panel,
                                            const std::optional<ClusterOutput>& clusters) {
  if (!config.causality.features.empty()) {
    for (const auto& f : config.causality.features) panel.textual.table.index_of(f);
    return config.causality.features;
  }
  std::vector<std::string> out;
  if (clusters) {
    for (const auto& c : clusters->centroids) out.push_back(c.medoid_name);
  } else {
    out = panel.textual.table.names;
  }
  return out;
}

struct CausalityOutput {
  std::vector<GrangerRow> granger;
  std::vector<DmlRow> dml;
  std::vector<std::string> warnings;
};

CausalityOutput causality_tables(const RunConfig& config, const AlignedPanel& panel,
                                 const std::vector<std::string>& regions, const std::vector<std::string>& features,
                                 const FeatureContext& context) {
  CausalityOutput out;
  if (features.empty()) return out;
  const std::vector<int> horizons = config.causality.dml_horizons.empty() ? config.horizons : config.causality.dml_horizons;
  FeatureSpec spec;
  spec.use_social = !context.centroids.empty();
  spec.text_smoothing_window = config.text_smoothing_window;
  struct Unit {
    std::string feature, region;
    GrangerResult granger;
    std::vector<CausalPoint> profile;
    std::string warning;
  };
  std::vector<Unit> units;
  for (const auto& region : regions) {
    for (const auto& f : features) units.push_back({f, region, {}, {}, {}});
  }
  std::map<std::string, DailyFeatureSeries> demand;
  for (const auto& r : regions) demand[r] = daily_mean_demand(panel, r);
  parallel_for(units.size(), config.jobs, [&](std::size_t i) {
    Unit& u = units[i];
    tagged("causality/" + u.region + "/" + u.feature, [&] {
      const auto series = panel.textual.series(panel.textual.table.index_of(u.feature));
      GrangerOptions g{config.causality.max_lag, config.causality.alpha};
      u.granger = granger_test(series, demand.at(u.region), g);
      DmlOptions d;
      d.folds = config.causality.folds;
      d.seed = task_seed(config.seed, {hash_string(u.feature), hash_string(u.region), 0x646d6c});
      try {
        u.profile = causal_profile(panel, u.feature, u.region, horizons, spec, context, d);
      } catch (const Error& e) {
        if (e.code() != Errc::DegenerateTreatment) throw;
        u.warning = u.region + "/" + u.feature + ": " + e.what();
      }
    });
  });
  for (const auto& u : units) {
    out.granger.push_back({u.feature, u.region, u.granger});
    for (const auto& p : u.profile) out.dml.push_back({u.feature, u.region, p.horizon, p.effect});
    if (!u.warning.empty()) out.warnings.push_back(u.warning);
  }
  return out;
}

std::vector<std::string> resolve_regions(const RunConfig& config, const AlignedPanel& panel) {
  auto all = panel.regions();
  if (config.regions.empty()) return all;
  for (const auto& r : config.regions) {
    if (std::find(all.begin(), all.end(), r) == all.end()) throw Error(Errc::ConfigError, "unknown region '" + r + "'");
  }
  return config.regions;
}

}  // namespace

void run_causality(const RunConfig& config, const AlignedPanel& panel) {
  config.validate();
  const SplitSpec split = resolve_split(config, panel);
  const auto regions = resolve_regions(config, panel);
  std::optional<ClusterOutput> clusters;
  if (panel.textual.table.cols() >= 3) clusters = cluster_panel(panel, split.train, config.social_k);
  std::vector<DailyFeatureSeries> centroids;
  if (clusters) {
    for (const auto& c : clusters->centroids) centroids.push_back(c.series);
  }
  FeatureContext context = FeatureContext::fit(panel, split.train, centroids);
  auto tables = causality_tables(config, panel, regions, causality_features(config, panel, clusters), context);
  write_granger_csv(tables.granger, config.out_dir / "causality_granger.csv");
  write_dml_csv(tables.dml, config.out_dir / "causality_dml.csv");
}

RunResult run_experiment(const RunConfig& config) {
  config.validate();
  return run_experiment(config, load_config_panel(config));
}

RunResult run_experiment(const RunConfig& config, const AlignedPanel& panel) {
  const auto t_start = Clock::now();
  config.validate();
  json timings = json::object();
  std::vector<std::string> warnings;
  const fs::path out = config.out_dir;
  fs::create_directories(out);

  const auto regions = resolve_regions(config, panel);
  const SplitSpec split = resolve_split(config, panel);

  // Clustering and feature context, fitted on the training range only.
  auto t_phase = Clock::now();
  const bool social = std::any_of(config.variants.begin(), config.variants.end(),
                                  [](const std::string& v) { return FeatureSpec::from_variant(v).use_social; });
  std::optional<ClusterOutput> clusters;
  if (social) {
    clusters = cluster_panel(panel, split.train, config.social_k);
    write_cluster_outputs(*clusters, out);
  }
  std::vector<DailyFeatureSeries> centroids;
  if (clusters) {
    for (const auto& c : clusters->centroids) centroids.push_back(c.series);
  }
  const FeatureContext context = FeatureContext::fit(panel, split.train, centroids);
  write_panel(panel, out / "data");
  write_json(out / "models" / "context.json", context_json(context, split, panel.region_city, config.text_smoothing_window));
  timings["prepare"] = seconds_since(t_phase);

  // Tasks: (region, horizon, variant).
  std::vector<Task> tasks;
  for (const auto& region : regions) {
    for (int h : config.horizons) {
      for (const auto& v : config.variants) {
        FeatureSpec spec = FeatureSpec::from_variant(v);
        spec.social_k = config.social_k;
        spec.text_smoothing_window = config.text_smoothing_window;
        tasks.push_back({region, h, v, spec});
      }
    }
  }
  std::vector<TaskState> states(tasks.size());

  t_phase = Clock::now();
  parallel_for(tasks.size(), config.jobs, [&](std::size_t i) {
    const Task& task = tasks[i];
    TaskState& st = states[i];
    tagged(task.label(), [&] {
      DesignMatrix dm = build_design_matrix(panel, task.region, task.horizon, task.spec, context);
      dm.assert_no_leakage();
      st.split = split_by_dates(dm, split);
      st.tuning = gbdt::tune(config.search, config.tuning_budget, task.seed(config.seed, kTunePart),
                             [&](const gbdt::HyperParams& p) {
                               double total = 0.0;
                               for (int hour : config.tuning_hours) {
                                 auto train = hour_dataset(st.split.train, hour), val = hour_dataset(st.split.val, hour);
                                 auto e = gbdt::fit_ensemble(train, val, p, task.seed(config.seed, kTunePart + 1 + static_cast<std::uint64_t>(hour)));
                                 auto pred = e.predict(val.X);
                                 double acc = 0.0;
                                 for (std::size_t r = 0; r < pred.size(); ++r) acc += (pred[r] - val.y[r]) * (pred[r] - val.y[r]);
                                 total += acc / static_cast<double>(pred.size());
                               }
                               return total / static_cast<double>(config.tuning_hours.size());
                             });
      st.models.resize(kHoursPerDay);
    });
  });
  timings["tune"] = seconds_since(t_phase);

  t_phase = Clock::now();
  parallel_for(tasks.size() * kHoursPerDay, config.jobs, [&](std::size_t unit) {
    const std::size_t i = unit / kHoursPerDay;
    const int hour = static_cast<int>(unit % kHoursPerDay);
    const Task& task = tasks[i];
    TaskState& st = states[i];
    tagged(task.label() + "/hour" + two_digits(hour), [&] {
      st.models[static_cast<std::size_t>(hour)] =
          gbdt::fit_gaussian(hour_dataset(st.split.train, hour), hour_dataset(st.split.val, hour), st.tuning.best,
                             task.seed(config.seed, static_cast<std::uint64_t>(hour)), config.gaussian);
    });
  });
  timings["fit"] = seconds_since(t_phase);

  // Test forecasts, scores and model files.
  t_phase = Clock::now();
  ScoreTable scores;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const Task& task = tasks[i];
    TaskState& st = states[i];
    const DesignMatrix& test = st.split.test;
    st.test.days = test.issue_dates;
    st.test.mu = Matrix(test.rows(), kHoursPerDay);
    st.test.sigma = Matrix(test.rows(), kHoursPerDay);
    json hours = json::array();
    for (int h = 0; h < kHoursPerDay; ++h) {
      const auto& model = st.models[static_cast<std::size_t>(h)];
      auto pred = model.predict(test.features);
      for (std::size_t r = 0; r < test.rows(); ++r) {
        st.test.mu(r, static_cast<std::size_t>(h)) = pred.mu[r];
        st.test.sigma(r, static_cast<std::size_t>(h)) = pred.sigma[r];
      }
      hours.push_back(gbdt::to_json(model));
    }
    auto point = evaluate_point(test.targets, st.test.mu);
    scores.rows.push_back({task.region, task.horizon, task.variant, point.rmse, point.mape,
                           crps_gaussian(st.test, test.targets)});
    write_json(out / "models" / task.variant / task.region / ("h" + two_digits(task.horizon) + ".json"),
               {{"format_version", gbdt::kModelFormatVersion},
                {"kind", "horizon_bundle"},
                {"variant", task.variant},
                {"region", task.region},
                {"horizon", task.horizon},
                {"params", gbdt::to_json(st.tuning.best)},
                {"hours", hours}});
  }

  // Baselines per (region, horizon).
  if (config.baselines) {
    for (const auto& region : regions) {
      std::map<unsigned, DayProfile> scf_by_month;
      auto scf_for = [&](Date target) -> const DayProfile& {
        auto it = scf_by_month.find(target.month());
        if (it == scf_by_month.end()) {
          // Months absent from training borrow the circularly nearest observed month.
          std::optional<DayProfile> profile;
          for (unsigned step = 0; step <= 6 && !profile; ++step) {
            for (unsigned m : {(target.month() + 11 - step) % 12 + 1, (target.month() - 1 + step) % 12 + 1}) {
              try {
                profile = climatology_forecast(panel, region, Date(2000, m, 1), split.train);
                if (step > 0) {
                  warnings.push_back("SCF " + region + ": month " + std::to_string(target.month()) +
                                     " not in training, used month " + std::to_string(m));
                }
                break;
              } catch (const Error& e) {
                if (e.code() != Errc::NoHistory) throw;
              }
            }
          }
          if (!profile) throw Error(Errc::NoHistory, "no training days for " + region);
          it = scf_by_month.emplace(target.month(), *profile).first;
        }
        return it->second;
      };
      for (int h : config.horizons) {
        const TaskState* st = nullptr;
        for (std::size_t i = 0; i < tasks.size(); ++i) {
          if (tasks[i].region == region && tasks[i].horizon == h && !tasks[i].spec.use_social) st = &states[i];
        }
        if (!st) {
          for (std::size_t i = 0; i < tasks.size(); ++i) {
            if (tasks[i].region == region && tasks[i].horizon == h) st = &states[i];
          }
        }
        auto forecasts = [&](const DesignMatrix& dm, Matrix& pf, Matrix& scf) {
          pf = Matrix(dm.rows(), kHoursPerDay);
          scf = Matrix(dm.rows(), kHoursPerDay);
          for (std::size_t r = 0; r < dm.rows(); ++r) {
            auto p = persistence_forecast(panel, region, dm.issue_dates[r], h);
            const auto& s = scf_for(dm.issue_dates[r] + h);
            std::copy(p.begin(), p.end(), pf.row(r).begin());
            std::copy(s.begin(), s.end(), scf.row(r).begin());
          }
        };
        Matrix pf_val, scf_val, pf_test, scf_test;
        forecasts(st->split.val, pf_val, scf_val);
        forecasts(st->split.test, pf_test, scf_test);
        PfScfModel combo = combine_pf_scf(pf_val, scf_val, st->split.val.targets, config.pfscf_lambdas);
        write_json(out / "models" / "PF-SCF" / region / ("h" + two_digits(h) + ".json"), to_json(combo));
        const Matrix& truth = st->split.test.targets;
        for (auto [name, m] : {std::pair<std::string, Matrix>{"PF", pf_test}, {"SCF", scf_test},
                               {"PF-SCF", combo.predict(pf_test, scf_test)}}) {
          auto s = evaluate_point(truth, m);
          scores.rows.push_back({region, h, name, s.rmse, s.mape, std::nullopt});
        }
      }
    }
  }
  scores.sort();
  scores.write_csv(out / "scores.csv");

  // Improvements of every variant over GBM.
  std::vector<ImprovementTable> improvements;
  const bool has_gbm = std::find(config.variants.begin(), config.variants.end(), "GBM") != config.variants.end();
  if (has_gbm) {
    for (const auto& v : config.variants) {
      if (v == "GBM") continue;
      for (Metric m : {Metric::Rmse, Metric::Mape, Metric::Crps}) {
        improvements.push_back(improvement_table(scores.for_model("GBM"), scores.for_model(v), m));
      }
    }
  }
  write_improvements_csv(improvements, out / "improvements.csv");
  for (const auto& t : improvements) {
    SvgHeatmap map;
    map.title = t.variant_model + " vs " + t.base_model + ": " + metric_name(t.metric) + " improvement (%) by week";
    map.row_labels = regions;
    for (int w = 1; w <= kWeekCount; ++w) map.col_labels.push_back("week " + std::to_string(w));
    map.values = Matrix(regions.size(), kWeekCount, NAN);
    for (const auto& c : t.weekly) {
      auto r = static_cast<std::size_t>(std::find(regions.begin(), regions.end(), c.region) - regions.begin());
      map.values(r, static_cast<std::size_t>(c.week - 1)) = c.pct;
    }
    map.save(out / "plots" / ("improvement_" + t.variant_model + "_" + metric_name(t.metric) + ".svg"));
  }
  for (const auto& region : regions) {
    SvgPlot plot{"MAPE by horizon: " + region, "horizon (days)", "MAPE (%)", {}, false};
    std::vector<std::string> models = config.variants;
    if (config.baselines) models.insert(models.end(), {"PF", "SCF", "PF-SCF"});
    for (const auto& m : models) {
      SvgSeries s{m, {}, {}, false};
      for (int h : config.horizons) {
        if (const ScoreRow* row = scores.find(region, h, m)) {
          s.x.push_back(h);
          s.y.push_back(row->mape_pct);
        }
      }
      plot.series.push_back(std::move(s));
    }
    plot.save(out / "plots" / ("mape_" + region + ".svg"));
  }

  // Paired t-tests of the textual features' effect on mu and sigma.
  {
    csv::FileWriter w(out / "textual_impact.csv");
    w.row({"region", "horizon", "base_model", "variant_model", "quantity", "mean_diff", "t", "p_value", "label"});
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      if (!tasks[i].spec.use_social) continue;
      FeatureSpec base_spec = tasks[i].spec;
      base_spec.use_social = false;
      const std::string base_name = base_spec.variant_name();
      for (std::size_t j = 0; j < tasks.size(); ++j) {
        if (tasks[j].variant != base_name || tasks[j].region != tasks[i].region || tasks[j].horizon != tasks[i].horizon) {
          continue;
        }
        // Align by issue day: the social design starts later when smoothing.
        std::map<Date, std::size_t> base_rows;
        for (std::size_t r = 0; r < states[j].test.days.size(); ++r) base_rows[states[j].test.days[r]] = r;
        std::vector<double> mu_a, mu_b, sd_a, sd_b;
        for (std::size_t r = 0; r < states[i].test.days.size(); ++r) {
          auto it = base_rows.find(states[i].test.days[r]);
          if (it == base_rows.end()) continue;
          for (std::size_t h = 0; h < kHoursPerDay; ++h) {
            mu_a.push_back(states[i].test.mu(r, h));
            mu_b.push_back(states[j].test.mu(it->second, h));
            sd_a.push_back(states[i].test.sigma(r, h));
            sd_b.push_back(states[j].test.sigma(it->second, h));
          }
        }
        if (mu_a.size() < 2) continue;
        for (auto [quantity, a, b] : {std::tuple{"mu", &mu_a, &mu_b}, std::tuple{"sigma", &sd_a, &sd_b}}) {
          auto t = paired_ttest(*a, *b);
          w.row({tasks[i].region, std::to_string(tasks[i].horizon), base_name, tasks[i].variant, quantity,
                 csv::format_double(t.mean_diff), csv::format_double(t.t), csv::format_double(t.p_value),
                 format_effect(std::string(quantity) == "mu" ? "dmu" : "dsigma", t)});
        }
      }
    }
  }

  // Calibration slices.
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const Task& task = tasks[i];
    const auto& cv = config.calibration.variants;
    if (!cv.empty() && std::find(cv.begin(), cv.end(), task.variant) == cv.end()) continue;
    const std::string stem = task.variant + "_" + task.region + "_h" + two_digits(task.horizon);
    const Matrix& truth = states[i].split.test.targets;
    write_calibration_csv(pit_and_reliability(states[i].test, truth), out / "calibration" / (stem + "_all.csv"));
    for (int hour : config.calibration.hours) {
      auto report = pit_and_reliability(states[i].test, truth, hour);
      const std::string name = stem + "_hour" + two_digits(hour);
      write_calibration_csv(report, out / "calibration" / (name + ".csv"));
      SvgSeries rel{"empirical", {0.0}, {0.0}, false};
      for (const auto& p : report.reliability) {
        rel.x.push_back(p.nominal);
        rel.y.push_back(p.empirical);
      }
      rel.x.push_back(1.0);
      rel.y.push_back(1.0);
      SvgPlot{"Reliability " + name, "nominal probability", "observed frequency", {rel}, true}.save(
          out / "plots" / ("reliability_" + name + ".svg"));
      if (!report.qq.empty()) {
        SvgSeries qq{"standardized residuals", {}, {}, true};
        for (const auto& q : report.qq) {
          qq.x.push_back(q.theoretical);
          qq.y.push_back(q.sample);
        }
        SvgPlot{"Q-Q " + name, "normal quantile", "sample quantile", {qq}, true}.save(out / "plots" /
                                                                                       ("qq_" + name + ".svg"));
      }
    }
  }
  timings["evaluate"] = seconds_since(t_phase);

  // Causality.
  t_phase = Clock::now();
  CausalityOutput causal;
  if (config.causality.enabled && panel.textual.table.cols() > 0) {
    causal = causality_tables(config, panel, regions, causality_features(config, panel, clusters), context);
    warnings.insert(warnings.end(), causal.warnings.begin(), causal.warnings.end());
  }
  write_granger_csv(causal.granger, out / "causality_granger.csv");
  write_dml_csv(causal.dml, out / "causality_dml.csv");
  timings["causality"] = seconds_since(t_phase);

  // Attribution: mean |SHAP| in MW, per region and pooled.
  t_phase = Clock::now();
  std::vector<ShapImportance> pooled;
  if (config.attribution.enabled) {
    const std::string variant = config.attribution.variant.empty() ? config.variants.back() : config.attribution.variant;
    const int values_hour = config.attribution.values_hour.value_or(config.calibration.hours.empty() ? 20 : config.calibration.hours.front());
    std::vector<std::size_t> chosen;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      if (tasks[i].variant == variant) chosen.push_back(i);
    }
    std::vector<std::vector<ShapImportance>> per_unit(chosen.size() * kHoursPerDay);
    std::vector<ShapMatrix> values(chosen.size());
    parallel_for(per_unit.size(), config.jobs, [&](std::size_t unit) {
      const std::size_t i = chosen[unit / kHoursPerDay];
      const int hour = static_cast<int>(unit % kHoursPerDay);
      tagged(tasks[i].label() + "/shap" + two_digits(hour), [&] {
        const DesignMatrix& test = states[i].split.test;
        std::vector<std::size_t> rows;
        for (std::size_t r = 0; r < test.rows() && static_cast<int>(r) < config.attribution.max_samples; ++r) rows.push_back(r);
        NamedMatrix X{test.features.names, test.features.values.select_rows(rows)};
        ShapMatrix shap = shap_values(states[i].models[static_cast<std::size_t>(hour)].mu, X, ShapUnits::Target);
        per_unit[unit] = shap_summary(shap);
        if (hour == values_hour) values[unit / kHoursPerDay] = std::move(shap);
      });
    });
    for (const auto& region : regions) {
      std::vector<std::vector<ShapImportance>> mine;
      for (std::size_t c = 0; c < chosen.size(); ++c) {
        if (tasks[chosen[c]].region != region) continue;
        for (int h = 0; h < kHoursPerDay; ++h) mine.push_back(per_unit[c * kHoursPerDay + static_cast<std::size_t>(h)]);
        write_shap_values_csv(values[c], out / "shap" /
                                             (region + "_" + variant + "_h" + two_digits(tasks[chosen[c]].horizon) +
                                              "_hour" + two_digits(values_hour) + "_values.csv"));
      }
      write_shap_summary_csv(average_summaries(mine), out / "shap" / (region + "_" + variant + "_summary.csv"));
    }
    pooled = average_summaries(per_unit);
  }
  write_shap_summary_csv(pooled, out / "shap_summary.csv");
  timings["attribution"] = seconds_since(t_phase);

  // Manifest.
  RunResult result;
  result.out_dir = out;
  result.inventory = file_inventory(out);
  result.seconds = seconds_since(t_start);
  timings["total"] = result.seconds;
  json task_json = json::array();
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const Task& t = tasks[i];
    json hour_seeds = json::array();
    for (int h = 0; h < kHoursPerDay; ++h) hour_seeds.push_back(t.seed(config.seed, static_cast<std::uint64_t>(h)));
    task_json.push_back({{"region", t.region},
                         {"horizon", t.horizon},
                         {"variant", t.variant},
                         {"tuning_seed", t.seed(config.seed, kTunePart)},
                         {"hour_seeds", hour_seeds},
                         {"params", gbdt::to_json(states[i].tuning.best)},
                         {"best_val_mse", states[i].tuning.best_val_mse},
                         {"trials", states[i].tuning.trials.size()},
                         {"rows", {{"train", states[i].split.train.rows()},
                                   {"val", states[i].split.val.rows()},
                                   {"test", states[i].split.test.rows()}}}});
  }
  json cluster_json = nullptr;
  if (clusters) {
    cluster_json = {{"k", clusters->k}, {"elbow", clusters->elbow}, {"clusters", json::array()}};
    for (const auto& c : clusters->centroids) {
      cluster_json["clusters"].push_back({{"cluster", c.cluster}, {"medoid", c.medoid_name}, {"members", c.members}});
    }
  }
  json manifest = {{"tool", "loadscope"},
                   {"version", kVersion},
                   {"config", config.to_json()},
                   {"split", {{"train", range_json(split.train)}, {"val", range_json(split.val)}, {"test", range_json(split.test)}}},
                   {"regions", regions},
                   {"tasks", task_json},
                   {"clusters", cluster_json},
                   {"warnings", warnings},
                   {"timings_seconds", timings},
                   {"inventory", result.inventory}};
  write_json(out / "manifest.json", manifest, 2);
  return result;
}

// ---------------------------------------------------------------------------

namespace {

struct LoadedRun {
  StoredContext stored;
  AlignedPanel panel;
};

LoadedRun load_run(const fs::path& run_dir) {
  const fs::path ctx = run_dir / "models" / "context.json";
  if (!fs::exists(ctx)) throw Error(Errc::ModelNotFound, ctx.string());
  LoadedRun r;
  r.stored = context_from(read_json(ctx));
  r.panel = load_panel(PanelPaths::in_directory(run_dir / "data"), r.stored.region_city);
  return r;
}

json load_bundle(const fs::path& run_dir, const std::string& variant, const std::string& region, int horizon) {
  if (horizon < 1 || horizon > kMaxHorizon) throw Error(Errc::InvalidArgument, "horizon must be in [1, 30]");
  const fs::path path = run_dir / "models" / variant / region / ("h" + two_digits(horizon) + ".json");
  if (!fs::exists(path)) throw Error(Errc::ModelNotFound, path.string());
  json bundle = read_json(path);
  if (bundle.value("kind", "") != "horizon_bundle" || bundle.value("format_version", 0) != gbdt::kModelFormatVersion) {
    throw Error(Errc::ModelFormat, path.string());
  }
  return bundle;
}

FeatureSpec stored_spec(const std::string& variant, const StoredContext& s) {
  FeatureSpec spec = FeatureSpec::from_variant(variant);
  spec.text_smoothing_window = s.smoothing_window;
  return spec;
}

}  // namespace

std::vector<ForecastRow> forecast_from_run(const fs::path& run_dir, const std::string& region, Date issue_day,
                                           int horizon, const std::string& variant) {
  json bundle = load_bundle(run_dir, variant, region, horizon);
  LoadedRun run = load_run(run_dir);
  if (issue_day < run.stored.split.train.first || !run.panel.span.contains(issue_day)) {
    throw Error(Errc::DateOutOfRange, issue_day.to_string() + " outside " + run.stored.split.train.first.to_string() +
                                          ".." + run.panel.span.last.to_string());
  }
  std::vector<double> x;
  try {
    x = build_feature_row(run.panel, region, horizon, stored_spec(variant, run.stored), run.stored.context, issue_day);
  } catch (const Error& e) {
    if (e.code() != Errc::InsufficientHistory) throw;
    throw Error(Errc::DateOutOfRange, std::string(e.what()));
  }
  std::vector<ForecastRow> rows;
  const auto& hours = bundle.at("hours");
  if (hours.size() != kHoursPerDay) throw Error(Errc::ModelFormat, "bundle must hold 24 hour models");
  for (int h = 0; h < kHoursPerDay; ++h) {
    auto model = gbdt::gaussian_from_json(hours.at(static_cast<std::size_t>(h)));
    if (model.mu.feature_names.size() != x.size()) throw Error(Errc::ColumnMismatch, "model and feature row differ");
    ForecastRow row;
    row.hour = h;
    row.mu = model.predict_mu(x);
    row.point = row.mu;
    row.sigma = model.predict_sigma(x);
    row.lo90 = row.mu - kZ95 * row.sigma;
    row.hi90 = row.mu + kZ95 * row.sigma;
    rows.push_back(row);
  }
  return rows;
}

void attribute_from_run(const fs::path& run_dir, const std::string& region, int horizon, const std::string& variant,
                        int hour, const fs::path& out_dir) {
  if (hour < 0 || hour >= kHoursPerDay) throw Error(Errc::InvalidArgument, "hour must be in [0, 23]");
  json bundle = load_bundle(run_dir, variant, region, horizon);
  LoadedRun run = load_run(run_dir);
  auto model = gbdt::gaussian_from_json(bundle.at("hours").at(static_cast<std::size_t>(hour)));
  DesignMatrix dm = build_design_matrix(run.panel, region, horizon, stored_spec(variant, run.stored), run.stored.context);
  DesignMatrix test = split_by_dates(dm, run.stored.split).test;
  ShapMatrix shap = shap_values(model.mu, test.features, ShapUnits::Target);
  const std::string stem = region + "_" + variant + "_h" + two_digits(horizon) + "_hour" + two_digits(hour);
  write_shap_values_csv(shap, out_dir / (stem + "_values.csv"));
  write_shap_summary_csv(shap_summary(shap), out_dir / (stem + "_summary.csv"));
}

void write_forecast_csv(const std::vector<ForecastRow>& rows, std::ostream& out) {
  csv::Writer w(out);
  w.row({"hour", "point_mw", "mu_mw", "sigma_mw", "lo90_mw", "hi90_mw"});
  for (const auto& r : rows) {
    w.row({std::to_string(r.hour), csv::format_double(r.point), csv::format_double(r.mu), csv::format_double(r.sigma),
           csv::format_double(r.lo90), csv::format_double(r.hi90)});
  }
}

}  // namespace loadscope
