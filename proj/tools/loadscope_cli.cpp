#include <exception>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "loadscope/pipeline.hpp"

namespace ls = loadscope;

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<std::string> out;

  void attach(CLI::App* app, bool config_required) {
    auto* c = app->add_option("--config", config, "YAML or JSON run configuration");
    if (config_required) c->required();
    app->add_option("--seed", seed, "global seed (overrides LOADSCOPE_SEED and the file)");
    app->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    app->add_option("--out", out, "output directory");
  }

  ls::ConfigOverrides overrides() const {
    ls::ConfigOverrides o;
    o.seed = seed;
    o.jobs = jobs;
    if (out) o.out_dir = *out;
    return o;
  }

  ls::RunConfig load() const { return ls::load_config(config, overrides()); }
};

int exit_code(const ls::Error& e) {
  switch (e.category()) {
    case ls::ErrorCategory::Config:
      return 2;
    case ls::ErrorCategory::Data:
      return 3;
    case ls::ErrorCategory::Internal:
      return 4;
  }
  return 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Day-ahead to month-ahead hourly load forecasting with textual features"};
  app.set_version_flag("--version", std::string(ls::kVersion));
  app.require_subcommand(1);

  CommonFlags run_flags, cluster_flags, causality_flags;
  auto* run = app.add_subcommand("run", "full experiment: tune, train, evaluate, diagnose, attribute");
  run_flags.attach(run, true);

  auto* cluster = app.add_subcommand("cluster", "cluster textual features on the training range");
  cluster_flags.attach(cluster, true);

  auto* causality = app.add_subcommand("causality", "Granger and double machine learning tables");
  causality_flags.attach(causality, true);

  std::string run_dir, region, date, variant = "GBM", out_file;
  int horizon = 1;
  auto* forecast = app.add_subcommand("forecast", "24-hour forecast with 90% intervals from a finished run");
  forecast->add_option("--run", run_dir, "output directory of a finished run")->required();
  forecast->add_option("--region", region)->required();
  forecast->add_option("--date", date, "issue day YYYY-MM-DD")->required();
  forecast->add_option("--horizon", horizon)->required();
  forecast->add_option("--variant", variant);
  forecast->add_option("--out", out_file, "CSV file (default: stdout)");

  std::string attr_run, attr_region, attr_variant = "GBM-S", attr_out = "attribution";
  int attr_horizon = 1, attr_hour = 20;
  auto* attribute = app.add_subcommand("attribute", "TreeSHAP values on the test range of a finished run");
  attribute->add_option("--run", attr_run)->required();
  attribute->add_option("--region", attr_region)->required();
  attribute->add_option("--horizon", attr_horizon)->required();
  attribute->add_option("--variant", attr_variant);
  attribute->add_option("--hour", attr_hour);
  attribute->add_option("--out", attr_out, "output directory");

  std::string synth_config, synth_out = "synthetic_data";
  std::optional<std::uint64_t> synth_seed;
  std::optional<int> synth_days;
  auto* synth = app.add_subcommand("synth", "write a synthetic panel with a planted textual driver as CSV inputs");
  synth->add_option("--config", synth_config, "take the synthetic section from this configuration");
  synth->add_option("--seed", synth_seed);
  synth->add_option("--days", synth_days);
  synth->add_option("--out", synth_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      auto config = run_flags.load();
      auto result = ls::run_experiment(config);
      std::cout << "wrote " << result.inventory.size() + 1 << " files to " << result.out_dir.string() << " in "
                << result.seconds << " s\n";
    } else if (*cluster) {
      auto config = cluster_flags.load();
      config.validate();
      auto panel = ls::load_config_panel(config);
      auto split = ls::resolve_split(config, panel);
      auto clusters = ls::cluster_panel(panel, split.train, config.social_k);
      ls::write_cluster_outputs(clusters, config.out_dir);
      std::cout << "k = " << clusters.k << (clusters.elbow ? " (elbow)" : "") << "\n";
      for (const auto& c : clusters.centroids) {
        std::cout << "cluster " << c.cluster << ": medoid " << c.medoid_name << ", " << c.members.size() << " members\n";
      }
    } else if (*causality) {
      auto config = causality_flags.load();
      config.validate();
      ls::run_causality(config, ls::load_config_panel(config));
      std::cout << "wrote causality tables to " << config.out_dir.string() << "\n";
    } else if (*forecast) {
      auto rows = ls::forecast_from_run(run_dir, region, ls::Date::parse(date), horizon, variant);
      if (out_file.empty()) {
        ls::write_forecast_csv(rows, std::cout);
      } else {
        std::ofstream f(out_file);
        if (!f) throw ls::Error(ls::Errc::Internal, "cannot write " + out_file);
        ls::write_forecast_csv(rows, f);
      }
    } else if (*attribute) {
      ls::attribute_from_run(attr_run, attr_region, attr_horizon, attr_variant, attr_hour, attr_out);
      std::cout << "wrote attribution tables to " << attr_out << "\n";
    } else if (*synth) {
      ls::SyntheticSpec spec;
      if (!synth_config.empty()) {
        auto config = ls::load_config(synth_config);
        if (config.synthetic) spec = *config.synthetic;
      }
      if (synth_seed) spec.seed = *synth_seed;
      if (synth_days) spec.days = *synth_days;
      auto generated = ls::generate_synthetic_panel(spec);
      ls::write_panel(generated.panel, synth_out);
      std::cout << "wrote synthetic panel (" << spec.days << " days, " << spec.regions.size() << " regions) to "
                << synth_out << "\n";
    }
  } catch (const ls::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
