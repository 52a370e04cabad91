#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "loadscope/errors.hpp"
#include "loadscope/pipeline.hpp"

namespace loadscope {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(Errc::ConfigError, what); }

json yaml_scalar(const YAML::Node& node) {
  const std::string& s = node.Scalar();
  if (node.Tag() == "!") return s;  // quoted
  if (s.empty() || s == "~" || s == "null" || s == "Null" || s == "NULL") return nullptr;
  if (s == "true" || s == "True" || s == "TRUE") return true;
  if (s == "false" || s == "False" || s == "FALSE") return false;
  std::int64_t i = 0;
  auto [pi, ei] = std::from_chars(s.data(), s.data() + s.size(), i);
  if (ei == std::errc{} && pi == s.data() + s.size()) return i;
  double d = 0.0;
  auto [pd, ed] = std::from_chars(s.data(), s.data() + s.size(), d);
  if (ed == std::errc{} && pd == s.data() + s.size()) return d;
  return s;
}

json yaml_to_json(const YAML::Node& node) {
  switch (node.Type()) {
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined: return nullptr;
    case YAML::NodeType::Scalar: return yaml_scalar(node);
    case YAML::NodeType::Sequence: {
      json arr = json::array();
      for (const auto& item : node) arr.push_back(yaml_to_json(item));
      return arr;
    }
    case YAML::NodeType::Map: {
      json obj = json::object();
      for (const auto& kv : node) obj[kv.first.as<std::string>()] = yaml_to_json(kv.second);
      return obj;
    }
  }
  return nullptr;
}

/// Strict object reader: every key must be consumed.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) config_error(where() + " must be a mapping");
  }
  ~Section() = default;

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }
  const json& at(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }
  template <typename T>
  T get(const std::string& key) {
    try {
      return at(key).get<T>();
    } catch (const json::exception&) {
      config_error(where(key) + " has the wrong type");
    }
  }
  template <typename T>
  void read(const std::string& key, T& target) {
    if (has(key)) target = get<T>(key);
  }
  std::string where(const std::string& key = {}) const {
    return path_.empty() ? key : key.empty() ? path_ : path_ + "." + key;
  }
  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.contains(key)) config_error("unknown config key '" + where(key) + "'");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

Date parse_date_field(const json& j, const std::string& where) {
  try {
    return Date::parse(j.get<std::string>());
  } catch (const std::exception&) {
    config_error(where + " must be a YYYY-MM-DD date");
  }
}

DateRange parse_range(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) config_error(where + " must be [first, last]");
  return {parse_date_field(j[0], where), parse_date_field(j[1], where)};
}

template <typename T>
void read_range(Section& s, const std::string& key, gbdt::Range<T>& r) {
  if (!s.has(key)) return;
  const json& j = s.at(key);
  if (!j.is_array() || j.size() != 2) config_error(s.where(key) + " must be [lo, hi]");
  try {
    r = {j[0].get<T>(), j[1].get<T>()};
  } catch (const json::exception&) {
    config_error(s.where(key) + " has the wrong type");
  }
}

gbdt::HyperParams parse_params(const json& j, const std::string& where) {
  Section s(j, where);
  gbdt::HyperParams p;
  s.read("n_trees", p.n_trees);
  s.read("learning_rate", p.learning_rate);
  s.read("max_depth", p.max_depth);
  s.read("min_samples_leaf", p.min_samples_leaf);
  s.read("l2_leaf_reg", p.l2_leaf_reg);
  s.read("feature_fraction", p.feature_fraction);
  s.read("row_subsample", p.row_subsample);
  s.read("early_stopping_rounds", p.early_stopping_rounds);
  s.finish();
  try {
    p.validate();
  } catch (const Error& e) {
    config_error(where + ": " + e.what());
  }
  return p;
}

SyntheticSpec parse_synthetic(const json& j) {
  Section s(j, "data.synthetic");
  SyntheticSpec spec;
  s.read("seed", spec.seed);
  s.read("days", spec.days);
  if (s.has("start")) spec.start = parse_date_field(s.at("start"), "data.synthetic.start");
  s.read("beta_mw", spec.beta_mw);
  s.read("driver_lag_days", spec.driver_lag_days);
  s.read("regime_days", spec.regime_days);
  s.read("driver_ar_weight", spec.driver_ar_weight);
  s.read("driver_ar_phi", spec.driver_ar_phi);
  s.read("driver_copies", spec.driver_copies);
  s.read("copy_noise", spec.copy_noise);
  s.read("decoy_groups", spec.decoy_groups);
  s.read("decoy_copies", spec.decoy_copies);
  s.read("noise_features", spec.noise_features);
  s.read("daily_noise_phi", spec.daily_noise_phi);
  s.read("econ_effect_mw", spec.econ_effect_mw);
  if (s.has("regions")) {
    const json& regions = s.at("regions");
    if (!regions.is_array()) config_error("data.synthetic.regions must be a list");
    spec.regions.clear();
    for (std::size_t i = 0; i < regions.size(); ++i) {
      Section r(regions[i], "data.synthetic.regions[" + std::to_string(i) + "]");
      SyntheticRegion region;
      if (r.has("like")) {
        auto like = r.get<std::string>("like");
        bool found = false;
        for (const auto& d : SyntheticSpec::default_regions()) {
          if (d.name == like) region = d, found = true;
        }
        if (!found) config_error("data.synthetic.regions: no default region '" + like + "'");
      }
      r.read("name", region.name);
      r.read("city", region.city);
      r.read("base_mw", region.base_mw);
      r.read("daily_amp_mw", region.daily_amp_mw);
      r.read("weekend_drop_mw", region.weekend_drop_mw);
      r.read("heating_mw_per_c", region.heating_mw_per_c);
      r.read("holiday_dip_mw", region.holiday_dip_mw);
      r.read("hourly_noise_mw", region.hourly_noise_mw);
      r.read("daily_noise_mw", region.daily_noise_mw);
      r.read("climate_offset_c", region.climate_offset_c);
      r.finish();
      spec.regions.push_back(region);
    }
  }
  s.finish();
  try {
    spec.validate();
  } catch (const Error& e) {
    config_error(std::string("data.synthetic: ") + e.what());
  }
  return spec;
}

json params_json(const gbdt::HyperParams& p) { return gbdt::to_json(p); }

}  // namespace

void RunConfig::validate() const {
  if (!synthetic && data_dir.empty()) config_error("data.dir or data.synthetic is required");
  if (!synthetic && region_city.empty()) config_error("regions (region -> city map) is required for file data");
  if (variants.empty()) config_error("features.variants is empty");
  for (const auto& v : variants) FeatureSpec::from_variant(v);
  if (horizons.empty()) config_error("horizons is empty");
  for (int h : horizons) {
    if (h < 1 || h > kMaxHorizon) config_error("horizons must lie in [1, 30]");
  }
  if (tuning_budget < 1) config_error("tuning.budget must be >= 1");
  if (tuning_hours.empty()) config_error("tuning.hours is empty");
  for (int h : tuning_hours) {
    if (h < 0 || h >= kHoursPerDay) config_error("tuning.hours must lie in [0, 23]");
  }
  for (int h : calibration.hours) {
    if (h < 0 || h >= kHoursPerDay) config_error("calibration.hours must lie in [0, 23]");
  }
  if (jobs < 1) config_error("jobs must be >= 1");
  if (social_k && *social_k < 2) config_error("features.social_k must be >= 2");
  if (text_smoothing_window < 1) config_error("features.text_smoothing_window must be >= 1");
  if (!(fractions.train > 0 && fractions.val > 0 && fractions.train + fractions.val < 1.0)) {
    config_error("split fractions must be positive and leave room for a test range");
  }
  if (split) {
    try {
      split->validate();
    } catch (const Error& e) {
      config_error(std::string("split: ") + e.what());
    }
  }
  if (causality.max_lag < 1 || causality.folds < 2) config_error("causality.max_lag >= 1 and folds >= 2 required");
  if (attribution.max_samples < 1) config_error("attribution.max_samples must be >= 1");
  if (!attribution.variant.empty() &&
      std::find(variants.begin(), variants.end(), attribution.variant) == variants.end()) {
    config_error("attribution.variant must be one of features.variants");
  }
  try {
    search.validate();
  } catch (const Error& e) {
    config_error(std::string("tuning.search: ") + e.what());
  }
}

RunConfig RunConfig::from_json(const json& j, const std::filesystem::path& base_dir) {
  RunConfig c;
  Section root(j, "");
  root.read("seed", c.seed);
  root.read("jobs", c.jobs);
  if (root.has("out")) c.out_dir = root.get<std::string>("out");
  if (root.has("data")) {
    Section data(root.at("data"), "data");
    if (data.has("dir")) {
      c.data_dir = data.get<std::string>("dir");
      if (c.data_dir.is_relative() && !base_dir.empty()) c.data_dir = base_dir / c.data_dir;
    }
    if (data.has("synthetic")) c.synthetic = parse_synthetic(data.at("synthetic"));
    data.read("max_gap_hours", c.max_gap_hours);
    data.finish();
  }
  if (root.has("regions")) {
    const json& r = root.at("regions");
    if (!r.is_object()) config_error("regions must map region names to city names");
    for (const auto& [region, city] : r.items()) {
      if (!city.is_string()) config_error("regions." + region + " must be a city name");
      c.region_city[region] = city.get<std::string>();
    }
  }
  root.read("include_regions", c.regions);
  if (root.has("split")) {
    Section s(root.at("split"), "split");
    if (s.has("train") || s.has("val") || s.has("test")) {
      if (!(s.has("train") && s.has("val") && s.has("test"))) config_error("split needs train, val and test ranges");
      c.split = SplitSpec{parse_range(s.at("train"), "split.train"), parse_range(s.at("val"), "split.val"),
                          parse_range(s.at("test"), "split.test")};
    }
    if (s.has("fractions")) {
      Section f(s.at("fractions"), "split.fractions");
      f.read("train", c.fractions.train);
      f.read("val", c.fractions.val);
      f.finish();
    }
    s.finish();
  }
  if (root.has("features")) {
    Section f(root.at("features"), "features");
    f.read("variants", c.variants);
    if (f.has("social_k")) c.social_k = f.get<int>("social_k");
    f.read("text_smoothing_window", c.text_smoothing_window);
    f.finish();
  }
  root.read("horizons", c.horizons);
  if (root.has("tuning")) {
    Section t(root.at("tuning"), "tuning");
    t.read("budget", c.tuning_budget);
    t.read("hours", c.tuning_hours);
    if (t.has("search")) {
      Section s(t.at("search"), "tuning.search");
      read_range(s, "n_trees", c.search.n_trees);
      read_range(s, "learning_rate", c.search.learning_rate);
      read_range(s, "max_depth", c.search.max_depth);
      read_range(s, "min_samples_leaf", c.search.min_samples_leaf);
      read_range(s, "l2_leaf_reg", c.search.l2_leaf_reg);
      read_range(s, "feature_fraction", c.search.feature_fraction);
      read_range(s, "row_subsample", c.search.row_subsample);
      s.read("early_stopping_rounds", c.search.early_stopping_rounds);
      if (s.has("grid")) {
        const json& g = s.at("grid");
        if (!g.is_array()) config_error("tuning.search.grid must be a list");
        for (std::size_t i = 0; i < g.size(); ++i) {
          c.search.grid.push_back(parse_params(g[i], "tuning.search.grid[" + std::to_string(i) + "]"));
        }
      }
      s.finish();
    }
    t.finish();
  }
  if (root.has("gaussian")) {
    Section g(root.at("gaussian"), "gaussian");
    g.read("folds", c.gaussian.folds);
    g.read("floor_fraction", c.gaussian.floor_fraction);
    if (g.has("logvar_params")) c.gaussian.logvar_params = parse_params(g.at("logvar_params"), "gaussian.logvar_params");
    g.finish();
    if (c.gaussian.folds < 2 || !(c.gaussian.floor_fraction > 0.0)) {
      config_error("gaussian.folds >= 2 and floor_fraction > 0 required");
    }
  }
  if (root.has("baselines")) {
    Section b(root.at("baselines"), "baselines");
    b.read("enabled", c.baselines);
    b.read("lambdas", c.pfscf_lambdas);
    b.finish();
  }
  if (root.has("calibration")) {
    Section s(root.at("calibration"), "calibration");
    s.read("hours", c.calibration.hours);
    s.read("variants", c.calibration.variants);
    s.finish();
  }
  if (root.has("causality")) {
    Section s(root.at("causality"), "causality");
    s.read("enabled", c.causality.enabled);
    s.read("max_lag", c.causality.max_lag);
    s.read("alpha", c.causality.alpha);
    s.read("features", c.causality.features);
    s.read("dml_horizons", c.causality.dml_horizons);
    s.read("folds", c.causality.folds);
    s.finish();
  }
  if (root.has("attribution")) {
    Section s(root.at("attribution"), "attribution");
    s.read("enabled", c.attribution.enabled);
    s.read("variant", c.attribution.variant);
    s.read("max_samples", c.attribution.max_samples);
    if (s.has("values_hour")) c.attribution.values_hour = s.get<int>("values_hour");
    s.finish();
  }
  root.finish();
  if (c.synthetic && c.region_city.empty()) {
    for (const auto& r : c.synthetic->regions) c.region_city[r.name] = r.city;
  }
  return c;
}

json RunConfig::to_json() const {
  json j;
  j["seed"] = seed;
  j["jobs"] = jobs;
  j["out"] = out_dir.generic_string();
  json data = json::object();
  if (!data_dir.empty()) data["dir"] = data_dir.generic_string();
  if (synthetic) {
    const auto& s = *synthetic;
    json regions = json::array();
    for (const auto& r : s.regions) {
      regions.push_back({{"name", r.name},
                         {"city", r.city},
                         {"base_mw", r.base_mw},
                         {"daily_amp_mw", r.daily_amp_mw},
                         {"weekend_drop_mw", r.weekend_drop_mw},
                         {"heating_mw_per_c", r.heating_mw_per_c},
                         {"holiday_dip_mw", r.holiday_dip_mw},
                         {"hourly_noise_mw", r.hourly_noise_mw},
                         {"daily_noise_mw", r.daily_noise_mw},
                         {"climate_offset_c", r.climate_offset_c}});
    }
    data["synthetic"] = {{"seed", s.seed},
                         {"days", s.days},
                         {"start", s.start.to_string()},
                         {"beta_mw", s.beta_mw},
                         {"driver_lag_days", s.driver_lag_days},
                         {"regime_days", s.regime_days},
                         {"driver_ar_weight", s.driver_ar_weight},
                         {"driver_ar_phi", s.driver_ar_phi},
                         {"driver_copies", s.driver_copies},
                         {"copy_noise", s.copy_noise},
                         {"decoy_groups", s.decoy_groups},
                         {"decoy_copies", s.decoy_copies},
                         {"noise_features", s.noise_features},
                         {"daily_noise_phi", s.daily_noise_phi},
                         {"econ_effect_mw", s.econ_effect_mw},
                         {"regions", regions}};
  }
  data["max_gap_hours"] = max_gap_hours;
  j["data"] = data;
  j["regions"] = region_city;
  j["include_regions"] = regions;
  json split_json = {{"fractions", {{"train", fractions.train}, {"val", fractions.val}}}};
  if (split) {
    split_json["train"] = {split->train.first.to_string(), split->train.last.to_string()};
    split_json["val"] = {split->val.first.to_string(), split->val.last.to_string()};
    split_json["test"] = {split->test.first.to_string(), split->test.last.to_string()};
  }
  j["split"] = split_json;
  j["features"] = {{"variants", variants}, {"text_smoothing_window", text_smoothing_window}};
  j["features"]["social_k"] = social_k ? json(*social_k) : json(nullptr);
  j["horizons"] = horizons;
  json grid = json::array();
  for (const auto& g : search.grid) grid.push_back(params_json(g));
  j["tuning"] = {{"budget", tuning_budget},
                 {"hours", tuning_hours},
                 {"search",
                  {{"n_trees", {search.n_trees.lo, search.n_trees.hi}},
                   {"learning_rate", {search.learning_rate.lo, search.learning_rate.hi}},
                   {"max_depth", {search.max_depth.lo, search.max_depth.hi}},
                   {"min_samples_leaf", {search.min_samples_leaf.lo, search.min_samples_leaf.hi}},
                   {"l2_leaf_reg", {search.l2_leaf_reg.lo, search.l2_leaf_reg.hi}},
                   {"feature_fraction", {search.feature_fraction.lo, search.feature_fraction.hi}},
                   {"row_subsample", {search.row_subsample.lo, search.row_subsample.hi}},
                   {"early_stopping_rounds", search.early_stopping_rounds},
                   {"grid", grid}}}};
  j["gaussian"] = {{"folds", gaussian.folds}, {"floor_fraction", gaussian.floor_fraction}};
  if (gaussian.logvar_params) j["gaussian"]["logvar_params"] = params_json(*gaussian.logvar_params);
  j["baselines"] = {{"enabled", baselines}, {"lambdas", pfscf_lambdas}};
  j["calibration"] = {{"hours", calibration.hours}, {"variants", calibration.variants}};
  j["causality"] = {{"enabled", causality.enabled}, {"max_lag", causality.max_lag},
                    {"alpha", causality.alpha},     {"features", causality.features},
                    {"dml_horizons", causality.dml_horizons}, {"folds", causality.folds}};
  j["attribution"] = {{"enabled", attribution.enabled},
                      {"variant", attribution.variant},
                      {"max_samples", attribution.max_samples}};
  j["attribution"]["values_hour"] = attribution.values_hour ? json(*attribution.values_hour) : json(nullptr);
  return j;
}

json read_structured_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::FileNotFound, "config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  if (path.extension() == ".json") {
    try {
      return json::parse(text);
    } catch (const json::exception& e) {
      config_error(path.string() + ": " + e.what());
    }
  }
  try {
    return yaml_to_json(YAML::Load(text));
  } catch (const YAML::Exception& e) {
    config_error(path.string() + ": " + e.what());
  }
}

namespace {

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (!v || !*v) return std::nullopt;
  return std::string(v);
}

template <typename T>
T env_number(const char* name, const std::string& text) {
  T value{};
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || p != text.data() + text.size()) config_error(std::string(name) + " is not a valid number");
  return value;
}

}  // namespace

void apply_environment(RunConfig& c) {
  if (auto v = env("LOADSCOPE_SEED")) c.seed = env_number<std::uint64_t>("LOADSCOPE_SEED", *v);
  if (auto v = env("LOADSCOPE_JOBS")) c.jobs = env_number<int>("LOADSCOPE_JOBS", *v);
  if (auto v = env("LOADSCOPE_OUT")) c.out_dir = *v;
  if (auto v = env("LOADSCOPE_DATA_DIR")) c.data_dir = *v;
  if (auto v = env("LOADSCOPE_BUDGET")) c.tuning_budget = env_number<int>("LOADSCOPE_BUDGET", *v);
}

void apply_overrides(RunConfig& c, const ConfigOverrides& o) {
  if (o.seed) c.seed = *o.seed;
  if (o.jobs) c.jobs = *o.jobs;
  if (o.out_dir) c.out_dir = *o.out_dir;
}

RunConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides) {
  RunConfig c = RunConfig::from_json(read_structured_file(path), path.parent_path());
  apply_environment(c);
  apply_overrides(c, overrides);
  c.validate();
  return c;
}

AlignedPanel load_config_panel(const RunConfig& c) {
  if (c.synthetic) return generate_synthetic_panel(*c.synthetic).panel;
  LoadOptions options;
  options.max_gap_hours = c.max_gap_hours;
  return load_panel(PanelPaths::in_directory(c.data_dir), c.region_city, options);
}

SplitSpec resolve_split(const RunConfig& c, const AlignedPanel& panel) {
  if (c.split) return *c.split;
  const std::int64_t days = panel.span.last - panel.span.first + 1;
  const auto train_days = static_cast<std::int64_t>(static_cast<double>(days) * c.fractions.train);
  const auto val_days = static_cast<std::int64_t>(static_cast<double>(days) * c.fractions.val);
  if (train_days < 1 || val_days < 1 || train_days + val_days >= days) {
    throw Error(Errc::ConfigError, "panel too short for the configured split fractions");
  }
  const Date first = panel.span.first;
  SplitSpec s{{first, first + (train_days - 1)},
              {first + train_days, first + (train_days + val_days - 1)},
              {first + (train_days + val_days), panel.span.last}};
  s.validate();
  return s;
}

}  // namespace loadscope
