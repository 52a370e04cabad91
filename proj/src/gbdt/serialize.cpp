#include "loadscope/errors.hpp"
#include "loadscope/gbdt.hpp"

namespace loadscope::gbdt {

using nlohmann::json;

json to_json(const HyperParams& p) {
  return {{"n_trees", p.n_trees},
          {"learning_rate", p.learning_rate},
          {"max_depth", p.max_depth},
          {"min_samples_leaf", p.min_samples_leaf},
          {"l2_leaf_reg", p.l2_leaf_reg},
          {"feature_fraction", p.feature_fraction},
          {"row_subsample", p.row_subsample},
          {"early_stopping_rounds", p.early_stopping_rounds}};
}

HyperParams params_from_json(const json& j) {
  HyperParams p;
  p.n_trees = j.at("n_trees").get<int>();
  p.learning_rate = j.at("learning_rate").get<double>();
  p.max_depth = j.at("max_depth").get<int>();
  p.min_samples_leaf = j.at("min_samples_leaf").get<int>();
  p.l2_leaf_reg = j.at("l2_leaf_reg").get<double>();
  p.feature_fraction = j.at("feature_fraction").get<double>();
  p.row_subsample = j.at("row_subsample").get<double>();
  p.early_stopping_rounds = j.at("early_stopping_rounds").get<int>();
  return p;
}

namespace {

json body(const Ensemble& e) {
  json trees = json::array();
  for (const auto& t : e.trees) {
    json nodes = json::array();
    for (const auto& n : t.nodes) nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value, n.cover});
    trees.push_back(std::move(nodes));
  }
  return {{"params", to_json(e.params)},
          {"base_score", e.base_score},
          {"learning_rate", e.learning_rate},
          {"feature_names", e.feature_names},
          {"standardizer", {{"target_mean", e.target_mean}, {"target_std", e.target_std}}},
          {"train_mse", e.train_mse},
          {"val_mse", e.val_mse},
          {"trees", std::move(trees)}};
}

Ensemble from_body(const json& j) {
  Ensemble e;
  e.params = params_from_json(j.at("params"));
  e.base_score = j.at("base_score").get<double>();
  e.learning_rate = j.at("learning_rate").get<double>();
  e.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  e.target_mean = j.at("standardizer").at("target_mean").get<double>();
  e.target_std = j.at("standardizer").at("target_std").get<double>();
  e.train_mse = j.at("train_mse").get<std::vector<double>>();
  e.val_mse = j.at("val_mse").get<std::vector<double>>();
  for (const auto& jt : j.at("trees")) {
    Tree t;
    for (const auto& jn : jt) {
      TreeNode n;
      n.feature = jn.at(0).get<int>();
      n.threshold = jn.at(1).get<double>();
      n.left = jn.at(2).get<int>();
      n.right = jn.at(3).get<int>();
      n.value = jn.at(4).get<double>();
      n.cover = jn.at(5).get<double>();
      t.nodes.push_back(n);
    }
    const auto count = static_cast<int>(t.nodes.size());
    for (const auto& n : t.nodes) {
      bool bad_child = !n.is_leaf() && (n.left <= 0 || n.right <= 0 || n.left >= count || n.right >= count);
      bool bad_feature = n.feature >= static_cast<int>(e.feature_names.size());
      if (bad_child || bad_feature) throw Error(Errc::ModelFormat, "tree node references out of range");
    }
    if (t.nodes.empty()) throw Error(Errc::ModelFormat, "empty tree");
    e.trees.push_back(std::move(t));
  }
  return e;
}

void check_envelope(const json& j, const char* kind) {
  if (!j.is_object() || !j.contains("format_version")) throw Error(Errc::ModelFormat, "missing format_version");
  int version = j.at("format_version").get<int>();
  if (version != kModelFormatVersion) {
    throw Error(Errc::ModelFormat, "unsupported model format_version " + std::to_string(version));
  }
  if (j.value("kind", std::string{}) != kind) throw Error(Errc::ModelFormat, std::string("expected a ") + kind + " model");
}

template <typename F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(Errc::ModelFormat, e.what());
  }
}

}  // namespace

json to_json(const Ensemble& e) {
  json j = body(e);
  j["format_version"] = kModelFormatVersion;
  j["kind"] = "ensemble";
  return j;
}

Ensemble ensemble_from_json(const json& j) {
  return guarded([&] {
    check_envelope(j, "ensemble");
    return from_body(j);
  });
}

json to_json(const GaussianEnsemble& g) {
  return {{"format_version", kModelFormatVersion},
          {"kind", "gaussian"},
          {"mu", body(g.mu)},
          {"logvar", body(g.logvar)},
          {"variance_floor", g.variance_floor},
          {"logvar_offset", g.logvar_offset}};
}

GaussianEnsemble gaussian_from_json(const json& j) {
  return guarded([&] {
    check_envelope(j, "gaussian");
    GaussianEnsemble g;
    g.mu = from_body(j.at("mu"));
    g.logvar = from_body(j.at("logvar"));
    g.variance_floor = j.at("variance_floor").get<double>();
    g.logvar_offset = j.at("logvar_offset").get<double>();
    if (!(g.variance_floor > 0.0)) throw Error(Errc::ModelFormat, "variance_floor must be > 0");
    return g;
  });
}

}  // namespace loadscope::gbdt
