#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <tuple>

#include "loadscope/csv.hpp"
#include "loadscope/evaluation.hpp"
#include "loadscope/stats.hpp"

namespace loadscope {

PointScores evaluate_point(const Matrix& truth, const Matrix& forecast) {
  if (truth.rows() != forecast.rows() || truth.cols() != forecast.cols()) {
    throw Error(Errc::Misaligned, "truth and forecast shapes differ");
  }
  if (truth.rows() == 0 || truth.cols() == 0) throw Error(Errc::Misaligned, "no days to score");
  PointScores s;
  double ape = 0.0;
  for (std::size_t d = 0; d < truth.rows(); ++d) {
    double sq = 0.0;
    for (std::size_t h = 0; h < truth.cols(); ++h) {
      const double y = truth(d, h), e = forecast(d, h) - y;
      if (y == 0.0) {
        throw Error(Errc::ZeroTruth, "day " + std::to_string(d) + " hour " + std::to_string(h));
      }
      sq += e * e;
      ape += std::abs(e / y);
    }
    s.rmse += std::sqrt(sq / static_cast<double>(truth.cols()));
  }
  s.rmse /= static_cast<double>(truth.rows());
  s.mape = 100.0 * ape / static_cast<double>(truth.rows() * truth.cols());
  return s;
}

double crps_gaussian(double mu, double sigma, double y) {
  if (!(sigma > 0.0)) throw Error(Errc::NonPositiveSigma, "sigma = " + std::to_string(sigma));
  const double z = (y - mu) / sigma;
  return sigma * (z * (2.0 * stats::normal_cdf(z) - 1.0) + 2.0 * stats::normal_pdf(z) - 1.0 / std::sqrt(std::numbers::pi));
}

double crps_gaussian(const ProbForecastSet& forecast, const Matrix& truth) {
  if (forecast.mu.rows() != truth.rows() || forecast.mu.cols() != truth.cols() ||
      forecast.sigma.rows() != truth.rows() || forecast.sigma.cols() != truth.cols()) {
    throw Error(Errc::Misaligned, "forecast and truth shapes differ");
  }
  const auto n = truth.data().size();
  if (n == 0) throw Error(Errc::Misaligned, "no day-hours to score");
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += crps_gaussian(forecast.mu.data()[i], forecast.sigma.data()[i], truth.data()[i]);
  return acc / static_cast<double>(n);
}

ScoreTable ScoreTable::for_model(const std::string& model) const {
  ScoreTable out;
  for (const auto& r : rows) {
    if (r.model == model) out.rows.push_back(r);
  }
  return out;
}

const ScoreRow* ScoreTable::find(const std::string& region, int horizon, const std::string& model) const {
  for (const auto& r : rows) {
    if (r.region == region && r.horizon == horizon && r.model == model) return &r;
  }
  return nullptr;
}

void ScoreTable::sort() {
  std::stable_sort(rows.begin(), rows.end(), [](const ScoreRow& a, const ScoreRow& b) {
    return std::tie(a.region, a.horizon, a.model) < std::tie(b.region, b.horizon, b.model);
  });
}

void ScoreTable::write_csv(const std::filesystem::path& path) const {
  csv::FileWriter w(path);
  w.row({"region", "horizon", "model", "rmse_mw", "mape_pct", "crps_mw"});
  for (const auto& r : rows) {
    w.row({r.region, std::to_string(r.horizon), r.model, csv::format_double(r.rmse_mw), csv::format_double(r.mape_pct),
           r.crps_mw ? csv::format_double(*r.crps_mw) : std::string{}});
  }
}

ScoreTable ScoreTable::read_csv(const std::filesystem::path& path) {
  auto doc = csv::read_file(path);
  doc.require_header({"region", "horizon", "model", "rmse_mw", "mape_pct", "crps_mw"});
  ScoreTable t;
  for (std::size_t i = 0; i < doc.records.size(); ++i) {
    const auto& r = doc.records[i];
    ScoreRow row;
    row.region = r[0];
    row.horizon = static_cast<int>(csv::parse_double(r[1], doc, i));
    row.model = r[2];
    row.rmse_mw = csv::parse_double(r[3], doc, i);
    row.mape_pct = csv::parse_double(r[4], doc, i);
    if (!r[5].empty()) row.crps_mw = csv::parse_double(r[5], doc, i);
    t.rows.push_back(row);
  }
  return t;
}

std::string metric_name(Metric metric) {
  switch (metric) {
    case Metric::Rmse: return "rmse";
    case Metric::Mape: return "mape";
    case Metric::Crps: return "crps";
  }
  return "unknown";
}

int week_of_horizon(int horizon) {
  if (horizon < 1 || horizon > 30) throw Error(Errc::InvalidArgument, "horizon outside 1..30");
  return horizon <= 21 ? (horizon - 1) / 7 + 1 : 4;
}

namespace {

double metric_of(const ScoreRow& r, Metric m) {
  switch (m) {
    case Metric::Rmse: return r.rmse_mw;
    case Metric::Mape: return r.mape_pct;
    case Metric::Crps:
      if (!r.crps_mw) throw Error(Errc::KeyMismatch, "no CRPS for " + r.region + " h" + std::to_string(r.horizon));
      return *r.crps_mw;
  }
  return 0.0;
}

std::string single_model(const ScoreTable& t) {
  if (t.rows.empty()) throw Error(Errc::KeyMismatch, "empty score table");
  for (const auto& r : t.rows) {
    if (r.model != t.rows.front().model) throw Error(Errc::KeyMismatch, "table mixes models");
  }
  return t.rows.front().model;
}

}  // namespace

ImprovementTable improvement_table(const ScoreTable& base, const ScoreTable& variant, Metric metric) {
  ImprovementTable out;
  out.base_model = single_model(base);
  out.variant_model = single_model(variant);
  out.metric = metric;
  std::map<std::pair<std::string, int>, double> b, v;
  for (const auto& r : base.rows) b[{r.region, r.horizon}] = metric_of(r, metric);
  for (const auto& r : variant.rows) v[{r.region, r.horizon}] = metric_of(r, metric);
  if (b.size() != base.rows.size() || v.size() != variant.rows.size()) {
    throw Error(Errc::KeyMismatch, "duplicate (region, horizon) keys");
  }
  for (const auto& [key, value] : b) {
    if (!v.contains(key)) throw Error(Errc::KeyMismatch, key.first + " h" + std::to_string(key.second) + " missing");
  }
  if (b.size() != v.size()) throw Error(Errc::KeyMismatch, "variant has keys absent from base");

  std::map<std::pair<std::string, int>, std::pair<double, int>> weeks;
  for (const auto& [key, base_value] : b) {
    if (base_value == 0.0) throw Error(Errc::KeyMismatch, "zero base score for " + key.first);
    double pct = 100.0 * (base_value - v.at(key)) / base_value;
    out.cells.push_back({key.first, key.second, pct});
    auto& w = weeks[{key.first, week_of_horizon(key.second)}];
    w.first += pct;
    w.second += 1;
  }
  for (const auto& [key, acc] : weeks) out.weekly.push_back({key.first, key.second, acc.second, acc.first / acc.second});
  return out;
}

void write_improvements_csv(const std::vector<ImprovementTable>& tables, const std::filesystem::path& path) {
  csv::FileWriter w(path);
  w.row({"region", "metric", "base_model", "variant_model", "scope", "key", "improvement_pct"});
  for (const auto& t : tables) {
    for (const auto& c : t.cells) {
      w.row({c.region, metric_name(t.metric), t.base_model, t.variant_model, "horizon", std::to_string(c.horizon),
             csv::format_double(c.pct)});
    }
    for (const auto& c : t.weekly) {
      w.row({c.region, metric_name(t.metric), t.base_model, t.variant_model, "week", std::to_string(c.week),
             csv::format_double(c.pct)});
    }
  }
}

}  // namespace loadscope
