#include <cmath>

#include "loadscope/baselines.hpp"
#include "loadscope/gbdt.hpp"

namespace loadscope {

DayProfile persistence_forecast(const AlignedPanel& panel, const std::string& region, Date issue_day, int horizon) {
  if (horizon < 1) throw Error(Errc::InvalidArgument, "horizon must be >= 1");
  const auto& demand = panel.demand_of(region);
  if (!demand.covers_day(issue_day)) throw Error(Errc::MissingDay, region + " " + issue_day.to_string());
  auto profile = demand.day_profile(issue_day);
  DayProfile out{};
  std::copy(profile.begin(), profile.end(), out.begin());
  return out;
}

DayProfile climatology_forecast(const AlignedPanel& panel, const std::string& region, Date target_day,
                                DateRange train) {
  const auto& demand = panel.demand_of(region);
  const unsigned month = target_day.month();
  DayProfile sum{};
  int days = 0;
  for (Date d = train.first; d <= train.last; ++d) {
    if (d.month() != month || !demand.covers_day(d)) continue;
    auto profile = demand.day_profile(d);
    for (int h = 0; h < kHoursPerDay; ++h) sum[static_cast<std::size_t>(h)] += profile[static_cast<std::size_t>(h)];
    ++days;
  }
  if (days == 0) throw Error(Errc::NoHistory, "no training days in month " + std::to_string(month) + " for " + region);
  for (double& v : sum) v /= days;
  return sum;
}

Matrix PfScfModel::predict(const Matrix& pf, const Matrix& scf) const {
  if (pf.rows() != scf.rows() || pf.cols() != scf.cols()) throw Error(Errc::Misaligned, "PF and SCF shapes differ");
  Matrix out(pf.rows(), pf.cols());
  for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] = predict(pf.data()[i], scf.data()[i]);
  return out;
}

namespace {

struct Pooled {
  Matrix X;  // standardized (pf, scf)
  std::vector<double> y;
  double mean[2]{};
  double sd[2]{};
};

Pooled pool(const Matrix& pf, const Matrix& scf, const Matrix& truth, std::size_t day_lo, std::size_t day_hi) {
  Pooled p;
  const std::size_t cols = pf.cols();
  const std::size_t n = (day_hi - day_lo) * cols;
  p.X = Matrix(n, 2);
  p.y.resize(n);
  std::size_t k = 0;
  for (std::size_t d = day_lo; d < day_hi; ++d) {
    for (std::size_t h = 0; h < cols; ++h, ++k) {
      p.X(k, 0) = pf(d, h);
      p.X(k, 1) = scf(d, h);
      p.y[k] = truth(d, h);
    }
  }
  for (std::size_t c = 0; c < 2; ++c) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m += p.X(i, c);
    m /= static_cast<double>(n);
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) v += (p.X(i, c) - m) * (p.X(i, c) - m);
    double sd = std::sqrt(v / static_cast<double>(n));
    p.mean[c] = m;
    p.sd[c] = sd;
    for (std::size_t i = 0; i < n; ++i) p.X(i, c) = sd > 0.0 ? (p.X(i, c) - m) / sd : 0.0;
  }
  return p;
}

PfScfModel fit_pooled(const Pooled& p, double lambda) {
  LassoModel m = lasso_fit(p.X, p.y, lambda, 1e-10, 200000);
  PfScfModel out;
  out.lambda = lambda;
  out.w_pf = p.sd[0] > 0.0 ? m.coefficients[0] / p.sd[0] : 0.0;
  out.w_scf = p.sd[1] > 0.0 ? m.coefficients[1] / p.sd[1] : 0.0;
  out.intercept = m.intercept - out.w_pf * p.mean[0] - out.w_scf * p.mean[1];
  return out;
}

double pooled_mse(const PfScfModel& m, const Matrix& pf, const Matrix& scf, const Matrix& truth, std::size_t lo,
                  std::size_t hi) {
  double acc = 0.0;
  std::size_t n = 0;
  for (std::size_t d = lo; d < hi; ++d) {
    for (std::size_t h = 0; h < pf.cols(); ++h, ++n) {
      double e = m.predict(pf(d, h), scf(d, h)) - truth(d, h);
      acc += e * e;
    }
  }
  return n ? acc / static_cast<double>(n) : 0.0;
}

}  // namespace

PfScfModel combine_pf_scf(const Matrix& pf, const Matrix& scf, const Matrix& truth, const std::vector<double>& lambdas) {
  if (pf.rows() != scf.rows() || pf.rows() != truth.rows() || pf.cols() != scf.cols() || pf.cols() != truth.cols()) {
    throw Error(Errc::Misaligned, "PF, SCF and truth must share a shape");
  }
  if (pf.rows() == 0 || pf.cols() == 0) throw Error(Errc::Misaligned, "no validation days");
  if (lambdas.empty()) throw Error(Errc::InvalidArgument, "empty lambda grid");
  for (double l : lambdas) {
    if (!(l >= 0.0)) throw Error(Errc::InvalidArgument, "lambda must be >= 0");
  }
  const std::size_t days = pf.rows();
  double lambda = lambdas.front();
  const std::size_t cut = days * 2 / 3;
  if (lambdas.size() > 1 && cut >= 1 && cut < days) {
    Pooled fit = pool(pf, scf, truth, 0, cut);
    double best = 0.0;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
      double score = pooled_mse(fit_pooled(fit, lambdas[i]), pf, scf, truth, cut, days);
      if (i == 0 || score < best) {
        best = score;
        lambda = lambdas[i];
      }
    }
  }
  Pooled all = pool(pf, scf, truth, 0, days);
  PfScfModel model = fit_pooled(all, lambda);
  // A shrunken fit may lose to one of its own inputs in sample; least squares cannot.
  PfScfModel pf_only{1.0, 0.0, 0.0, lambda}, scf_only{0.0, 1.0, 0.0, lambda};
  double own = pooled_mse(model, pf, scf, truth, 0, days);
  if (lambda > 0.0 && own > std::min(pooled_mse(pf_only, pf, scf, truth, 0, days),
                                     pooled_mse(scf_only, pf, scf, truth, 0, days))) {
    model = fit_pooled(all, 0.0);
  }
  return model;
}

nlohmann::json to_json(const PfScfModel& m) {
  return {{"format_version", gbdt::kModelFormatVersion},
          {"kind", "pf_scf"},
          {"w_pf", m.w_pf},
          {"w_scf", m.w_scf},
          {"intercept", m.intercept},
          {"lambda", m.lambda}};
}

PfScfModel pfscf_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format_version").get<int>() != gbdt::kModelFormatVersion || j.at("kind").get<std::string>() != "pf_scf") {
      throw Error(Errc::ModelFormat, "not a PF-SCF model of a supported version");
    }
    return {j.at("w_pf").get<double>(), j.at("w_scf").get<double>(), j.at("intercept").get<double>(),
            j.at("lambda").get<double>()};
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ModelFormat, e.what());
  }
}

}  // namespace loadscope
