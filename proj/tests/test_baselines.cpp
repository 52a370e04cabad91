#include <cmath>
#include <functional>

#include <Eigen/Dense>

#include "support.hpp"

#include "loadscope/baselines.hpp"
#include "loadscope/rng.hpp"

using namespace loadscope;

namespace {

AlignedPanel demand_panel(Date first, int days, const std::function<double(Date, int)>& f) {
  AlignedPanel panel;
  panel.span = {first, first + (days - 1)};
  HourlySeries s;
  s.name = "north";
  s.start = HourStamp::from(first, 0);
  for (int d = 0; d < days; ++d)
    for (int h = 0; h < 24; ++h) s.values.push_back(f(first + d, h));
  panel.demand["north"] = s;
  panel.region_city["north"] = "nowhere";
  return panel;
}

double profile_rmse(const DayProfile& a, std::span<const double> truth) {
  double ss = 0;
  for (std::size_t h = 0; h < 24; ++h) ss += (a[h] - truth[h]) * (a[h] - truth[h]);
  return std::sqrt(ss / 24);
}

Matrix random_standardized(Rng& rng, std::size_t n, std::size_t p) {
  Matrix X(n, p);
  for (std::size_t j = 0; j < p; ++j) {
    double m = 0, v = 0;
    for (std::size_t i = 0; i < n; ++i) m += (X(i, j) = rng.normal());
    m /= n;
    for (std::size_t i = 0; i < n; ++i) v += (X(i, j) - m) * (X(i, j) - m);
    const double sd = std::sqrt(v / n);
    for (std::size_t i = 0; i < n; ++i) X(i, j) = (X(i, j) - m) / sd;
  }
  return X;
}

}  // namespace

TEST_CASE("persistence repeats the issue-day profile") {
  auto panel = demand_panel(Date(2021, 1, 1), 60, [&](Date d, int h) { return 1000 + 10 * h + d.serial() % 13 + 0.01 * h * h; });
  for (int h : {1, 5, 30}) {
    auto f = persistence_forecast(panel, "north", Date(2021, 1, 20), h);
    auto truth = panel.demand_of("north").day_profile(Date(2021, 1, 20));
    for (std::size_t i = 0; i < 24; ++i) CHECK(f[i] == truth[i]);
  }
  CHECK_ERRC(persistence_forecast(panel, "north", Date(2021, 3, 15), 1), Errc::MissingDay);

  auto flat = demand_panel(Date(2021, 1, 1), 40, [](Date, int) { return 750.0; });
  for (int h = 1; h <= 30; ++h) {
    Date issue(2021, 1, 5);
    auto target = flat.demand_of("north").day_profile(issue + std::min(h, 35));
    CHECK(profile_rmse(persistence_forecast(flat, "north", issue, h), target) == 0.0);
  }
}

TEST_CASE("persistence on weekly-periodic demand prefers a one-week horizon") {
  Rng rng(17);
  std::vector<double> weekday{900, 1000, 1010, 1020, 1005, 950, 800};
  std::vector<double> noise(24 * 400);
  for (double& v : noise) v = 5 * rng.normal();
  const Date first(2022, 1, 3);
  auto panel = demand_panel(first, 400, [&](Date d, int h) {
    return weekday[static_cast<std::size_t>((d - first) % 7)] + 50 * std::sin(h / 24.0 * 6.283) +
           noise[static_cast<std::size_t>((d - first) * 24 + h)];
  });
  double e3 = 0, e7 = 0;
  const auto& series = panel.demand_of("north");
  for (Date d = first; d + 7 <= panel.span.last; ++d) {
    e3 += profile_rmse(persistence_forecast(panel, "north", d, 3), series.day_profile(d + 3));
    e7 += profile_rmse(persistence_forecast(panel, "north", d, 7), series.day_profile(d + 7));
  }
  CHECK(e7 < e3);
}

TEST_CASE("smart climatology is the month-hour training mean") {
  auto panel = demand_panel(Date(2020, 1, 1), 800, [](Date d, int h) {
    return 500.0 + d.month() * 10 + h + std::fmod(d.serial() * 0.37, 5.0);
  });
  DateRange train{Date(2020, 1, 1), Date(2021, 6, 30)};
  for (unsigned month = 1; month <= 12; ++month) {
    Date target(2021, month, 15);
    auto f = climatology_forecast(panel, "north", target, train);
    for (int h = 0; h < 24; ++h) {
      double sum = 0;
      int n = 0;
      for (Date d = train.first; d <= train.last; ++d) {
        if (d.month() != month) continue;
        sum += panel.demand_of("north").at(d, h);
        ++n;
      }
      CHECK(std::abs(f[static_cast<std::size_t>(h)] - sum / n) < 1e-9);
    }
  }
  auto single = climatology_forecast(panel, "north", Date(2022, 3, 1), {Date(2020, 3, 5), Date(2020, 3, 5)});
  auto day = panel.demand_of("north").day_profile(Date(2020, 3, 5));
  for (std::size_t h = 0; h < 24; ++h) CHECK(single[h] == day[h]);
  auto two = climatology_forecast(panel, "north", Date(2022, 3, 1), {Date(2020, 2, 28), Date(2020, 3, 2)});
  auto a = panel.demand_of("north").day_profile(Date(2020, 3, 1)), b = panel.demand_of("north").day_profile(Date(2020, 3, 2));
  for (std::size_t h = 0; h < 24; ++h) CHECK(two[h] == doctest::Approx(0.5 * (a[h] + b[h])).epsilon(1e-15));
  CHECK_ERRC(climatology_forecast(panel, "north", Date(2021, 9, 1), {Date(2020, 1, 1), Date(2020, 2, 1)}), Errc::NoHistory);
}

TEST_CASE("lasso at zero penalty equals least squares") {
  Rng rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t n = 60, p = 5;
    Matrix X = random_standardized(rng, n, p);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = 3 + 2 * X(i, 0) - X(i, 3) + 0.5 * rng.normal();
    auto m = lasso_fit(X, y, 0.0, 1e-14);
    Eigen::MatrixXd A(n, p + 1);
    Eigen::VectorXd b(n);
    for (std::size_t i = 0; i < n; ++i) {
      A(i, 0) = 1.0;
      for (std::size_t j = 0; j < p; ++j) A(i, j + 1) = X(i, j);
      b(i) = y[i];
    }
    Eigen::VectorXd ols = (A.transpose() * A).ldlt().solve(A.transpose() * b);
    CHECK(std::abs(m.intercept - ols(0)) < 1e-8);
    for (std::size_t j = 0; j < p; ++j) CHECK(std::abs(m.coefficients[j] - ols(j + 1)) < 1e-8);
  }
}

TEST_CASE("lasso soft threshold and kill condition") {
  Rng rng(9);
  const std::size_t n = 200;
  Matrix x = random_standardized(rng, n, 1);
  std::vector<double> y(n);
  double rho = 0, ybar = 0;
  for (std::size_t i = 0; i < n; ++i) ybar += (y[i] = 1.5 * x(i, 0) + rng.normal());
  ybar /= n;
  for (std::size_t i = 0; i < n; ++i) rho += x(i, 0) * (y[i] - ybar) / n;
  for (double lambda : {0.0, 0.3, 1.0, 1.4, 5.0}) {
    auto m = lasso_fit(x, y, lambda);
    const double expected = (rho > 0 ? 1 : -1) * std::max(std::abs(rho) - lambda, 0.0);
    CHECK(m.coefficients[0] == doctest::Approx(expected).epsilon(1e-9));
  }

  Matrix X = random_standardized(rng, n, 4);
  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = X(i, 0) - 2 * X(i, 2) + rng.normal();
  double max_corr = 0;
  for (std::size_t j = 0; j < 4; ++j) {
    double c = 0;
    for (std::size_t i = 0; i < n; ++i) c += X(i, j) * z[i];
    max_corr = std::max(max_corr, std::abs(c) / n);
  }
  auto killed = lasso_fit(X, z, max_corr);
  for (double b : killed.coefficients) CHECK(b == 0.0);

  auto path = lasso_fit(X, z, 0.05);
  for (std::size_t s = 1; s < path.objective_history.size(); ++s)
    CHECK(path.objective_history[s] <= path.objective_history[s - 1] + 1e-15);
  CHECK(lasso_objective(X, z, path) == doctest::Approx(path.objective_history.back()));
  CHECK_ERRC(lasso_fit(X, z, 0.0, 0.0, 1), Errc::NotConverged);
}

TEST_CASE("PF-SCF recovers mixture weights") {
  Rng rng(23);
  const std::size_t days = 120;
  Matrix pf(days, 24), scf(days, 24), truth(days, 24), exact(days, 24);
  for (std::size_t d = 0; d < days; ++d)
    for (std::size_t h = 0; h < 24; ++h) {
      pf(d, h) = 1000 + 100 * rng.normal();
      scf(d, h) = 1000 + 80 * std::sin(h * 0.26) + 60 * rng.normal();
      truth(d, h) = 0.6 * pf(d, h) + 0.4 * scf(d, h) + 2 * rng.normal();
    }
  auto m = combine_pf_scf(pf, scf, truth);
  CHECK(std::abs(m.w_pf - 0.6) <= 0.05);
  CHECK(std::abs(m.w_scf - 0.4) <= 0.05);

  auto identity = combine_pf_scf(pf, scf, pf, {0.0, 1e-6});
  CHECK(identity.w_pf == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(std::abs(identity.w_scf) < 1e-4);

  auto tied = combine_pf_scf(pf, pf, truth);
  auto tied_pred = tied.predict(pf, pf);
  double ss_tied = 0, ss_ols = 0;
  {
    // Oracle: best single-regressor fit on pf with intercept.
    const std::size_t n = days * 24;
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) mx += pf.data()[i], my += truth.data()[i];
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < n; ++i) {
      sxy += (pf.data()[i] - mx) * (truth.data()[i] - my);
      sxx += (pf.data()[i] - mx) * (pf.data()[i] - mx);
    }
    const double slope = sxy / sxx;
    CHECK(tied.w_pf + tied.w_scf == doctest::Approx(slope).epsilon(0.02));
    for (std::size_t i = 0; i < n; ++i) {
      const double e = my + slope * (pf.data()[i] - mx) - truth.data()[i];
      ss_ols += e * e;
      ss_tied += (tied_pred.data()[i] - truth.data()[i]) * (tied_pred.data()[i] - truth.data()[i]);
    }
  }
  CHECK(ss_tied <= ss_ols * 1.02);
  CHECK_ERRC(combine_pf_scf(pf, Matrix(days, 23), truth), Errc::Misaligned);

  auto back = pfscf_from_json(to_json(m));
  CHECK(back.w_pf == m.w_pf);
  CHECK(back.intercept == m.intercept);
}

TEST_CASE("PF-SCF in-sample RMSE dominates its components") {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t days = 30 + rng.below(60);
    Matrix pf(days, 24), scf(days, 24), truth(days, 24);
    for (std::size_t i = 0; i < pf.data().size(); ++i) {
      truth.data()[i] = 1000 + 100 * rng.normal();
      pf.data()[i] = truth.data()[i] + rng.uniform(10, 80) * rng.normal() + rng.uniform(-30, 30);
      scf.data()[i] = 1000 + rng.uniform(20, 100) * rng.normal();
    }
    auto m = combine_pf_scf(pf, scf, truth);
    auto combined = m.predict(pf, scf);
    auto rmse = [&](const Matrix& f) {
      double ss = 0;
      for (std::size_t i = 0; i < f.data().size(); ++i) ss += (f.data()[i] - truth.data()[i]) * (f.data()[i] - truth.data()[i]);
      return std::sqrt(ss / f.data().size());
    };
    CHECK(rmse(combined) <= std::min(rmse(pf), rmse(scf)) + 1e-9);
  }
}
