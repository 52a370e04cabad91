#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "support.hpp"

#include "loadscope/diagnostics.hpp"
#include "loadscope/rng.hpp"
#include "loadscope/stats.hpp"

using namespace loadscope;
using test_support::TempDir;

namespace {

struct Draws {
  std::vector<double> mu, sigma, truth;
};

Draws simulate(Rng& rng, std::size_t n, double sigma_scale) {
  Draws d;
  for (std::size_t i = 0; i < n; ++i) {
    const double mu = rng.uniform(500, 1500), sigma = rng.uniform(5, 50);
    d.mu.push_back(mu);
    d.sigma.push_back(sigma * sigma_scale);
    d.truth.push_back(mu + sigma * rng.normal());
  }
  return d;
}

}  // namespace

TEST_CASE("well-specified forecasts are calibrated") {
  Rng rng(99);
  auto d = simulate(rng, 5000, 1.0);
  auto r = calibration_report(d.mu, d.sigma, d.truth);
  CHECK(r.pit.size() == 5000);
  for (double u : r.pit) {
    CHECK(u >= 0.0);
    CHECK(u <= 1.0);
  }
  REQUIRE(r.reliability.size() == 19);
  CHECK(r.reliability.front().nominal == doctest::Approx(0.05));
  CHECK(r.reliability.back().nominal == doctest::Approx(0.95));
  for (std::size_t i = 1; i < r.reliability.size(); ++i)
    CHECK(r.reliability[i].empirical >= r.reliability[i - 1].empirical);
  CHECK(r.max_reliability_deviation < 0.03);
  CHECK(r.ks_statistic < 1.36 / std::sqrt(5000.0) * 1.5);
  CHECK(r.qq.size() == 5000);
}

TEST_CASE("underdispersed forecasts bow around the diagonal") {
  Rng rng(100);
  auto d = simulate(rng, 5000, 0.5);
  auto r = calibration_report(d.mu, d.sigma, d.truth);
  for (const auto& p : r.reliability) {
    if (p.nominal < 0.3) CHECK(p.empirical > p.nominal + 0.05);
    if (p.nominal > 0.7) CHECK(p.empirical < p.nominal - 0.05);
  }
}

TEST_CASE("truth at the mean gives PIT one half") {
  std::vector<double> mu{1, 2, 3, 4}, sigma{1, 1, 2, 3};
  auto r = calibration_report(mu, sigma, mu);
  for (double u : r.pit) CHECK(u == 0.5);
  CHECK(r.qq.empty());
  CHECK_ERRC(calibration_report(mu, std::vector<double>{1, 0, 1, 1}, mu), Errc::NonPositiveSigma);
  CHECK_ERRC(calibration_report(mu, sigma, std::vector<double>{1, 2}), Errc::Misaligned);
}

TEST_CASE("per-hour slices of a forecast set") {
  Rng rng(5);
  ProbForecastSet set;
  Matrix truth(40, 24);
  set.mu = Matrix(40, 24);
  set.sigma = Matrix(40, 24);
  for (int d = 0; d < 40; ++d) set.days.push_back(Date(2021, 1, 1) + d);
  for (std::size_t i = 0; i < truth.data().size(); ++i) {
    set.mu.data()[i] = rng.uniform(0, 10);
    set.sigma.data()[i] = 1.0;
    truth.data()[i] = set.mu.data()[i] + rng.normal();
  }
  auto all = pit_and_reliability(set, truth);
  CHECK(all.pit.size() == 960);
  auto h20 = pit_and_reliability(set, truth, 20);
  REQUIRE(h20.pit.size() == 40);
  for (std::size_t d = 0; d < 40; ++d)
    CHECK(h20.pit[d] == stats::normal_cdf(truth(d, 20) - set.mu(d, 20)));
  CHECK_ERRC(pit_and_reliability(set, truth, 24), Errc::InvalidArgument);
  CHECK_ERRC(pit_and_reliability(set, Matrix(39, 24)), Errc::Misaligned);

  TempDir dir("calib");
  write_calibration_csv(h20, dir.path() / "c.csv");
  std::ifstream in(dir.path() / "c.csv");
  std::string header;
  std::getline(in, header);
  CHECK(!header.empty());
}

TEST_CASE("Q-Q points") {
  std::vector<double> z;
  for (int i = 1; i <= 50; ++i) z.push_back(stats::normal_quantile((i - 0.5) / 50));
  std::reverse(z.begin(), z.end());
  for (const auto& p : qq_points(z)) CHECK(std::abs(p.sample - p.theoretical) < 1e-12);

  std::vector<double> constant(20, 1.7);
  for (const auto& p : qq_points(constant)) CHECK(p.sample == 1.7);
  CHECK_ERRC(qq_points(std::vector<double>(9, 0.0)), Errc::TooFew);

  Rng rng(7);
  std::vector<double> heavy;
  for (int i = 0; i < 4000; ++i) {
    double chi = 0;
    for (int k = 0; k < 3; ++k) chi += std::pow(rng.normal(), 2);
    heavy.push_back(rng.normal() / std::sqrt(chi / 3));
  }
  // Student t with 3 degrees of freedom, standardized by its median absolute deviation.
  std::vector<double> absolute;
  for (double v : heavy) absolute.push_back(std::abs(v));
  const double scale = stats::quantile(absolute, 0.5) / stats::normal_quantile(0.75);
  for (double& v : heavy) v /= scale;
  auto qq = qq_points(heavy);
  const std::size_t tail = qq.size() / 20;
  for (std::size_t i = 0; i < tail / 2; ++i) {
    CHECK(std::abs(qq[i].sample) > std::abs(qq[i].theoretical));
    CHECK(std::abs(qq[qq.size() - 1 - i].sample) > std::abs(qq[qq.size() - 1 - i].theoretical));
  }
}

TEST_CASE("KS distance") {
  CHECK(ks_uniform({0.5}) == doctest::Approx(0.5));
  std::vector<double> grid;
  for (int i = 0; i < 100; ++i) grid.push_back((i + 0.5) / 100);
  CHECK(ks_uniform(grid) == doctest::Approx(0.005));
}

TEST_CASE("paired t-test") {
  std::vector<double> a{1, 2, 3, 4, 5.5, 2.25}, b{0.5, 2.5, 2, 3, 4, 2};
  auto r = paired_ttest(a, b);
  CHECK(r.n == 6);
  CHECK(r.t == doctest::Approx(2.1787233516529754).epsilon(1e-12));
  CHECK(r.p_value == doctest::Approx(0.0812437269864934).epsilon(1e-9));
  CHECK_FALSE(r.significant);
  CHECK(paired_ttest(b, a).t == -r.t);

  auto same = paired_ttest(a, a);
  CHECK(same.mean_diff == 0.0);
  CHECK(same.p_value == 1.0);
  std::vector<double> shifted;
  for (double v : a) shifted.push_back(v + 3);
  auto constant = paired_ttest(a, shifted);
  CHECK(constant.p_value == 0.0);
  CHECK(constant.significant);

  Rng rng(3);
  std::vector<double> x, y;
  for (int i = 0; i < 1000; ++i) {
    x.push_back(100 + 10 * rng.normal());
    y.push_back(x.back() + 5 + 0.01 * rng.normal());
  }
  auto shift = paired_ttest(x, y);
  CHECK(shift.mean_diff == doctest::Approx(-5.0).epsilon(1e-3));
  CHECK(shift.p_value < 1e-10);

  CHECK_ERRC(paired_ttest(std::vector<double>{1}, std::vector<double>{2}), Errc::LengthMismatch);
  CHECK_ERRC(paired_ttest(a, std::vector<double>{1, 2}), Errc::LengthMismatch);
}

TEST_CASE("effect labels") {
  TTestResult r;
  r.mean_diff = -20.659;
  r.p_value = 0.001;
  CHECK(format_effect("\xce\x94\xce\xbc", r) == "\xce\x94\xce\xbc -20.66**");
  r.p_value = 0.03;
  r.mean_diff = 1.5;
  CHECK(format_effect("d", r) == "d 1.50*");
  r.p_value = 0.2;
  CHECK(format_effect("d", r) == "d 1.50");
}

TEST_CASE("SVG output is well formed") {
  SvgPlot plot;
  plot.title = "A & B <test>";
  plot.x_label = "nominal";
  plot.y_label = "empirical";
  plot.diagonal = true;
  plot.series.push_back({"curve", {0, 0.5, 1}, {0, 0.4, 1}, false});
  plot.series.push_back({"points", {0.2}, {0.3}, true});
  auto svg = plot.render();
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("A &amp; B &lt;test&gt;") != std::string::npos);
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(svg.find("<circle") != std::string::npos);

  SvgHeatmap heat;
  heat.title = "improvement";
  heat.row_labels = {"east", "west"};
  heat.col_labels = {"1", "7"};
  heat.values = Matrix(2, 2);
  heat.values(0, 0) = -3;
  heat.values(1, 1) = 5;
  auto hsvg = heat.render();
  CHECK(std::count(hsvg.begin(), hsvg.end(), '\n') > 4);
  CHECK(hsvg.find("<rect") != std::string::npos);

  TempDir dir("svg");
  plot.save(dir.path() / "nested" / "p.svg");
  std::ifstream in(dir.path() / "nested" / "p.svg");
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == svg);
}
