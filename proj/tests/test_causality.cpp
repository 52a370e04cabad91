#include <cmath>
#include <fstream>

#include "support.hpp"

#include "loadscope/causality.hpp"
#include "loadscope/rng.hpp"

using namespace loadscope;

namespace {

double hashed(int t, int salt) {
  const double v = std::sin(t * 12.9898 + salt * 78.233) * 43758.5453;
  return v - std::floor(v) - 0.5;
}

DailyFeatureSeries series(const std::string& name, std::vector<double> values) {
  return {name, Date(2020, 1, 1), std::move(values)};
}

std::vector<double> ar1(Rng& rng, std::size_t n, double phi) {
  std::vector<double> v(n, 0.0);
  for (std::size_t t = 1; t < n; ++t) v[t] = phi * v[t - 1] + rng.normal();
  return v;
}

struct Confounded {
  std::vector<double> t, y;
  NamedMatrix X;
};

Confounded confounded(Rng& rng, std::size_t n, double delta) {
  Confounded c;
  c.X.names = {"x1", "x2", "x3"};
  c.X.values = Matrix(n, 3);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < 3; ++j) c.X.values(i, j) = rng.uniform(-2, 2);
    const double x1 = c.X.values(i, 0), x2 = c.X.values(i, 1);
    c.t.push_back(std::sin(x1) + 0.5 * x2 + rng.normal());
    c.y.push_back(delta * c.t.back() + 3 * std::cos(x1) + x2 * x2 + rng.normal());
  }
  return c;
}

DmlOptions quick_dml(std::uint64_t seed) {
  DmlOptions o;
  o.seed = seed;
  o.nuisance.n_trees = 150;
  o.nuisance.learning_rate = 0.1;
  return o;
}

}  // namespace

TEST_CASE("ADF statistic matches the reference implementation") {
  std::vector<double> y(300, 0.0);
  for (int t = 1; t < 300; ++t) y[static_cast<std::size_t>(t)] = 0.6 * y[static_cast<std::size_t>(t) - 1] + hashed(t, 1);
  CHECK(adf_statistic(y, 1) == doctest::Approx(-7.968370650677345).epsilon(1e-9));

  std::vector<double> walk(300, 0.0);
  Rng rng(1);
  for (std::size_t t = 1; t < 300; ++t) walk[t] = walk[t - 1] + rng.normal();
  CHECK(adf_statistic(walk, 1) > -2.86);
}

TEST_CASE("Granger F statistic matches the reference implementation") {
  std::vector<double> x(300), z(300, 0.0);
  for (int t = 0; t < 300; ++t) x[static_cast<std::size_t>(t)] = hashed(t, 2);
  for (int t = 1; t < 300; ++t) {
    const auto i = static_cast<std::size_t>(t);
    z[i] = 0.3 * z[i - 1] + 0.5 * x[i - 1] + 0.5 * hashed(t, 3);
  }
  GrangerOptions o;
  o.max_lag = 1;
  auto r = granger_test(series("x", x), series("z", z), o);
  CHECK_FALSE(r.differenced);
  CHECK(r.x_to_y.lag == 1);
  CHECK(r.x_to_y.f_stat == doctest::Approx(259.1787097886902).epsilon(1e-9));
  CHECK(r.x_to_y.p_value == doctest::Approx(2.5398824557630536e-42).epsilon(1e-6));
  CHECK(r.direction == Direction::XToY);
  CHECK(r.n_used == 299);
}

TEST_CASE("Granger detects a planted lead and is affine invariant") {
  Rng rng(11);
  auto x = ar1(rng, 500, 0.3);
  std::vector<double> y(500, 0.0);
  for (std::size_t t = 1; t < 500; ++t) y[t] = 0.8 * x[t - 1] + rng.normal();
  auto r = granger_test(series("x", x), series("y", y));
  CHECK(r.x_to_y.p_value < 1e-3);
  CHECK(r.y_to_x.p_value > 0.05);
  CHECK(r.direction == Direction::XToY);
  CHECK(r.x_to_y.lag >= 1);
  CHECK(r.x_to_y.lag <= 7);

  std::vector<double> ax, ay;
  for (double v : x) ax.push_back(3 * v - 40);
  for (double v : y) ay.push_back(-0.2 * v + 1000);
  auto s = granger_test(series("x", ax), series("y", ay));
  CHECK(std::abs(s.x_to_y.f_stat - r.x_to_y.f_stat) < 1e-9 * std::max(1.0, r.x_to_y.f_stat));
  CHECK(std::abs(s.y_to_x.f_stat - r.y_to_x.f_stat) < 1e-9 * std::max(1.0, r.y_to_x.f_stat));

  auto same = granger_test(series("x", x), series("y", x));
  CHECK(same.direction == Direction::Both);
  CHECK(same.x_to_y.p_value < 1e-12);

  CHECK_ERRC(granger_test(series("x", std::vector<double>(60, 1.0)), series("y", y)), Errc::TooShort);
  CHECK_ERRC(granger_test(series("x", std::vector<double>(500, 1.0)), series("y", y)), Errc::ConstantSeries);
  CHECK(direction_name(Direction::YToX) == "y_to_x");
}

TEST_CASE("Granger false positive rate on independent series") {
  Rng rng(2024);
  int rejections = 0;
  for (int rep = 0; rep < 200; ++rep) {
    auto x = ar1(rng, 300, 0.4), y = ar1(rng, 300, 0.4);
    if (granger_test(series("x", x), series("y", y)).x_to_y.p_value < 0.05) ++rejections;
  }
  CHECK(rejections >= 4);
  CHECK(rejections <= 18);
}

TEST_CASE("random walks are differenced before testing") {
  Rng rng(5);
  std::vector<double> x(400, 0.0), y(400, 0.0);
  for (std::size_t t = 1; t < 400; ++t) {
    x[t] = x[t - 1] + rng.normal();
    y[t] = y[t - 1] + rng.normal();
  }
  auto r = granger_test(series("x", x), series("y", y));
  CHECK(r.differenced);
  CHECK(r.adf_x > -2.86);
}

TEST_CASE("DML recovers a linear effect under nonlinear confounding") {
  Rng rng(77);
  auto c = confounded(rng, 2000, 2.0);
  auto r = dml_effect(c.t, c.y, c.X);
  CHECK(r.delta >= 1.9);
  CHECK(r.delta <= 2.1);
  CHECK(r.se > 0.0);
  CHECK(r.ci_lo < r.delta);
  CHECK(r.ci_hi > r.delta);
  CHECK(r.folds == 5);
  CHECK(r.n == 2000);

  DmlOptions contiguous;
  contiguous.shuffle = false;
  auto blocks = dml_effect(c.t, c.y, c.X, contiguous);
  CHECK(std::abs(blocks.delta - r.delta) < 2 * (r.se + blocks.se));
  DmlOptions other_seed;
  other_seed.seed = 99;
  auto reseeded = dml_effect(c.t, c.y, c.X, other_seed);
  CHECK(std::abs(reseeded.delta - r.delta) < 2 * (r.se + reseeded.se));
}

TEST_CASE("DML removes pure confounding") {
  Rng rng(8);
  auto c = confounded(rng, 1500, 0.0);
  auto r = dml_effect(c.t, c.y, c.X);
  CHECK(r.ci_lo < 0.0);
  CHECK(r.ci_hi > 0.0);
}

TEST_CASE("DML null coverage") {
  Rng rng(314);
  int covered = 0;
  for (int rep = 0; rep < 100; ++rep) {
    auto c = confounded(rng, 400, 0.0);
    auto r = dml_effect(c.t, c.y, c.X, quick_dml(1000 + static_cast<std::uint64_t>(rep)));
    if (r.ci_lo <= 0.0 && r.ci_hi >= 0.0) ++covered;
  }
  CHECK(covered >= 90);
}

TEST_CASE("DML rejects a treatment determined by the covariates") {
  Rng rng(3);
  auto c = confounded(rng, 500, 1.0);
  std::vector<double> t;
  for (std::size_t i = 0; i < 500; ++i) t.push_back(c.X.values(i, 0));
  CHECK_ERRC(dml_effect(t, c.y, c.X), Errc::DegenerateTreatment);
  CHECK_ERRC(dml_effect(t, std::vector<double>(499, 0.0), c.X), Errc::Misaligned);
  DmlOptions one;
  one.folds = 1;
  CHECK_ERRC(dml_effect(c.t, c.y, c.X, one), Errc::InvalidArgument);
}

TEST_CASE("causal profile on the planted panel") {
  SyntheticSpec spec;
  spec.days = 500;
  auto gen = generate_synthetic_panel(spec);
  const auto& panel = gen.panel;
  DateRange train{panel.span.first, panel.span.first + 399};
  auto ctx = FeatureContext::fit(panel, train);
  std::string driver_column;
  for (std::size_t c = 0; c < gen.truth.text_groups.size(); ++c)
    if (gen.truth.text_groups[c] == 0) {
      driver_column = panel.textual.table.names[c];
      break;
    }
  REQUIRE(!driver_column.empty());
  auto curve = causal_profile(panel, driver_column, "east", {1, 14}, FeatureSpec{}, ctx, quick_dml(4));
  REQUIRE(curve.size() == 2);
  CHECK(curve[0].horizon == 1);
  CHECK(curve[0].effect.ci_lo > 0.0);
  CHECK(curve[0].effect.delta > curve[1].effect.delta);

  auto daily = daily_mean_demand(panel, "east");
  CHECK(daily.first == panel.span.first);
  auto profile = panel.demand_of("east").day_profile(panel.span.first + 10);
  double mean = 0;
  for (double v : profile) mean += v / 24;
  CHECK(daily.at(panel.span.first + 10) == doctest::Approx(mean).epsilon(1e-14));
}

TEST_CASE("causality csv layouts") {
  test_support::TempDir dir("causal");
  GrangerRow g{"f", "east", {}};
  g.result.direction = Direction::Both;
  write_granger_csv({g}, dir.path() / "g.csv");
  DmlRow d{"f", "east", 7, {}};
  write_dml_csv({d}, dir.path() / "d.csv");
  std::ifstream gi(dir.path() / "g.csv"), di(dir.path() / "d.csv");
  std::string gh, dh, first;
  std::getline(gi, gh);
  std::getline(di, dh);
  CHECK(gh == "feature,region,direction,lag,f_stat,p_value,relation");
  CHECK(dh == "feature,region,horizon,delta,se,ci_lo,ci_hi");
  std::getline(gi, first);
  CHECK(first.rfind("f,east,x_to_y,", 0) == 0);
  CHECK(first.substr(first.size() - 5) == ",both");
}
