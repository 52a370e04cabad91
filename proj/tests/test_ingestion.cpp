#include <cmath>
#include <fstream>

#include "support.hpp"

#include "loadscope/causality.hpp"
#include "loadscope/ingestion.hpp"
#include "loadscope/stats.hpp"

using namespace loadscope;
using test_support::TempDir;

namespace {

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p);
  f << text;
}

/// Two complete days of demand and temperature for region "r" / city "c".
void write_minimal_inputs(const std::filesystem::path& dir, int skip_hour = -1, int gap = 1) {
  std::string demand = "region,timestamp_utc,demand_mw\n", temp = "city,timestamp_utc,temp_c\n";
  for (int i = 0; i < 48; ++i) {
    const auto stamp = HourStamp{HourStamp::from(Date(2021, 3, 1), 0).hours + i}.to_string();
    temp += "c," + stamp + "," + std::to_string(5 + i % 3) + "\n";
    if (skip_hour >= 0 && i >= skip_hour && i < skip_hour + gap) continue;
    demand += "r," + stamp + "," + std::to_string(100 + 2 * i) + "\n";
  }
  write_text(dir / "demand.csv", demand);
  write_text(dir / "temperature.csv", temp);
}

}  // namespace

TEST_CASE("one missing hour is linearly interpolated and counted") {
  TempDir dir("ingest_gap");
  write_minimal_inputs(dir.path(), 10);
  auto panel = load_panel(PanelPaths::in_directory(dir.path()), {{"r", "c"}});
  const auto& d = panel.demand_of("r");
  CHECK(d.size() == 48);
  CHECK(d.values[10] == doctest::Approx(0.5 * (d.values[9] + d.values[11])));
  CHECK(d.values[10] == 120.0);
  CHECK(panel.interpolated_hours.at("demand:r") == 1);
  CHECK(panel.textual.table.cols() == 0);
  CHECK(panel.economics.table.cols() == 0);
}

TEST_CASE("gaps longer than three hours are rejected") {
  TempDir dir("ingest_gap4");
  write_minimal_inputs(dir.path(), 10, 3);
  CHECK_NOTHROW(load_panel(PanelPaths::in_directory(dir.path()), {{"r", "c"}}));
  write_minimal_inputs(dir.path(), 10, 4);
  CHECK_ERRC(load_panel(PanelPaths::in_directory(dir.path()), {{"r", "c"}}), Errc::GapTooLarge);
}

TEST_CASE("schema, mapping and missing-file errors") {
  TempDir dir("ingest_errors");
  write_minimal_inputs(dir.path());
  CHECK_ERRC(load_panel(PanelPaths::in_directory(dir.path()), {}), Errc::UnmappedRegion);
  CHECK_ERRC(load_panel(PanelPaths::in_directory(dir.path()), {{"r", "elsewhere"}}), Errc::UnmappedRegion);
  write_text(dir.path() / "holidays.csv", "region,day,name\n");
  CHECK_ERRC(load_panel(PanelPaths::in_directory(dir.path()), {{"r", "c"}}), Errc::SchemaError);
  std::filesystem::remove(dir.path() / "holidays.csv");
  write_text(dir.path() / "demand.csv", "region,timestamp_utc,demand_mw\nr,2021-03-01T00:00:00Z,-5\n");
  try {
    load_panel(PanelPaths::in_directory(dir.path()), {{"r", "c"}});
    FAIL("expected SchemaError");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::SchemaError);
    CHECK(std::string(e.what()).find("demand.csv:2") != std::string::npos);
  }
  std::filesystem::remove(dir.path() / "demand.csv");
  try {
    load_panel(PanelPaths::in_directory(dir.path()), {{"r", "c"}});
    FAIL("expected FileNotFound");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::FileNotFound);
    CHECK(std::string(e.what()).find("demand.csv") != std::string::npos);
  }
}

TEST_CASE("quarterly economics are forward filled onto every day") {
  std::vector<Date> dates{Date(2020, 1, 1), Date(2020, 4, 1), Date(2020, 7, 1)};
  NamedMatrix rows{kEconomicsColumns, Matrix(3, 3)};
  for (std::size_t r = 0; r < 3; ++r) rows.values(r, 0) = 100.0 + static_cast<double>(r);
  auto daily = forward_fill_daily(dates, rows, {Date(2020, 1, 1), Date(2020, 9, 30)});
  for (Date d = Date(2020, 1, 1); d <= Date(2020, 9, 30); ++d) {
    const double expect = d < Date(2020, 4, 1) ? 100.0 : d < Date(2020, 7, 1) ? 101.0 : 102.0;
    CHECK(daily.table.values(daily.row_of(d), 0) == expect);
  }
  CHECK_ERRC(forward_fill_daily(dates, rows, {Date(2019, 12, 1), Date(2020, 1, 5)}), Errc::SchemaError);
}

TEST_CASE("forward fill never moves a value backward in time") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Date> dates{Date(2020, 1, 1)};
    for (int i = 0; i < 8; ++i) dates.push_back(dates.back() + 1 + static_cast<int>(rng.below(40)));
    NamedMatrix rows{{"v"}, Matrix(dates.size(), 1)};
    for (std::size_t r = 0; r < dates.size(); ++r) rows.values(r, 0) = static_cast<double>(r);
    auto daily = forward_fill_daily(dates, rows, {dates.front(), dates.back() + 10});
    for (Date d = dates.front(); d <= dates.back() + 10; ++d) {
      auto source = static_cast<std::size_t>(daily.table.values(daily.row_of(d), 0));
      CHECK(dates[source] <= d);
      if (source + 1 < dates.size()) CHECK(dates[source + 1] > d);
    }
  }
}

TEST_CASE("synthetic panels are pure functions of seed and spec") {
  SyntheticSpec spec;
  spec.days = 200;
  auto a = generate_synthetic_panel(spec), b = generate_synthetic_panel(spec);
  CHECK(a.panel.same_data(b.panel));
  spec.seed = 8;
  auto c = generate_synthetic_panel(spec);
  CHECK_FALSE(a.panel.same_data(c.panel));
  CHECK(a.panel.span.days() == 200);
  CHECK(a.truth.text_groups.size() == a.panel.textual.table.cols());
  for (const auto& [region, s] : a.panel.demand) {
    CHECK(s.size() == 200 * 24);
    for (double v : s.values) CHECK(v > 0.0);
  }
  spec.days = 100;
  CHECK_ERRC(generate_synthetic_panel(spec), Errc::InvalidSpec);
}

TEST_CASE("write then load reproduces the panel") {
  SyntheticSpec spec;
  spec.days = 150;
  auto gen = generate_synthetic_panel(spec);
  TempDir dir("ingest_roundtrip");
  write_panel(gen.panel, dir.path());
  auto loaded = load_panel(PanelPaths::in_directory(dir.path()), gen.panel.region_city);
  CHECK(loaded.same_data(gen.panel));
  TempDir again("ingest_roundtrip2");
  write_panel(loaded, again.path());
  CHECK(load_panel(PanelPaths::in_directory(again.path()), gen.panel.region_city).same_data(loaded));
}

TEST_CASE("planted driver Granger-causes demand; a null driver leaves demand unrelated") {
  SyntheticSpec spec;
  spec.days = 500;
  auto gen = generate_synthetic_panel(spec);
  auto demand = daily_mean_demand(gen.panel, "east");
  auto g = granger_test(gen.truth.driver, demand);
  CHECK(g.x_to_y.p_value < 1e-3);

  spec.beta_mw = 0.0;
  auto null_panel = generate_synthetic_panel(spec);
  auto null_demand = daily_mean_demand(null_panel.panel, "east");
  // Daily differences remove the shared seasonal level; correlation with the driver is then near zero.
  std::vector<double> dd, dx;
  for (std::size_t t = 1; t < null_demand.values.size(); ++t) {
    dd.push_back(null_demand.values[t] - null_demand.values[t - 1]);
    dx.push_back(null_panel.truth.driver.values[t - 1] - (t >= 2 ? null_panel.truth.driver.values[t - 2] : 0.0));
  }
  CHECK(std::abs(stats::spearman(dd, dx)) < 0.15);
}
