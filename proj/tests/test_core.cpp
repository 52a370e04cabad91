#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "support.hpp"

#include "loadscope/core.hpp"
#include "loadscope/csv.hpp"
#include "loadscope/rng.hpp"
#include "loadscope/stats.hpp"

using namespace loadscope;

TEST_CASE("date arithmetic and calendar fields") {
  Date d(2020, 2, 28);
  CHECK((d + 1).to_string() == "2020-02-29");
  CHECK((d + 2).to_string() == "2020-03-01");
  CHECK(Date(2021, 1, 1) - Date(2020, 1, 1) == 366);
  CHECK(Date(2024, 6, 3).weekday_index() == 0);  // a Monday
  CHECK(Date(2024, 6, 9).is_weekend());
  CHECK(Date(2020, 12, 31).day_of_year() == 366);
  CHECK(Date(2021, 12, 31).days_in_year() == 365);
  CHECK(Date::parse("2019-07-04") == Date(2019, 7, 4));
  CHECK_ERRC(Date::parse("2019-13-01"), Errc::InvalidArgument);
  CHECK_ERRC(Date::parse("20190704"), Errc::InvalidArgument);
  auto h = HourStamp::parse("2020-03-01T05:00:00Z");
  CHECK(h.date() == Date(2020, 3, 1));
  CHECK(h.hour() == 5);
  CHECK(h.to_string() == "2020-03-01T05:00:00Z");
  CHECK_ERRC(HourStamp::parse("2020-03-01T05:30:00Z"), Errc::InvalidArgument);
}

TEST_CASE("standardizer hand values") {
  NamedMatrix m{{"a"}, Matrix(3, 1)};
  m.values(0, 0) = 1;
  m.values(1, 0) = 2;
  m.values(2, 0) = 3;
  auto s = Standardizer::fit(m);
  CHECK(s.means()[0] == doctest::Approx(2.0));
  CHECK(s.stds()[0] == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-12));
  CHECK(s.stds()[0] == doctest::Approx(0.8165).epsilon(1e-4));

  NamedMatrix two{{"x", "y"}, Matrix(2, 2)};
  two.values(0, 0) = 0;
  two.values(1, 0) = 2;
  two.values(0, 1) = 10;
  two.values(1, 1) = 30;
  auto s2 = Standardizer::fit(two);
  CHECK(s2.means()[0] == 1.0);
  CHECK(s2.means()[1] == 20.0);
  NamedMatrix at_mean{{"x", "y"}, Matrix(1, 2)};
  at_mean.values(0, 0) = 1.0;
  at_mean.values(0, 1) = 20.0;
  auto z = s2.apply(at_mean);
  CHECK(z.values(0, 0) == 0.0);
  CHECK(z.values(0, 1) == 0.0);

  NamedMatrix constant{{"c"}, Matrix(3, 1, 5.0)};
  CHECK_ERRC(Standardizer::fit(constant), Errc::ConstantColumn);
  NamedMatrix bad{{"c"}, Matrix(2, 1)};
  bad.values(1, 0) = NAN;
  CHECK_ERRC(Standardizer::fit(bad), Errc::NonFinite);
}

TEST_CASE("standardizer property: zero mean, unit std, exact round trip") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t rows = 2 + rng.below(40), cols = 1 + rng.below(6);
    NamedMatrix m;
    for (std::size_t c = 0; c < cols; ++c) m.names.push_back("f" + std::to_string(c));
    m.values = Matrix(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) m.values(r, c) = rng.uniform(-1e3, 1e3) * (c + 1);
    }
    auto s = Standardizer::fit(m);
    auto z = s.apply(m);
    for (std::size_t c = 0; c < cols; ++c) {
      auto col = z.values.column(c);
      CHECK(std::abs(stats::mean(col)) < 1e-9);
      CHECK(std::abs(std::sqrt(stats::variance(col)) - 1.0) < 1e-9);
    }
    auto back = s.inverse(z);
    for (std::size_t i = 0; i < m.values.data().size(); ++i) {
      CHECK(std::abs(back.values.data()[i] - m.values.data()[i]) <= 1e-12 * std::max(1.0, std::abs(m.values.data()[i])));
    }
  }
}

TEST_CASE("standardizer binds columns by name") {
  NamedMatrix m{{"a", "b"}, Matrix(3, 2)};
  for (std::size_t r = 0; r < 3; ++r) {
    m.values(r, 0) = static_cast<double>(r);
    m.values(r, 1) = 10.0 * static_cast<double>(r);
  }
  auto s = Standardizer::fit(m);
  std::vector<std::string> order{"b", "a"};
  auto swapped = m.reordered(order);
  auto z1 = s.apply(m), z2 = s.apply(swapped);
  CHECK(z2.names == m.names);
  CHECK(z1.values == z2.values);
  NamedMatrix missing{{"a", "zzz"}, Matrix(1, 2)};
  CHECK_ERRC(s.apply(missing), Errc::ColumnMismatch);
}

namespace {

DesignMatrix calendar_matrix(Date first, int days) {
  DesignMatrix dm;
  dm.features.names = {"x"};
  dm.features.values = Matrix(0, 1);
  dm.targets = Matrix(0, kHoursPerDay);
  for (int i = 0; i < days; ++i) {
    dm.issue_dates.push_back(first + i);
    std::vector<double> x{static_cast<double>(i)};
    dm.features.values.append_row(x);
    std::vector<double> y(kHoursPerDay, static_cast<double>(i));
    dm.targets.append_row(y);
    dm.provenance.push_back({first + i});
  }
  return dm;
}

}  // namespace

TEST_CASE("split_by_dates counts rows by calendar") {
  // Calendar-count oracle: rows per partition = days in range that have a row.
  Date start(2017, 1, 1);
  // Rows run from the fourth day to the end of the test range: 3 warm-up days have no row.
  auto dm = calendar_matrix(start + 3, static_cast<int>(Date(2019, 12, 31) - start) + 1 - 3);
  SplitSpec spec{{Date(2017, 1, 1), Date(2018, 12, 31)}, {Date(2019, 1, 1), Date(2019, 6, 30)},
                 {Date(2019, 7, 1), Date(2019, 12, 31)}};
  auto s = split_by_dates(dm, spec);
  CHECK(s.train.rows() == static_cast<std::size_t>((Date(2018, 12, 31) - Date(2017, 1, 1) + 1) - 3));
  CHECK(s.val.rows() == 181);
  CHECK(s.test.rows() == 184);
  CHECK(s.train.rows() + s.val.rows() + s.test.rows() + s.dropped == dm.rows());

  SplitSpec empty_val{{Date(2017, 1, 1), Date(2018, 12, 31)}, {Date(2030, 1, 1), Date(2030, 2, 1)},
                      {Date(2031, 1, 1), Date(2031, 2, 1)}};
  CHECK_ERRC(split_by_dates(dm, empty_val), Errc::EmptyPartition);
  SplitSpec overlapping{{Date(2017, 1, 1), Date(2018, 12, 31)}, {Date(2018, 6, 1), Date(2019, 6, 30)},
                        {Date(2019, 7, 1), Date(2019, 12, 31)}};
  CHECK_ERRC(overlapping.validate(), Errc::InvalidArgument);
}

TEST_CASE("split property: disjoint partitions covering every row") {
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    Date first(2015, 1, 1);
    const int days = 60 + static_cast<int>(rng.below(300));
    auto dm = calendar_matrix(first, days);
    const int a = 10 + static_cast<int>(rng.below(static_cast<std::uint64_t>(days / 3)));
    const int b = a + 5 + static_cast<int>(rng.below(10));
    const int c = b + 5 + static_cast<int>(rng.below(10));
    SplitSpec spec{{first, first + a}, {first + a + 1, first + b}, {first + b + 1, first + c}};
    auto s = split_by_dates(dm, spec);
    std::set<Date> seen;
    for (const auto* part : {&s.train, &s.val, &s.test}) {
      for (Date d : part->issue_dates) CHECK(seen.insert(d).second);
    }
    CHECK(seen.size() + s.dropped == dm.rows());
  }
}

TEST_CASE("leakage guard rejects rows that read future data") {
  auto dm = calendar_matrix(Date(2020, 1, 1), 5);
  CHECK_NOTHROW(dm.assert_no_leakage());
  dm.provenance[2].max_source_date = dm.issue_dates[2] + 1;
  CHECK_ERRC(dm.assert_no_leakage(), Errc::Internal);
}

TEST_CASE("probabilistic forecasts require positive sigma") {
  ProbForecastSet f{{Date(2020, 1, 1)}, Matrix(1, kHoursPerDay, 100.0), Matrix(1, kHoursPerDay, 1.0)};
  CHECK_NOTHROW(f.validate());
  f.sigma(0, 3) = 0.0;
  CHECK_ERRC(f.validate(), Errc::NonPositiveSigma);
}

TEST_CASE("rng streams are reproducible and task seeds differ by coordinate") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  CHECK(task_seed(1, {2, 3}) == task_seed(1, {2, 3}));
  CHECK(task_seed(1, {2, 3}) != task_seed(1, {3, 2}));
  CHECK(task_seed(1, {2}) != task_seed(2, {2}));
  Rng u(9);
  double total = 0.0, total_sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    double z = u.normal();
    total += z;
    total_sq += z * z;
  }
  CHECK(std::abs(total / n) < 0.01);
  CHECK(std::abs(total_sq / n - 1.0) < 0.02);
}

TEST_CASE("distribution functions match reference values") {
  // Values from tests/oracles/reference_values.py (scipy).
  CHECK(stats::normal_cdf(1.3) == doctest::Approx(0.9031995154143897).epsilon(1e-12));
  CHECK(stats::normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-10));
  CHECK(stats::chi_squared_sf(8.0, 2) == doctest::Approx(0.018315638888734182).epsilon(1e-10));
  CHECK(stats::f_sf(3.2, 2, 40) == doctest::Approx(0.05138545607162816).epsilon(1e-9));
  CHECK(stats::student_t_two_sided(2.1, 9) == doctest::Approx(0.06511828241215198).epsilon(1e-9));
  for (double p : {1e-6, 0.01, 0.3, 0.5, 0.77, 0.999}) {
    CHECK(stats::normal_cdf(stats::normal_quantile(p)) == doctest::Approx(p).epsilon(1e-10));
  }
  std::vector<double> v{3, 1, 2, 2};
  auto r = stats::average_ranks(v);
  CHECK(r == std::vector<double>{4, 1, 2.5, 2.5});
}

TEST_CASE("csv reader handles quoting and reports lines") {
  auto doc = csv::parse("a,b\r\n1,\"x,\"\"y\"\"\"\n\"multi\nline\",2\n", "mem");
  REQUIRE(doc.records.size() == 2);
  CHECK(doc.records[0][1] == "x,\"y\"");
  CHECK(doc.records[1][0] == "multi\nline");
  CHECK(doc.lines[1] == 3);
  CHECK_ERRC(doc.require_header({"a", "c"}), Errc::SchemaError);
  CHECK_ERRC(csv::parse_double("1.5x", doc, 0), Errc::SchemaError);
  CHECK_ERRC(csv::read_file("/nonexistent/file.csv"), Errc::FileNotFound);

  std::ostringstream out;
  csv::Writer w(out);
  w.row({"plain", "needs,quote", "has\"quote"});
  CHECK(out.str() == "plain,\"needs,quote\",\"has\"\"quote\"\n");
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.0}) {
    CHECK(std::stod(csv::format_double(v)) == v);
  }
}

TEST_CASE("error categories map to exit statuses") {
  CHECK(errc_category(Errc::ConfigError) == ErrorCategory::Config);
  CHECK(errc_category(Errc::FileNotFound) == ErrorCategory::Data);
  CHECK(errc_category(Errc::SchemaError) == ErrorCategory::Data);
  CHECK(errc_category(Errc::Internal) == ErrorCategory::Internal);
  Error e(Errc::GapTooLarge, "demand:east");
  CHECK(std::string(e.what()).find("demand:east") != std::string::npos);
}
