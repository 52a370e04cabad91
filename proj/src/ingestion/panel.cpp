#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "loadscope/csv.hpp"
#include "loadscope/ingestion.hpp"

namespace loadscope {

namespace fs = std::filesystem;

const HourlyDemandSeries& AlignedPanel::demand_of(const std::string& region) const {
  auto it = demand.find(region);
  if (it == demand.end()) throw Error(Errc::UnmappedRegion, region);
  return it->second;
}

const HourlySeries& AlignedPanel::temperature_of_region(const std::string& region) const {
  auto c = region_city.find(region);
  if (c == region_city.end()) throw Error(Errc::UnmappedRegion, region);
  auto t = temperature.find(c->second);
  if (t == temperature.end()) throw Error(Errc::UnmappedRegion, region + " -> " + c->second);
  return t->second;
}

std::vector<std::string> AlignedPanel::regions() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : demand) out.push_back(name);
  return out;
}

bool AlignedPanel::is_holiday(const std::string& region, Date d) const { return !holiday_name(region, d).empty(); }

std::string AlignedPanel::holiday_name(const std::string& region, Date d) const {
  for (const auto& h : holidays) {
    if (h.date == d && h.region == region) return h.name;
  }
  return {};
}

bool AlignedPanel::same_data(const AlignedPanel& o) const {
  return span == o.span && demand == o.demand && temperature == o.temperature && region_city == o.region_city &&
         textual == o.textual && economics == o.economics && holidays == o.holidays;
}

PanelPaths PanelPaths::in_directory(const fs::path& dir) {
  auto optional = [&](const char* name) { return fs::exists(dir / name) ? dir / name : fs::path(); };
  return {dir / "demand.csv", dir / "temperature.csv", optional("text_features.csv"), optional("econ.csv"),
          optional("holidays.csv")};
}

HourlySeries regularize_hourly(const std::string& name, const std::vector<std::pair<HourStamp, double>>& points,
                               int max_gap, std::size_t& interpolated) {
  HourlySeries out;
  out.name = name;
  interpolated = 0;
  if (points.empty()) return out;
  out.start = points.front().first;
  out.values.push_back(points.front().second);
  for (std::size_t i = 1; i < points.size(); ++i) {
    std::int64_t step = points[i].first.hours - points[i - 1].first.hours;
    std::int64_t missing = step - 1;
    if (missing > max_gap) {
      throw Error(Errc::GapTooLarge, name + " missing " + std::to_string(missing) + " hours after " +
                                         points[i - 1].first.to_string());
    }
    double a = points[i - 1].second;
    double b = points[i].second;
    for (std::int64_t k = 1; k <= missing; ++k) {
      out.values.push_back(a + (b - a) * static_cast<double>(k) / static_cast<double>(step));
      ++interpolated;
    }
    out.values.push_back(b);
  }
  return out;
}

DailyTable forward_fill_daily(const std::vector<Date>& dates, const NamedMatrix& rows, DateRange span) {
  DailyTable out;
  out.first = span.first;
  out.table.names = rows.names;
  out.table.values = Matrix(static_cast<std::size_t>(span.days()), rows.cols());
  std::size_t next = 0;
  std::ptrdiff_t current = -1;
  for (Date d = span.first; d <= span.last; ++d) {
    while (next < dates.size() && dates[next] <= d) current = static_cast<std::ptrdiff_t>(next++);
    if (current < 0) {
      throw Error(Errc::SchemaError, "no publication on or before " + d.to_string() + " to forward-fill from");
    }
    auto src = rows.values.row(static_cast<std::size_t>(current));
    std::copy(src.begin(), src.end(), out.table.values.row(out.row_of(d)).begin());
  }
  return out;
}

namespace {

using Points = std::map<std::string, std::vector<std::pair<HourStamp, double>>>;

Points read_hourly(const fs::path& path, const std::vector<std::string>& header, bool positive) {
  auto doc = csv::read_file(path);
  doc.require_header(header);
  Points points;
  for (std::size_t r = 0; r < doc.records.size(); ++r) {
    const auto& rec = doc.records[r];
    HourStamp ts;
    try {
      ts = HourStamp::parse(rec[1]);
    } catch (const Error& e) {
      throw Error(Errc::SchemaError, doc.source + ":" + std::to_string(doc.lines[r]) + ": " + e.what());
    }
    double v = csv::parse_double(rec[2], doc, r);
    if (!std::isfinite(v) || (positive && !(v > 0.0))) {
      throw Error(Errc::SchemaError, doc.source + ":" + std::to_string(doc.lines[r]) + ": value must be finite" +
                                         (positive ? " and > 0" : ""));
    }
    points[rec[0]].emplace_back(ts, v);
  }
  for (auto& [key, pts] : points) {
    std::stable_sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < pts.size(); ++i) {
      if (pts[i].first == pts[i - 1].first) {
        throw Error(Errc::SchemaError, doc.source + ": duplicate timestamp " + pts[i].first.to_string() + " for " + key);
      }
    }
  }
  return points;
}

HourlySeries trim(const HourlySeries& s, DateRange span) {
  HourlySeries out;
  out.name = s.name;
  out.start = HourStamp::from(span.first, 0);
  auto offset = static_cast<std::size_t>(out.start.hours - s.start.hours);
  auto count = static_cast<std::size_t>(span.days() * kHoursPerDay);
  out.values.assign(s.values.begin() + static_cast<std::ptrdiff_t>(offset),
                    s.values.begin() + static_cast<std::ptrdiff_t>(offset + count));
  return out;
}

bool present(const fs::path& p) { return !p.empty(); }

}  // namespace

AlignedPanel load_panel(const PanelPaths& paths, const std::map<std::string, std::string>& region_city,
                        const LoadOptions& options) {
  AlignedPanel panel;
  panel.region_city = region_city;

  auto demand_points = read_hourly(paths.demand, {"region", "timestamp_utc", "demand_mw"}, true);
  auto temp_points = read_hourly(paths.temperature, {"city", "timestamp_utc", "temp_c"}, false);
  if (demand_points.empty()) throw Error(Errc::SchemaError, paths.demand.string() + ": no demand rows");

  std::map<std::string, HourlySeries> demand, temperature;
  for (const auto& [region, pts] : demand_points) {
    if (!region_city.contains(region)) throw Error(Errc::UnmappedRegion, region);
    std::size_t filled = 0;
    demand[region] = regularize_hourly("demand:" + region, pts, options.max_gap_hours, filled);
    demand[region].name = region;
    panel.interpolated_hours["demand:" + region] = filled;
  }
  for (const auto& [region, city] : region_city) {
    if (!demand.contains(region)) continue;
    if (!temp_points.contains(city)) {
      throw Error(Errc::UnmappedRegion, region + " maps to city '" + city + "' absent from temperature file");
    }
  }
  for (const auto& [city, pts] : temp_points) {
    bool used = false;
    for (const auto& [region, c] : region_city) used = used || (c == city && demand.contains(region));
    if (!used) continue;
    std::size_t filled = 0;
    temperature[city] = regularize_hourly("temperature:" + city, pts, options.max_gap_hours, filled);
    temperature[city].name = city;
    panel.interpolated_hours["temperature:" + city] = filled;
  }

  Date first = demand.begin()->second.first_full_day();
  Date last = demand.begin()->second.last_full_day();
  auto widen = [&](const HourlySeries& s) {
    first = std::max(first, s.first_full_day());
    last = std::min(last, s.last_full_day());
  };
  for (const auto& [_, s] : demand) widen(s);
  for (const auto& [_, s] : temperature) widen(s);
  if (last < first) throw Error(Errc::SchemaError, "demand and temperature files share no complete day");
  panel.span = {first, last};
  for (const auto& [k, s] : demand) panel.demand[k] = trim(s, panel.span);
  for (const auto& [k, s] : temperature) panel.temperature[k] = trim(s, panel.span);

  // Textual features: long format, reindexed daily; days without news carry 0.
  panel.textual.first = panel.span.first;
  panel.textual.table.values = Matrix(static_cast<std::size_t>(panel.span.days()), 0);
  if (present(paths.text_features)) {
    auto doc = csv::read_file(paths.text_features);
    doc.require_header({"date", "feature", "value"});
    std::set<std::string> names;
    for (const auto& rec : doc.records) names.insert(rec[1]);
    panel.textual.table.names.assign(names.begin(), names.end());
    panel.textual.table.values = Matrix(static_cast<std::size_t>(panel.span.days()), names.size(), 0.0);
    for (std::size_t r = 0; r < doc.records.size(); ++r) {
      const auto& rec = doc.records[r];
      Date d;
      try {
        d = Date::parse(rec[0]);
      } catch (const Error& e) {
        throw Error(Errc::SchemaError, doc.source + ":" + std::to_string(doc.lines[r]) + ": " + e.what());
      }
      double v = csv::parse_double(rec[2], doc, r);
      if (!std::isfinite(v)) throw Error(Errc::SchemaError, doc.source + ":" + std::to_string(doc.lines[r]) + ": non-finite");
      if (!panel.span.contains(d)) continue;
      panel.textual.table.values(panel.textual.row_of(d), panel.textual.table.index_of(rec[1])) = v;
    }
  }

  panel.economics.first = panel.span.first;
  panel.economics.table.values = Matrix(static_cast<std::size_t>(panel.span.days()), 0);
  if (present(paths.econ)) {
    auto doc = csv::read_file(paths.econ);
    doc.require_header({"date", "gdp", "inflation", "unemployment"});
    std::vector<std::pair<Date, std::vector<double>>> rows;
    for (std::size_t r = 0; r < doc.records.size(); ++r) {
      const auto& rec = doc.records[r];
      Date d;
      try {
        d = Date::parse(rec[0]);
      } catch (const Error& e) {
        throw Error(Errc::SchemaError, doc.source + ":" + std::to_string(doc.lines[r]) + ": " + e.what());
      }
      rows.push_back({d, {csv::parse_double(rec[1], doc, r), csv::parse_double(rec[2], doc, r),
                          csv::parse_double(rec[3], doc, r)}});
    }
    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    if (!rows.empty()) {
      std::vector<Date> dates;
      NamedMatrix values{kEconomicsColumns, Matrix(0, 3)};
      for (const auto& [d, v] : rows) {
        dates.push_back(d);
        values.values.append_row(v);
      }
      try {
        panel.economics = forward_fill_daily(dates, values, panel.span);
      } catch (const Error& e) {
        throw Error(Errc::SchemaError, paths.econ.string() + ": " + e.what());
      }
    }
  }

  if (present(paths.holidays)) {
    auto doc = csv::read_file(paths.holidays);
    doc.require_header({"region", "date", "name"});
    for (std::size_t r = 0; r < doc.records.size(); ++r) {
      const auto& rec = doc.records[r];
      try {
        panel.holidays.push_back({rec[0], Date::parse(rec[1]), rec[2]});
      } catch (const Error& e) {
        throw Error(Errc::SchemaError, doc.source + ":" + std::to_string(doc.lines[r]) + ": " + e.what());
      }
    }
    std::sort(panel.holidays.begin(), panel.holidays.end());
  }
  return panel;
}

void write_panel(const AlignedPanel& panel, const fs::path& dir) {
  fs::create_directories(dir);
  const PanelPaths paths{dir / "demand.csv", dir / "temperature.csv", dir / "text_features.csv", dir / "econ.csv",
                         dir / "holidays.csv"};
  {
    csv::FileWriter w(paths.demand);
    w.row({"region", "timestamp_utc", "demand_mw"});
    for (const auto& [region, s] : panel.demand) {
      for (std::size_t i = 0; i < s.values.size(); ++i) {
        w.row({region, HourStamp{s.start.hours + static_cast<std::int64_t>(i)}.to_string(),
               csv::format_double(s.values[i])});
      }
    }
  }
  {
    csv::FileWriter w(paths.temperature);
    w.row({"city", "timestamp_utc", "temp_c"});
    for (const auto& [city, s] : panel.temperature) {
      for (std::size_t i = 0; i < s.values.size(); ++i) {
        w.row({city, HourStamp{s.start.hours + static_cast<std::int64_t>(i)}.to_string(),
               csv::format_double(s.values[i])});
      }
    }
  }
  {
    csv::FileWriter w(paths.text_features);
    w.row({"date", "feature", "value"});
    for (std::size_t r = 0; r < panel.textual.days(); ++r) {
      Date d = panel.textual.first + static_cast<std::int64_t>(r);
      for (std::size_t c = 0; c < panel.textual.table.cols(); ++c) {
        w.row({d.to_string(), panel.textual.table.names[c], csv::format_double(panel.textual.table.values(r, c))});
      }
    }
  }
  {
    csv::FileWriter w(paths.econ);
    w.row({"date", "gdp", "inflation", "unemployment"});
    if (panel.economics.table.cols() == 3) {
      for (std::size_t r = 0; r < panel.economics.days(); ++r) {
        auto row = panel.economics.table.values.row(r);
        w.row({(panel.economics.first + static_cast<std::int64_t>(r)).to_string(), csv::format_double(row[0]),
               csv::format_double(row[1]), csv::format_double(row[2])});
      }
    }
  }
  {
    csv::FileWriter w(paths.holidays);
    w.row({"region", "date", "name"});
    for (const auto& h : panel.holidays) w.row({h.region, h.date.to_string(), h.name});
  }
}

}  // namespace loadscope
