#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "loadscope/diagnostics.hpp"
#include "loadscope/errors.hpp"

namespace loadscope {

namespace {

constexpr double kWidth = 640, kHeight = 420, kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(Errc::Internal, "cannot write " + path.string());
  f << text;
}

std::string header(const std::string& title) {
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
    << "</text>\n";
  return s.str();
}

}  // namespace

std::string SvgPlot::render() const {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (double v : s.x) {
      if (std::isfinite(v)) x0 = std::min(x0, v), x1 = std::max(x1, v);
    }
    for (double v : s.y) {
      if (std::isfinite(v)) y0 = std::min(y0, v), y1 = std::max(y1, v);
    }
  }
  if (!(x0 <= x1)) x0 = 0, x1 = 1;
  if (!(y0 <= y1)) y0 = 0, y1 = 1;
  if (diagonal) {
    x0 = y0 = std::min(x0, y0);
    x1 = y1 = std::max(x1, y1);
  }
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return kTop + ph - (y - y0) / (y1 - y0) * ph; };

  std::ostringstream s;
  s << header(title);
  s << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    double xv = x0 + (x1 - x0) * i / 4.0, yv = y0 + (y1 - y0) * i / 4.0;
    s << "<text x=\"" << num(px(xv)) << "\" y=\"" << num(kTop + ph + 16) << "\" text-anchor=\"middle\">" << num(xv)
      << "</text>\n";
    s << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(py(yv) + 4) << "\" text-anchor=\"end\">" << num(yv)
      << "</text>\n";
  }
  s << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 10) << "\" text-anchor=\"middle\">"
    << escape(x_label) << "</text>\n";
  s << "<text transform=\"translate(16," << num(kTop + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
    << escape(y_label) << "</text>\n";
  if (diagonal) {
    s << "<line x1=\"" << num(px(x0)) << "\" y1=\"" << num(py(y0)) << "\" x2=\"" << num(px(x1)) << "\" y2=\""
      << num(py(y1)) << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
  }
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& ser = series[k];
    const char* colour = kPalette[k % std::size(kPalette)];
    const std::size_t n = std::min(ser.x.size(), ser.y.size());
    if (ser.scatter) {
      for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(ser.x[i]) || !std::isfinite(ser.y[i])) continue;
        s << "<circle cx=\"" << num(px(ser.x[i])) << "\" cy=\"" << num(py(ser.y[i])) << "\" r=\"2\" fill=\"" << colour
          << "\" fill-opacity=\"0.6\"/>\n";
      }
    } else {
      s << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < n; ++i) {
        if (std::isfinite(ser.x[i]) && std::isfinite(ser.y[i])) s << num(px(ser.x[i])) << "," << num(py(ser.y[i])) << " ";
      }
      s << "\"/>\n";
    }
    s << "<text x=\"" << num(kLeft + 8) << "\" y=\"" << num(kTop + 14 + 14.0 * static_cast<double>(k)) << "\" fill=\""
      << colour << "\">" << escape(ser.label) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

void SvgPlot::save(const std::filesystem::path& path) const { write_text(path, render()); }

std::string SvgHeatmap::render() const {
  const std::size_t rows = values.rows(), cols = values.cols();
  double scale = 0.0;
  for (double v : values.data()) {
    if (std::isfinite(v)) scale = std::max(scale, std::abs(v));
  }
  if (scale == 0.0) scale = 1.0;
  const double left = 110, top = kTop, pw = kWidth - left - kRight, ph = kHeight - kTop - kBottom;
  const double cw = cols ? pw / static_cast<double>(cols) : pw, ch = rows ? ph / static_cast<double>(rows) : ph;
  std::ostringstream s;
  s << header(title);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      double v = values(r, c);
      double t = std::isfinite(v) ? std::clamp(v / scale, -1.0, 1.0) : 0.0;
      int red = t < 0 ? 255 : static_cast<int>(255 * (1 - t));
      int green = static_cast<int>(255 * (1 - std::abs(t)) * 0.9 + 25);
      int blue = t > 0 ? 255 : static_cast<int>(255 * (1 + t));
      double x = left + cw * static_cast<double>(c), y = top + ch * static_cast<double>(r);
      s << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(cw) << "\" height=\"" << num(ch)
        << "\" fill=\"rgb(" << red << "," << green << "," << blue << ")\" stroke=\"white\"/>\n";
      s << "<text x=\"" << num(x + cw / 2) << "\" y=\"" << num(y + ch / 2 + 4) << "\" text-anchor=\"middle\">"
        << (std::isfinite(v) ? num(v) : std::string("")) << "</text>\n";
    }
    if (r < row_labels.size()) {
      s << "<text x=\"" << num(left - 6) << "\" y=\"" << num(top + ch * (static_cast<double>(r) + 0.5) + 4)
        << "\" text-anchor=\"end\">" << escape(row_labels[r]) << "</text>\n";
    }
  }
  for (std::size_t c = 0; c < cols && c < col_labels.size(); ++c) {
    s << "<text x=\"" << num(left + cw * (static_cast<double>(c) + 0.5)) << "\" y=\"" << num(top + ph + 16)
      << "\" text-anchor=\"middle\">" << escape(col_labels[c]) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

void SvgHeatmap::save(const std::filesystem::path& path) const { write_text(path, render()); }

}  // namespace loadscope
