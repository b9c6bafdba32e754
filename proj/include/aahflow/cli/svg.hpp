#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "aahflow/cli/output.hpp"
#include "aahflow/numerics.hpp"

namespace aahflow::cli {

inline constexpr std::string_view kSvgVersionComment = "<!-- aahflow 0.1.0 -->";

struct Rgb {
  int r = 0;
  int g = 0;
  int b = 0;
};

inline std::string hex(Rgb c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c.r, c.g, c.b);
  return buf;
}

/// 99th percentile of |v| over the finite entries; 0 if there are none.
inline double clip_level(const std::vector<double>& values) {
  std::vector<double> mags;
  mags.reserve(values.size());
  for (double v : values) {
    if (std::isfinite(v)) mags.push_back(std::abs(v));
  }
  if (mags.empty()) return 0.0;
  std::sort(mags.begin(), mags.end());
  const auto idx = static_cast<std::size_t>(std::ceil(0.99 * static_cast<double>(mags.size()))) - 1;
  return mags[std::min(idx, mags.size() - 1)];
}

/// Blue through white to red, symmetric about zero, saturating at +-clip.
inline Rgb diverging(double v, double clip) {
  if (!std::isfinite(v)) return {160, 160, 160};
  const double t = clip > 0.0 ? std::clamp(v / clip, -1.0, 1.0) : 0.0;
  const Rgb cold{33, 102, 172};
  const Rgb hot{178, 24, 43};
  const Rgb end = t < 0 ? cold : hot;
  const double u = std::abs(t);
  auto mix = [u](int white, int e) { return static_cast<int>(std::lround(white + (e - white) * u)); };
  return {mix(247, end.r), mix(247, end.g), mix(247, end.b)};
}

/// Maps data coordinates onto a square canvas with a margin.
class SvgCanvas {
 public:
  SvgCanvas(std::ostream& out, Interval xr, Interval yr, int size = 600, int margin = 40)
      : out_(out), xr_(xr), yr_(yr), size_(size), margin_(margin) {
    const int total = size + 2 * margin;
    out_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n" << kSvgVersionComment << '\n';
    out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << total << "\" height=\"" << total
         << "\" viewBox=\"0 0 " << total << ' ' << total << "\">\n";
    out_ << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  }

  double px(double x) const { return margin_ + (x - xr_.lo) / xr_.width() * size_; }
  double py(double y) const { return margin_ + size_ - (y - yr_.lo) / yr_.width() * size_; }
  double scale_x() const { return size_ / xr_.width(); }
  double scale_y() const { return size_ / yr_.width(); }

  void cell(double x, double y, double dx, double dy, Rgb fill) {
    out_ << "<rect x=\"" << num(px(x - 0.5 * dx)) << "\" y=\"" << num(py(y + 0.5 * dy)) << "\" width=\""
         << num(dx * scale_x()) << "\" height=\"" << num(dy * scale_y()) << "\" fill=\"" << hex(fill) << "\"/>\n";
  }

  /// Arrow from (x, y) along (u, v) in data units.
  void arrow(double x, double y, double u, double v) {
    const double x0 = px(x);
    const double y0 = py(y);
    const double x1 = px(x + u);
    const double y1 = py(y + v);
    const double len = std::hypot(x1 - x0, y1 - y0);
    if (!(len > 0.5)) return;
    const double ux = (x1 - x0) / len;
    const double uy = (y1 - y0) / len;
    const double head = std::min(6.0, 0.4 * len);
    const double hx = x1 - head * ux;
    const double hy = y1 - head * uy;
    out_ << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x1) << "\" y2=\"" << num(y1)
         << "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
    out_ << "<polygon points=\"" << num(x1) << ',' << num(y1) << ' ' << num(hx - 0.5 * head * uy) << ','
         << num(hy + 0.5 * head * ux) << ' ' << num(hx + 0.5 * head * uy) << ',' << num(hy - 0.5 * head * ux)
         << "\" fill=\"#000000\"/>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& pts, Rgb stroke) {
    out_ << "<polyline fill=\"none\" stroke=\"" << hex(stroke) << "\" stroke-width=\"1\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      out_ << (i ? " " : "") << num(px(pts[i].first)) << ',' << num(py(pts[i].second));
    }
    out_ << "\"/>\n";
  }

  void label(double px_x, double px_y, std::string_view text, int font = 12) {
    out_ << "<text x=\"" << num(px_x) << "\" y=\"" << num(px_y) << "\" font-family=\"sans-serif\" font-size=\""
         << font << "\">" << text << "</text>\n";
  }

  void frame(std::string_view x_label, std::string_view y_label, std::string_view title) {
    out_ << "<rect x=\"" << margin_ << "\" y=\"" << margin_ << "\" width=\"" << size_ << "\" height=\"" << size_
         << "\" fill=\"none\" stroke=\"#000000\"/>\n";
    label(margin_ + 0.5 * size_, margin_ + size_ + 28, x_label);
    label(8, margin_ + 0.5 * size_, y_label);
    label(margin_, 24, title, 14);
    label(margin_ - 4, margin_ + size_ + 14, format_short(xr_.lo), 10);
    label(margin_ + size_ - 16, margin_ + size_ + 14, format_short(xr_.hi), 10);
    label(4, margin_ + size_, format_short(yr_.lo), 10);
    label(4, margin_ + 8, format_short(yr_.hi), 10);
  }

  void finish() { out_ << "</svg>\n"; }

 private:
  static std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
  }
  static std::string format_short(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
  }

  std::ostream& out_;
  Interval xr_;
  Interval yr_;
  int size_;
  int margin_;
};

}  // namespace aahflow::cli
