#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace nrc::cli::svg {

namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 420;
constexpr double kLeft = 70;
constexpr double kRight = 130;
constexpr double kTop = 40;
constexpr double kBottom = 55;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct Scale {
  double lo, hi;
  bool log;
  double pix_lo, pix_hi;

  double operator()(double v) const {
    const double a = log ? std::log10(lo) : lo;
    const double b = log ? std::log10(hi) : hi;
    const double w = log ? std::log10(v) : v;
    const double f = b > a ? (w - a) / (b - a) : 0.5;
    return pix_lo + f * (pix_hi - pix_lo);
  }
};

std::pair<double, double> range_of(const std::vector<const std::vector<double>*>& vs, bool log) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto* v : vs) {
    for (double x : *v) {
      if (!std::isfinite(x) || (log && x <= 0.0)) continue;
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  }
  if (!std::isfinite(lo)) return {0.0, 1.0};
  if (hi == lo) {
    const double pad = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
    return log ? std::pair{lo / 2.0, hi * 2.0} : std::pair{lo - pad, hi + pad};
  }
  return {lo, hi};
}

void frame(std::ostringstream& os, const Axes& axes, const Scale& sx, const Scale& sy) {
  os << "<rect x='" << kLeft << "' y='" << kTop << "' width='" << kWidth - kLeft - kRight
     << "' height='" << kHeight - kTop - kBottom << "' fill='none' stroke='black'/>\n";
  os << "<text x='" << kWidth / 2 << "' y='22' text-anchor='middle' font-size='15'>" << axes.title
     << "</text>\n";
  os << "<text x='" << (kLeft + kWidth - kRight) / 2 << "' y='" << kHeight - 12
     << "' text-anchor='middle' font-size='13'>" << axes.xlabel << "</text>\n";
  os << "<text x='16' y='" << (kTop + kHeight - kBottom) / 2
     << "' text-anchor='middle' font-size='13' transform='rotate(-90 16 "
     << (kTop + kHeight - kBottom) / 2 << ")'>" << axes.ylabel << "</text>\n";
  for (int i = 0; i <= 4; ++i) {
    const double f = i / 4.0;
    const double xv = sx.log ? std::pow(10.0, std::log10(sx.lo) + f * std::log10(sx.hi / sx.lo))
                             : sx.lo + f * (sx.hi - sx.lo);
    const double yv = sy.log ? std::pow(10.0, std::log10(sy.lo) + f * std::log10(sy.hi / sy.lo))
                             : sy.lo + f * (sy.hi - sy.lo);
    os << "<text x='" << sx(xv) << "' y='" << kHeight - kBottom + 16
       << "' text-anchor='middle' font-size='11'>" << num(xv) << "</text>\n";
    os << "<text x='" << kLeft - 6 << "' y='" << sy(yv) + 4
       << "' text-anchor='end' font-size='11'>" << num(yv) << "</text>\n";
  }
}

}  // namespace

std::string line_plot(const Axes& axes, const std::vector<Series>& series) {
  std::vector<const std::vector<double>*> xs;
  std::vector<const std::vector<double>*> ys;
  for (const auto& s : series) {
    xs.push_back(&s.x);
    ys.push_back(&s.y);
  }
  const auto [x0, x1] = range_of(xs, axes.log_x);
  const auto [y0, y1] = range_of(ys, axes.log_y);
  const Scale sx{x0, x1, axes.log_x, kLeft, kWidth - kRight};
  const Scale sy{y0, y1, axes.log_y, kHeight - kBottom, kTop};

  std::ostringstream os;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth << "' height='" << kHeight
     << "' font-family='sans-serif'>\n<rect width='100%' height='100%' fill='white'/>\n";
  frame(os, axes, sx, sy);
  int legend = 0;
  for (const auto& s : series) {
    std::ostringstream pts;
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if ((axes.log_x && s.x[i] <= 0.0) || (axes.log_y && s.y[i] <= 0.0)) continue;
      if (s.markers) {
        os << "<circle cx='" << num(sx(s.x[i])) << "' cy='" << num(sy(s.y[i]))
           << "' r='3' fill='" << s.color << "'/>\n";
      } else {
        pts << num(sx(s.x[i])) << ',' << num(sy(s.y[i])) << ' ';
      }
    }
    if (!s.markers) {
      os << "<polyline fill='none' stroke='" << s.color << "' stroke-width='1.5' points='"
         << pts.str() << "'/>\n";
    }
    const double ly = kTop + 14 + 18 * legend++;
    os << "<rect x='" << kWidth - kRight + 10 << "' y='" << ly - 9
       << "' width='12' height='12' fill='" << s.color << "'/>\n";
    os << "<text x='" << kWidth - kRight + 28 << "' y='" << ly + 1 << "' font-size='12'>"
       << s.label << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string color_map(const Axes& axes, const std::vector<double>& x, const std::vector<double>& y,
                      const std::vector<double>& values) {
  const auto [x0, x1] = range_of({&x}, axes.log_x);
  const auto [y0, y1] = range_of({&y}, axes.log_y);
  const auto [v0, v1] = range_of({&values}, false);
  const Scale sx{x0, x1, axes.log_x, kLeft, kWidth - kRight};
  const Scale sy{y0, y1, axes.log_y, kHeight - kBottom, kTop};
  const double cw = (kWidth - kLeft - kRight) / static_cast<double>(std::max<std::size_t>(x.size(), 1));
  const double ch = (kHeight - kTop - kBottom) / static_cast<double>(std::max<std::size_t>(y.size(), 1));

  auto color = [&](double v) -> std::string {
    if (!std::isfinite(v)) return "#999999";
    const double f = v1 > v0 ? std::clamp((v - v0) / (v1 - v0), 0.0, 1.0) : 0.5;
    // dark blue -> yellow
    const int r = static_cast<int>(30 + 225 * f);
    const int g = static_cast<int>(30 + 200 * f);
    const int b = static_cast<int>(120 * (1.0 - f) + 20);
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return buf;
  };

  std::ostringstream os;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth << "' height='" << kHeight
     << "' font-family='sans-serif'>\n<rect width='100%' height='100%' fill='white'/>\n";
  for (std::size_t j = 0; j < y.size(); ++j) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      const std::size_t k = j * x.size() + i;
      if (k >= values.size()) break;
      os << "<rect x='" << num(kLeft + cw * i) << "' y='" << num(kHeight - kBottom - ch * (j + 1))
         << "' width='" << num(cw + 0.5) << "' height='" << num(ch + 0.5) << "' fill='"
         << color(values[k]) << "'/>\n";
    }
  }
  frame(os, axes, sx, sy);
  for (int i = 0; i <= 10; ++i) {
    const double f = i / 10.0;
    os << "<rect x='" << kWidth - kRight + 20 << "' y='" << num(kHeight - kBottom - 30 - f * 250)
       << "' width='20' height='26' fill='" << color(v0 + f * (v1 - v0)) << "'/>\n";
  }
  os << "<text x='" << kWidth - kRight + 46 << "' y='" << kHeight - kBottom - 10
     << "' font-size='11'>" << num(v0) << "</text>\n";
  os << "<text x='" << kWidth - kRight + 46 << "' y='" << kHeight - kBottom - 270
     << "' font-size='11'>" << num(v1) << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace nrc::cli::svg
