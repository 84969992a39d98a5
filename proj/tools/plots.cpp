#include "plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "regx/errors.hpp"
#include "regx/text_io.hpp"

namespace regx::plots {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 150, kTop = 40, kBottom = 55;
const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string num(double v, const char* f = "%.2f") {
  char buf[48];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string tick(double v) {
  const double a = std::abs(v);
  if (a != 0.0 && (a < 1e-2 || a >= 1e4)) return num(v, "%.0e");
  return num(v, "%.3g");
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void settle() {
    if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
  }
};

}  // namespace

std::string render_svg(const Figure& fig) {
  Range xr, yr;
  for (const auto& s : fig.series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      xr.add(fig.log_x ? std::log10(s.x[i]) : s.x[i]);
      const double e = i < s.err.size() ? s.err[i] : 0.0;
      yr.add(s.y[i] - e);
      yr.add(s.y[i] + e);
    }
  }
  if (fig.style == Style::bars) {
    yr.add(0.0);
    xr.lo -= 0.5;
    xr.hi += 0.5;
  }
  xr.settle();
  yr.settle();
  const double pad = 0.05 * (yr.hi - yr.lo);
  if (!(fig.style == Style::bars && yr.lo == 0.0)) yr.lo -= pad;
  yr.hi += pad;

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) {
    const double v = fig.log_x ? std::log10(x) : x;
    return kLeft + (v - xr.lo) / (xr.hi - xr.lo) * pw;
  };
  auto py = [&](double y) { return kTop + (yr.hi - y) / (yr.hi - yr.lo) * ph; };

  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth, "%.0f") +
                  "\" height=\"" + num(kHeight, "%.0f") +
                  "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(kLeft + pw / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
       escape(fig.title) + "</text>\n";
  s += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(pw) +
       "\" height=\"" + num(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int k = 0; k <= 4; ++k) {
    const double v = yr.lo + (yr.hi - yr.lo) * k / 4.0;
    s += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(py(v) + 4) +
         "\" text-anchor=\"end\">" + tick(v) + "</text>\n";
  }
  if (fig.style == Style::bars) {
    for (std::size_t i = 0; i < fig.categories.size(); ++i) {
      s += "<text x=\"" + num(px(static_cast<double>(i))) + "\" y=\"" + num(kTop + ph + 18) +
           "\" text-anchor=\"middle\">" + escape(fig.categories[i]) + "</text>\n";
    }
  } else {
    for (int k = 0; k <= 4; ++k) {
      const double v = xr.lo + (xr.hi - xr.lo) * k / 4.0;
      const double label = fig.log_x ? std::pow(10.0, v) : v;
      s += "<text x=\"" + num(kLeft + pw * k / 4.0) + "\" y=\"" + num(kTop + ph + 18) +
           "\" text-anchor=\"middle\">" + tick(label) + "</text>\n";
    }
  }
  s += "<text x=\"" + num(kLeft + pw / 2) + "\" y=\"" + num(kHeight - 12) +
       "\" text-anchor=\"middle\">" + escape(fig.x_label) + "</text>\n";
  s += "<text transform=\"translate(18," + num(kTop + ph / 2) +
       ") rotate(-90)\" text-anchor=\"middle\">" + escape(fig.y_label) + "</text>\n";

  const double nser = static_cast<double>(std::max<std::size_t>(fig.series.size(), 1));
  for (std::size_t k = 0; k < fig.series.size(); ++k) {
    const auto& ser = fig.series[k];
    const std::string color = kColors[k % std::size(kColors)];
    if (fig.style == Style::lines) {
      std::string pts;
      for (std::size_t i = 0; i < ser.x.size(); ++i) {
        if (!std::isfinite(ser.y[i])) continue;
        pts += num(px(ser.x[i])) + "," + num(py(ser.y[i])) + " ";
      }
      s += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\" points=\"" +
           pts + "\"/>\n";
    }
    for (std::size_t i = 0; i < ser.x.size(); ++i) {
      if (!std::isfinite(ser.y[i])) continue;
      if (fig.style == Style::bars) {
        const double slot = pw / (xr.hi - xr.lo) * 0.8;
        const double w = slot / nser;
        const double x0 = px(ser.x[i]) - slot / 2 + w * static_cast<double>(k);
        const double y0 = py(std::max(ser.y[i], 0.0)), y1 = py(std::min(ser.y[i], 0.0));
        s += "<rect x=\"" + num(x0) + "\" y=\"" + num(y0) + "\" width=\"" + num(w) +
             "\" height=\"" + num(y1 - y0) + "\" fill=\"" + color + "\"/>\n";
        if (i < ser.err.size()) {
          const double cx = x0 + w / 2;
          s += "<line x1=\"" + num(cx) + "\" x2=\"" + num(cx) + "\" y1=\"" +
               num(py(ser.y[i] - ser.err[i])) + "\" y2=\"" + num(py(ser.y[i] + ser.err[i])) +
               "\" stroke=\"black\"/>\n";
        }
      } else {
        s += "<circle cx=\"" + num(px(ser.x[i])) + "\" cy=\"" + num(py(ser.y[i])) +
             "\" r=\"2.5\" fill=\"" + color + "\"/>\n";
      }
    }
    const double ly = kTop + 14 + 18 * static_cast<double>(k);
    s += "<rect x=\"" + num(kLeft + pw + 12) + "\" y=\"" + num(ly - 9) +
         "\" width=\"10\" height=\"10\" fill=\"" + color + "\"/>\n";
    s += "<text x=\"" + num(kLeft + pw + 28) + "\" y=\"" + num(ly) + "\">" + escape(ser.name) +
         "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

std::vector<std::filesystem::path> write_figure(const Figure& fig,
                                                const std::filesystem::path& dir,
                                                const std::string& stem) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  for (const auto& ser : fig.series) {
    if (ser.x.size() != ser.y.size()) {
      throw ConformanceError("plot series '" + ser.name + "' has mismatched columns");
    }
    std::string body = "# " + fig.x_label + "\t" + fig.y_label + "\n";
    for (std::size_t i = 0; i < ser.x.size(); ++i) {
      body += io::format_real(ser.x[i]) + "\t" + io::format_real(ser.y[i]);
      if (i < ser.err.size()) body += "\t" + io::format_real(ser.err[i]);
      body += '\n';
    }
    auto path = dir / (stem + "_" + ser.name + ".dat");
    io::write_file(path, body);
    written.push_back(std::move(path));
  }
  auto svg = dir / (stem + ".svg");
  io::write_file(svg, render_svg(fig));
  written.push_back(std::move(svg));
  return written;
}

}  // namespace regx::plots
