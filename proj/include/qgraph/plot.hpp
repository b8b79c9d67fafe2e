#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "qgraph/physics.hpp"

namespace qgraph::plot {

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

inline const char* kSweepHeader =
    "E_over_V0,p_up_single,p_dn_single,p_up_double,p_dn_double,"
    "q_low_single,q_up_single,q_low_double,q_up_double,superactivated\n";

inline std::string sweep_csv(const std::vector<physics::SweepRow>& rows) {
  std::string out = kSweepHeader;
  out.reserve(rows.size() * 200);
  for (const auto& r : rows) {
    for (double v : {r.energy_ratio, r.single.p_up(), r.single.p_down(), r.dbl.p_up(), r.dbl.p_down(),
                     r.single_bounds.q_low, r.single_bounds.q_up, r.double_bounds.q_low,
                     r.double_bounds.q_up}) {
      out += fmt("%.12e", v);
      out += ',';
    }
    out += r.superactivated ? "1\n" : "0\n";
  }
  return out;
}

inline std::string advantage_csv(const physics::AdvantageMap& m) {
  std::string out = "epsilon,E_over_V0,q_low_double_minus_q_up_single\n";
  for (std::size_t ie = 0; ie < m.epsilons.size(); ++ie)
    for (std::size_t k = 0; k < m.energies.size(); ++k)
      out += fmt("%.12e", m.epsilons[ie]) + "," + fmt("%.12e", m.energies[k]) + "," +
             fmt("%.12e", m.at(ie, k)) + "\n";
  return out;
}

struct Series {
  std::string label;
  std::string color;
  std::vector<double> y;
  bool dashed = false;
};

struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<double> x;
  std::vector<Series> series;
  std::vector<std::pair<double, double>> windows;  // shaded x intervals
  std::string window_label;
  double y_min = 0.0;
  double y_max = 1.0;
};

/// Evenly spaced tick values covering [lo, hi] at a 1/2/5 step.
inline std::vector<double> ticks(double lo, double hi, int target = 6) {
  const double span = hi - lo;
  if (!(span > 0.0)) return {lo};
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  std::vector<double> out;
  for (double t = std::ceil(lo / step - 1e-9) * step; t <= hi + step * 1e-9; t += step)
    out.push_back(std::abs(t) < step * 1e-9 ? 0.0 : t);
  return out;
}

inline std::string tick_label(double v) {
  std::string s = fmt("%.3f", v);
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return s;
}

inline std::string escape(const std::string& s) {
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

namespace detail {

struct Frame {
  double left = 70, top = 40, width = 640, height = 360;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;

  double px(double x) const { return left + (x - x0) / (x1 - x0) * width; }
  double py(double y) const { return top + height - (y - y0) / (y1 - y0) * height; }
};

inline std::string axes(const Frame& f, const std::string& title, const std::string& xl,
                        const std::string& yl) {
  std::string s;
  s += "<rect x=\"" + fmt("%.2f", f.left) + "\" y=\"" + fmt("%.2f", f.top) + "\" width=\"" +
       fmt("%.2f", f.width) + "\" height=\"" + fmt("%.2f", f.height) +
       "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : ticks(f.x0, f.x1)) {
    const double x = f.px(t);
    s += "<line x1=\"" + fmt("%.2f", x) + "\" y1=\"" + fmt("%.2f", f.top + f.height) + "\" x2=\"" +
         fmt("%.2f", x) + "\" y2=\"" + fmt("%.2f", f.top + f.height + 5) + "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + fmt("%.2f", x) + "\" y=\"" + fmt("%.2f", f.top + f.height + 20) +
         "\" text-anchor=\"middle\">" + tick_label(t) + "</text>\n";
  }
  for (double t : ticks(f.y0, f.y1)) {
    const double y = f.py(t);
    s += "<line x1=\"" + fmt("%.2f", f.left - 5) + "\" y1=\"" + fmt("%.2f", y) + "\" x2=\"" +
         fmt("%.2f", f.left) + "\" y2=\"" + fmt("%.2f", y) + "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + fmt("%.2f", f.left - 8) + "\" y=\"" + fmt("%.2f", y + 4) +
         "\" text-anchor=\"end\">" + tick_label(t) + "</text>\n";
  }
  s += "<text x=\"" + fmt("%.2f", f.left + f.width / 2) + "\" y=\"24\" text-anchor=\"middle\">" +
       escape(title) + "</text>\n";
  s += "<text x=\"" + fmt("%.2f", f.left + f.width / 2) + "\" y=\"" + fmt("%.2f", f.top + f.height + 40) +
       "\" text-anchor=\"middle\">" + escape(xl) + "</text>\n";
  s += "<text x=\"18\" y=\"" + fmt("%.2f", f.top + f.height / 2) +
       "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " + fmt("%.2f", f.top + f.height / 2) +
       ")\">" + escape(yl) + "</text>\n";
  return s;
}

inline std::string header(double w, double h) {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" "
         "version=\"1.1\" width=\"" + fmt("%.0f", w) + "\" height=\"" + fmt("%.0f", h) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

}  // namespace detail

inline std::string line_svg(const LinePlot& p) {
  if (p.x.size() < 2) throw InvalidInput("line_svg: need at least two x values");
  detail::Frame f;
  f.x0 = p.x.front();
  f.x1 = p.x.back();
  f.y0 = p.y_min;
  f.y1 = p.y_max;
  std::string s = detail::header(900, 460);
  for (const auto& [a, b] : p.windows) {
    s += "<rect x=\"" + fmt("%.2f", f.px(a)) + "\" y=\"" + fmt("%.2f", f.top) + "\" width=\"" +
         fmt("%.2f", std::max(f.px(b) - f.px(a), 1.0)) + "\" height=\"" + fmt("%.2f", f.height) +
         "\" fill=\"#f4a3a3\" fill-opacity=\"0.5\"/>\n";
  }
  s += detail::axes(f, p.title, p.x_label, p.y_label);
  for (const auto& ser : p.series) {
    s += "<polyline fill=\"none\" stroke=\"" + ser.color + "\" stroke-width=\"1.2\"";
    if (ser.dashed) s += " stroke-dasharray=\"5,3\"";
    s += " points=\"";
    for (std::size_t i = 0; i < p.x.size(); ++i) {
      const double y = std::clamp(ser.y[i], f.y0, f.y1);
      s += fmt("%.2f", f.px(p.x[i])) + "," + fmt("%.2f", f.py(y)) + (i + 1 < p.x.size() ? " " : "");
    }
    s += "\"/>\n";
  }
  double ly = f.top + 10;
  const double lx = f.left + f.width + 15;
  for (const auto& ser : p.series) {
    s += "<line x1=\"" + fmt("%.2f", lx) + "\" y1=\"" + fmt("%.2f", ly) + "\" x2=\"" + fmt("%.2f", lx + 20) +
         "\" y2=\"" + fmt("%.2f", ly) + "\" stroke=\"" + ser.color + "\" stroke-width=\"2\"" +
         (ser.dashed ? " stroke-dasharray=\"5,3\"" : "") + "/>\n";
    s += "<text x=\"" + fmt("%.2f", lx + 26) + "\" y=\"" + fmt("%.2f", ly + 4) + "\">" + escape(ser.label) +
         "</text>\n";
    ly += 20;
  }
  if (!p.windows.empty() && !p.window_label.empty()) {
    s += "<rect x=\"" + fmt("%.2f", lx) + "\" y=\"" + fmt("%.2f", ly - 6) +
         "\" width=\"20\" height=\"12\" fill=\"#f4a3a3\" fill-opacity=\"0.5\"/>\n";
    s += "<text x=\"" + fmt("%.2f", lx + 26) + "\" y=\"" + fmt("%.2f", ly + 4) + "\">" +
         escape(p.window_label) + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

/// Maximal runs of consecutive x values where flag is set, as [x_first, x_last].
inline std::vector<std::pair<double, double>> windows(const std::vector<double>& x,
                                                      const std::vector<bool>& flag) {
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!flag[i]) continue;
    std::size_t j = i;
    while (j + 1 < x.size() && flag[j + 1]) ++j;
    out.emplace_back(x[i], x[j]);
    i = j;
  }
  return out;
}

/// Diverging colour for v in [-1, 1]: blue below zero, red above.
inline std::string diverging(double v) {
  v = std::clamp(v, -1.0, 1.0);
  int r = 255, g = 255, b = 255;
  if (v > 0) {
    g = b = static_cast<int>(std::lround(255 * (1 - v)));
  } else {
    r = g = static_cast<int>(std::lround(255 * (1 + v)));
  }
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

inline std::string heatmap_svg(const physics::AdvantageMap& m, const std::string& title) {
  detail::Frame f;
  f.x0 = m.energies.front();
  f.x1 = m.energies.back();
  f.y0 = m.epsilons.front();
  f.y1 = m.epsilons.size() > 1 ? m.epsilons.back() : m.epsilons.front() + 1.0;
  const std::size_t ne = m.energies.size(), np = m.epsilons.size();
  double scale = 0.0;
  for (double v : m.values) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) scale = 1.0;
  std::string s = detail::header(900, 460);
  const double cw = f.width / static_cast<double>(ne);
  const double ch = f.height / static_cast<double>(np);
  for (std::size_t ie = 0; ie < np; ++ie) {
    for (std::size_t k = 0; k < ne; ++k) {
      s += "<rect x=\"" + fmt("%.2f", f.left + cw * static_cast<double>(k)) + "\" y=\"" +
           fmt("%.2f", f.top + f.height - ch * static_cast<double>(ie + 1)) + "\" width=\"" +
           fmt("%.2f", cw + 0.05) + "\" height=\"" + fmt("%.2f", ch + 0.05) + "\" fill=\"" +
           diverging(m.at(ie, k) / scale) + "\"/>\n";
    }
  }
  s += detail::axes(f, title, "E/V0", "epsilon");
  const double lx = f.left + f.width + 20;
  for (int i = 0; i <= 10; ++i) {
    const double v = 1.0 - 0.2 * i;
    s += "<rect x=\"" + fmt("%.2f", lx) + "\" y=\"" + fmt("%.2f", f.top + 30.0 * i) +
         "\" width=\"20\" height=\"30\" fill=\"" + diverging(v) + "\"/>\n";
  }
  s += "<text x=\"" + fmt("%.2f", lx + 26) + "\" y=\"" + fmt("%.2f", f.top + 12) + "\">+" +
       tick_label(scale) + "</text>\n";
  s += "<text x=\"" + fmt("%.2f", lx + 26) + "\" y=\"" + fmt("%.2f", f.top + 165) + "\">0</text>\n";
  s += "<text x=\"" + fmt("%.2f", lx + 26) + "\" y=\"" + fmt("%.2f", f.top + 325) + "\">-" +
       tick_label(scale) + "</text>\n";
  s += "</svg>\n";
  return s;
}

}  // namespace qgraph::plot
