#include "motioncred/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace motioncred::svg {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

struct Frame {
  double x0, y0, w, h, y_max;
  double y(double v) const { return y0 + h - std::clamp(v / y_max, 0.0, 1.0) * h; }
};

void header(std::ostringstream& o, double width, double height, const std::string& title) {
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(title)
    << "</text>\n";
}

void axes(std::ostringstream& o, const Frame& f, const std::string& y_label) {
  o << "<line x1=\"" << num(f.x0) << "\" y1=\"" << num(f.y0 + f.h) << "\" x2=\"" << num(f.x0 + f.w) << "\" y2=\""
    << num(f.y0 + f.h) << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << num(f.x0) << "\" y1=\"" << num(f.y0) << "\" x2=\"" << num(f.x0) << "\" y2=\""
    << num(f.y0 + f.h) << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = f.y_max * i / 4.0;
    o << "<text x=\"" << num(f.x0 - 6) << "\" y=\"" << num(f.y(v) + 4) << "\" text-anchor=\"end\">" << num(v)
      << "</text>\n";
    if (i > 0)
      o << "<line x1=\"" << num(f.x0) << "\" y1=\"" << num(f.y(v)) << "\" x2=\"" << num(f.x0 + f.w) << "\" y2=\""
        << num(f.y(v)) << "\" stroke=\"#ddd\"/>\n";
  }
  if (!y_label.empty())
    o << "<text transform=\"translate(" << num(f.x0 - 44) << "," << num(f.y0 + f.h / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape(y_label) << "</text>\n";
}

void legend(std::ostringstream& o, const std::vector<Series>& series, double x, double y) {
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double yy = y + 16.0 * static_cast<double>(i);
    o << "<rect x=\"" << num(x) << "\" y=\"" << num(yy - 9) << "\" width=\"10\" height=\"10\" fill=\""
      << kPalette[i % 4] << "\"/>\n";
    o << "<text x=\"" << num(x + 14) << "\" y=\"" << num(yy) << "\">" << escape(series[i].name) << "</text>\n";
  }
}

void category_labels(std::ostringstream& o, const Frame& f, const std::vector<std::string>& cats) {
  const double slot = f.w / static_cast<double>(std::max<std::size_t>(cats.size(), 1));
  for (std::size_t c = 0; c < cats.size(); ++c)
    o << "<text x=\"" << num(f.x0 + slot * (static_cast<double>(c) + 0.5)) << "\" y=\"" << num(f.y0 + f.h + 16)
      << "\" text-anchor=\"middle\">" << escape(cats[c]) << "</text>\n";
}

}  // namespace

std::string bar_chart(const std::string& title, const std::string& y_label,
                      const std::vector<std::string>& categories, const std::vector<Series>& series,
                      double y_max) {
  std::ostringstream o;
  const double width = 120 + 70.0 * static_cast<double>(categories.size()) + 150, height = 360;
  header(o, width, height, title);
  const Frame f{70, 40, width - 70 - 160, height - 90, y_max};
  axes(o, f, y_label);
  const double slot = f.w / static_cast<double>(std::max<std::size_t>(categories.size(), 1));
  const double bar = slot * 0.8 / static_cast<double>(std::max<std::size_t>(series.size(), 1));
  for (std::size_t s = 0; s < series.size(); ++s)
    for (std::size_t c = 0; c < categories.size() && c < series[s].values.size(); ++c) {
      const double v = series[s].values[c];
      const double x = f.x0 + slot * static_cast<double>(c) + slot * 0.1 + bar * static_cast<double>(s);
      o << "<rect x=\"" << num(x) << "\" y=\"" << num(f.y(v)) << "\" width=\"" << num(bar) << "\" height=\""
        << num(f.y(0) - f.y(v)) << "\" fill=\"" << kPalette[s % 4] << "\"><title>" << escape(series[s].name)
        << ' ' << escape(categories[c]) << ": " << num(v) << "</title></rect>\n";
    }
  category_labels(o, f, categories);
  legend(o, series, f.x0 + f.w + 20, f.y0 + 10);
  o << "</svg>\n";
  return o.str();
}

std::string line_chart(const std::string& title, const std::string& y_label,
                       const std::vector<std::string>& categories, const std::vector<Series>& series,
                       double y_max) {
  std::ostringstream o;
  const double width = 120 + 70.0 * static_cast<double>(categories.size()) + 150, height = 360;
  header(o, width, height, title);
  const Frame f{70, 40, width - 70 - 160, height - 90, y_max};
  axes(o, f, y_label);
  const double slot = f.w / static_cast<double>(std::max<std::size_t>(categories.size(), 1));
  for (std::size_t s = 0; s < series.size(); ++s) {
    o << "<polyline fill=\"none\" stroke-width=\"2\" stroke=\"" << kPalette[s % 4] << "\" points=\"";
    for (std::size_t c = 0; c < categories.size() && c < series[s].values.size(); ++c)
      o << num(f.x0 + slot * (static_cast<double>(c) + 0.5)) << ',' << num(f.y(series[s].values[c])) << ' ';
    o << "\"/>\n";
    for (std::size_t c = 0; c < categories.size() && c < series[s].values.size(); ++c)
      o << "<circle cx=\"" << num(f.x0 + slot * (static_cast<double>(c) + 0.5)) << "\" cy=\""
        << num(f.y(series[s].values[c])) << "\" r=\"3\" fill=\"" << kPalette[s % 4] << "\"/>\n";
  }
  category_labels(o, f, categories);
  legend(o, series, f.x0 + f.w + 20, f.y0 + 10);
  o << "</svg>\n";
  return o.str();
}

std::string histogram_panels(const std::string& title, const std::vector<Panel>& panels) {
  std::ostringstream o;
  const double pw = 320, ph = 220;
  const double width = 40 + pw * static_cast<double>(std::max<std::size_t>(panels.size(), 1)) + 140;
  const double height = ph + 100;
  header(o, width, height, title);
  for (std::size_t p = 0; p < panels.size(); ++p) {
    double top = 0;
    for (const auto& s : panels[p].series)
      for (double v : s.values) top = std::max(top, v);
    const Frame f{60 + pw * static_cast<double>(p), 50, pw - 60, ph, top > 0 ? top : 1.0};
    axes(o, f, p == 0 ? "density" : "");
    o << "<text x=\"" << num(f.x0 + f.w / 2) << "\" y=\"" << num(f.y0 - 8) << "\" text-anchor=\"middle\">"
      << escape(panels[p].title) << "</text>\n";
    for (int t = 0; t <= 4; ++t)
      o << "<text x=\"" << num(f.x0 + f.w * t / 4.0) << "\" y=\"" << num(f.y0 + f.h + 16)
        << "\" text-anchor=\"middle\">" << num(t / 4.0) << "</text>\n";
    for (std::size_t s = 0; s < panels[p].series.size(); ++s) {
      const auto& v = panels[p].series[s].values;
      if (v.empty()) continue;
      const double bw = f.w / static_cast<double>(v.size());
      o << "<polyline fill=\"none\" stroke-width=\"2\" stroke=\"" << kPalette[s % 4] << "\" points=\""
        << num(f.x0) << ',' << num(f.y(0)) << ' ';
      for (std::size_t b = 0; b < v.size(); ++b)
        o << num(f.x0 + bw * static_cast<double>(b)) << ',' << num(f.y(v[b])) << ' '
          << num(f.x0 + bw * static_cast<double>(b + 1)) << ',' << num(f.y(v[b])) << ' ';
      o << num(f.x0 + f.w) << ',' << num(f.y(0)) << "\"/>\n";
    }
  }
  if (!panels.empty()) legend(o, panels.front().series, width - 130, 60);
  o << "</svg>\n";
  return o.str();
}

}  // namespace motioncred::svg
