#include "featdyn/svg.hpp"

#include "featdyn/types.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>

namespace featdyn {

namespace {

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                 "#9467bd", "#8c564b", "#e377c2", "#17becf"};

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

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  bool log = false;

  double map(double v) const {
    const double t = log ? std::log10(v) : v;
    return (t - lo) / (hi - lo);
  }
};

bool usable(double v, bool log) { return std::isfinite(v) && (!log || v > 0.0); }

Axis make_axis(const std::vector<Series>& series, bool use_x, bool log_x, bool log_y) {
  const bool log = use_x ? log_x : log_y;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!usable(s.x[i], log_x) || !usable(s.y[i], log_y)) continue;
      const double v = use_x ? s.x[i] : s.y[i];
      const double t = log ? std::log10(v) : v;
      lo = std::min(lo, t);
      hi = std::max(hi, t);
    }
  }
  if (!std::isfinite(lo)) return {0.0, 1.0, log};
  if (hi - lo < 1e-300) {
    lo -= 0.5;
    hi += 0.5;
  }
  return {lo, hi, log};
}

std::string tick_label(double t, bool log) {
  char buf[32];
  if (log) std::snprintf(buf, sizeof buf, "1e%g", t);
  else std::snprintf(buf, sizeof buf, "%.3g", t);
  return buf;
}

}  // namespace

void write_line_chart(std::ostream& out, const std::vector<Series>& series, const ChartOptions& opt) {
  if (series.empty()) throw ConfigError("write_line_chart needs at least one series");
  const double left = 70, right = 160, top = 40, bottom = 55;
  const double pw = opt.width - left - right;
  const double ph = opt.height - top - bottom;
  const Axis ax = make_axis(series, true, opt.log_x, opt.log_y);
  const Axis ay = make_axis(series, false, opt.log_x, opt.log_y);

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\"" << opt.height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << left + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(opt.title)
      << "</text>\n";
  out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"#333\"/>\n";

  for (int k = 0; k <= 4; ++k) {
    const double fx = k / 4.0;
    const double tx = ax.lo + fx * (ax.hi - ax.lo);
    const double px = left + fx * pw;
    out << "<line x1=\"" << px << "\" y1=\"" << top + ph << "\" x2=\"" << px << "\" y2=\"" << top + ph + 5
        << "\" stroke=\"#333\"/>\n";
    out << "<text x=\"" << px << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">"
        << tick_label(tx, ax.log) << "</text>\n";
    const double ty = ay.lo + fx * (ay.hi - ay.lo);
    const double py = top + ph - fx * ph;
    out << "<line x1=\"" << left - 5 << "\" y1=\"" << py << "\" x2=\"" << left << "\" y2=\"" << py
        << "\" stroke=\"#333\"/>\n";
    out << "<text x=\"" << left - 8 << "\" y=\"" << py + 4 << "\" text-anchor=\"end\">" << tick_label(ty, ay.log)
        << "</text>\n";
  }
  out << "<text x=\"" << left + pw / 2 << "\" y=\"" << opt.height - 12 << "\" text-anchor=\"middle\">"
      << escape(opt.x_label) << (opt.log_x ? " (log)" : "") << "</text>\n";
  out << "<text transform=\"translate(16," << top + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(opt.y_label) << (opt.log_y ? " (log)" : "") << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& ser = series[s];
    const char* color = kPalette[s % kPalette.size()];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\" points=\"";
    for (std::size_t i = 0; i < ser.x.size() && i < ser.y.size(); ++i) {
      if (!usable(ser.x[i], ax.log) || !usable(ser.y[i], ay.log)) continue;
      out << left + ax.map(ser.x[i]) * pw << ',' << top + ph - ay.map(ser.y[i]) * ph << ' ';
    }
    out << "\"/>\n";
    const double ly = top + 14 + 18.0 * static_cast<double>(s);
    out << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 32 << "\" y2=\"" << ly
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << left + pw + 38 << "\" y=\"" << ly + 4 << "\">" << escape(ser.name) << "</text>\n";
  }
  out << "</svg>\n";
}

void write_image_grid(std::ostream& out, const std::vector<ImageTile>& tiles, int columns, int cell_px) {
  if (columns < 1) throw ConfigError("image grid needs at least one column");
  int tile_w = 0, tile_h = 0;
  for (const auto& t : tiles) {
    if (static_cast<int>(t.pixels.size()) != t.width * t.height) throw ShapeError("image tile size mismatch");
    tile_w = std::max(tile_w, t.width);
    tile_h = std::max(tile_h, t.height);
  }
  const int pad = 8, caption = 16;
  const int cw = tile_w * cell_px + pad;
  const int ch = tile_h * cell_px + pad + caption;
  const int rows = static_cast<int>((tiles.size() + static_cast<std::size_t>(columns) - 1) / static_cast<std::size_t>(columns));
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << columns * cw + pad << "\" height=\""
      << rows * ch + pad << "\" font-family=\"sans-serif\" font-size=\"10\" shape-rendering=\"crispEdges\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t k = 0; k < tiles.size(); ++k) {
    const auto& t = tiles[k];
    const int ox = pad + static_cast<int>(k % static_cast<std::size_t>(columns)) * cw;
    const int oy = pad + static_cast<int>(k / static_cast<std::size_t>(columns)) * ch;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double v : t.pixels) {
      if (!std::isfinite(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double span = (hi > lo) ? hi - lo : 1.0;
    out << "<text x=\"" << ox << "\" y=\"" << oy + 10 << "\">" << escape(t.caption) << "</text>\n";
    for (int r = 0; r < t.height; ++r) {
      for (int c = 0; c < t.width; ++c) {
        const double v = t.pixels[static_cast<std::size_t>(r * t.width + c)];
        const int g = std::isfinite(v) ? static_cast<int>(std::lround(255.0 * (v - lo) / span)) : 0;
        out << "<rect x=\"" << ox + c * cell_px << "\" y=\"" << oy + caption + r * cell_px << "\" width=\"" << cell_px
            << "\" height=\"" << cell_px << "\" fill=\"rgb(" << g << ',' << g << ',' << g << ")\"/>";
      }
      out << '\n';
    }
  }
  out << "</svg>\n";
}

}  // namespace featdyn
