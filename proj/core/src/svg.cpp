#include "dendrostat/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "dendrostat/errors.hpp"
#include "dendrostat/textio.hpp"

namespace dendrostat::svg {

namespace {

std::string num(double v) { return fmt_double(v, 8); }

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void include(double v) {
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  bool valid() const { return lo <= hi; }
  void pad(double frac) {
    if (!valid()) {
      lo = 0.0;
      hi = 1.0;
      return;
    }
    if (lo == hi) {
      lo -= 0.5;
      hi += 0.5;
      return;
    }
    const double d = (hi - lo) * frac;
    lo -= d;
    hi += d;
  }
};

// 1/2/5 ladder ticks.
std::vector<double> nice_ticks(double lo, double hi, int target = 5) {
  std::vector<double> ticks;
  const double span = hi - lo;
  if (span <= 0.0) return ticks;
  double step = std::pow(10.0, std::floor(std::log10(span / target)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (span / (step * m) <= target + 1) {
      step *= m;
      break;
    }
  }
  const double first = std::ceil(lo / step) * step;
  for (double t = first; t <= hi + 1e-9 * span; t += step) {
    ticks.push_back(std::abs(t) < 1e-12 * span ? 0.0 : t);
  }
  return ticks;
}

std::vector<double> log_ticks(double lo, double hi) {
  std::vector<double> ticks;
  const int klo = static_cast<int>(std::ceil(lo - 1e-9));
  const int khi = static_cast<int>(std::floor(hi + 1e-9));
  for (int k = klo; k <= khi; ++k) ticks.push_back(static_cast<double>(k));
  if (ticks.size() < 2) return nice_ticks(lo, hi);
  return ticks;
}

}  // namespace

void Canvas::rect(double x, double y, double w, double h,
                  const std::string& fill, const std::string& stroke,
                  double stroke_width, const std::string& css_class) {
  body_ += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" +
           num(w) + "\" height=\"" + num(h) + "\" fill=\"" + fill + "\"";
  if (stroke != "none") {
    body_ += " stroke=\"" + stroke + "\" stroke-width=\"" +
             num(stroke_width) + "\"";
  }
  if (!css_class.empty()) body_ += " class=\"" + css_class + "\"";
  body_ += "/>\n";
}

void Canvas::line(double x1, double y1, double x2, double y2,
                  const std::string& stroke, double stroke_width) {
  body_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" +
           num(x2) + "\" y2=\"" + num(y2) + "\" stroke=\"" + stroke +
           "\" stroke-width=\"" + num(stroke_width) + "\"/>\n";
}

void Canvas::polyline(std::span<const std::pair<double, double>> pts,
                      const std::string& stroke, double stroke_width) {
  body_ += "<polyline fill=\"none\" stroke=\"" + stroke +
           "\" stroke-width=\"" + num(stroke_width) + "\" points=\"";
  for (const auto& [x, y] : pts) body_ += num(x) + "," + num(y) + " ";
  body_ += "\"/>\n";
}

void Canvas::polygon(std::span<const std::pair<double, double>> pts,
                     const std::string& fill) {
  body_ += "<polygon fill=\"" + fill + "\" stroke=\"none\" points=\"";
  for (const auto& [x, y] : pts) body_ += num(x) + "," + num(y) + " ";
  body_ += "\"/>\n";
}

void Canvas::circle(double cx, double cy, double r, const std::string& fill) {
  body_ += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" +
           num(r) + "\" fill=\"" + fill + "\"/>\n";
}

void Canvas::text(double x, double y, const std::string& s, double size,
                  const std::string& anchor, double rotate_deg) {
  body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) +
           "\" font-family=\"sans-serif\" font-size=\"" + num(size) +
           "\" text-anchor=\"" + anchor + "\"";
  if (rotate_deg != 0.0) {
    body_ += " transform=\"rotate(" + num(rotate_deg) + " " + num(x) + " " +
             num(y) + ")\"";
  }
  body_ += ">" + s + "</text>\n";
}

std::string Canvas::finish() const {
  std::string doc =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
      num(width_) + "\" height=\"" + num(height_) + "\" viewBox=\"0 0 " +
      num(width_) + " " + num(height_) + "\">\n";
  doc += "<rect x=\"0\" y=\"0\" width=\"" + num(width_) + "\" height=\"" +
         num(height_) + "\" fill=\"white\"/>\n";
  doc += body_;
  doc += "</svg>\n";
  return doc;
}

void draw_chart(Canvas& canvas, const Viewport& vp, const ChartSpec& spec,
                std::span<const Series> series) {
  const double ml = 52.0, mr = 12.0, mt = spec.title.empty() ? 12.0 : 26.0,
               mb = 40.0;
  const double px = vp.x + ml, py = vp.y + mt;
  const double pw = vp.w - ml - mr, ph = vp.h - mt - mb;

  Range xr, yr;
  auto xval = [&](double x) { return spec.x_log10 ? std::log10(x) : x; };
  for (const auto& s : series) {
    for (const auto& [x, y] : s.pts) {
      xr.include(xval(x));
      yr.include(y);
      if (s.kind == SeriesKind::Bars) {
        xr.include(xval(x) - s.bar_width / 2.0);
        xr.include(xval(x) + s.bar_width / 2.0);
        yr.include(0.0);
      }
    }
    for (const auto& [x, y] : s.pts2) {
      xr.include(xval(x));
      yr.include(y);
    }
  }
  xr.pad(0.04);
  yr.pad(0.06);

  auto sx = [&](double x) {
    return px + (xval(x) - xr.lo) / (xr.hi - xr.lo) * pw;
  };
  auto sy = [&](double y) { return py + (yr.hi - y) / (yr.hi - yr.lo) * ph; };

  // frame
  canvas.rect(px, py, pw, ph, "none", "#444444", 1.0);

  const auto xticks = spec.x_log10 ? log_ticks(xr.lo, xr.hi)
                                   : nice_ticks(xr.lo, xr.hi, 6);
  for (double t : xticks) {
    const double X = px + (t - xr.lo) / (xr.hi - xr.lo) * pw;
    canvas.line(X, py + ph, X, py + ph + 4, "#444444", 1.0);
    const std::string label =
        spec.x_log10 ? fmt_double(std::pow(10.0, t), 4) : fmt_double(t, 4);
    canvas.text(X, py + ph + 16, label, 10.0, "middle");
  }
  for (double t : nice_ticks(yr.lo, yr.hi, 5)) {
    const double Y = sy(t);
    canvas.line(px - 4, Y, px, Y, "#444444", 1.0);
    canvas.text(px - 7, Y + 3.5, fmt_double(t, 4), 10.0, "end");
  }

  for (const auto& s : series) {
    switch (s.kind) {
      case SeriesKind::Band: {
        std::vector<std::pair<double, double>> poly;
        poly.reserve(s.pts.size() + s.pts2.size());
        for (const auto& [x, y] : s.pts) poly.emplace_back(sx(x), sy(y));
        for (auto it = s.pts2.rbegin(); it != s.pts2.rend(); ++it) {
          poly.emplace_back(sx(it->first), sy(it->second));
        }
        canvas.polygon(poly, s.color);
        break;
      }
      case SeriesKind::Bars: {
        for (const auto& [x, y] : s.pts) {
          const double x0 = sx(spec.x_log10 ? x : x - s.bar_width / 2.0);
          const double x1 = sx(spec.x_log10 ? x : x + s.bar_width / 2.0);
          const double y0 = sy(std::max(0.0, yr.lo));
          const double y1 = sy(y);
          canvas.rect(std::min(x0, x1), std::min(y0, y1), std::abs(x1 - x0),
                      std::abs(y0 - y1), s.color, "#ffffff", 0.5);
        }
        break;
      }
      case SeriesKind::Points: {
        for (const auto& [x, y] : s.pts) {
          canvas.circle(sx(x), sy(y), 2.2, s.color);
        }
        break;
      }
      case SeriesKind::Line: {
        std::vector<std::pair<double, double>> path;
        path.reserve(s.pts.size());
        for (const auto& [x, y] : s.pts) path.emplace_back(sx(x), sy(y));
        canvas.polyline(path, s.color, s.stroke_width);
        break;
      }
    }
  }

  if (!spec.title.empty()) {
    canvas.text(px + pw / 2.0, vp.y + 16, spec.title, 12.0, "middle");
  }
  if (!spec.xlabel.empty()) {
    canvas.text(px + pw / 2.0, py + ph + 32, spec.xlabel, 11.0, "middle");
  }
  if (!spec.ylabel.empty()) {
    canvas.text(vp.x + 14, py + ph / 2.0, spec.ylabel, 11.0, "middle", -90.0);
  }
}

void write_file(const Canvas& canvas, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << canvas.finish();
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace dendrostat::svg
