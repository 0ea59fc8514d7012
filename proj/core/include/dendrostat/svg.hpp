#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace dendrostat::svg {

/// Minimal SVG string builder. Enough for heat maps, line traces and the
/// four-panel diagnostic layout; not a general plotting library.
class Canvas {
 public:
  Canvas(double width, double height) : width_(width), height_(height) {}

  void rect(double x, double y, double w, double h, const std::string& fill,
            const std::string& stroke = "none", double stroke_width = 0.0,
            const std::string& css_class = "");
  void line(double x1, double y1, double x2, double y2,
            const std::string& stroke, double stroke_width = 1.0);
  void polyline(std::span<const std::pair<double, double>> pts,
                const std::string& stroke, double stroke_width = 1.5);
  void polygon(std::span<const std::pair<double, double>> pts,
               const std::string& fill);
  void circle(double cx, double cy, double r, const std::string& fill);
  void text(double x, double y, const std::string& s, double size = 11.0,
            const std::string& anchor = "start", double rotate_deg = 0.0);

  std::string finish() const;

  double width() const { return width_; }
  double height() const { return height_; }

 private:
  double width_;
  double height_;
  std::string body_;
};

struct Viewport {
  double x = 0.0;
  double y = 0.0;
  double w = 480.0;
  double h = 360.0;
};

enum class SeriesKind { Line, Points, Band, Bars };

struct Series {
  std::vector<std::pair<double, double>> pts;
  SeriesKind kind = SeriesKind::Line;
  std::string color = "#1b6ca8";
  double stroke_width = 1.5;
  // Band: pts runs along the lower edge, pts2 along the upper edge.
  std::vector<std::pair<double, double>> pts2;
  // Bars: full bar width in x data units.
  double bar_width = 0.0;
};

struct ChartSpec {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool x_log10 = false;
};

/// Draws axes, ticks and the given series into a viewport of the canvas.
/// Data ranges are computed from the series and padded slightly.
void draw_chart(Canvas& canvas, const Viewport& vp, const ChartSpec& spec,
                std::span<const Series> series);

/// Writes the document to disk; IoError on failure.
void write_file(const Canvas& canvas, const std::string& path);

}  // namespace dendrostat::svg
