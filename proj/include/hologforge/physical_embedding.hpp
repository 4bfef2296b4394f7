#pragma once

#include "hologforge/layout_engine.hpp"

#include <string>
#include <vector>

namespace hologforge {

enum class Orientation { portrait, landscape };

// Physical page in millimetres. Width and height are stored after the
// orientation has been applied.
struct PageSpec {
  std::string name = "A5";
  Orientation orientation = Orientation::landscape;
  double width_mm = 210.0;
  double height_mm = 148.0;
  double margin_mm = 12.0;

  // ISO presets A4 / A5 and US Letter; "custom" keeps the given extents.
  static PageSpec preset(const std::string& name, Orientation orientation, double margin_mm);
  static PageSpec custom(double width_mm, double height_mm, double margin_mm);

  void validate() const;
  friend bool operator==(const PageSpec&, const PageSpec&) = default;
};

struct StyleSpec {
  std::vector<std::string> focus_palette = {"#1F77B4", "#FF7F0E", "#2CA02C", "#D62728", "#9467BD",
                                            "#8C564B", "#E377C2", "#7F7F7F", "#BCBD22", "#17BECF"};
  double focus_radius_mm = 2.0;
  double context_radius_mm = 1.0;
  std::string context_color = "#C8C8C8";
  std::string edge_color = "#000000";
  double stroke_min_mm = 0.25;
  double stroke_max_mm = 2.0;
  double trajectory_stroke_mm = 0.6;
  double trajectory_marker_radius_mm = 1.2;
  double label_font_size_pt = 8.0;
  std::string label_font_family = "Helvetica";

  void validate() const;
  const std::string& focus_color(std::size_t focus_rank) const {
    return focus_palette[focus_rank % focus_palette.size()];
  }
};

// Returns true when `color` is a `#RRGGBB` string.
bool is_hex_color(const std::string& color);

struct Bounds {
  double min_x = 0.0, min_y = 0.0, max_x = 0.0, max_y = 0.0;
  friend bool operator==(const Bounds&, const Bounds&) = default;
};

struct PhysicalLayout {
  std::size_t slice_index = 0;
  Positions positions_mm;  // origin top-left, y downward
};

// The single layout-to-page transform shared by every slice.
struct PageTransform {
  double scale_x = 1.0, scale_y = 1.0;
  double offset_x = 0.0, offset_y = 0.0;  // page position of the bounds' min corner
  Bounds bounds;

  Point apply(const Point& p) const {
    return {offset_x + (p.x - bounds.min_x) * scale_x, offset_y + (p.y - bounds.min_y) * scale_y};
  }
};

Bounds global_bounds(const std::vector<SliceLayout>& layouts);

// Uniform scale with centring by default; `stretch` fills both axes
// independently. A degenerate bounds axis counts as one layout unit.
PageTransform page_transform(const Bounds& bounds, const PageSpec& page, bool stretch = false);

std::vector<PhysicalLayout> map_to_page(const std::vector<SliceLayout>& layouts, const PageSpec& page,
                                        bool stretch = false);

// Linear weight -> stroke width; weight must lie in [w_min, w_max].
double stroke_width(double weight, double w_min, double w_max, const StyleSpec& style);

}  // namespace hologforge
