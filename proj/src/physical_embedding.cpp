#include "hologforge/physical_embedding.hpp"

#include "hologforge/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

namespace hologforge {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw ParameterError(message);
}

}  // namespace

PageSpec PageSpec::preset(const std::string& name, Orientation orientation, double margin_mm) {
  double short_side = 0.0, long_side = 0.0;
  if (name == "A4") {
    short_side = 210.0;
    long_side = 297.0;
  } else if (name == "A5") {
    short_side = 148.0;
    long_side = 210.0;
  } else if (name == "Letter") {
    short_side = 215.9;
    long_side = 279.4;
  } else {
    throw ParameterError("unknown page preset '" + name + "' (expected A4, A5, Letter or custom)");
  }
  PageSpec page;
  page.name = name;
  page.orientation = orientation;
  page.width_mm = orientation == Orientation::portrait ? short_side : long_side;
  page.height_mm = orientation == Orientation::portrait ? long_side : short_side;
  page.margin_mm = margin_mm;
  page.validate();
  return page;
}

PageSpec PageSpec::custom(double width_mm, double height_mm, double margin_mm) {
  PageSpec page;
  page.name = "custom";
  page.orientation = width_mm > height_mm ? Orientation::landscape : Orientation::portrait;
  page.width_mm = width_mm;
  page.height_mm = height_mm;
  page.margin_mm = margin_mm;
  page.validate();
  return page;
}

void PageSpec::validate() const {
  require(width_mm > 0.0 && height_mm > 0.0 && std::isfinite(width_mm) && std::isfinite(height_mm),
          "page extents must be positive");
  require(margin_mm >= 0.0, "page margin must be non-negative");
  require(2.0 * margin_mm < std::min(width_mm, height_mm), "page margin leaves no printable area");
}

bool is_hex_color(const std::string& color) {
  return color.size() == 7 && color[0] == '#' &&
         std::all_of(color.begin() + 1, color.end(), [](unsigned char c) { return std::isxdigit(c); });
}

void StyleSpec::validate() const {
  require(!focus_palette.empty(), "style.focus_palette needs at least one color");
  for (const auto& c : focus_palette) require(is_hex_color(c), "style color '" + c + "' is not #RRGGBB");
  require(is_hex_color(context_color), "style.context_color is not #RRGGBB");
  require(is_hex_color(edge_color), "style.edge_color is not #RRGGBB");
  require(focus_radius_mm > 0.0, "style.focus_radius_mm must be positive");
  require(context_radius_mm > 0.0 && context_radius_mm < focus_radius_mm,
          "style.context_radius_mm must be positive and smaller than focus_radius_mm");
  require(stroke_min_mm > 0.0 && stroke_min_mm < stroke_max_mm,
          "style.stroke_min_mm must be positive and below stroke_max_mm");
  require(trajectory_stroke_mm > 0.0, "style.trajectory_stroke_mm must be positive");
  require(trajectory_marker_radius_mm > 0.0, "style.trajectory_marker_radius_mm must be positive");
  require(label_font_size_pt > 0.0, "style.label_font_size_pt must be positive");
  require(!label_font_family.empty(), "style.label_font_family must not be empty");
}

Bounds global_bounds(const std::vector<SliceLayout>& layouts) {
  Bounds b{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
           -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  bool any = false;
  for (const auto& layout : layouts) {
    for (const auto& [id, p] : layout.positions) {
      b.min_x = std::min(b.min_x, p.x);
      b.min_y = std::min(b.min_y, p.y);
      b.max_x = std::max(b.max_x, p.x);
      b.max_y = std::max(b.max_y, p.y);
      any = true;
    }
  }
  if (!any) throw ConsistencyError("cannot compute bounds: no positioned nodes");
  return b;
}

PageTransform page_transform(const Bounds& bounds, const PageSpec& page, bool stretch) {
  const double avail_w = page.width_mm - 2.0 * page.margin_mm;
  const double avail_h = page.height_mm - 2.0 * page.margin_mm;
  const double raw_w = bounds.max_x - bounds.min_x;
  const double raw_h = bounds.max_y - bounds.min_y;
  const double bb_w = raw_w > 0.0 ? raw_w : 1.0;
  const double bb_h = raw_h > 0.0 ? raw_h : 1.0;

  PageTransform t;
  t.bounds = bounds;
  if (stretch) {
    t.scale_x = avail_w / bb_w;
    t.scale_y = avail_h / bb_h;
  } else {
    t.scale_x = t.scale_y = std::min(avail_w / bb_w, avail_h / bb_h);
  }
  // Centre the scaled (actual) extent inside the available area.
  t.offset_x = page.margin_mm + (avail_w - raw_w * t.scale_x) / 2.0;
  t.offset_y = page.margin_mm + (avail_h - raw_h * t.scale_y) / 2.0;
  return t;
}

std::vector<PhysicalLayout> map_to_page(const std::vector<SliceLayout>& layouts, const PageSpec& page,
                                        bool stretch) {
  const PageTransform t = page_transform(global_bounds(layouts), page, stretch);
  std::vector<PhysicalLayout> out;
  out.reserve(layouts.size());
  for (const auto& layout : layouts) {
    PhysicalLayout pl;
    pl.slice_index = layout.slice_index;
    for (const auto& [id, p] : layout.positions) pl.positions_mm.emplace(id, t.apply(p));
    out.push_back(std::move(pl));
  }
  return out;
}

double stroke_width(double weight, double w_min, double w_max, const StyleSpec& style) {
  if (!(weight >= w_min && weight <= w_max))
    throw ConsistencyError("edge weight " + std::to_string(weight) + " outside [" + std::to_string(w_min) +
                           ", " + std::to_string(w_max) + "]");
  if (w_max == w_min) return style.stroke_min_mm;
  const double t = (weight - w_min) / (w_max - w_min);
  return style.stroke_min_mm + t * (style.stroke_max_mm - style.stroke_min_mm);
}

}  // namespace hologforge
