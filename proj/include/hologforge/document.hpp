#pragma once

#include "hologforge/layout_engine.hpp"
#include "hologforge/physical_embedding.hpp"

#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace hologforge {

// Drawing primitives in page millimetres. `ref` names the graph element a
// primitive stands for ("n:<id>" or "e:<u>|<v>") and is carried into the SVG.
struct Circle {
  Point center;
  double radius = 0.0;
  std::string fill = "none";
  std::string stroke = "none";
  double stroke_width = 0.0;
  double opacity = 1.0;
  std::string ref;
};

struct Line {
  Point from;
  Point to;
  std::string stroke = "#000000";
  double stroke_width = 0.0;
  double opacity = 1.0;
  std::string ref;
  bool dashed = false;
};

struct Polyline {
  std::vector<Point> points;
  std::string stroke = "#000000";
  double stroke_width = 0.0;
  double opacity = 1.0;
  std::string ref;
};

enum class TextAnchor { start, end };

struct Text {
  Point position;  // baseline start (or end, for TextAnchor::end)
  std::string content;
  double font_size_mm = 0.0;
  std::string font_family;
  std::string fill = "#000000";
  TextAnchor anchor = TextAnchor::start;
  double opacity = 1.0;
  std::string ref;
};

using Primitive = std::variant<Circle, Line, Polyline, Text>;

enum class DocumentKind { focus, context, trajectory_overlay, label_overlay, preview };

std::string to_string(DocumentKind kind);

struct SliceDocument {
  DocumentKind kind = DocumentKind::focus;
  std::optional<std::size_t> slice_index;  // none for global overlays
  PageSpec page;
  std::vector<Primitive> elements;
  std::vector<Primitive> registration;  // alignment / punch marks, kept apart from content
};

// Maps document coordinates onto a sheet: rotate by `rotation_deg` (0 or 90,
// clockwise) about the origin, then translate.
struct Placement {
  double translate_x = 0.0;
  double translate_y = 0.0;
  int rotation_deg = 0;

  Point apply(const Point& p) const {
    return rotation_deg == 90 ? Point{translate_x - p.y, translate_y + p.x}
                              : Point{translate_x + p.x, translate_y + p.y};
  }
};

struct PlacedDocument {
  SliceDocument document;
  Placement placement;
};

struct SheetDocument {
  PageSpec sheet;
  std::vector<PlacedDocument> placed;
  std::vector<Line> cut_lines;
};

// Standalone SVG 1.1 with a millimetre viewBox. Output is byte-deterministic.
void emit_svg(const SliceDocument& doc, std::ostream& sink);
void emit_svg(const SheetDocument& sheet, std::ostream& sink);
std::string to_svg(const SliceDocument& doc);
std::string to_svg(const SheetDocument& sheet);

// Fixed six-decimal rendering with trailing zeros removed ("12.5", "-0.25").
std::string format_mm(double value);

}  // namespace hologforge
