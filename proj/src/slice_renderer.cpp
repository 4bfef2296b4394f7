#include "hologforge/slice_renderer.hpp"

#include "hologforge/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hologforge {

namespace {

constexpr double kLabelGapMm = 1.0;
constexpr double kMinMarkMarginMm = 4.0;
constexpr double kMarkStrokeMm = 0.2;
constexpr double kPtToMm = 25.4 / 72.0;

const Point& position_of(const PhysicalLayout& layout, const NodeId& id) {
  auto it = layout.positions_mm.find(id);
  if (it == layout.positions_mm.end())
    throw ConsistencyError("slice " + std::to_string(layout.slice_index) + ": no page position for node '" +
                           id + "'");
  return it->second;
}

std::vector<Primitive> edge_lines(const TimesliceGraph& subgraph, const PhysicalLayout& layout,
                                  const std::string& color, const RenderSettings& settings) {
  std::vector<Primitive> out;
  for (const auto& e : subgraph.edges) {
    Line line;
    line.from = position_of(layout, e.u);
    line.to = position_of(layout, e.v);
    line.stroke = color;
    line.stroke_width = stroke_width(e.weight, settings.weights.min, settings.weights.max, settings.style);
    line.ref = "e:" + e.u + "|" + e.v;
    out.emplace_back(std::move(line));
  }
  return out;
}

std::size_t utf8_length(const std::string& s) {
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

SliceDocument make_doc(DocumentKind kind, std::optional<std::size_t> slice, const PageSpec& page) {
  SliceDocument doc;
  doc.kind = kind;
  doc.slice_index = slice;
  doc.page = page;
  return doc;
}

}  // namespace

std::string to_string(DocumentKind kind) {
  switch (kind) {
    case DocumentKind::focus: return "focus";
    case DocumentKind::context: return "context";
    case DocumentKind::trajectory_overlay: return "trajectory_overlay";
    case DocumentKind::label_overlay: return "label_overlay";
    case DocumentKind::preview: return "preview";
  }
  return "unknown";
}

WeightRange weight_range(const DynamicGraph& graph) {
  WeightRange r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& s : graph.slices())
    for (const auto& e : s.edges) {
      r.min = std::min(r.min, e.weight);
      r.max = std::max(r.max, e.weight);
    }
  if (r.min > r.max) return WeightRange{1.0, 1.0};
  return r;
}

SliceDocument render_focus_slice(const TimesliceGraph& focus_subgraph, const PhysicalLayout& layout,
                                 const std::vector<NodeId>& focus_order, const RenderSettings& settings) {
  auto doc = make_doc(DocumentKind::focus, focus_subgraph.index, settings.page);
  doc.elements = edge_lines(focus_subgraph, layout, settings.style.edge_color, settings);
  for (std::size_t rank = 0; rank < focus_order.size(); ++rank) {
    const auto& id = focus_order[rank];
    if (!focus_subgraph.contains(id)) continue;
    Circle c;
    c.center = position_of(layout, id);
    c.radius = settings.style.focus_radius_mm;
    c.fill = settings.style.focus_color(rank);
    c.ref = "n:" + id;
    doc.elements.emplace_back(std::move(c));
  }
  for (const auto& id : focus_subgraph.nodes)
    if (std::find(focus_order.begin(), focus_order.end(), id) == focus_order.end())
      throw ConsistencyError("focus subgraph node '" + id + "' has no focus rank");
  return doc;
}

SliceDocument render_context_slice(const TimesliceGraph& context_subgraph, const PhysicalLayout& layout,
                                   const RenderSettings& settings) {
  auto doc = make_doc(DocumentKind::context, context_subgraph.index, settings.page);
  doc.elements = edge_lines(context_subgraph, layout, settings.style.context_color, settings);
  for (const auto& id : context_subgraph.nodes) {
    Circle c;
    c.center = position_of(layout, id);
    c.radius = settings.style.context_radius_mm;
    c.fill = settings.style.context_color;
    c.ref = "n:" + id;
    doc.elements.emplace_back(std::move(c));
  }
  return doc;
}

SliceDocument render_trajectory_overlay(const std::vector<PhysicalLayout>& layouts,
                                        const std::vector<NodeId>& focus_order, const RenderSettings& settings,
                                        bool taper) {
  auto doc = make_doc(DocumentKind::trajectory_overlay, std::nullopt, settings.page);
  const auto& style = settings.style;
  const double last = layouts.size() > 1 ? static_cast<double>(layouts.size() - 1) : 1.0;
  std::vector<Primitive> markers;

  for (std::size_t rank = 0; rank < focus_order.size(); ++rank) {
    const auto& id = focus_order[rank];
    const auto& color = style.focus_color(rank);
    std::vector<Point> run;
    std::size_t run_start = 0;
    auto flush = [&] {
      if (run.size() >= 2) {
        if (!taper) {
          Polyline line;
          line.points = run;
          line.stroke = color;
          line.stroke_width = style.trajectory_stroke_mm;
          line.ref = "n:" + id;
          doc.elements.emplace_back(std::move(line));
        } else {
          for (std::size_t k = 0; k + 1 < run.size(); ++k) {
            const double mid = (static_cast<double>(run_start + k) + 0.5) / last;
            Line seg;
            seg.from = run[k];
            seg.to = run[k + 1];
            seg.stroke = color;
            seg.stroke_width = style.trajectory_stroke_mm * (1.0 - 0.75 * mid);
            seg.ref = "n:" + id;
            doc.elements.emplace_back(std::move(seg));
          }
        }
      }
      run.clear();
    };
    for (std::size_t t = 0; t < layouts.size(); ++t) {
      auto it = layouts[t].positions_mm.find(id);
      if (it == layouts[t].positions_mm.end()) {
        flush();
        continue;
      }
      if (run.empty()) run_start = t;
      run.push_back(it->second);
      Circle marker;
      marker.center = it->second;
      marker.radius = style.trajectory_marker_radius_mm;
      marker.fill = "#FFFFFF";
      marker.stroke = color;
      marker.stroke_width = style.trajectory_stroke_mm;
      marker.ref = "n:" + id;
      markers.emplace_back(std::move(marker));
    }
    flush();
  }
  doc.elements.insert(doc.elements.end(), markers.begin(), markers.end());
  return doc;
}

double label_font_size_mm(const StyleSpec& style) { return style.label_font_size_pt * kPtToMm; }

LabelBox label_box(const Text& text) {
  const double width = 0.6 * text.font_size_mm * static_cast<double>(utf8_length(text.content));
  const double line = 1.2 * text.font_size_mm;
  // The baseline sits 0.35 em below the box centre.
  const double cy = text.position.y - 0.35 * text.font_size_mm;
  const double x0 = text.anchor == TextAnchor::start ? text.position.x : text.position.x - width;
  return {x0, cy - line / 2.0, x0 + width, cy + line / 2.0};
}

SliceDocument render_label_overlay(const std::vector<PhysicalLayout>& layouts,
                                   const std::vector<NodeId>& focus_order,
                                   const std::map<NodeId, std::string>& labels, const RenderSettings& settings,
                                   std::optional<std::size_t> anchor_slice) {
  if (anchor_slice && *anchor_slice >= layouts.size())
    throw ParameterError("label anchor slice " + std::to_string(*anchor_slice) + " out of range");
  auto doc = make_doc(DocumentKind::label_overlay, std::nullopt, settings.page);
  if (layouts.empty()) return doc;
  const auto& style = settings.style;
  const auto& page = settings.page;
  const double size = label_font_size_mm(style);
  const double line = 1.2 * size;
  std::vector<LabelBox> placed;

  for (const auto& id : focus_order) {
    // Anchor: the chosen slice, else the nearest earlier, else the nearest later presence.
    const std::size_t limit = anchor_slice ? *anchor_slice : layouts.size() - 1;
    const Point* at = nullptr;
    for (std::size_t t = limit + 1; t-- > 0 && !at;)
      if (auto it = layouts[t].positions_mm.find(id); it != layouts[t].positions_mm.end()) at = &it->second;
    for (std::size_t t = limit + 1; t < layouts.size() && !at; ++t)
      if (auto it = layouts[t].positions_mm.find(id); it != layouts[t].positions_mm.end()) at = &it->second;
    if (!at) continue;

    Text text;
    auto label = labels.find(id);
    text.content = label != labels.end() && !label->second.empty() ? label->second : id;
    text.font_size_mm = size;
    text.font_family = style.label_font_family;
    text.ref = "n:" + id;
    text.position = {at->x + style.focus_radius_mm + kLabelGapMm, at->y + 0.35 * size};
    if (label_box(text).x1 > page.width_mm) {
      text.anchor = TextAnchor::end;
      text.position.x = at->x - style.focus_radius_mm - kLabelGapMm;
    }

    auto fits = [&](const Text& candidate) {
      const auto box = label_box(candidate);
      if (box.y0 < 0.0 || box.y1 > page.height_mm) return false;
      return std::none_of(placed.begin(), placed.end(), [&](const LabelBox& b) { return b.overlaps(box); });
    };
    bool found = false;
    const double base = text.position.y;
    // Push down a line at a time; past the page bottom, scan again from the top.
    for (int k = 0; !found && base + k * line <= page.height_mm + line; ++k) {
      text.position.y = base + k * line;
      found = fits(text);
    }
    for (int k = 0; !found && k * line <= page.height_mm; ++k) {
      text.position.y = line / 2.0 + 0.35 * size + k * line;
      found = fits(text);
    }
    if (!found) throw ConsistencyError("no free position for label '" + text.content + "'");
    placed.push_back(label_box(text));
    doc.elements.emplace_back(std::move(text));
  }
  return doc;
}

SliceDocument add_registration_marks(SliceDocument doc) {
  const auto& page = doc.page;
  if (page.margin_mm < kMinMarkMarginMm)
    throw ConfigError("page.margin_mm", "margin of " + format_mm(page.margin_mm) +
                                            " mm is too small for registration marks (need at least " +
                                            format_mm(kMinMarkMarginMm) + " mm)");
  doc.registration.clear();
  const double m = page.margin_mm;
  const double cy = page.height_mm / 2.0;
  for (const double cx : {m / 2.0, page.width_mm - m / 2.0}) {
    Circle ring;
    ring.center = {cx, cy};
    ring.radius = 0.3 * m;
    ring.stroke = "#000000";
    ring.stroke_width = kMarkStrokeMm;
    ring.ref = "mark";
    Line h{{cx - 0.45 * m, cy}, {cx + 0.45 * m, cy}, "#000000", kMarkStrokeMm, 1.0, "mark"};
    Line v{{cx, cy - 0.45 * m}, {cx, cy + 0.45 * m}, "#000000", kMarkStrokeMm, 1.0, "mark"};
    doc.registration.emplace_back(std::move(ring));
    doc.registration.emplace_back(std::move(h));
    doc.registration.emplace_back(std::move(v));
  }
  return doc;
}

std::vector<SheetDocument> impose(const std::vector<SliceDocument>& docs, const PageSpec& sheet, int per_sheet) {
  if (per_sheet < 1) throw ParameterError("slices per sheet must be >= 1");
  if (docs.empty()) return {};
  const double w = docs.front().page.width_mm;
  const double h = docs.front().page.height_mm;
  for (const auto& d : docs)
    if (d.page.width_mm != w || d.page.height_mm != h)
      throw ParameterError("imposition needs documents of one page size");

  constexpr double eps = 1e-9;
  int rotation = -1, cols = 0, rows = 0;
  double cell_w = 0.0, cell_h = 0.0;
  for (const int rot : {0, 90}) {
    const double cw = rot == 0 ? w : h;
    const double ch = rot == 0 ? h : w;
    const int c = static_cast<int>(std::floor(sheet.width_mm / cw + eps));
    const int r = static_cast<int>(std::floor(sheet.height_mm / ch + eps));
    if (c * r >= per_sheet) {
      rotation = rot;
      cell_w = cw;
      cell_h = ch;
      cols = std::min(c, per_sheet);
      rows = (per_sheet + cols - 1) / cols;
      break;
    }
  }
  if (rotation < 0)
    throw ParameterError(std::to_string(per_sheet) + " pages of " + format_mm(w) + " x " + format_mm(h) +
                         " mm do not fit on a " + format_mm(sheet.width_mm) + " x " +
                         format_mm(sheet.height_mm) + " mm sheet");

  const double ox = (sheet.width_mm - cols * cell_w) / 2.0;
  const double oy = (sheet.height_mm - rows * cell_h) / 2.0;
  std::vector<Line> cuts;
  for (int r = 1; r < rows; ++r) {
    const double y = oy + r * cell_h;
    cuts.push_back(Line{{0.0, y}, {sheet.width_mm, y}, "#808080", 0.1, 1.0, "cut", true});
  }
  for (int c = 1; c < cols; ++c) {
    const double x = ox + c * cell_w;
    cuts.push_back(Line{{x, 0.0}, {x, sheet.height_mm}, "#808080", 0.1, 1.0, "cut", true});
  }

  std::vector<SheetDocument> sheets;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const auto slot = static_cast<int>(i % per_sheet);
    if (slot == 0) sheets.push_back(SheetDocument{sheet, {}, cuts});
    const double x = ox + (slot % cols) * cell_w;
    const double y = oy + (slot / cols) * cell_h;
    Placement p{rotation == 90 ? x + cell_w : x, y, rotation};
    sheets.back().placed.push_back(PlacedDocument{docs[i], p});
  }
  return sheets;
}

SliceDocument render_preview(const std::vector<SliceDocument>& context_docs, const SliceDocument& trajectories,
                             const PageSpec& page, double opacity) {
  if (!(opacity > 0.0 && opacity <= 1.0)) throw ParameterError("preview opacity must lie in (0, 1]");
  auto doc = make_doc(DocumentKind::preview, std::nullopt, page);
  for (const auto& ctx : context_docs)
    for (auto element : ctx.elements) {
      std::visit([&](auto& p) { p.opacity = opacity; }, element);
      doc.elements.push_back(std::move(element));
    }
  doc.elements.insert(doc.elements.end(), trajectories.elements.begin(), trajectories.elements.end());
  return doc;
}

}  // namespace hologforge
