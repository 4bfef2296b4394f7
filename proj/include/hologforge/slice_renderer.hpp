#pragma once

#include "hologforge/document.hpp"
#include "hologforge/graph_model.hpp"

#include <map>
#include <optional>
#include <vector>

namespace hologforge {

struct WeightRange {
  double min = 1.0;
  double max = 1.0;
};

// Global edge weight extrema over the (filtered) graph.
WeightRange weight_range(const DynamicGraph& graph);

struct RenderSettings {
  PageSpec page;
  StyleSpec style;
  WeightRange weights;
};

// Edges (black, weight-mapped stroke) under focus-colored nodes. Node colors
// come from the rank of the node in `focus_order`, so they agree across slices.
SliceDocument render_focus_slice(const TimesliceGraph& focus_subgraph, const PhysicalLayout& layout,
                                 const std::vector<NodeId>& focus_order, const RenderSettings& settings);

SliceDocument render_context_slice(const TimesliceGraph& context_subgraph, const PhysicalLayout& layout,
                                   const RenderSettings& settings);

// One polyline per contiguous presence run (>= 2 slices) plus a white,
// palette-stroked marker at every position. `taper` replaces each polyline by
// segments whose width shrinks from the first to the last slice.
SliceDocument render_trajectory_overlay(const std::vector<PhysicalLayout>& layouts,
                                        const std::vector<NodeId>& focus_order, const RenderSettings& settings,
                                        bool taper = false);

// Axis-aligned label box estimate used for collision handling.
struct LabelBox {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
  bool overlaps(const LabelBox& o) const { return x0 < o.x1 && o.x0 < x1 && y0 < o.y1 && o.y0 < y1; }
};

double label_font_size_mm(const StyleSpec& style);
// Width estimate 0.6 em per code point, height 1.2 em (one line).
LabelBox label_box(const Text& text);

// One label per focus node at its position in `anchor_slice` (default: the
// last slice where it appears), pushed down a line at a time until it no
// longer intersects an earlier label.
SliceDocument render_label_overlay(const std::vector<PhysicalLayout>& layouts,
                                   const std::vector<NodeId>& focus_order,
                                   const std::map<NodeId, std::string>& labels, const RenderSettings& settings,
                                   std::optional<std::size_t> anchor_slice = std::nullopt);

// Crosshair-and-circle punch marks centred in the left and right margins.
SliceDocument add_registration_marks(SliceDocument doc);

// Places documents in order, `per_sheet` per sheet, unrotated when the grid
// fits and rotated by 90 degrees otherwise. Throws when neither fits.
std::vector<SheetDocument> impose(const std::vector<SliceDocument>& docs, const PageSpec& sheet, int per_sheet);

// Context slices at `opacity` superimposed with the trajectory overlay.
SliceDocument render_preview(const std::vector<SliceDocument>& context_docs, const SliceDocument& trajectories,
                             const PageSpec& page, double opacity);

}  // namespace hologforge
