#pragma once

#include "hologforge/graph_model.hpp"
#include "hologforge/layout_engine.hpp"
#include "hologforge/physical_embedding.hpp"
#include "hologforge/rack_generator.hpp"

#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace hologforge {

inline constexpr int kLegibleSliceDocuments = 20;

struct InputSpec {
  std::filesystem::path path;
  EventFormat format = EventFormat::csv;
};

struct FilterSpec {
  double keep_fraction = 0.10;
  FilterScope scope = FilterScope::global;
};

struct FocusSpec {
  int k = 10;
  bool require_all_slices = true;
  std::vector<NodeId> explicit_ids;  // overrides centrality ranking when non-empty
};

struct SheetSpec {
  PageSpec page = PageSpec::preset("A4", Orientation::portrait, 0.0);
  int per_sheet = 2;
};

struct BuildFlags {
  bool taper = false;
  bool stretch = false;
  bool keep_isolated = false;
  double preview_opacity = 0.35;
  std::optional<std::size_t> label_anchor_slice;  // none = last appearance
};

struct PipelineConfig {
  InputSpec input;
  FilterSpec filter;
  FocusSpec focus;
  LayoutParams layout;
  PageSpec page = PageSpec::preset("A5", Orientation::landscape, 12.0);
  SheetSpec sheet;
  StyleSpec style;
  std::optional<RackSpec> rack;
  std::filesystem::path output_dir = "out";
  BuildFlags flags;
  std::string medium = "laser-printer overhead transparency";
};

// Strict parse with full defaulting. Unknown keys, type mismatches and range
// violations throw ConfigError naming the offending key path. Relative input
// and output paths are resolved against `base_dir`.
PipelineConfig validate_config(std::istream& raw, const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const PipelineConfig& config);
nlohmann::json to_json(const LayoutParams& params);

// HOLOGFORGE_SEED overrides the layout seed when set.
void apply_environment(PipelineConfig& config);

struct FocusEntry {
  NodeId id;
  std::string label;
  int degree = 0;
};

struct BuildReport {
  std::size_t nodes_before = 0, edges_before = 0;
  std::size_t nodes_after = 0, edges_after = 0;
  std::size_t slice_count = 0;
  std::vector<FocusEntry> focus;
  TrajectoryStats trajectories;
  std::vector<std::string> files;  // relative to the output directory
  std::vector<std::string> warnings;
  nlohmann::json config;
};

nlohmann::json to_json(const BuildReport& report);

// Result of ingest -> aggregate -> filter -> focus selection.
struct PreparedGraph {
  DynamicGraph raw;
  DynamicGraph filtered;
  FocusSelection focus;
};

PreparedGraph ingest(const PipelineConfig& config);

// Stable fingerprint of everything the layout depends on.
std::string layout_key(const PreparedGraph& prepared, const LayoutParams& params);

// Anchored layouts rounded to six decimals, the precision they are stored at.
std::vector<SliceLayout> compute_layouts(const PreparedGraph& prepared, const LayoutParams& params);

nlohmann::json layouts_to_json(const std::vector<SliceLayout>& layouts, const std::string& key);
// Returns the layouts when the document's key equals `key`, otherwise nullopt.
std::optional<std::vector<SliceLayout>> layouts_from_json(const nlohmann::json& doc, const std::string& key);

struct RunOptions {
  bool relayout = false;
};

// Full build: ingest, layout (reusing <output_dir>/layouts.json when its key
// matches), render, impose, optional rack, manifest and report. Outputs are
// assembled in a sibling temp directory and swapped in on success.
BuildReport run_pipeline(const PipelineConfig& config, const RunOptions& options = {});

// Layout stage alone: writes <output_dir>/layouts.json.
std::vector<SliceLayout> run_layout_stage(const PipelineConfig& config, const RunOptions& options = {});

// Render stage alone: needs a current <output_dir>/layouts.json.
BuildReport run_render_stage(const PipelineConfig& config);

// Rack stage alone: writes the two STL files into <output_dir>.
std::vector<std::string> run_rack_stage(const PipelineConfig& config);

}  // namespace hologforge
