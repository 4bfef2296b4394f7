#include "hologforge/pipeline.hpp"

#include "hologforge/document.hpp"
#include "hologforge/error.hpp"
#include "hologforge/slice_renderer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace hologforge {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kLayoutsFile = "layouts.json";
constexpr const char* kManifestFile = "manifest.json";
constexpr const char* kReportFile = "report.json";

std::string prefixed(const char* name, const char* what) {
  const std::string prefix = std::string(name) + ": ";
  return std::string(what).rfind(prefix, 0) == 0 ? what : prefix + what;
}

// Runs `fn`, prefixing any failure with the stage name. The error type (and
// so the exit code) is preserved; config errors already name their key.
template <typename F>
auto stage(const char* name, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const SelfLoopError& e) {
    throw SelfLoopError(e.location(), prefixed(name, e.what()));
  } catch (const ParseError& e) {
    throw ParseError(e.location(), prefixed(name, e.what()));
  } catch (const NumericalDivergenceError& e) {
    throw NumericalDivergenceError(e.tick(), e.node(), prefixed(name, e.what()));
  } catch (const ParameterError& e) {
    throw ParameterError(prefixed(name, e.what()));
  } catch (const ConsistencyError& e) {
    throw ConsistencyError(prefixed(name, e.what()));
  } catch (const IoError& e) {
    throw IoError(prefixed(name, e.what()));
  } catch (const Error& e) {
    throw Error(e.category(), prefixed(name, e.what()));
  } catch (const fs::filesystem_error& e) {
    throw IoError(prefixed(name, e.what()));
  }
}

double round6(double v) {
  const double r = std::round(v * 1e6) / 1e6;
  return r == 0.0 ? 0.0 : r;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

// Write next to the destination, then rename over it.
void write_file_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".partial";
  write_file(tmp, content);
  fs::rename(tmp, path);
}

std::optional<json> read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  try {
    return json::parse(in);
  } catch (const json::parse_error&) {
    return std::nullopt;
  }
}

json page_entry(const PageSpec& page) {
  return {{"name", page.name},
          {"orientation", page.orientation == Orientation::portrait ? "portrait" : "landscape"},
          {"width_mm", page.width_mm},
          {"height_mm", page.height_mm},
          {"margin_mm", page.margin_mm}};
}

json slice_key_json(const SliceKey& key) {
  return std::holds_alternative<std::int64_t>(key) ? json(std::get<std::int64_t>(key))
                                                   : json(std::get<std::string>(key));
}

std::string stl_bytes(const TriMesh& mesh) {
  std::ostringstream os(std::ios::binary);
  emit_stl(mesh, os);
  return os.str();
}

// Collects emitted files; everything but the manifest and report is listed in
// the manifest.
class OutputTree {
 public:
  explicit OutputTree(fs::path root) : root_(std::move(root)) {}

  void add(const std::string& rel, const std::string& content, const std::string& kind,
           std::optional<std::size_t> slice = std::nullopt, const PageSpec* page = nullptr) {
    write_file(root_ / rel, content);
    files_.push_back(rel);
    manifest_.push_back({{"path", rel},
                         {"kind", kind},
                         {"slice_index", slice ? json(*slice) : json(nullptr)},
                         {"page", page ? page_entry(*page) : json(nullptr)}});
  }

  void finish(BuildReport& report, const std::string& medium) {
    write_file(root_ / kManifestFile, dump({{"medium", medium}, {"files", manifest_}}));
    files_.push_back(kManifestFile);
    files_.push_back(kReportFile);
    report.files = files_;
    write_file(root_ / kReportFile, dump(to_json(report)));
  }

 private:
  fs::path root_;
  std::vector<std::string> files_;
  json manifest_ = json::array();
};

fs::path normalized_target(const fs::path& dir) {
  fs::path target = dir.lexically_normal();
  if (!target.has_filename()) target = target.parent_path();
  if (target.empty()) throw ConfigError("output_dir", "must name a directory");
  return target;
}

fs::path sibling(const fs::path& target, const char* suffix) {
  fs::path p = target.parent_path() / ("." + target.filename().string() + suffix);
  return p;
}

// Swap a fully written temp tree in place of the target directory.
void promote(const fs::path& staged, const fs::path& target) {
  const fs::path previous = sibling(target, ".previous");
  fs::remove_all(previous);
  if (fs::exists(target)) fs::rename(target, previous);
  fs::rename(staged, target);
  fs::remove_all(previous);
}

std::string slice_warning(std::size_t documents) {
  return std::to_string(documents) + " focus and context slice documents exceed the legibility limit of " +
         std::to_string(kLegibleSliceDocuments) +
         ": stacks of more than about 20 transparent slices become hard to read through";
}

BuildReport build_tree(const PipelineConfig& config, const PreparedGraph& prepared,
                       const std::vector<SliceLayout>& layouts, const std::string& key) {
  const fs::path target = normalized_target(config.output_dir);
  const fs::path staged = sibling(target, ".partial");
  fs::remove_all(staged);
  fs::create_directories(staged);

  try {
    const auto& partition = prepared.focus.partition;
    const auto& slices = prepared.filtered.slices();

    BuildReport report;
    report.nodes_before = prepared.raw.nodes().size();
    report.edges_before = prepared.raw.edge_count();
    report.nodes_after = prepared.filtered.nodes().size();
    report.edges_after = prepared.filtered.edge_count();
    report.slice_count = slices.size();
    for (const auto& id : partition.focus)
      report.focus.push_back({id, prepared.filtered.node(id).label, prepared.focus.degrees.at(id)});
    report.trajectories = trajectory_stats(layouts, {partition.focus.begin(), partition.focus.end()});
    report.warnings = prepared.focus.warnings;
    if (2 * slices.size() > static_cast<std::size_t>(kLegibleSliceDocuments))
      report.warnings.push_back(slice_warning(2 * slices.size()));
    report.config = to_json(config);

    OutputTree tree(staged);
    tree.add(kLayoutsFile, dump(layouts_to_json(layouts, key)), "layouts");

    std::vector<SliceDocument> focus_docs, context_docs;
    SliceDocument trajectories, labels, preview;
    stage("render", [&] {
      const auto physical = map_to_page(layouts, config.page, config.flags.stretch);
      const RenderSettings settings{config.page, config.style, weight_range(prepared.filtered)};
      for (std::size_t t = 0; t < slices.size(); ++t) {
        const auto split = split_focus_context(slices[t], partition);
        focus_docs.push_back(
            add_registration_marks(render_focus_slice(split.focus, physical[t], partition.focus, settings)));
        context_docs.push_back(add_registration_marks(render_context_slice(split.context, physical[t], settings)));
      }
      trajectories = render_trajectory_overlay(physical, partition.focus, settings, config.flags.taper);
      std::map<NodeId, std::string> names;
      for (const auto& n : prepared.filtered.nodes()) names[n.id] = n.label;
      labels = render_label_overlay(physical, partition.focus, names, settings, config.flags.label_anchor_slice);
      preview = render_preview(context_docs, trajectories, config.page, config.flags.preview_opacity);
      trajectories = add_registration_marks(std::move(trajectories));
      labels = add_registration_marks(std::move(labels));
    });

    stage("write", [&] {
      for (std::size_t t = 0; t < slices.size(); ++t) {
        const auto i = std::to_string(t);
        tree.add("slices/focus_" + i + ".svg", to_svg(focus_docs[t]), "focus", t, &config.page);
        tree.add("slices/context_" + i + ".svg", to_svg(context_docs[t]), "context", t, &config.page);
      }
      tree.add("overlays/trajectories.svg", to_svg(trajectories), "trajectory_overlay", std::nullopt, &config.page);
      tree.add("overlays/labels.svg", to_svg(labels), "label_overlay", std::nullopt, &config.page);
      tree.add("preview.svg", to_svg(preview), "preview", std::nullopt, &config.page);
    });

    stage("impose", [&] {
      std::vector<SliceDocument> sequence;
      for (std::size_t t = 0; t < slices.size(); ++t) {
        sequence.push_back(focus_docs[t]);
        sequence.push_back(context_docs[t]);
      }
      sequence.push_back(trajectories);
      sequence.push_back(labels);
      const auto sheets = impose(sequence, config.sheet.page, config.sheet.per_sheet);
      for (std::size_t j = 0; j < sheets.size(); ++j)
        tree.add("sheets/sheet_" + std::to_string(j) + ".svg", to_svg(sheets[j]), "sheet", std::nullopt,
                 &config.sheet.page);
    });

    if (config.rack) {
      stage("rack", [&] {
        const auto parts = generate_rack(*config.rack);
        tree.add("rack_holder.stl", stl_bytes(parts.holder), "rack_holder");
        tree.add("rack_base.stl", stl_bytes(parts.base), "rack_base");
      });
    }

    stage("write", [&] { tree.finish(report, config.medium); });
    stage("promote", [&] { promote(staged, target); });
    return report;
  } catch (...) {
    std::error_code ignored;
    fs::remove_all(staged, ignored);
    throw;
  }
}

std::optional<std::vector<SliceLayout>> cached_layouts(const PipelineConfig& config, const std::string& key) {
  const auto doc = read_json(normalized_target(config.output_dir) / kLayoutsFile);
  if (!doc) return std::nullopt;
  try {
    return layouts_from_json(*doc, key);
  } catch (const Error&) {
    return std::nullopt;  // unreadable cache: recompute
  }
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

json to_json(const BuildReport& r) {
  json focus = json::array();
  for (const auto& f : r.focus) focus.push_back({{"id", f.id}, {"label", f.label}, {"degree", f.degree}});
  json path_length = json::object();
  for (const auto& [id, len] : r.trajectories.path_length) path_length[id] = len;
  return {{"counts",
           {{"before_filter", {{"nodes", r.nodes_before}, {"edges", r.edges_before}}},
            {"after_filter", {{"nodes", r.nodes_after}, {"edges", r.edges_after}}},
            {"slices", r.slice_count}}},
          {"focus", focus},
          {"trajectories",
           {{"units", "layout"},
            {"path_length", path_length},
            {"transition_mean", r.trajectories.transition_mean},
            {"mean_displacement", r.trajectories.mean_displacement()}}},
          {"files", r.files},
          {"warnings", r.warnings},
          {"config", r.config}};
}

PreparedGraph ingest(const PipelineConfig& config) {
  PreparedGraph out;
  const auto events = stage("parse", [&] {
    std::ifstream in(config.input.path, std::ios::binary);
    if (!in) throw IoError("cannot open input " + config.input.path.string());
    return parse_events(in, config.input.format);
  });
  out.raw = stage("aggregate", [&] { return aggregate(events); });
  out.filtered = stage("filter", [&] {
    return filter_top_percentile(out.raw, config.filter.keep_fraction, config.filter.scope,
                                 config.flags.keep_isolated);
  });
  out.focus = stage("focus", [&] {
    return config.focus.explicit_ids.empty()
               ? select_focus(out.filtered, config.focus.k, config.focus.require_all_slices)
               : explicit_focus(out.filtered, config.focus.explicit_ids);
  });
  return out;
}

std::string layout_key(const PreparedGraph& prepared, const LayoutParams& params) {
  json slices = json::array();
  for (const auto& s : prepared.filtered.slices()) {
    json edges = json::array();
    for (const auto& e : s.edges) edges.push_back({e.u, e.v, e.weight});
    slices.push_back({{"key", slice_key_json(s.slice_key)}, {"edges", edges}});
  }
  const auto& part = prepared.focus.partition;
  const json basis = {{"format", 1},
                      {"slices", slices},
                      {"focus", part.focus},
                      {"context", std::vector<NodeId>(part.context.begin(), part.context.end())},
                      {"layout", to_json(params)}};
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a(basis.dump())));
  return hex;
}

std::vector<SliceLayout> compute_layouts(const PreparedGraph& prepared, const LayoutParams& params) {
  auto layouts = layout_chain(prepared.filtered, prepared.focus.partition, params);
  for (auto& l : layouts)
    for (auto& [_, p] : l.positions) p = {round6(p.x), round6(p.y)};
  return layouts;
}

json layouts_to_json(const std::vector<SliceLayout>& layouts, const std::string& key) {
  json slices = json::array();
  for (const auto& l : layouts) {
    json positions = json::object();
    for (const auto& [id, p] : l.positions) positions[id] = {p.x, p.y};
    slices.push_back({{"slice_index", l.slice_index}, {"positions", positions}});
  }
  return {{"key", key}, {"slices", slices}};
}

std::optional<std::vector<SliceLayout>> layouts_from_json(const json& doc, const std::string& key) {
  if (!doc.is_object() || !doc.contains("key") || doc.at("key") != key) return std::nullopt;
  try {
    std::vector<SliceLayout> out;
    for (const auto& s : doc.at("slices")) {
      SliceLayout l;
      l.slice_index = s.at("slice_index").get<std::size_t>();
      for (const auto& [id, p] : s.at("positions").items())
        l.positions[id] = {p.at(0).get<double>(), p.at(1).get<double>()};
      out.push_back(std::move(l));
    }
    return out;
  } catch (const json::exception& e) {
    throw ConsistencyError(std::string("malformed layouts file: ") + e.what());
  }
}

BuildReport run_pipeline(const PipelineConfig& config, const RunOptions& options) {
  const auto prepared = ingest(config);
  const auto key = layout_key(prepared, config.layout);
  std::optional<std::vector<SliceLayout>> layouts;
  if (!options.relayout) layouts = cached_layouts(config, key);
  if (!layouts) layouts = stage("layout", [&] { return compute_layouts(prepared, config.layout); });
  return build_tree(config, prepared, *layouts, key);
}

std::vector<SliceLayout> run_layout_stage(const PipelineConfig& config, const RunOptions& options) {
  const auto prepared = ingest(config);
  const auto key = layout_key(prepared, config.layout);
  if (!options.relayout)
    if (auto cached = cached_layouts(config, key)) return *cached;
  auto layouts = stage("layout", [&] { return compute_layouts(prepared, config.layout); });
  stage("write", [&] {
    write_file_atomic(normalized_target(config.output_dir) / kLayoutsFile, dump(layouts_to_json(layouts, key)));
  });
  return layouts;
}

BuildReport run_render_stage(const PipelineConfig& config) {
  const auto prepared = ingest(config);
  const auto key = layout_key(prepared, config.layout);
  const auto layouts = stage("render", [&] {
    const fs::path path = normalized_target(config.output_dir) / kLayoutsFile;
    if (!fs::exists(path)) throw IoError(path.string() + " not found; run the layout stage first");
    const auto doc = read_json(path);
    if (!doc) throw ConsistencyError(path.string() + " is not valid JSON");
    auto parsed = layouts_from_json(*doc, key);
    if (!parsed) throw ConsistencyError(path.string() + " is stale for this input and configuration");
    return *parsed;
  });
  return build_tree(config, prepared, layouts, key);
}

std::vector<std::string> run_rack_stage(const PipelineConfig& config) {
  const RackSpec spec = config.rack.value_or(RackSpec{});
  const auto parts = stage("rack", [&] { return generate_rack(spec); });
  const fs::path dir = normalized_target(config.output_dir);
  std::vector<std::string> files{"rack_holder.stl", "rack_base.stl"};
  stage("write", [&] {
    write_file_atomic(dir / files[0], stl_bytes(parts.holder));
    write_file_atomic(dir / files[1], stl_bytes(parts.base));
    // Keep an existing build's manifest complete.
    if (auto manifest = read_json(dir / kManifestFile); manifest && manifest->contains("files")) {
      auto& listed = (*manifest)["files"];
      for (std::size_t i = 0; i < files.size(); ++i) {
        bool present = false;
        for (const auto& f : listed) present = present || f.value("path", "") == files[i];
        if (!present)
          listed.push_back({{"path", files[i]},
                            {"kind", i == 0 ? "rack_holder" : "rack_base"},
                            {"slice_index", nullptr},
                            {"page", nullptr}});
      }
      write_file_atomic(dir / kManifestFile, dump(*manifest));
    }
  });
  return files;
}

}  // namespace hologforge
