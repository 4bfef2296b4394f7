#include "hologforge/error.hpp"
#include "hologforge/pipeline.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>

namespace hologforge {

namespace {

using nlohmann::json;

std::string join(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

// Walks one JSON object, remembering which keys were read so that anything
// left over can be reported as unknown.
class Section {
 public:
  Section(const json& value, std::string path) : value_(value), path_(std::move(path)) {
    if (!value_.is_object()) throw ConfigError(path_, "expected an object");
  }

  ~Section() noexcept(false) {
    if (std::uncaught_exceptions()) return;
    for (const auto& [key, _] : value_.items())
      if (!seen_.count(key)) throw ConfigError(join(path_, key), "unknown key");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return value_.contains(key) && !value_.at(key).is_null();
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return value_.at(key);
  }

  std::string path(const std::string& key) const { return join(path_, key); }

  void number(const std::string& key, double& out) {
    if (!has(key)) return;
    const auto& v = value_.at(key);
    if (!v.is_number()) throw ConfigError(path(key), "expected a number");
    out = v.get<double>();
    if (!std::isfinite(out)) throw ConfigError(path(key), "must be finite");
  }

  void integer(const std::string& key, int& out) {
    if (!has(key)) return;
    const auto& v = value_.at(key);
    if (!v.is_number_integer()) throw ConfigError(path(key), "expected an integer");
    const auto n = v.get<std::int64_t>();
    if (n < std::numeric_limits<int>::min() || n > std::numeric_limits<int>::max())
      throw ConfigError(path(key), "integer out of range");
    out = static_cast<int>(n);
  }

  void unsigned_integer(const std::string& key, std::uint64_t& out) {
    if (!has(key)) return;
    const auto& v = value_.at(key);
    if (!v.is_number_unsigned()) throw ConfigError(path(key), "expected a non-negative integer");
    out = v.get<std::uint64_t>();
  }

  void boolean(const std::string& key, bool& out) {
    if (!has(key)) return;
    const auto& v = value_.at(key);
    if (!v.is_boolean()) throw ConfigError(path(key), "expected true or false");
    out = v.get<bool>();
  }

  void string(const std::string& key, std::string& out) {
    if (!has(key)) return;
    const auto& v = value_.at(key);
    if (!v.is_string()) throw ConfigError(path(key), "expected a string");
    out = v.get<std::string>();
  }

  template <typename Enum>
  void choice(const std::string& key, Enum& out, std::initializer_list<std::pair<const char*, Enum>> options) {
    std::string s;
    if (!has(key)) return;
    string(key, s);
    for (const auto& [name, value] : options)
      if (s == name) {
        out = value;
        return;
      }
    std::string allowed;
    for (const auto& [name, _] : options) allowed += (allowed.empty() ? "" : ", ") + std::string(name);
    throw ConfigError(path(key), "expected one of " + allowed);
  }

 private:
  const json& value_;
  std::string path_;
  std::set<std::string> seen_;
};

// Re-throws a nested validate() failure against the section's key path.
template <typename F>
void checked(const std::string& path, F&& validate) {
  try {
    validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
}

const std::initializer_list<std::pair<const char*, Orientation>> kOrientations = {
    {"portrait", Orientation::portrait}, {"landscape", Orientation::landscape}};

PageSpec read_page(Section& s, PageSpec page) {
  std::string name = page.name;
  s.string("preset", name);
  auto orientation = page.orientation;
  s.choice("orientation", orientation, kOrientations);
  double margin = page.margin_mm, width = page.width_mm, height = page.height_mm;
  s.number("margin_mm", margin);
  const bool explicit_size = s.has("width_mm") || s.has("height_mm");
  s.number("width_mm", width);
  s.number("height_mm", height);
  if (name == "custom") {
    page = PageSpec::custom(width, height, margin);
    page.orientation = orientation;
  } else {
    checked(s.path("preset"), [&] { page = PageSpec::preset(name, orientation, margin); });
    // Extents may be restated (as in the report echo) but not changed.
    if (explicit_size && (std::abs(width - page.width_mm) > 1e-9 || std::abs(height - page.height_mm) > 1e-9))
      throw ConfigError(s.path("width_mm"), "differs from preset \"" + name + "\"; use preset \"custom\"");
  }
  checked(s.path("margin_mm"), [&] { page.validate(); });
  return page;
}

json page_json(const PageSpec& page) {
  return {{"preset", page.name},
          {"orientation", page.orientation == Orientation::portrait ? "portrait" : "landscape"},
          {"width_mm", page.width_mm},
          {"height_mm", page.height_mm},
          {"margin_mm", page.margin_mm}};
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::filesystem::path& p) {
  return p.is_relative() && !base.empty() ? base / p : p;
}

}  // namespace

PipelineConfig validate_config(std::istream& raw, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(raw);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }

  PipelineConfig cfg;
  Section top(root, "");

  if (!top.has("input")) throw ConfigError("input", "required key missing");
  {
    Section s(top.raw("input"), "input");
    std::string path;
    if (!s.has("path")) throw ConfigError("input.path", "required key missing");
    s.string("path", path);
    cfg.input.path = resolve(base_dir, path);
    const auto ext = cfg.input.path.extension().string();
    cfg.input.format = ext == ".json" ? EventFormat::json : EventFormat::csv;
    s.choice("format", cfg.input.format, {{"csv", EventFormat::csv}, {"json", EventFormat::json}});
  }

  if (top.has("filter")) {
    Section s(top.raw("filter"), "filter");
    s.number("keep_fraction", cfg.filter.keep_fraction);
    s.choice("scope", cfg.filter.scope, {{"global", FilterScope::global}, {"per_slice", FilterScope::per_slice}});
  }
  if (!(cfg.filter.keep_fraction > 0.0 && cfg.filter.keep_fraction <= 1.0))
    throw ConfigError("filter.keep_fraction", "must lie in (0, 1]");

  if (top.has("focus")) {
    Section s(top.raw("focus"), "focus");
    s.integer("k", cfg.focus.k);
    s.boolean("require_all_slices", cfg.focus.require_all_slices);
    if (s.has("explicit_ids")) {
      const auto& ids = s.raw("explicit_ids");
      if (!ids.is_array()) throw ConfigError("focus.explicit_ids", "expected an array of strings");
      for (const auto& id : ids) {
        if (!id.is_string()) throw ConfigError("focus.explicit_ids", "expected an array of strings");
        cfg.focus.explicit_ids.push_back(id.get<std::string>());
      }
    }
  }
  if (cfg.focus.k < 1) throw ConfigError("focus.k", "must be >= 1");

  if (top.has("layout")) {
    Section s(top.raw("layout"), "layout");
    auto& p = cfg.layout;
    s.number("link_distance", p.link_distance);
    s.number("link_strength_scale", p.link_strength_scale);
    s.number("repulsion_strength", p.repulsion_strength);
    s.number("theta", p.theta);
    s.number("center_strength", p.center_strength);
    s.number("velocity_decay", p.velocity_decay);
    s.number("alpha_initial", p.alpha_initial);
    s.number("alpha_min", p.alpha_min);
    s.number("alpha_decay", p.alpha_decay);
    s.integer("max_ticks", p.max_ticks);
    s.unsigned_integer("seed", p.seed);
    s.boolean("weighted_links", p.weighted_links);
  }
  checked("layout", [&] { cfg.layout.validate(); });

  if (top.has("page")) {
    Section s(top.raw("page"), "page");
    cfg.page = read_page(s, cfg.page);
  }

  if (top.has("sheet")) {
    Section s(top.raw("sheet"), "sheet");
    cfg.sheet.page = read_page(s, cfg.sheet.page);
    s.integer("per_sheet", cfg.sheet.per_sheet);
  }
  if (cfg.sheet.per_sheet < 1) throw ConfigError("sheet.per_sheet", "must be >= 1");

  if (top.has("style")) {
    Section s(top.raw("style"), "style");
    auto& st = cfg.style;
    if (s.has("focus_palette")) {
      const auto& pal = s.raw("focus_palette");
      if (!pal.is_array()) throw ConfigError("style.focus_palette", "expected an array of colors");
      st.focus_palette.clear();
      for (const auto& c : pal) {
        if (!c.is_string()) throw ConfigError("style.focus_palette", "expected an array of colors");
        st.focus_palette.push_back(c.get<std::string>());
      }
    }
    s.number("focus_radius_mm", st.focus_radius_mm);
    s.number("context_radius_mm", st.context_radius_mm);
    s.string("context_color", st.context_color);
    s.string("edge_color", st.edge_color);
    s.number("stroke_min_mm", st.stroke_min_mm);
    s.number("stroke_max_mm", st.stroke_max_mm);
    s.number("trajectory_stroke_mm", st.trajectory_stroke_mm);
    s.number("trajectory_marker_radius_mm", st.trajectory_marker_radius_mm);
    s.number("label_font_size_pt", st.label_font_size_pt);
    s.string("label_font_family", st.label_font_family);
  }
  checked("style", [&] { cfg.style.validate(); });

  if (top.has("rack")) {
    Section s(top.raw("rack"), "rack");
    RackSpec r;
    s.integer("slot_count", r.slot_count);
    s.number("slot_pitch_mm", r.slot_pitch_mm);
    s.number("slot_width_mm", r.slot_width_mm);
    s.number("slide_height_mm", r.slide_height_mm);
    s.number("slide_width_mm", r.slide_width_mm);
    s.number("wall_mm", r.wall_mm);
    s.number("base_thickness_mm", r.base_thickness_mm);
    s.number("base_depth_mm", r.base_depth_mm);
    if (s.has("printer_volume_mm")) {
      const auto& v = s.raw("printer_volume_mm");
      if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() || !v[2].is_number())
        throw ConfigError("rack.printer_volume_mm", "expected [x, y, z]");
      r.printer_volume_mm = std::array<double, 3>{v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
    }
    checked("rack", [&] { r.validate(); });
    cfg.rack = r;
  }

  if (top.has("output_dir")) {
    std::string out;
    top.string("output_dir", out);
    if (out.empty()) throw ConfigError("output_dir", "must not be empty");
    cfg.output_dir = out;
  }
  cfg.output_dir = resolve(base_dir, cfg.output_dir);

  if (top.has("flags")) {
    Section s(top.raw("flags"), "flags");
    auto& f = cfg.flags;
    s.boolean("taper", f.taper);
    s.boolean("stretch", f.stretch);
    s.boolean("keep_isolated", f.keep_isolated);
    s.number("preview_opacity", f.preview_opacity);
    if (s.has("label_anchor_slice")) {
      std::uint64_t anchor = 0;
      s.unsigned_integer("label_anchor_slice", anchor);
      f.label_anchor_slice = static_cast<std::size_t>(anchor);
    }
  }
  if (!(cfg.flags.preview_opacity > 0.0 && cfg.flags.preview_opacity <= 1.0))
    throw ConfigError("flags.preview_opacity", "must lie in (0, 1]");

  top.string("medium", cfg.medium);
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config " + path.string());
  return validate_config(in, path.parent_path());
}

json to_json(const PipelineConfig& c) {
  json palette = json::array();
  for (const auto& p : c.style.focus_palette) palette.push_back(p);
  json out = {
      {"input", {{"path", c.input.path.generic_string()}, {"format", c.input.format == EventFormat::csv ? "csv" : "json"}}},
      {"filter",
       {{"keep_fraction", c.filter.keep_fraction},
        {"scope", c.filter.scope == FilterScope::global ? "global" : "per_slice"}}},
      {"focus",
       {{"k", c.focus.k}, {"require_all_slices", c.focus.require_all_slices}, {"explicit_ids", c.focus.explicit_ids}}},
      {"layout", to_json(c.layout)},
      {"page", page_json(c.page)},
      {"sheet", page_json(c.sheet.page)},
      {"style",
       {{"focus_palette", palette},
        {"focus_radius_mm", c.style.focus_radius_mm},
        {"context_radius_mm", c.style.context_radius_mm},
        {"context_color", c.style.context_color},
        {"edge_color", c.style.edge_color},
        {"stroke_min_mm", c.style.stroke_min_mm},
        {"stroke_max_mm", c.style.stroke_max_mm},
        {"trajectory_stroke_mm", c.style.trajectory_stroke_mm},
        {"trajectory_marker_radius_mm", c.style.trajectory_marker_radius_mm},
        {"label_font_size_pt", c.style.label_font_size_pt},
        {"label_font_family", c.style.label_font_family}}},
      {"output_dir", c.output_dir.generic_string()},
      {"flags",
       {{"taper", c.flags.taper},
        {"stretch", c.flags.stretch},
        {"keep_isolated", c.flags.keep_isolated},
        {"preview_opacity", c.flags.preview_opacity},
        {"label_anchor_slice",
         c.flags.label_anchor_slice ? json(*c.flags.label_anchor_slice) : json(nullptr)}}},
      {"medium", c.medium},
  };
  out["sheet"]["per_sheet"] = c.sheet.per_sheet;
  if (c.rack) {
    const auto& r = *c.rack;
    out["rack"] = {{"slot_count", r.slot_count},       {"slot_pitch_mm", r.slot_pitch_mm},
                   {"slot_width_mm", r.slot_width_mm}, {"slide_height_mm", r.slide_height_mm},
                   {"slide_width_mm", r.slide_width_mm}, {"wall_mm", r.wall_mm},
                   {"base_thickness_mm", r.base_thickness_mm}, {"base_depth_mm", r.base_depth_mm},
                   {"printer_volume_mm", r.printer_volume_mm ? json(*r.printer_volume_mm) : json(nullptr)}};
  } else {
    out["rack"] = nullptr;
  }
  return out;
}

json to_json(const LayoutParams& p) {
  return {{"link_distance", p.link_distance},
          {"link_strength_scale", p.link_strength_scale},
          {"repulsion_strength", p.repulsion_strength},
          {"theta", p.theta},
          {"center_strength", p.center_strength},
          {"velocity_decay", p.velocity_decay},
          {"alpha_initial", p.alpha_initial},
          {"alpha_min", p.alpha_min},
          {"alpha_decay", p.alpha_decay},
          {"max_ticks", p.max_ticks},
          {"seed", p.seed},
          {"weighted_links", p.weighted_links}};
}

void apply_environment(PipelineConfig& config) {
  const char* seed = std::getenv("HOLOGFORGE_SEED");
  if (!seed || !*seed) return;
  const std::string s(seed);
  std::uint64_t value = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || end != s.data() + s.size())
    throw ConfigError("HOLOGFORGE_SEED", "expected a non-negative integer, got \"" + s + "\"");
  config.layout.seed = value;
}

}  // namespace hologforge
