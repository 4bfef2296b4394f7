// hologforge: build printable timeslice stacks from interaction data.
//
//   hologforge pipeline --config cfg.json [--out DIR] [--relayout] [--taper] [--stretch]
//   hologforge ingest|layout|render|rack|report ...
//
// Exit codes: 0 ok, 1 configuration error, 2 data error, 3 I/O error.

#include "hologforge/error.hpp"
#include "hologforge/pipeline.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace hf = hologforge;
namespace fs = std::filesystem;

namespace {

int exit_code(hf::ErrorCategory c) {
  switch (c) {
    case hf::ErrorCategory::config: return 1;
    case hf::ErrorCategory::data: return 2;
    case hf::ErrorCategory::io: return 3;
  }
  return 2;
}

struct Options {
  std::string config;
  std::string out;
  bool relayout = false;
  bool taper = false;
  bool stretch = false;
};

hf::PipelineConfig load(const Options& o) {
  auto cfg = hf::load_config(o.config);
  hf::apply_environment(cfg);
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (o.taper) cfg.flags.taper = true;
  if (o.stretch) cfg.flags.stretch = true;
  return cfg;
}

void summarize(const hf::BuildReport& r, const fs::path& out) {
  std::cout << "slices: " << r.slice_count << "  nodes: " << r.nodes_before << " -> " << r.nodes_after
            << "  edges: " << r.edges_before << " -> " << r.edges_after << '\n'
            << "focus:";
  for (const auto& f : r.focus) std::cout << ' ' << f.id << '(' << f.degree << ')';
  std::cout << "\nwrote " << r.files.size() << " files to " << out.string() << '\n';
  for (const auto& w : r.warnings) std::cout << "warning: " << w << '\n';
}

void print_report(const fs::path& dir) {
  std::ifstream in(dir / "report.json");
  if (!in) throw hf::IoError("no report.json in " + dir.string());
  nlohmann::json r;
  try {
    r = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw hf::ConsistencyError(std::string("report.json: ") + e.what());
  }
  const auto& c = r.at("counts");
  std::cout << "slices: " << c.at("slices") << '\n'
            << "nodes: " << c.at("before_filter").at("nodes") << " -> " << c.at("after_filter").at("nodes") << '\n'
            << "edges: " << c.at("before_filter").at("edges") << " -> " << c.at("after_filter").at("edges") << '\n'
            << "focus:";
  for (const auto& f : r.at("focus")) std::cout << ' ' << f.at("id").get<std::string>() << '(' << f.at("degree") << ')';
  std::cout << "\nmean displacement: " << r.at("trajectories").at("mean_displacement") << '\n'
            << "files: " << r.at("files").size() << '\n';
  for (const auto& w : r.at("warnings")) std::cout << "warning: " << w.get<std::string>() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HoloGraph-style dynamic graph physicalization"};
  app.require_subcommand(1);
  Options o;

  auto config_opt = [&](CLI::App* cmd) { cmd->add_option("--config,-c", o.config, "pipeline config (JSON)")->required()->check(CLI::ExistingFile); };
  auto out_opt = [&](CLI::App* cmd) { cmd->add_option("--out,-o", o.out, "output directory (overrides config)"); };

  auto* pipeline = app.add_subcommand("pipeline", "run every stage");
  config_opt(pipeline);
  out_opt(pipeline);
  pipeline->add_flag("--relayout", o.relayout, "ignore cached layouts.json");
  pipeline->add_flag("--taper", o.taper, "taper trajectories towards the last slice");
  pipeline->add_flag("--stretch", o.stretch, "fill both page axes instead of keeping the aspect ratio");

  auto* ingest = app.add_subcommand("ingest", "parse, aggregate, filter and select focus; print a summary");
  config_opt(ingest);

  auto* layout = app.add_subcommand("layout", "compute and cache slice layouts");
  config_opt(layout);
  out_opt(layout);
  layout->add_flag("--relayout", o.relayout, "ignore cached layouts.json");

  auto* render = app.add_subcommand("render", "render, impose and report from cached layouts");
  config_opt(render);
  out_opt(render);
  render->add_flag("--taper", o.taper, "taper trajectories towards the last slice");
  render->add_flag("--stretch", o.stretch, "fill both page axes instead of keeping the aspect ratio");

  auto* rack = app.add_subcommand("rack", "write the rack STL files");
  config_opt(rack);
  out_opt(rack);

  std::string report_dir;
  auto* report = app.add_subcommand("report", "print the report of a finished build");
  report->add_option("dir", report_dir, "build output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (pipeline->parsed()) {
      const auto cfg = load(o);
      summarize(hf::run_pipeline(cfg, {o.relayout}), cfg.output_dir);
    } else if (ingest->parsed()) {
      const auto cfg = load(o);
      const auto g = hf::ingest(cfg);
      nlohmann::json focus = nlohmann::json::array();
      for (const auto& id : g.focus.partition.focus) focus.push_back({{"id", id}, {"degree", g.focus.degrees.at(id)}});
      nlohmann::json summary = {{"nodes_before", g.raw.nodes().size()},   {"edges_before", g.raw.edge_count()},
                                {"nodes_after", g.filtered.nodes().size()}, {"edges_after", g.filtered.edge_count()},
                                {"slices", g.filtered.slices().size()},   {"focus", focus},
                                {"warnings", g.focus.warnings}};
      std::cout << summary.dump(2) << '\n';
    } else if (layout->parsed()) {
      const auto cfg = load(o);
      const auto layouts = hf::run_layout_stage(cfg, {o.relayout});
      std::cout << "laid out " << layouts.size() << " slices into " << (cfg.output_dir / "layouts.json").string()
                << '\n';
    } else if (render->parsed()) {
      const auto cfg = load(o);
      summarize(hf::run_render_stage(cfg), cfg.output_dir);
    } else if (rack->parsed()) {
      const auto cfg = load(o);
      for (const auto& f : hf::run_rack_stage(cfg)) std::cout << "wrote " << (cfg.output_dir / f).string() << '\n';
    } else if (report->parsed()) {
      print_report(report_dir);
    }
  } catch (const hf::Error& e) {
    std::cerr << "hologforge: " << e.what() << '\n';
    return exit_code(e.category());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "hologforge: " << e.what() << '\n';
    return 3;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "hologforge: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
