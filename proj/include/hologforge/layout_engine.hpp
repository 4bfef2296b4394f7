#pragma once

#include "hologforge/graph_model.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

namespace hologforge {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

using Positions = std::map<NodeId, Point>;

// Simulation constants of the velocity-Verlet style force layout. Defaults
// reproduce the usual d3-force behaviour: velocity_decay is the fraction of
// velocity *retained* per tick, and the cooling schedule reaches alpha_min
// after ~300 ticks.
struct LayoutParams {
  double link_distance = 30.0;
  double link_strength_scale = 1.0;
  double repulsion_strength = -30.0;
  double theta = 0.9;
  double center_strength = 1.0;
  double velocity_decay = 0.6;
  double alpha_initial = 1.0;
  double alpha_min = 0.001;
  double alpha_decay = 1.0 - std::pow(0.001, 1.0 / 300.0);
  int max_ticks = 300;
  std::uint64_t seed = 0x5EED;
  bool weighted_links = false;

  // Throws ParameterError naming the first field out of range.
  void validate() const;
};

struct SliceLayout {
  std::size_t slice_index = 0;
  Positions positions;

  friend bool operator==(const SliceLayout&, const SliceLayout&) = default;
};

struct TrajectoryStats {
  std::map<NodeId, double> path_length;
  // Mean displacement of tracked nodes present in both slices of transition t -> t+1.
  std::vector<double> transition_mean;

  double mean_displacement() const;
};

// Phyllotaxis spiral: node i at radius spacing*sqrt(i), angle i*golden_angle.
// The seed only perturbs exact coincidences, which the spiral never produces.
Positions initial_positions(const std::vector<NodeId>& node_ids, std::uint64_t seed, double spacing = 15.0);

// Runs the force simulation over `drawable_nodes`. Every drawable node needs an
// initial position; edges of `slice` between drawable nodes act as springs.
SliceLayout simulate(const TimesliceGraph& slice, const std::vector<NodeId>& drawable_nodes,
                     const Positions& init, const LayoutParams& params);

// Nodes laid out for a slice: every node present in it (focus and context
// together, so both sheets of one timeslice share coordinates).
std::vector<NodeId> drawable_nodes(const TimesliceGraph& slice, const FocusPartition& partition);

// Anchored chain: slice t starts from slice t-1's converged positions.
std::vector<SliceLayout> layout_chain(const DynamicGraph& graph, const FocusPartition& partition,
                                      const LayoutParams& params);

// Baseline without anchoring: each slice starts from a fresh spiral whose node
// order is shuffled with a per-slice seed.
std::vector<SliceLayout> layout_independent(const DynamicGraph& graph, const FocusPartition& partition,
                                            const LayoutParams& params);

TrajectoryStats trajectory_stats(const std::vector<SliceLayout>& layouts, const std::set<NodeId>& tracked);

}  // namespace hologforge
