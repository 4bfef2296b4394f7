#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace hologforge {

using NodeId = std::string;

struct Node {
  NodeId id;
  std::string label;

  friend bool operator==(const Node&, const Node&) = default;
};

// Discrete time key of a slice. Integer keys order numerically, string keys
// lexicographically; a graph never mixes the two.
using SliceKey = std::variant<std::int64_t, std::string>;

std::string to_string(const SliceKey& key);

struct InteractionEvent {
  NodeId source;
  NodeId target;
  SliceKey slice_key;
  double weight = 1.0;
};

// Undirected weighted edge, stored with u < v.
struct Edge {
  NodeId u;
  NodeId v;
  double weight = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct TimesliceGraph {
  std::size_t index = 0;
  SliceKey slice_key;
  std::vector<Edge> edges;   // sorted by (u, v)
  std::vector<NodeId> nodes; // nodes present in this (sub)graph, sorted

  bool contains(const NodeId& id) const;
  friend bool operator==(const TimesliceGraph&, const TimesliceGraph&) = default;
};

class DynamicGraph {
 public:
  DynamicGraph() = default;

  // Builds a graph from already-canonical slices. Node registry becomes the
  // union of slice endpoints and `extra_nodes`. Throws ConsistencyError when an
  // edge is not canonical or duplicated.
  DynamicGraph(std::vector<TimesliceGraph> slices, const std::vector<Node>& extra_nodes = {});

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const std::vector<TimesliceGraph>& slices() const noexcept { return slices_; }
  std::size_t edge_count() const noexcept;
  bool has_node(const NodeId& id) const;
  const Node& node(const NodeId& id) const;

  friend bool operator==(const DynamicGraph&, const DynamicGraph&) = default;

 private:
  std::vector<Node> nodes_;  // sorted by id
  std::vector<TimesliceGraph> slices_;
};

struct FocusPartition {
  std::vector<NodeId> focus;  // global focus order (rank order); fixes palette colors
  std::set<NodeId> context;

  bool is_focus(const NodeId& id) const;
  friend bool operator==(const FocusPartition&, const FocusPartition&) = default;
};

struct FocusSelection {
  FocusPartition partition;
  std::map<NodeId, int> degrees;
  std::vector<std::string> warnings;
};

enum class EventFormat { csv, json };
enum class FilterScope { global, per_slice };

std::vector<InteractionEvent> parse_events(std::istream& input, EventFormat format);

// Sums weights per unordered pair and slice key. Events with an empty list
// produce an empty graph only when `allow_empty` is set.
DynamicGraph aggregate(const std::vector<InteractionEvent>& events, bool allow_empty = false);

// Keeps the ceil(keep_fraction * m) heaviest edges. Ties are broken by
// (weight desc, slice index asc, u asc, v asc).
DynamicGraph filter_top_percentile(const DynamicGraph& graph, double keep_fraction,
                                   FilterScope scope, bool keep_isolated = false);

// Unweighted degree in the deduplicated super graph.
std::map<NodeId, int> degree_centrality(const DynamicGraph& graph);

FocusSelection select_focus(const DynamicGraph& graph, int k, bool require_all_slices);

// Builds a partition from a user-supplied focus list. Unknown ids throw.
FocusSelection explicit_focus(const DynamicGraph& graph, const std::vector<NodeId>& ids);

struct FocusContextSplit {
  TimesliceGraph focus;
  TimesliceGraph context;
};

FocusContextSplit split_focus_context(const TimesliceGraph& slice, const FocusPartition& partition);

}  // namespace hologforge
