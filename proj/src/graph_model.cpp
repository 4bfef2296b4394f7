#include "hologforge/graph_model.hpp"

#include "hologforge/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iterator>
#include <sstream>
#include <tuple>

#include <json.hpp>

namespace hologforge {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    auto pos = line.find(',', start);
    fields.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

SliceKey parse_key_text(std::string_view text) {
  std::int64_t value = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && text.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec == std::errc() && ptr == last && first != last) return value;
  return std::string(text);
}

double parse_weight_text(std::string_view text, std::size_t line) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    throw ParseError(line, "line " + std::to_string(line) + ": invalid weight '" + std::string(text) + "'");
  return value;
}

void check_event(const InteractionEvent& e, std::size_t location, const char* unit) {
  const std::string where = std::string(unit) + " " + std::to_string(location);
  if (e.source.empty() || e.target.empty()) throw ParseError(location, where + ": empty node id");
  if (!std::isfinite(e.weight) || e.weight < 0.0)
    throw ParseError(location, where + ": weight must be a non-negative finite number");
  if (e.source == e.target)
    throw SelfLoopError(location, where + ": self-loop on node '" + e.source + "' rejected");
}

std::vector<InteractionEvent> parse_csv(std::istream& input) {
  std::vector<InteractionEvent> events;
  // Column positions for source, target, slice, weight (-1 = absent).
  int col[4] = {0, 1, 2, 3};
  bool first_content = true;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(input, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty()) continue;
    auto fields = split_commas(line);
    if (first_content) {
      first_content = false;
      if (fields.size() >= 3 && (fields[0] == "source" || fields[0] == "target" || fields[0] == "slice")) {
        std::fill(std::begin(col), std::end(col), -1);
        const char* names[4] = {"source", "target", "slice", "weight"};
        for (std::size_t i = 0; i < fields.size(); ++i) {
          auto it = std::find(std::begin(names), std::end(names), fields[i]);
          if (it == std::end(names))
            throw ParseError(line_no, "line " + std::to_string(line_no) + ": unknown column '" +
                                          std::string(fields[i]) + "'");
          col[it - std::begin(names)] = static_cast<int>(i);
        }
        if (col[0] < 0 || col[1] < 0 || col[2] < 0)
          throw ParseError(line_no, "line " + std::to_string(line_no) +
                                        ": header must name source, target and slice");
        continue;
      }
    }
    const std::size_t expected_max = col[3] >= 0 ? 4 : 3;
    if (fields.size() < 3 || fields.size() > expected_max)
      throw ParseError(line_no, "line " + std::to_string(line_no) + ": expected 3 or 4 fields, got " +
                                    std::to_string(fields.size()));
    InteractionEvent e;
    e.source = std::string(fields[col[0]]);
    e.target = std::string(fields[col[1]]);
    if (fields[col[2]].empty())
      throw ParseError(line_no, "line " + std::to_string(line_no) + ": empty slice key");
    e.slice_key = parse_key_text(fields[col[2]]);
    if (col[3] >= 0 && static_cast<std::size_t>(col[3]) < fields.size() && !fields[col[3]].empty())
      e.weight = parse_weight_text(fields[col[3]], line_no);
    check_event(e, line_no, "line");
    events.push_back(std::move(e));
  }
  return events;
}

std::vector<InteractionEvent> parse_json(std::istream& input) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(input);
  } catch (const nlohmann::json::parse_error& ex) {
    throw ParseError(ex.byte, std::string("malformed JSON: ") + ex.what());
  }
  if (!doc.is_array()) throw ParseError(0, "JSON input must be an array of records");
  std::vector<InteractionEvent> events;
  for (std::size_t record = 0; record < doc.size(); ++record) {
    const auto& item = doc[record];
    const std::string where = "record " + std::to_string(record);
    if (!item.is_object()) throw ParseError(record, where + ": not an object");
    auto string_field = [&](const char* key) -> std::string {
      auto it = item.find(key);
      if (it == item.end()) throw ParseError(record, where + ": missing '" + key + "'");
      if (it->is_string()) return it->get<std::string>();
      if (it->is_number_integer()) return std::to_string(it->get<std::int64_t>());
      throw ParseError(record, where + ": '" + key + "' must be a string");
    };
    InteractionEvent e;
    e.source = string_field("source");
    e.target = string_field("target");
    auto slice = item.find("slice");
    if (slice == item.end()) throw ParseError(record, where + ": missing 'slice'");
    if (slice->is_number_integer())
      e.slice_key = slice->get<std::int64_t>();
    else if (slice->is_string() && !slice->get<std::string>().empty())
      e.slice_key = slice->get<std::string>();
    else
      throw ParseError(record, where + ": 'slice' must be an integer or a non-empty string");
    if (auto w = item.find("weight"); w != item.end() && !w->is_null()) {
      if (!w->is_number()) throw ParseError(record, where + ": 'weight' must be a number");
      e.weight = w->get<double>();
    }
    check_event(e, record, "record");
    events.push_back(std::move(e));
  }
  return events;
}

std::pair<NodeId, NodeId> canonical(const NodeId& a, const NodeId& b) {
  return a < b ? std::pair{a, b} : std::pair{b, a};
}

std::vector<NodeId> endpoints(const std::vector<Edge>& edges) {
  std::set<NodeId> ids;
  for (const auto& e : edges) {
    ids.insert(e.u);
    ids.insert(e.v);
  }
  return {ids.begin(), ids.end()};
}

// Nearest-rank count with a small tolerance so that e.g. 0.3 * 10 keeps 3.
std::size_t keep_count(double keep_fraction, std::size_t m) {
  if (m == 0) return 0;
  const double scaled = keep_fraction * static_cast<double>(m);
  auto k = static_cast<std::size_t>(std::ceil(scaled * (1.0 - 1e-12)));
  return std::clamp<std::size_t>(k, 1, m);
}

}  // namespace

std::string to_string(const SliceKey& key) {
  if (const auto* i = std::get_if<std::int64_t>(&key)) return std::to_string(*i);
  return std::get<std::string>(key);
}

bool TimesliceGraph::contains(const NodeId& id) const {
  return std::binary_search(nodes.begin(), nodes.end(), id);
}

DynamicGraph::DynamicGraph(std::vector<TimesliceGraph> slices, const std::vector<Node>& extra_nodes)
    : slices_(std::move(slices)) {
  std::map<NodeId, std::string> registry;
  for (const auto& n : extra_nodes) registry.emplace(n.id, n.label.empty() ? n.id : n.label);
  for (std::size_t i = 0; i < slices_.size(); ++i) {
    auto& s = slices_[i];
    s.index = i;
    std::sort(s.edges.begin(), s.edges.end(),
              [](const Edge& a, const Edge& b) { return std::tie(a.u, a.v) < std::tie(b.u, b.v); });
    for (std::size_t j = 0; j < s.edges.size(); ++j) {
      const auto& e = s.edges[j];
      if (!(e.u < e.v))
        throw ConsistencyError("slice " + to_string(s.slice_key) + ": edge (" + e.u + ", " + e.v +
                               ") is not canonical");
      if (!(e.weight > 0.0) || !std::isfinite(e.weight))
        throw ConsistencyError("slice " + to_string(s.slice_key) + ": edge (" + e.u + ", " + e.v +
                               ") has non-positive weight");
      if (j > 0 && s.edges[j - 1].u == e.u && s.edges[j - 1].v == e.v)
        throw ConsistencyError("slice " + to_string(s.slice_key) + ": duplicate edge (" + e.u + ", " +
                               e.v + ")");
    }
    s.nodes = endpoints(s.edges);
    for (const auto& id : s.nodes) registry.emplace(id, id);
  }
  nodes_.reserve(registry.size());
  for (auto& [id, label] : registry) nodes_.push_back(Node{id, label});
}

std::size_t DynamicGraph::edge_count() const noexcept {
  std::size_t m = 0;
  for (const auto& s : slices_) m += s.edges.size();
  return m;
}

bool DynamicGraph::has_node(const NodeId& id) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id,
                             [](const Node& n, const NodeId& key) { return n.id < key; });
  return it != nodes_.end() && it->id == id;
}

const Node& DynamicGraph::node(const NodeId& id) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id,
                             [](const Node& n, const NodeId& key) { return n.id < key; });
  if (it == nodes_.end() || it->id != id) throw ConsistencyError("unknown node '" + id + "'");
  return *it;
}

bool FocusPartition::is_focus(const NodeId& id) const {
  return std::find(focus.begin(), focus.end(), id) != focus.end();
}

std::vector<InteractionEvent> parse_events(std::istream& input, EventFormat format) {
  return format == EventFormat::csv ? parse_csv(input) : parse_json(input);
}

DynamicGraph aggregate(const std::vector<InteractionEvent>& events, bool allow_empty) {
  if (events.empty()) {
    if (!allow_empty) throw ConsistencyError("no interaction events to aggregate");
    return {};
  }
  const bool integer_keys = std::holds_alternative<std::int64_t>(events.front().slice_key);
  std::map<SliceKey, std::map<std::pair<NodeId, NodeId>, double>> tally;
  std::vector<Node> seen;
  for (const auto& e : events) {
    if (std::holds_alternative<std::int64_t>(e.slice_key) != integer_keys)
      throw ConsistencyError("slice keys mix integers and strings");
    tally[e.slice_key][canonical(e.source, e.target)] += e.weight;
  }
  std::vector<TimesliceGraph> slices;
  std::vector<Node> declared;
  for (auto& [key, pairs] : tally) {
    TimesliceGraph s;
    s.slice_key = key;
    for (auto& [pair, weight] : pairs) {
      if (weight > 0.0)
        s.edges.push_back(Edge{pair.first, pair.second, weight});
      else {
        // Zero-weight pairs keep their endpoints in the registry.
        declared.push_back(Node{pair.first, pair.first});
        declared.push_back(Node{pair.second, pair.second});
      }
    }
    slices.push_back(std::move(s));
  }
  return DynamicGraph(std::move(slices), declared);
}

DynamicGraph filter_top_percentile(const DynamicGraph& graph, double keep_fraction, FilterScope scope,
                                   bool keep_isolated) {
  if (!(keep_fraction > 0.0 && keep_fraction <= 1.0))
    throw ParameterError("keep_fraction must lie in (0, 1], got " + std::to_string(keep_fraction));

  struct Ref {
    std::size_t slice;
    std::size_t edge;
  };
  const auto& slices = graph.slices();
  auto before = [&](const Ref& a, const Ref& b) {
    const Edge& ea = slices[a.slice].edges[a.edge];
    const Edge& eb = slices[b.slice].edges[b.edge];
    if (ea.weight != eb.weight) return ea.weight > eb.weight;
    return std::tie(a.slice, ea.u, ea.v) < std::tie(b.slice, eb.u, eb.v);
  };
  auto select = [&](std::vector<Ref>& refs) {
    const std::size_t k = keep_count(keep_fraction, refs.size());
    std::sort(refs.begin(), refs.end(), before);
    refs.resize(k);
  };

  std::vector<Ref> kept;
  if (scope == FilterScope::global) {
    for (std::size_t s = 0; s < slices.size(); ++s)
      for (std::size_t e = 0; e < slices[s].edges.size(); ++e) kept.push_back({s, e});
    select(kept);
  } else {
    for (std::size_t s = 0; s < slices.size(); ++s) {
      std::vector<Ref> refs;
      for (std::size_t e = 0; e < slices[s].edges.size(); ++e) refs.push_back({s, e});
      select(refs);
      kept.insert(kept.end(), refs.begin(), refs.end());
    }
  }

  std::vector<TimesliceGraph> out;
  out.reserve(slices.size());
  for (const auto& s : slices) out.push_back(TimesliceGraph{s.index, s.slice_key, {}, {}});
  for (const auto& r : kept) out[r.slice].edges.push_back(slices[r.slice].edges[r.edge]);
  return DynamicGraph(std::move(out), keep_isolated ? graph.nodes() : std::vector<Node>{});
}

std::map<NodeId, int> degree_centrality(const DynamicGraph& graph) {
  std::set<std::pair<NodeId, NodeId>> super_edges;
  for (const auto& s : graph.slices())
    for (const auto& e : s.edges) super_edges.emplace(e.u, e.v);
  std::map<NodeId, int> degree;
  for (const auto& n : graph.nodes()) degree[n.id] = 0;
  for (const auto& [u, v] : super_edges) {
    ++degree[u];
    ++degree[v];
  }
  return degree;
}

FocusSelection select_focus(const DynamicGraph& graph, int k, bool require_all_slices) {
  if (k < 1) throw ParameterError("focus k must be >= 1, got " + std::to_string(k));
  FocusSelection result;
  result.degrees = degree_centrality(graph);

  std::vector<NodeId> candidates;
  for (const auto& n : graph.nodes()) {
    if (require_all_slices) {
      const auto& slices = graph.slices();
      const bool everywhere = !slices.empty() && std::all_of(slices.begin(), slices.end(),
                                                             [&](const auto& s) { return s.contains(n.id); });
      if (!everywhere) continue;
    }
    candidates.push_back(n.id);
  }
  std::sort(candidates.begin(), candidates.end(), [&](const NodeId& a, const NodeId& b) {
    const int da = result.degrees.at(a), db = result.degrees.at(b);
    return da != db ? da > db : a < b;
  });
  if (candidates.size() < static_cast<std::size_t>(k)) {
    result.warnings.push_back("only " + std::to_string(candidates.size()) + " focus candidate(s)" +
                              (require_all_slices ? " present in every slice" : "") + "; requested " +
                              std::to_string(k));
  } else {
    candidates.resize(k);
  }
  result.partition.focus = candidates;
  for (const auto& n : graph.nodes())
    if (!result.partition.is_focus(n.id)) result.partition.context.insert(n.id);
  return result;
}

FocusSelection explicit_focus(const DynamicGraph& graph, const std::vector<NodeId>& ids) {
  FocusSelection result;
  result.degrees = degree_centrality(graph);
  std::set<NodeId> unique;
  for (const auto& id : ids) {
    if (!graph.has_node(id)) throw ConsistencyError("explicit focus id '" + id + "' is not in the graph");
    if (!unique.insert(id).second) throw ConsistencyError("explicit focus id '" + id + "' listed twice");
    result.partition.focus.push_back(id);
  }
  for (const auto& n : graph.nodes())
    if (!unique.count(n.id)) result.partition.context.insert(n.id);
  return result;
}

FocusContextSplit split_focus_context(const TimesliceGraph& slice, const FocusPartition& partition) {
  const std::set<NodeId> focus(partition.focus.begin(), partition.focus.end());
  auto classify = [&](const NodeId& id) {
    if (focus.count(id)) return true;
    if (partition.context.count(id)) return false;
    throw ConsistencyError("slice " + to_string(slice.slice_key) + ": node '" + id +
                           "' is in neither the focus nor the context set");
  };

  FocusContextSplit split;
  split.focus.index = split.context.index = slice.index;
  split.focus.slice_key = split.context.slice_key = slice.slice_key;
  for (const auto& e : slice.edges) {
    const bool fu = classify(e.u);
    const bool fv = classify(e.v);
    (fu && fv ? split.focus : split.context).edges.push_back(e);
  }
  for (const auto& id : slice.nodes)
    if (classify(id)) split.focus.nodes.push_back(id);
  split.context.nodes = endpoints(split.context.edges);
  return split;
}

}  // namespace hologforge
