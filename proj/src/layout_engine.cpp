#include "hologforge/layout_engine.hpp"

#include "hologforge/error.hpp"
#include "quadtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <unordered_map>

namespace hologforge {

namespace {

const double kGoldenAngle = std::numbers::pi * (3.0 - std::sqrt(5.0));

// Platform-independent uniform in [0, 1); std distributions are not portable.
class Random {
 public:
  explicit Random(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double jiggle() { return (uniform() - 0.5) * 1e-6; }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

void require(bool ok, const char* field, const char* range) {
  if (!ok) throw ParameterError(std::string("layout.") + field + " must be " + range);
}

struct Link {
  int source;
  int target;
  double strength;
  double bias;
};

Point centroid(const Positions& positions) {
  if (positions.empty()) return {};
  double x = 0.0, y = 0.0;
  for (const auto& [id, p] : positions) {
    x += p.x;
    y += p.y;
  }
  const auto n = static_cast<double>(positions.size());
  return {x / n, y / n};
}

Point spiral_point(std::size_t i, double spacing) {
  const double radius = spacing * std::sqrt(static_cast<double>(i));
  const double angle = static_cast<double>(i) * kGoldenAngle;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

// Start positions for slice t: persisting nodes keep their slice t-1 spot,
// newcomers go to the centroid of placed neighbours (plus a small seeded
// jitter) or, without placed neighbours, onto the spiral around the centroid.
Positions anchored_start(const TimesliceGraph& slice, const std::vector<NodeId>& drawable,
                         const Positions& previous, const LayoutParams& params) {
  Positions placed;
  std::vector<NodeId> pending;
  for (const auto& id : drawable) {
    if (auto it = previous.find(id); it != previous.end())
      placed.emplace(id, it->second);
    else
      pending.push_back(id);
  }
  if (pending.empty()) return placed;

  std::map<NodeId, std::vector<NodeId>> neighbours;
  for (const auto& e : slice.edges) {
    neighbours[e.u].push_back(e.v);
    neighbours[e.v].push_back(e.u);
  }
  Random rng(mix_seed(params.seed ^ 0xA11C4u, slice.index));
  const double jitter = params.link_distance / 10.0;

  while (!pending.empty()) {
    bool progress = true;
    while (progress) {
      progress = false;
      for (auto it = pending.begin(); it != pending.end();) {
        double x = 0.0, y = 0.0;
        int count = 0;
        for (const auto& nb : neighbours[*it]) {
          if (auto p = placed.find(nb); p != placed.end()) {
            x += p->second.x;
            y += p->second.y;
            ++count;
          }
        }
        if (count == 0) {
          ++it;
          continue;
        }
        const double angle = 2.0 * std::numbers::pi * rng.uniform();
        placed.emplace(*it, Point{x / count + jitter * std::cos(angle), y / count + jitter * std::sin(angle)});
        it = pending.erase(it);
        progress = true;
      }
    }
    if (pending.empty()) break;
    const Point c = centroid(placed);
    const Point offset = spiral_point(placed.size(), params.link_distance / 2.0);
    placed.emplace(pending.front(), Point{c.x + offset.x, c.y + offset.y});
    pending.erase(pending.begin());
  }
  return placed;
}

}  // namespace

void LayoutParams::validate() const {
  require(link_distance > 0.0 && std::isfinite(link_distance), "link_distance", "a positive number");
  require(link_strength_scale > 0.0 && link_strength_scale <= 1.0, "link_strength_scale", "in (0, 1]");
  require(repulsion_strength < 0.0 && std::isfinite(repulsion_strength), "repulsion_strength", "negative");
  require(theta > 0.0 && theta <= 1.0, "theta", "in (0, 1]");
  require(center_strength >= 0.0 && center_strength <= 1.0, "center_strength", "in [0, 1]");
  require(velocity_decay > 0.0 && velocity_decay < 1.0, "velocity_decay", "in (0, 1)");
  require(alpha_initial > 0.0 && alpha_initial <= 1.0, "alpha_initial", "in (0, 1]");
  require(alpha_min > 0.0 && alpha_min < alpha_initial, "alpha_min", "positive and below alpha_initial");
  require(alpha_decay > 0.0 && alpha_decay < 1.0, "alpha_decay", "in (0, 1)");
  require(max_ticks >= 0, "max_ticks", "non-negative");
}

double TrajectoryStats::mean_displacement() const {
  if (transition_mean.empty()) return 0.0;
  double sum = 0.0;
  for (double d : transition_mean) sum += d;
  return sum / static_cast<double>(transition_mean.size());
}

Positions initial_positions(const std::vector<NodeId>& node_ids, std::uint64_t seed, double spacing) {
  Positions out;
  Random rng(mix_seed(seed, 0));
  std::set<std::pair<double, double>> taken;
  for (std::size_t i = 0; i < node_ids.size(); ++i) {
    Point p = spiral_point(i, spacing);
    while (!taken.emplace(p.x, p.y).second) {
      p.x += rng.jiggle();
      p.y += rng.jiggle();
    }
    out[node_ids[i]] = p;
  }
  return out;
}

SliceLayout simulate(const TimesliceGraph& slice, const std::vector<NodeId>& drawable_nodes,
                     const Positions& init, const LayoutParams& params) {
  params.validate();
  const int n = static_cast<int>(drawable_nodes.size());
  std::unordered_map<NodeId, int> index;
  std::vector<double> x(n), y(n), vx(n, 0.0), vy(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const auto& id = drawable_nodes[i];
    auto it = init.find(id);
    if (it == init.end()) throw ConsistencyError("no initial position for node '" + id + "'");
    index.emplace(id, i);
    x[i] = it->second.x;
    y[i] = it->second.y;
  }

  std::vector<Link> links;
  std::vector<int> count(n, 0);
  double max_weight = 0.0;
  for (const auto& e : slice.edges) {
    auto s = index.find(e.u), t = index.find(e.v);
    if (s == index.end() || t == index.end()) continue;
    links.push_back(Link{s->second, t->second, e.weight, 0.0});
    ++count[s->second];
    ++count[t->second];
    max_weight = std::max(max_weight, e.weight);
  }
  for (auto& l : links) {
    const double cs = count[l.source], ct = count[l.target];
    const double weight_factor = params.weighted_links ? l.strength / max_weight : 1.0;
    l.strength = params.link_strength_scale * weight_factor / std::min(cs, ct);
    l.bias = cs / (cs + ct);
  }

  const std::vector<double> charge(n, params.repulsion_strength);
  const double theta2 = params.theta * params.theta;
  constexpr double kDistanceMin2 = 1.0;
  Random rng(mix_seed(params.seed, slice.index));
  double alpha = params.alpha_initial;

  for (int tick = 0; tick < params.max_ticks; ++tick) {
    alpha += (0.0 - alpha) * params.alpha_decay;

    for (const auto& l : links) {
      double dx = x[l.target] + vx[l.target] - x[l.source] - vx[l.source];
      double dy = y[l.target] + vy[l.target] - y[l.source] - vy[l.source];
      if (dx == 0.0) dx = rng.jiggle();
      if (dy == 0.0) dy = rng.jiggle();
      double len = std::sqrt(dx * dx + dy * dy);
      len = (len - params.link_distance) / len * alpha * l.strength;
      dx *= len;
      dy *= len;
      vx[l.target] -= dx * l.bias;
      vy[l.target] -= dy * l.bias;
      vx[l.source] += dx * (1.0 - l.bias);
      vy[l.source] += dy * (1.0 - l.bias);
    }

    if (n > 1) {
      detail::QuadTree tree(x, y);
      tree.accumulate(charge);
      for (int i = 0; i < n; ++i) {
        tree.visit([&](const detail::QuadTree::Cell& cell) {
          if (cell.value == 0.0) return true;
          double dx = cell.cx - x[i];
          double dy = cell.cy - y[i];
          double l = dx * dx + dy * dy;
          if (cell.size * cell.size / theta2 < l) {
            if (dx == 0.0) dx = rng.jiggle(), l += dx * dx;
            if (dy == 0.0) dy = rng.jiggle(), l += dy * dy;
            if (l < kDistanceMin2) l = std::sqrt(kDistanceMin2 * l);
            vx[i] += dx * cell.value * alpha / l;
            vy[i] += dy * cell.value * alpha / l;
            return true;
          }
          if (!cell.leaf()) return false;
          if (cell.first != i || tree.next(cell.first) >= 0) {
            if (dx == 0.0) dx = rng.jiggle(), l += dx * dx;
            if (dy == 0.0) dy = rng.jiggle(), l += dy * dy;
            if (l < kDistanceMin2) l = std::sqrt(kDistanceMin2 * l);
          }
          for (int p = cell.first; p >= 0; p = tree.next(p)) {
            if (p == i) continue;
            const double w = charge[p] * alpha / l;
            vx[i] += dx * w;
            vy[i] += dy * w;
          }
          return true;
        });
      }
    }

    if (params.center_strength > 0.0 && n > 0) {
      double sx = 0.0, sy = 0.0;
      for (int i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
      }
      sx = sx / n * params.center_strength;
      sy = sy / n * params.center_strength;
      for (int i = 0; i < n; ++i) {
        x[i] -= sx;
        y[i] -= sy;
      }
    }

    for (int i = 0; i < n; ++i) {
      vx[i] *= params.velocity_decay;
      vy[i] *= params.velocity_decay;
      x[i] += vx[i];
      y[i] += vy[i];
      if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
        throw NumericalDivergenceError(tick, drawable_nodes[i],
                                       "layout diverged at tick " + std::to_string(tick) + " on node '" +
                                           drawable_nodes[i] + "'");
    }

    if (alpha < params.alpha_min) break;
  }

  SliceLayout out;
  out.slice_index = slice.index;
  for (int i = 0; i < n; ++i) out.positions.emplace(drawable_nodes[i], Point{x[i], y[i]});
  return out;
}

std::vector<NodeId> drawable_nodes(const TimesliceGraph& slice, const FocusPartition& partition) {
  const auto split = split_focus_context(slice, partition);
  std::set<NodeId> ids(split.focus.nodes.begin(), split.focus.nodes.end());
  ids.insert(split.context.nodes.begin(), split.context.nodes.end());
  return {ids.begin(), ids.end()};
}

std::vector<SliceLayout> layout_chain(const DynamicGraph& graph, const FocusPartition& partition,
                                      const LayoutParams& params) {
  params.validate();
  if (graph.slices().empty()) throw ConsistencyError("layout needs at least one slice");
  std::vector<SliceLayout> layouts;
  layouts.reserve(graph.slices().size());
  for (const auto& slice : graph.slices()) {
    const auto drawable = drawable_nodes(slice, partition);
    const Positions start = layouts.empty()
                                ? initial_positions(drawable, params.seed, params.link_distance / 2.0)
                                : anchored_start(slice, drawable, layouts.back().positions, params);
    layouts.push_back(simulate(slice, drawable, start, params));
  }
  return layouts;
}

std::vector<SliceLayout> layout_independent(const DynamicGraph& graph, const FocusPartition& partition,
                                            const LayoutParams& params) {
  params.validate();
  std::vector<SliceLayout> layouts;
  for (const auto& slice : graph.slices()) {
    const auto drawable = drawable_nodes(slice, partition);
    // Spiral order reshuffled per slice: a start that knows nothing of slice t-1.
    auto order = drawable;
    Random rng(mix_seed(params.seed ^ 0xF2E5u, slice.index));
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[static_cast<std::size_t>(rng.uniform() * static_cast<double>(i))]);
    layouts.push_back(
        simulate(slice, drawable, initial_positions(order, params.seed, params.link_distance / 2.0), params));
  }
  return layouts;
}

TrajectoryStats trajectory_stats(const std::vector<SliceLayout>& layouts, const std::set<NodeId>& tracked) {
  TrajectoryStats stats;
  for (const auto& id : tracked) stats.path_length[id] = 0.0;
  for (std::size_t t = 0; t + 1 < layouts.size(); ++t) {
    double sum = 0.0;
    int count = 0;
    for (const auto& id : tracked) {
      auto a = layouts[t].positions.find(id);
      auto b = layouts[t + 1].positions.find(id);
      if (a == layouts[t].positions.end() || b == layouts[t + 1].positions.end()) continue;
      const double d = std::hypot(b->second.x - a->second.x, b->second.y - a->second.y);
      stats.path_length[id] += d;
      sum += d;
      ++count;
    }
    stats.transition_mean.push_back(count ? sum / count : 0.0);
  }
  return stats;
}

}  // namespace hologforge
