#pragma once

// Seeded synthetic inputs shared by unit and acceptance tests.

#include "hologforge/graph_model.hpp"

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace testsupport {

// mt19937_64 is fully specified by the standard; the distributions are not,
// so conversions are done by hand to keep data identical everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }
  bool chance(double p) { return uniform() < p; }

 private:
  std::mt19937_64 gen_;
};

inline std::string node_name(std::size_t i, const char* prefix = "n") {
  std::string s = std::to_string(i);
  while (s.size() < 3) s = "0" + s;
  return prefix + s;
}

// Realistic-scale surrogate event list: 111 characters over 7 slices, roughly
// 870 interacting pairs per slice of which 87 are strong. The default 10%
// filter therefore keeps the 609 strong edges, and a 12-node core interacts in
// every slice, so k = 10 focus nodes exist that appear throughout.
inline std::string surrogate_csv(std::uint64_t seed = 7, int slices = 7) {
  constexpr std::size_t kNodes = 111, kCore = 12, kPeripheral = kNodes - kCore;
  constexpr std::size_t kCoreSpokes = 63, kWeak = 783;
  Rng rng(seed);
  std::ostringstream out;
  out << "source,target,slice,weight\n";
  auto name = [](std::size_t i) { return i < kCore ? node_name(i, "core") : node_name(i - kCore, "side"); };
  for (int s = 0; s < slices; ++s) {
    std::set<std::pair<std::size_t, std::size_t>> used;
    auto emit = [&](std::size_t a, std::size_t b, double w) {
      if (a == b) return false;
      const std::pair key{std::min(a, b), std::max(a, b)};
      if (!used.insert(key).second) return false;
      out << name(a) << ',' << name(b) << ',' << s + 1 << ',' << w << '\n';
      return true;
    };
    // Strong: a fixed core ring with chords, then core-to-side spokes.
    for (std::size_t i = 0; i < kCore; ++i) {
      emit(i, (i + 1) % kCore, std::round(rng.uniform(60.0, 150.0)));
      emit(i, (i + 2) % kCore, std::round(rng.uniform(60.0, 150.0)));
    }
    for (std::size_t j = 0; j < kCoreSpokes; ++j) {
      const std::size_t side = kCore + (s * 14 + j) % kPeripheral;
      const std::size_t core = (j * 7 + s) % kCore;
      emit(core, side, std::round(rng.uniform(40.0, 150.0)));
    }
    // Weak background chatter.
    std::size_t weak = 0;
    while (weak < kWeak)
      if (emit(rng.below(kNodes), rng.below(kNodes), std::round(rng.uniform(1.0, 20.0)))) ++weak;
  }
  return out.str();
}

// Dynamic graph for the anchoring comparison: a connected random graph whose
// consecutive slices swap at most `churn` of their edges.
inline hologforge::DynamicGraph churn_graph(std::uint64_t seed, std::size_t nodes = 60, std::size_t slices = 5,
                                            std::size_t edges = 90, double churn = 0.10) {
  using namespace hologforge;
  Rng rng(seed);
  auto canon = [](std::size_t a, std::size_t b) { return std::pair{std::min(a, b), std::max(a, b)}; };
  std::set<std::pair<std::size_t, std::size_t>> current;
  for (std::size_t i = 1; i < nodes; ++i) current.insert(canon(i, rng.below(i)));  // spanning tree
  while (current.size() < edges) {
    const auto a = rng.below(nodes), b = rng.below(nodes);
    if (a != b) current.insert(canon(a, b));
  }
  std::vector<TimesliceGraph> out;
  const auto swaps = static_cast<std::size_t>(churn * static_cast<double>(edges));
  for (std::size_t s = 0; s < slices; ++s) {
    if (s > 0) {
      std::vector<std::pair<std::size_t, std::size_t>> list(current.begin(), current.end());
      for (std::size_t k = 0; k < swaps; ++k) current.erase(list[rng.below(list.size())]);
      while (current.size() < edges) {
        const auto a = rng.below(nodes), b = rng.below(nodes);
        if (a != b) current.insert(canon(a, b));
      }
    }
    TimesliceGraph g;
    g.slice_key = static_cast<std::int64_t>(s);
    for (const auto& [a, b] : current) {
      const auto u = node_name(a), v = node_name(b);
      g.edges.push_back({std::min(u, v), std::max(u, v), 1.0 + static_cast<double>(rng.below(5))});
    }
    out.push_back(std::move(g));
  }
  return DynamicGraph(std::move(out));
}

// Random multi-slice graph with `m_per_slice` distinct edges per slice.
inline hologforge::DynamicGraph random_graph(Rng& rng, std::size_t nodes, std::size_t slices,
                                             std::size_t m_per_slice, int weight_levels = 0) {
  using namespace hologforge;
  std::vector<TimesliceGraph> out;
  const std::size_t max_edges = nodes * (nodes - 1) / 2;
  for (std::size_t s = 0; s < slices; ++s) {
    std::set<std::pair<std::string, std::string>> seen;
    TimesliceGraph g;
    g.slice_key = static_cast<std::int64_t>(s);
    while (g.edges.size() < std::min(m_per_slice, max_edges)) {
      auto u = node_name(rng.below(nodes)), v = node_name(rng.below(nodes));
      if (u == v) continue;
      if (v < u) std::swap(u, v);
      if (!seen.insert({u, v}).second) continue;
      const double w = weight_levels > 0 ? 1.0 + static_cast<double>(rng.below(static_cast<std::size_t>(weight_levels)))
                                         : rng.uniform(0.1, 100.0);
      g.edges.push_back({u, v, w});
    }
    std::sort(g.edges.begin(), g.edges.end(), [](const Edge& a, const Edge& b) {
      return std::tie(a.u, a.v) < std::tie(b.u, b.v);
    });
    out.push_back(std::move(g));
  }
  return DynamicGraph(std::move(out));
}

}  // namespace testsupport
