#include "hologforge/error.hpp"
#include "hologforge/layout_engine.hpp"

#include "support/synthetic.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace hologforge;
using testsupport::Rng;

namespace {

TimesliceGraph slice_of(std::vector<Edge> edges, std::int64_t key = 0) {
  TimesliceGraph g;
  g.slice_key = key;
  g.edges = std::move(edges);
  return g;
}

double dist(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

FocusPartition all_context(const DynamicGraph& g) {
  FocusPartition p;
  for (const auto& n : g.nodes()) p.context.insert(n.id);
  return p;
}

// Two bodies joined by one spring, reduced to the line through them. Written
// from the force definitions, not from the engine.
double two_body_distance(double start, const LayoutParams& p) {
  double a = 0.0, b = start, va = 0.0, vb = 0.0, alpha = p.alpha_initial;
  for (int tick = 0; tick < p.max_ticks; ++tick) {
    alpha *= 1.0 - p.alpha_decay;
    // spring, evaluated at the predicted positions, split evenly (equal degree)
    const double d = (b + vb) - (a + va);
    const double pull = (std::abs(d) - p.link_distance) / std::abs(d) * alpha * p.link_strength_scale * d;
    vb -= pull * 0.5;
    va += pull * 0.5;
    // inverse-distance repulsion; below unit distance the softened form applies
    double sq = (b - a) * (b - a);
    if (sq < 1.0) sq = std::sqrt(sq);
    const double push = p.repulsion_strength * alpha / sq;
    va += (b - a) * push;
    vb += (a - b) * push;
    const double mid = (a + b) / 2.0 * p.center_strength;
    a -= mid;
    b -= mid;
    va *= p.velocity_decay;
    vb *= p.velocity_decay;
    a += va;
    b += vb;
    if (alpha < p.alpha_min) break;
  }
  return std::abs(b - a);
}

}  // namespace

TEST_CASE("layout parameters are range checked") {
  LayoutParams p;
  CHECK_NOTHROW(p.validate());
  auto bad = [](auto mutate) {
    LayoutParams q;
    mutate(q);
    CHECK_THROWS_AS(q.validate(), ParameterError);
  };
  bad([](LayoutParams& q) { q.link_distance = 0; });
  bad([](LayoutParams& q) { q.link_strength_scale = 1.5; });
  bad([](LayoutParams& q) { q.repulsion_strength = 1; });
  bad([](LayoutParams& q) { q.theta = 0; });
  bad([](LayoutParams& q) { q.center_strength = -0.1; });
  bad([](LayoutParams& q) { q.velocity_decay = 1.0; });
  bad([](LayoutParams& q) { q.alpha_initial = 1.5; });
  bad([](LayoutParams& q) { q.alpha_min = 1.0; });
  bad([](LayoutParams& q) { q.alpha_decay = 0.0; });
  bad([](LayoutParams& q) { q.max_ticks = -1; });
  // the cooling schedule reaches alpha_min in about 300 ticks
  CHECK(std::pow(1.0 - p.alpha_decay, 300) == doctest::Approx(0.001).epsilon(1e-9));
}

TEST_CASE("initial positions: spiral origin, determinism, no overlaps") {
  const auto one = initial_positions({"solo"}, 1);
  CHECK(one.at("solo") == Point{0.0, 0.0});

  std::vector<NodeId> ids;
  for (std::size_t i = 0; i < 100; ++i) ids.push_back(testsupport::node_name(i));
  const auto a = initial_positions(ids, 42), b = initial_positions(ids, 42);
  CHECK(a == b);
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (std::size_t j = i + 1; j < ids.size(); ++j) CHECK(dist(a.at(ids[i]), a.at(ids[j])) > 0.0);
  // radius grows as spacing * sqrt(i)
  CHECK(std::hypot(a.at(ids[16]).x, a.at(ids[16]).y) == doctest::Approx(15.0 * 4.0));
}

TEST_CASE("two linked bodies settle near the link distance") {
  const auto slice = slice_of({{"a", "b", 1}});
  LayoutParams p;
  const auto init = initial_positions({"a", "b"}, p.seed, p.link_distance / 2.0);
  const auto out = simulate(slice, {"a", "b"}, init, p);
  const double d = dist(out.positions.at("a"), out.positions.at("b"));
  const double oracle = two_body_distance(dist(init.at("a"), init.at("b")), p);
  CHECK(d >= 24.0);
  CHECK(d <= 36.0);
  CHECK(d == doctest::Approx(oracle).epsilon(0.2));
}

TEST_CASE("zero ticks return the initial positions") {
  const auto slice = slice_of({{"a", "b", 1}, {"b", "c", 1}});
  LayoutParams p;
  p.max_ticks = 0;
  const Positions init{{"a", {1, 2}}, {"b", {3, -4}}, {"c", {0.5, 0.25}}};
  CHECK(simulate(slice, {"a", "b", "c"}, init, p).positions == init);
}

TEST_CASE("triangle settles symmetric") {
  const auto slice = slice_of({{"a", "b", 1}, {"a", "c", 1}, {"b", "c", 1}});
  for (std::uint64_t seed : {1u, 2u, 3u, 77u}) {
    LayoutParams p;
    p.seed = seed;
    const auto out = simulate(slice, {"a", "b", "c"}, initial_positions({"a", "b", "c"}, seed, 15.0), p);
    const double ab = dist(out.positions.at("a"), out.positions.at("b"));
    const double ac = dist(out.positions.at("a"), out.positions.at("c"));
    const double bc = dist(out.positions.at("b"), out.positions.at("c"));
    const double lo = std::min({ab, ac, bc}), hi = std::max({ab, ac, bc});
    CHECK(hi <= lo * 1.1);
  }
}

TEST_CASE("simulate needs a start position for every drawable node") {
  const auto slice = slice_of({{"a", "b", 1}});
  CHECK_THROWS_AS(simulate(slice, {"a", "b"}, Positions{{"a", {0, 0}}}, LayoutParams{}), ConsistencyError);
}

TEST_CASE("divergence is reported with tick and node") {
  const auto slice = slice_of({{"a", "b", 1}});
  LayoutParams p;
  p.repulsion_strength = -1e308;
  try {
    simulate(slice, {"a", "b"}, Positions{{"a", {0, 0}}, {"b", {0.5, 0}}}, p);
    FAIL("expected divergence");
  } catch (const NumericalDivergenceError& e) {
    CHECK(e.tick() >= 0);
    CHECK(e.tick() < p.max_ticks);
    CHECK((e.node() == "a" || e.node() == "b"));
  }
}

TEST_CASE("layout_chain of one slice is one simulate call") {
  Rng rng(4);
  const auto g = testsupport::random_graph(rng, 20, 1, 30);
  const auto part = all_context(g);
  LayoutParams p;
  const auto drawable = drawable_nodes(g.slices()[0], part);
  const auto single = simulate(g.slices()[0], drawable, initial_positions(drawable, p.seed, 15.0), p);
  const auto chain = layout_chain(g, part, p);
  REQUIRE(chain.size() == 1);
  CHECK(chain[0] == single);
}

TEST_CASE("anchoring beats fresh starts on identical slices") {
  Rng rng(17);
  auto base = testsupport::random_graph(rng, 30, 1, 45);
  std::vector<TimesliceGraph> slices(3, base.slices()[0]);
  for (std::int64_t i = 0; i < 3; ++i) slices[i].slice_key = i;
  const DynamicGraph g(slices);
  const auto part = all_context(g);
  std::set<NodeId> ids;
  for (const auto& n : g.nodes()) ids.insert(n.id);
  LayoutParams p;
  const auto anchored = trajectory_stats(layout_chain(g, part, p), ids).mean_displacement();
  const auto fresh = layout_independent(g, part, p);
  const auto independent = trajectory_stats(fresh, ids).mean_displacement();
  CHECK(anchored < independent);
}

TEST_CASE("a node appears only in slices where it is present") {
  const DynamicGraph g({slice_of({{"a", "b", 1}, {"b", "x", 1}}, 1), slice_of({{"a", "b", 1}}, 2),
                        slice_of({{"a", "b", 1}, {"a", "x", 1}}, 3)});
  const auto layouts = layout_chain(g, all_context(g), LayoutParams{});
  REQUIRE(layouts.size() == 3);
  CHECK(layouts[0].positions.count("x") == 1);
  CHECK(layouts[1].positions.count("x") == 0);
  CHECK(layouts[2].positions.count("x") == 1);
  for (std::size_t t = 0; t < 3; ++t) CHECK(layouts[t].slice_index == t);
}

TEST_CASE("trajectory stats: zero, 3-4-5, gaps and an independent sum") {
  std::vector<SliceLayout> still(3);
  for (auto& l : still) l.positions["n"] = {2, 2};
  CHECK(trajectory_stats(still, {"n"}).path_length.at("n") == 0.0);

  std::vector<SliceLayout> step(2);
  step[0].positions["n"] = {0, 0};
  step[1].positions["n"] = {3, 4};
  const auto s = trajectory_stats(step, {"n"});
  CHECK(s.path_length.at("n") == 5.0);
  CHECK(s.transition_mean == std::vector<double>{5.0});

  std::vector<SliceLayout> gap(3);
  gap[0].positions["n"] = {0, 0};
  gap[2].positions["n"] = {100, 0};
  CHECK(trajectory_stats(gap, {"n"}).path_length.at("n") == 0.0);

  Rng rng(6);
  for (int round = 0; round < 20; ++round) {
    std::vector<SliceLayout> layouts(5);
    std::set<NodeId> tracked;
    for (std::size_t i = 0; i < 8; ++i) tracked.insert(testsupport::node_name(i));
    for (auto& l : layouts)
      for (const auto& id : tracked)
        if (rng.chance(0.8)) l.positions[id] = {rng.uniform(-50, 50), rng.uniform(-50, 50)};
    const auto stats = trajectory_stats(layouts, tracked);
    for (const auto& id : tracked) {
      double expected = 0.0;
      for (std::size_t t = 1; t < layouts.size(); ++t)
        if (layouts[t - 1].positions.count(id) && layouts[t].positions.count(id))
          expected += dist(layouts[t - 1].positions.at(id), layouts[t].positions.at(id));
      CHECK(stats.path_length.at(id) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("layout_chain is deterministic") {
  const auto g = testsupport::churn_graph(3);
  const auto part = all_context(g);
  CHECK(layout_chain(g, part, LayoutParams{}) == layout_chain(g, part, LayoutParams{}));
}

TEST_CASE("adding an edge pulls its endpoints together") {
  Rng rng(31);
  int checked = 0;
  for (int round = 0; round < 10; ++round) {
    const auto g = testsupport::random_graph(rng, 25, 1, 35);
    const auto part = all_context(g);
    LayoutParams p;
    const auto before = layout_chain(g, part, p)[0];
    // farthest non-adjacent pair
    const auto& ids = g.slices()[0].nodes;
    std::set<std::pair<NodeId, NodeId>> adjacent;
    for (const auto& e : g.slices()[0].edges) adjacent.insert({e.u, e.v});
    double best = -1;
    std::pair<NodeId, NodeId> far;
    for (std::size_t i = 0; i < ids.size(); ++i)
      for (std::size_t j = i + 1; j < ids.size(); ++j) {
        const double d = dist(before.positions.at(ids[i]), before.positions.at(ids[j]));
        if (!adjacent.count({ids[i], ids[j]}) && d > best) best = d, far = {ids[i], ids[j]};
      }
    // slice t-1 is the original graph, slice t gains the edge (or not)
    auto with = g.slices()[0];
    with.edges.push_back({far.first, far.second, 1.0});
    std::sort(with.edges.begin(), with.edges.end(),
              [](const Edge& a, const Edge& b) { return std::tie(a.u, a.v) < std::tie(b.u, b.v); });
    auto prev = g.slices()[0];
    prev.slice_key = std::int64_t{0};
    with.slice_key = std::int64_t{1};
    auto same = g.slices()[0];
    same.slice_key = std::int64_t{1};
    const auto a = layout_chain(DynamicGraph({prev, with}), part, p)[1];
    const auto b = layout_chain(DynamicGraph({prev, same}), part, p)[1];
    CHECK(dist(a.positions.at(far.first), a.positions.at(far.second)) <
          dist(b.positions.at(far.first), b.positions.at(far.second)));
    ++checked;
  }
  CHECK(checked == 10);
}

TEST_CASE("coordinates stay finite for random valid parameters") {
  Rng rng(55);
  for (int round = 0; round < 6; ++round) {
    LayoutParams p;
    p.link_distance = rng.uniform(1, 100);
    p.link_strength_scale = rng.uniform(0.05, 1.0);
    p.repulsion_strength = -rng.uniform(0.1, 300);
    p.theta = rng.uniform(0.1, 1.0);
    p.center_strength = rng.uniform(0, 1);
    p.velocity_decay = rng.uniform(0.05, 0.95);
    p.alpha_decay = rng.uniform(0.005, 0.2);
    p.seed = round;
    const std::size_t n = round == 0 ? 1000 : 40 + rng.below(200);
    const auto g = testsupport::random_graph(rng, n, 1, n + n / 2);
    for (const auto& l : layout_chain(g, all_context(g), p))
      for (const auto& [id, pt] : l.positions) REQUIRE((std::isfinite(pt.x) && std::isfinite(pt.y)));
  }
}

TEST_CASE("simulate is translation equivariant without centering") {
  Rng rng(77);
  for (int round = 0; round < 10; ++round) {
    const auto g = testsupport::random_graph(rng, 30, 1, 40);
    const auto& slice = g.slices()[0];
    LayoutParams p;
    p.center_strength = 0.0;
    const auto drawable = slice.nodes;
    const auto init = initial_positions(drawable, p.seed, 15.0);
    const double tx = rng.uniform(-500, 500), ty = rng.uniform(-500, 500);
    Positions moved;
    for (const auto& [id, pt] : init) moved[id] = {pt.x + tx, pt.y + ty};
    const auto a = simulate(slice, drawable, init, p);
    const auto b = simulate(slice, drawable, moved, p);
    for (const auto& [id, pt] : a.positions) {
      CHECK(std::abs(b.positions.at(id).x - tx - pt.x) < 1e-6);
      CHECK(std::abs(b.positions.at(id).y - ty - pt.y) < 1e-6);
    }
  }
}
