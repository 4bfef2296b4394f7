#include "hologforge/error.hpp"
#include "hologforge/physical_embedding.hpp"

#include "support/synthetic.hpp"

#include <doctest.h>

#include <cmath>

using namespace hologforge;
using testsupport::Rng;

namespace {

SliceLayout layout_of(std::size_t index, Positions positions) { return SliceLayout{index, std::move(positions)}; }

}  // namespace

TEST_CASE("page presets carry ISO extents and swap on orientation") {
  const auto a4 = PageSpec::preset("A4", Orientation::portrait, 10);
  CHECK(a4.width_mm == 210.0);
  CHECK(a4.height_mm == 297.0);
  const auto a5 = PageSpec::preset("A5", Orientation::landscape, 12);
  CHECK(a5.width_mm == 210.0);
  CHECK(a5.height_mm == 148.0);
  const auto a5p = PageSpec::preset("A5", Orientation::portrait, 12);
  CHECK(a5p.width_mm == 148.0);
  CHECK(a5p.height_mm == 210.0);
  const auto letter = PageSpec::preset("Letter", Orientation::portrait, 0);
  CHECK(letter.width_mm == doctest::Approx(215.9));
  CHECK_THROWS_AS(PageSpec::preset("B7", Orientation::portrait, 0), ParameterError);
  CHECK_THROWS_AS(PageSpec::preset("A5", Orientation::landscape, 74), ParameterError);
  CHECK_THROWS_AS(PageSpec::custom(100, 0, 0), ParameterError);
  CHECK_THROWS_AS(PageSpec::custom(100, 50, -1), ParameterError);
}

TEST_CASE("style validation") {
  StyleSpec s;
  CHECK_NOTHROW(s.validate());
  CHECK(is_hex_color("#C8C8C8"));
  CHECK_FALSE(is_hex_color("C8C8C8"));
  CHECK_FALSE(is_hex_color("#C8C8CZ"));
  s.context_radius_mm = s.focus_radius_mm;
  CHECK_THROWS_AS(s.validate(), ParameterError);
  s = StyleSpec{};
  s.focus_palette.clear();
  CHECK_THROWS_AS(s.validate(), ParameterError);
  s = StyleSpec{};
  s.stroke_min_mm = 3.0;
  CHECK_THROWS_AS(s.validate(), ParameterError);
  s = StyleSpec{};
  CHECK(s.focus_color(0) == s.focus_color(s.focus_palette.size()));
}

TEST_CASE("global bounds") {
  CHECK(global_bounds({layout_of(0, {{"a", {2, 3}}})}) == Bounds{2, 3, 2, 3});
  CHECK(global_bounds({layout_of(0, {{"a", {0, 0}}}), layout_of(1, {{"b", {10, -5}}})}) == Bounds{0, -5, 10, 0});
  CHECK_THROWS_AS(global_bounds({}), ConsistencyError);
  CHECK_THROWS_AS(global_bounds({layout_of(0, {})}), ConsistencyError);

  Rng rng(2);
  for (int round = 0; round < 50; ++round) {
    std::vector<SliceLayout> layouts(1 + rng.below(5));
    Bounds expected{1e300, 1e300, -1e300, -1e300};
    for (auto& l : layouts)
      for (int i = 0; i < 1 + static_cast<int>(rng.below(20)); ++i) {
        const Point p{rng.uniform(-1e3, 1e3), rng.uniform(-1e3, 1e3)};
        l.positions[testsupport::node_name(static_cast<std::size_t>(i))] = p;
        expected = {std::min(expected.min_x, p.x), std::min(expected.min_y, p.y), std::max(expected.max_x, p.x),
                    std::max(expected.max_y, p.y)};
      }
    CHECK(global_bounds(layouts) == expected);
  }
}

TEST_CASE("map_to_page: worked A5 landscape example") {
  const auto page = PageSpec::preset("A5", Orientation::landscape, 15);
  const std::vector<SliceLayout> layouts{layout_of(0, {{"lo", {0, 0}}, {"hi", {100, 50}}}),
                                         layout_of(1, {{"c", {50, 25}}, {"corner", {100, 0}}})};
  const auto t = page_transform(global_bounds(layouts), page);
  CHECK(t.scale_x == doctest::Approx(1.8).epsilon(1e-12));
  const auto out = map_to_page(layouts, page);
  CHECK(std::abs(out[1].positions_mm.at("c").x - 105.0) < 1e-9);
  CHECK(std::abs(out[1].positions_mm.at("c").y - 74.0) < 1e-9);
  CHECK(std::abs(out[1].positions_mm.at("corner").x - 195.0) < 1e-9);
  CHECK(std::abs(out[1].positions_mm.at("corner").y - 29.0) < 1e-9);
}

TEST_CASE("map_to_page: identity when bounds fill an unmargined page") {
  const auto page = PageSpec::preset("A5", Orientation::landscape, 0);
  const std::vector<SliceLayout> layouts{layout_of(0, {{"a", {0, 0}}, {"b", {210, 148}}, {"m", {17.5, 90.25}}})};
  const auto out = map_to_page(layouts, page);
  for (const auto& [id, p] : layouts[0].positions) CHECK(out[0].positions_mm.at(id) == p);
}

TEST_CASE("map_to_page: degenerate bounds centre on the page") {
  const auto page = PageSpec::preset("A5", Orientation::landscape, 12);
  const auto out = map_to_page({layout_of(0, {{"a", {7, -3}}})}, page);
  CHECK(out[0].positions_mm.at("a").x == doctest::Approx(105.0));
  CHECK(out[0].positions_mm.at("a").y == doctest::Approx(74.0));
}

TEST_CASE("map_to_page: registration, containment, aspect preservation") {
  Rng rng(10);
  const auto page = PageSpec::preset("A5", Orientation::landscape, 12);
  for (int round = 0; round < 40; ++round) {
    std::vector<SliceLayout> layouts(3);
    for (std::size_t t = 0; t < 3; ++t) {
      layouts[t].slice_index = t;
      for (std::size_t i = 0; i < 30; ++i)
        layouts[t].positions[testsupport::node_name(i)] = {rng.uniform(-300, 200), rng.uniform(-50, 90)};
    }
    layouts[2].positions["n000"] = layouts[0].positions["n000"];  // shared coordinates
    for (bool stretch : {false, true}) {
      const auto out = map_to_page(layouts, page, stretch);
      CHECK(out[2].positions_mm.at("n000") == out[0].positions_mm.at("n000"));
      for (const auto& l : out)
        for (const auto& [id, p] : l.positions_mm) {
          CHECK(p.x >= page.margin_mm - 1e-6);
          CHECK(p.x <= page.width_mm - page.margin_mm + 1e-6);
          CHECK(p.y >= page.margin_mm - 1e-6);
          CHECK(p.y <= page.height_mm - page.margin_mm + 1e-6);
        }
      if (stretch) continue;
      const auto& a = layouts[1].positions;
      const auto& b = out[1].positions_mm;
      auto d = [](const Point& p, const Point& q) { return std::hypot(p.x - q.x, p.y - q.y); };
      const double ratio_in = d(a.at("n001"), a.at("n002")) / d(a.at("n003"), a.at("n004"));
      const double ratio_out = d(b.at("n001"), b.at("n002")) / d(b.at("n003"), b.at("n004"));
      CHECK(std::abs(ratio_out / ratio_in - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("stretch fills both axes") {
  const auto page = PageSpec::preset("A5", Orientation::landscape, 10);
  const auto out = map_to_page({layout_of(0, {{"a", {0, 0}}, {"b", {1, 1}}})}, page, true);
  CHECK(out[0].positions_mm.at("a") == Point{10, 10});
  CHECK(out[0].positions_mm.at("b").x == doctest::Approx(200));
  CHECK(out[0].positions_mm.at("b").y == doctest::Approx(138));
}

TEST_CASE("stroke width is linear and monotone") {
  StyleSpec s;
  CHECK(stroke_width(1, 1, 9, s) == s.stroke_min_mm);
  CHECK(stroke_width(9, 1, 9, s) == s.stroke_max_mm);
  CHECK(std::abs(stroke_width(5, 1, 9, s) - (s.stroke_min_mm + s.stroke_max_mm) / 2.0) < 1e-9);
  CHECK(stroke_width(4, 4, 4, s) == s.stroke_min_mm);
  CHECK_THROWS_AS(stroke_width(10, 1, 9, s), ConsistencyError);
  CHECK_THROWS_AS(stroke_width(0.5, 1, 9, s), ConsistencyError);
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const double a = rng.uniform(1, 100), b = rng.uniform(1, 100);
    if (a < b) CHECK(stroke_width(a, 1, 100, s) < stroke_width(b, 1, 100, s));
  }
}
