#include "quadtree.hpp"

#include <algorithm>
#include <cmath>

namespace hologforge::detail {

namespace {
constexpr int kMaxDepth = 48;
}

QuadTree::QuadTree(std::span<const double> xs, std::span<const double> ys)
    : xs_(xs), ys_(ys), next_(xs.size(), -1) {
  if (xs.empty()) return;
  const auto [minx, maxx] = std::minmax_element(xs.begin(), xs.end());
  const auto [miny, maxy] = std::minmax_element(ys.begin(), ys.end());
  Cell root;
  root.x0 = *minx;
  root.y0 = *miny;
  root.size = std::max(*maxx - *minx, *maxy - *miny);
  if (!(root.size > 0.0)) root.size = 1.0;
  cells_.reserve(2 * xs.size() + 1);
  cells_.push_back(root);
  for (int i = 0; i < static_cast<int>(xs.size()); ++i) insert(0, i, 0);
}

int QuadTree::quadrant(const Cell& c, int point) const {
  const double half = c.size / 2;
  const int right = xs_[point] >= c.x0 + half ? 1 : 0;
  const int below = ys_[point] >= c.y0 + half ? 1 : 0;
  return right | (below << 1);
}

void QuadTree::insert(int cell, int point, int depth) {
  for (;;) {
    Cell& c = cells_[cell];
    if (!c.leaf()) {
      const int q = quadrant(c, point);
      if (c.child[q] >= 0) {
        cell = c.child[q];
        ++depth;
        continue;
      }
      const double half = c.size / 2;
      Cell child;
      child.x0 = c.x0 + (q & 1) * half;
      child.y0 = c.y0 + (q >> 1) * half;
      child.size = half;
      child.first = point;
      const int id = static_cast<int>(cells_.size());
      cells_[cell].child[q] = id;
      cells_.push_back(child);
      return;
    }
    if (c.first < 0) {
      c.first = point;
      return;
    }
    const int head = c.first;
    if ((xs_[head] == xs_[point] && ys_[head] == ys_[point]) || depth >= kMaxDepth) {
      next_[point] = head;
      c.first = point;
      return;
    }
    // Split: push the existing chain one level down, then retry this cell.
    const int q = quadrant(c, head);
    const double half = c.size / 2;
    Cell child;
    child.x0 = c.x0 + (q & 1) * half;
    child.y0 = c.y0 + (q >> 1) * half;
    child.size = half;
    child.first = head;
    c.first = -1;
    const int id = static_cast<int>(cells_.size());
    cells_[cell].child[q] = id;
    cells_.push_back(child);
  }
}

void QuadTree::accumulate(std::span<const double> strengths) {
  if (!cells_.empty()) accumulate_cell(0, strengths);
}

void QuadTree::accumulate_cell(int cell, std::span<const double> strengths) {
  Cell& c = cells_[cell];
  if (c.leaf()) {
    double strength = 0.0;
    for (int p = c.first; p >= 0; p = next_[p]) strength += strengths[p];
    c.value = strength;
    if (c.first >= 0) {
      c.cx = xs_[c.first];
      c.cy = ys_[c.first];
    }
    return;
  }
  double strength = 0.0, weight = 0.0, x = 0.0, y = 0.0;
  for (int i = 0; i < 4; ++i) {
    const int k = cells_[cell].child[i];
    if (k < 0) continue;
    accumulate_cell(k, strengths);
    const Cell& q = cells_[k];
    const double w = std::abs(q.value);
    if (w == 0.0) continue;
    strength += q.value;
    weight += w;
    x += w * q.cx;
    y += w * q.cy;
  }
  Cell& self = cells_[cell];
  self.value = strength;
  if (weight > 0.0) {
    self.cx = x / weight;
    self.cy = y / weight;
  }
}

}  // namespace hologforge::detail
