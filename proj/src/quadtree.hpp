#pragma once

#include <span>
#include <vector>

namespace hologforge::detail {

// Barnes-Hut quadtree over a fixed point set. The root square is anchored at
// the point set's minimum corner, so translating every point translates the
// cell structure with it.
class QuadTree {
 public:
  struct Cell {
    double x0 = 0.0, y0 = 0.0, size = 0.0;
    int child[4] = {-1, -1, -1, -1};
    int first = -1;        // leaf chain head (point index), -1 for internal cells
    double value = 0.0;    // summed strength
    double cx = 0.0, cy = 0.0;  // strength-weighted centre
    bool leaf() const { return child[0] < 0 && child[1] < 0 && child[2] < 0 && child[3] < 0; }
  };

  QuadTree(std::span<const double> xs, std::span<const double> ys);

  // Sums `strengths` bottom-up into cell values and centres.
  void accumulate(std::span<const double> strengths);

  const std::vector<Cell>& cells() const { return cells_; }
  // Next point in the same leaf chain, -1 at the end.
  int next(int point) const { return next_[point]; }
  double px(int point) const { return xs_[point]; }
  double py(int point) const { return ys_[point]; }

  // Pre-order traversal; `visit(cell)` returns true to skip the cell's children.
  template <typename Visit>
  void visit(Visit&& fn) const {
    if (cells_.empty()) return;
    std::vector<int> stack{0};
    while (!stack.empty()) {
      const int c = stack.back();
      stack.pop_back();
      if (fn(cells_[c])) continue;
      for (int i = 3; i >= 0; --i)
        if (cells_[c].child[i] >= 0) stack.push_back(cells_[c].child[i]);
    }
  }

 private:
  void insert(int cell, int point, int depth);
  int quadrant(const Cell& c, int point) const;
  void accumulate_cell(int cell, std::span<const double> strengths);

  std::span<const double> xs_, ys_;
  std::vector<Cell> cells_;
  std::vector<int> next_;
};

}  // namespace hologforge::detail
