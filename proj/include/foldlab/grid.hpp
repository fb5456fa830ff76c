#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace foldlab {

// Axis-aligned box; lo/hi have one entry per coordinate.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  std::size_t dims() const { return lo.size(); }
  bool contains(std::span<const double> p, double slack = 0.0) const;
  bool contains(const Box& inner, double slack = 1e-12) const;
  double volume() const;
  static Box cube(std::size_t dims, double lo, double hi);
};

struct GridAxis {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t count = 1;

  double spacing() const { return (hi - lo) / static_cast<double>(count); }
  double node(std::size_t i) const { return lo + (static_cast<double>(i) + 0.5) * spacing(); }
};

// Tensor midpoint grid. Nodes are ordered row-major with the last axis
// varying fastest; every node carries the same weight (product of spacings).
class Grid {
 public:
  Grid() = default;
  explicit Grid(std::vector<GridAxis> axes);
  Grid(const Box& box, std::span<const std::size_t> counts);

  std::size_t dims() const { return axes_.size(); }
  const std::vector<GridAxis>& axes() const { return axes_; }
  const GridAxis& axis(std::size_t a) const { return axes_[a]; }
  std::size_t size() const { return size_; }
  double weight() const { return weight_; }
  Box box() const;

  // Coordinates of node `index` written to `out` (length dims()).
  void node(std::size_t index, std::span<double> out) const;
  std::vector<double> node(std::size_t index) const;
  // Number of nodes along the last axis (length of one contiguous line).
  std::size_t line_length() const { return axes_.back().count; }
  std::size_t line_count() const { return size_ / line_length(); }

  // Same box, every axis count doubled.
  Grid refined() const;

 private:
  std::vector<GridAxis> axes_;
  std::size_t size_ = 0;
  double weight_ = 0.0;
};

}  // namespace foldlab
